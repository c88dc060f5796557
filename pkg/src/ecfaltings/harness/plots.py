"""Figures for a report run (matplotlib, non-interactive backend)."""

from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402

FIGURES = ("height_conductor", "matrix_lemma", "lang_silverman")


def _num(ball):
    return None if ball is None or ball.get("value") in (None, "") else float(ball["value"])


def _pairs(reports, fx, fy):
    pts = [(fx(r), fy(r), r["label"]) for r in reports]
    return [(x, y, lab) for x, y, lab in pts if x is not None and y is not None]


def _scatter(ax, pts):
    ax.scatter([p[0] for p in pts], [p[1] for p in pts], s=18, color="tab:blue", zorder=3)
    for x, y, lab in pts:
        ax.annotate(lab, (x, y), fontsize=6, xytext=(3, 3), textcoords="offset points")


def height_conductor_figure(reports):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    pts = _pairs(reports, lambda r: None if _num(r["log_N0"]) is None else _num(r["log_N0"]) / 12,
                 lambda r: _num(r["hF_plus"]))
    _scatter(ax, pts)
    top = max([max(x, y) for x, y, _ in pts], default=1.0) * 1.05
    ax.plot([0, top], [0, top], color="tab:red", lw=1, label="hF+ = log N0 / 12")
    ax.set_xlabel("log N0 / 12")
    ax.set_ylabel("hF+")
    ax.set_title("Height versus conductor")
    ax.legend(loc="upper left", fontsize=8)
    fig.tight_layout()
    return fig


def matrix_lemma_figure(reports):
    fig, ax = plt.subplots(figsize=(6, 4.5))
    pts = _pairs(reports, lambda r: _num(r["hF_plus"]), lambda r: _num(r["rho_sq_inv"]))
    _scatter(ax, pts)
    xs = [p[0] for p in pts] or [0.0, 1.0]
    lo, hi = min(0.0, min(xs)), max(xs) * 1.05
    ax.plot([lo, hi], [16 * lo + 39, 16 * hi + 39], color="tab:red", lw=1, label="16 hF+ + 39")
    ax.set_xlabel("hF+")
    ax.set_ylabel("rho^-2")
    ax.set_yscale("log")
    ax.set_title("Injectivity diameter bound")
    ax.legend(loc="center right", fontsize=8)
    fig.tight_layout()
    return fig


def lang_silverman_figure(reports):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    rows = [r for r in reports if _num(r["ls_ratio"]) is not None]
    idx = range(len(rows))
    ax.bar([i - 0.2 for i in idx], [_num(r["ls_ratio"]) for r in rows], width=0.4,
           label="min hhat / max(1, hF+)")
    ax.bar([i + 0.2 for i in idx], [_num(r["ls_lambda1_ratio"]) or 0 for r in rows], width=0.4,
           label="lambda_1^2 / max(1, hF+)")
    ax.set_xticks(list(idx), [r["label"] for r in rows], rotation=45, ha="right", fontsize=7)
    ax.set_ylabel("ratio")
    ax.set_title("Lang-Silverman scan")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return fig


def render(reports, directory, stem: str = "report") -> list[Path]:
    """Write one PNG per figure into ``directory``; returns the paths."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    makers = {"height_conductor": height_conductor_figure, "matrix_lemma": matrix_lemma_figure,
              "lang_silverman": lang_silverman_figure}
    paths = []
    for name in FIGURES:
        fig = makers[name](reports)
        path = directory / f"{stem}_{name}.png"
        fig.savefig(path, dpi=120, metadata={"Software": None})
        plt.close(fig)
        paths.append(path)
    return paths
