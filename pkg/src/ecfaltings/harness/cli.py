"""Command line: run the verification pipeline over a corpus and write reports."""

from __future__ import annotations

import argparse
import sys
from importlib import resources
from pathlib import Path

from mpmath import mpf

from ..bounds import all_constants
from ..errors import EcFaltingsError
from .corpus import FORMATS, emit, ingest
from .pipeline import CHECKS, Config, run_corpus


def bundled_corpus() -> Path:
    return Path(str(resources.files("ecfaltings.harness") / "data" / "corpus.jsonl"))


def _tolerance(text: str) -> mpf:
    try:
        tol = mpf(text)
    except (ValueError, TypeError):
        raise argparse.ArgumentTypeError(f"not a decimal: {text!r}")
    if not tol > 0:
        raise argparse.ArgumentTypeError("tolerance must be positive")
    return tol


def _positive(text: str) -> int:
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return n


def _checks(text: str) -> frozenset:
    if text == "all":
        return frozenset(CHECKS)
    names = frozenset(t.strip() for t in text.split(",") if t.strip())
    unknown = names - set(CHECKS)
    if unknown:
        raise argparse.ArgumentTypeError(f"unknown checks {sorted(unknown)}; choose from {','.join(CHECKS)}")
    return names


def _dimension(text: str) -> int:
    key, _, value = text.partition("=")
    if key.strip() != "g" or not value.strip().isdigit() or int(value) < 1:
        raise argparse.ArgumentTypeError("expected g=G with G a positive integer")
    return int(value)


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="ecfaltings",
                                description="Certified Faltings height, regulator and bound checks "
                                            "for elliptic curves over Q.")
    p.add_argument("--corpus", type=Path, default=None,
                   help="corpus file (.jsonl or .csv); default: bundled fixture corpus")
    p.add_argument("--out", default="-", help="report path, '-' for stdout (default)")
    p.add_argument("--format", choices=FORMATS, default="jsonl", help="report format")
    p.add_argument("--tol", type=_tolerance, default=mpf(10) ** -12,
                   help="target radius for certified values (default 1e-12)")
    p.add_argument("--max-bits", type=_positive, default=4096, help="precision ceiling in bits")
    p.add_argument("--checks", type=_checks, default=frozenset(CHECKS),
                   help=f"comma-separated subset of {','.join(CHECKS)} (default all)")
    p.add_argument("--ls-box", type=int, default=10, help="coefficient box for the Lang-Silverman scan")
    p.add_argument("--jobs", type=_positive, default=1, help="worker processes")
    p.add_argument("--plots", type=Path, default=None,
                   help="directory for figures (default: next to --out when it is a file)")
    p.add_argument("--no-plots", action="store_true", help="do not render figures")
    p.add_argument("--constants", type=_dimension, metavar="g=G", default=None,
                   help="print the explicit constants for dimension G and exit")
    return p


def print_constants(g: int, out=None):
    out = out or sys.stdout
    for name, value in all_constants(g).items():
        line = f"{name} = {value}"
        if value.exact is not None and value.exact != 0 and _fits(value.exact):
            line += f"  [exactly {value.exact}]"
        out.write(line + "\n")


def _fits(q, digits: int = 40) -> bool:
    return len(str(abs(q.numerator))) + len(str(q.denominator)) <= digits


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.constants is not None:
        print_constants(args.constants)
        return 0
    corpus = args.corpus or bundled_corpus()
    fmt_in = "csv" if corpus.suffix.lower() == ".csv" else "jsonl"
    try:
        entries = ingest(corpus, fmt_in)
    except (OSError, EcFaltingsError) as exc:
        print(f"error: {corpus}: {exc}", file=sys.stderr)
        return 2
    config = Config(tol=args.tol, max_bits=args.max_bits, checks=args.checks,
                    ls_box=args.ls_box, jobs=args.jobs)
    reports = [r.to_json() for r in run_corpus(entries, config)]
    emit(reports, args.out, args.format)

    plot_dir = args.plots
    if plot_dir is None and args.out != "-":
        plot_dir = Path(args.out).parent
    if plot_dir is not None and not args.no_plots:
        from .plots import render
        stem = Path(args.out).stem if args.out != "-" else "report"
        render(reports, plot_dir, stem)

    counts = {}
    for r in reports:
        for v in r["verdicts"].values():
            counts[v["status"]] = counts.get(v["status"], 0) + 1
    summary = ", ".join(f"{k} {counts[k]}" for k in sorted(counts))
    print(f"{len(reports)} curves; verdicts: {summary}", file=sys.stderr)
    return 1 if counts.get("Fail") else 0


if __name__ == "__main__":
    sys.exit(main())
