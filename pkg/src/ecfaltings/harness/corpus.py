"""Corpus entries and report serialization (JSONL and CSV)."""

from __future__ import annotations

import csv
import io
import json
import re
import sys
from dataclasses import dataclass
from fractions import Fraction
from pathlib import Path

import mpmath
from mpmath import mp, mpf

from ..errors import ParseError
from ..errreal import ErrReal

FORMATS = ("jsonl", "csv")
_RATIONAL = re.compile(r"^\s*([+-]?\d+)(?:\s*/\s*(\d+))?\s*$")
VALUE_DIGITS = 25
ERR_DIGITS = 3


def parse_rational(text) -> Fraction:
    """'p/q' or 'p' (ints accepted too); decimals are rejected as lossy."""
    if isinstance(text, bool):
        raise ValueError(f"not a rational: {text!r}")
    if isinstance(text, int):
        return Fraction(text)
    if not isinstance(text, str):
        raise ValueError(f"not a rational: {text!r}")
    m = _RATIONAL.match(text)
    if not m:
        raise ValueError(f"not a rational: {text!r}")
    num, den = int(m.group(1)), int(m.group(2) or 1)
    if den == 0:
        raise ValueError(f"zero denominator in {text!r}")
    return Fraction(num, den)


def format_rational(q: Fraction) -> str:
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


@dataclass(frozen=True)
class CorpusEntry:
    label: str
    ainvs: tuple[Fraction, Fraction, Fraction, Fraction, Fraction]
    generators: tuple[tuple[Fraction, Fraction], ...] = ()
    known_rank: int | None = None

    def to_json(self) -> dict:
        out = {"label": self.label, "ainvs": [format_rational(a) for a in self.ainvs]}
        if self.generators:
            out["generators"] = [[format_rational(x), format_rational(y)] for x, y in self.generators]
        if self.known_rank is not None:
            out["rank"] = self.known_rank
        return out

    @classmethod
    def from_json(cls, obj) -> "CorpusEntry":
        if not isinstance(obj, dict):
            raise ValueError("entry must be a JSON object")
        unknown = set(obj) - {"label", "ainvs", "generators", "rank"}
        if unknown:
            raise ValueError(f"unknown keys {sorted(unknown)}")
        label = obj.get("label")
        if not isinstance(label, str) or not label:
            raise ValueError("missing label")
        ainvs = obj.get("ainvs")
        if not isinstance(ainvs, list) or len(ainvs) != 5:
            raise ValueError("ainvs must be a list of five rationals")
        gens = obj.get("generators") or []
        if not isinstance(gens, list) or any(not isinstance(g, list) or len(g) != 2 for g in gens):
            raise ValueError("generators must be a list of [x, y] pairs")
        rank = obj.get("rank")
        if rank is not None and (not isinstance(rank, int) or isinstance(rank, bool) or rank < 0):
            raise ValueError("rank must be a non-negative integer")
        return cls(label, tuple(parse_rational(a) for a in ainvs),
                   tuple((parse_rational(x), parse_rational(y)) for x, y in gens), rank)


# -- corpus files ---------------------------------------------------------

CORPUS_CSV_COLUMNS = ["label", "a1", "a2", "a3", "a4", "a6", "generators", "rank"]


def _entry_from_csv_row(row: dict) -> CorpusEntry:
    gens = []
    text = (row.get("generators") or "").strip()
    if text:
        for pair in text.split(";"):
            xy = pair.split(",")
            if len(xy) != 2:
                raise ValueError(f"bad generator {pair!r}")
            gens.append(xy)
    rank = (row.get("rank") or "").strip()
    obj = {"label": row.get("label"), "ainvs": [row.get(k) for k in CORPUS_CSV_COLUMNS[1:6]],
           "generators": gens}
    if rank:
        obj["rank"] = int(rank)
    return CorpusEntry.from_json(obj)


def ingest(path, fmt: str = "jsonl") -> list[CorpusEntry]:
    """Read corpus entries; ParseError carries the 1-based line number."""
    text = Path(path).read_text(encoding="utf-8")
    return ingest_text(text, fmt)


def ingest_text(text: str, fmt: str = "jsonl") -> list[CorpusEntry]:
    entries = []
    if fmt == "jsonl":
        for n, line in enumerate(text.splitlines(), 1):
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            try:
                entries.append(CorpusEntry.from_json(json.loads(line)))
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), n) from exc
    elif fmt == "csv":
        reader = csv.DictReader(io.StringIO(text))
        if reader.fieldnames is None or set(CORPUS_CSV_COLUMNS[:6]) - set(reader.fieldnames):
            raise ParseError("CSV header must contain label,a1,a2,a3,a4,a6", 1)
        for row in reader:
            try:
                entries.append(_entry_from_csv_row(row))
            except (ValueError, TypeError) as exc:
                raise ParseError(str(exc), reader.line_num) from exc
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return entries


def emit_corpus(entries, path, fmt: str = "jsonl"):
    Path(path).write_text(corpus_text(entries, fmt), encoding="utf-8")


def corpus_text(entries, fmt: str = "jsonl") -> str:
    if fmt == "jsonl":
        return "".join(json.dumps(e.to_json()) + "\n" for e in entries)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CORPUS_CSV_COLUMNS)
    for e in entries:
        w.writerow([e.label, *(format_rational(a) for a in e.ainvs),
                    ";".join(f"{format_rational(x)},{format_rational(y)}" for x, y in e.generators),
                    "" if e.known_rank is None else e.known_rank])
    return buf.getvalue()


# -- ball serialization ---------------------------------------------------

def _round_up_decimal(x: mpf, digits: int) -> str:
    """Decimal string >= x with ``digits`` significant digits."""
    if x == 0:
        return "0"
    with mp.workprec(128):
        e = int(mpmath.floor(mpmath.log10(x))) - digits + 1
        m = int(mpmath.ceil(x / mpf(10) ** e))
        if m >= 10 ** digits:
            m = -(-m // 10)
            e += 1
    d = str(m)
    return f"{d[0]}.{d[1:]}e{e + digits - 1}" if digits > 1 else f"{d}e{e}"


def errreal_to_json(x: ErrReal | None):
    """{value, err, bits}; err is rounded up to cover the decimal rounding of value.

    A missing ball keeps the same keys (all null) so CSV columns stay fixed.
    """
    if x is None:
        return {"value": None, "err": None, "bits": None}
    with mp.workprec(max(x.prec, 128)):
        value = mpmath.nstr(x.value, VALUE_DIGITS, min_fixed=-4, max_fixed=8)
        err = (x.err + abs(mpf(value) - x.value)) * (1 + mpf(2) ** -40)
    return {"value": value, "err": _round_up_decimal(err, ERR_DIGITS), "bits": x.prec}


def errreal_from_json(obj) -> ErrReal | None:
    if obj is None or obj.get("value") in (None, ""):
        return None
    prec = int(obj["bits"])
    with mp.workprec(prec):
        return ErrReal(mpf(obj["value"]), mpf(obj["err"]) * (1 + mpf(2) ** -40), prec)


# -- reports --------------------------------------------------------------

def flatten(obj: dict, prefix: str = "") -> dict[str, str]:
    """Nested report dict -> ordered {dotted key: string cell}."""
    out = {}
    for k, v in obj.items():
        key = f"{prefix}{k}"
        if isinstance(v, dict):
            out.update(flatten(v, key + "."))
        elif isinstance(v, list):
            out[key] = json.dumps(v, separators=(",", ":"))
        elif v is None:
            out[key] = ""
        elif isinstance(v, bool):
            out[key] = "true" if v else "false"
        else:
            out[key] = str(v)
    return out


def report_lines(report_dicts, fmt: str) -> str:
    if fmt == "jsonl":
        return "".join(json.dumps(d, ensure_ascii=False, separators=(", ", ": ")) + "\n"
                       for d in report_dicts)
    if fmt == "csv":
        rows = [flatten(d) for d in report_dicts]
        buf = io.StringIO()
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows(rows)
        return buf.getvalue()
    raise ValueError(f"unknown format {fmt!r}")


def emit(report_dicts, path, fmt: str = "jsonl"):
    text = report_lines(report_dicts, fmt)
    if str(path) == "-":
        sys.stdout.write(text)
    else:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text, encoding="utf-8")


def read_reports(path, fmt: str = "jsonl") -> list[dict]:
    """Reports as flat {dotted key: string} rows, comparable across formats."""
    text = Path(path).read_text(encoding="utf-8")
    if fmt == "jsonl":
        return [flatten(json.loads(line)) for line in text.splitlines() if line.strip()]
    return [dict(row) for row in csv.DictReader(io.StringIO(text))]
