import csv
import json
import re
import subprocess
import sys

import mpmath
import pytest
from mpmath import mp, mpf

from ecfaltings.harness.cli import build_parser, main
from ecfaltings.harness.corpus import corpus_text, ingest_text

SMALL = ('{"label": "37a1", "ainvs": ["0", "0", "1", "-1", "0"], "generators": [["0", "0"]], "rank": 1}\n'
         '{"label": "32a2", "ainvs": ["0", "0", "0", "-1", "0"], "rank": 0}\n')
TOWER = re.compile(r"^(\S+) = ([+-])exp\^(\d+)\((\d\.\d{19})\)(\^-1)?(  \[exactly (\S+)\])?$")


def test_constants_g1(capsys):
    assert main(["--constants", "g=1"]) == 0
    lines = capsys.readouterr().out.splitlines()
    parsed = {m.group(1): m for m in map(TOWER.match, lines) if m}
    assert len(parsed) == len(lines) - 2  # the two zero constants print as "0"
    assert "c6_jacobian = 0" in lines and "c17_jacobian = 0" in lines
    assert parsed["c"].group(7) == "1/8916100448256"
    assert parsed["c0"].group(7) == "-8916100448256"
    assert parsed["c2"].group(7) == "1/17"
    assert parsed["c4(d=1)"].group(7) == "8916100448256"
    assert parsed["c5_jacobian"].group(7) == "1/12"
    assert parsed["c16_jacobian"].group(7) == "1/248832"
    # 12^12 = exp^3(t) with t = log log (12 log 12)
    with mp.workprec(128):
        t = mpmath.log(mpmath.log(12 * mpmath.log(12)))
        assert parsed["c"].group(3) == "3" and parsed["c"].group(5) == "^-1"
        assert abs(mpf(parsed["c"].group(4)) - t) < mpf(10) ** -18


def test_constants_g3_not_expanded(capsys):
    assert main(["--constants", "g=3"]) == 0
    out = capsys.readouterr().out
    c_line = next(l for l in out.splitlines() if l.startswith("c = "))
    assert "exactly" not in c_line
    assert int(TOWER.match(c_line).group(3)) >= 4


@pytest.mark.parametrize("bad", ["g=0", "h=1", "g=x", "3"])
def test_constants_bad_argument(bad):
    with pytest.raises(SystemExit):
        build_parser().parse_args(["--constants", bad])


@pytest.mark.parametrize("flags", [["--tol", "-1"], ["--tol", "abc"], ["--jobs", "0"],
                                   ["--checks", "bogus"], ["--format", "xml"]])
def test_bad_flags(flags):
    with pytest.raises(SystemExit):
        build_parser().parse_args(flags)


def test_defaults():
    a = build_parser().parse_args([])
    assert a.tol == mpf(10) ** -12 and a.max_bits == 4096 and a.ls_box == 10 and a.jobs == 1
    assert a.format == "jsonl" and a.out == "-"


def test_report_with_plots(tmp_path, capsys):
    src = tmp_path / "small.jsonl"
    src.write_text(SMALL)
    out = tmp_path / "out" / "report.jsonl"
    assert main(["--corpus", str(src), "--out", str(out)]) == 0
    rows = [json.loads(l) for l in out.read_text().splitlines()]
    assert [r["label"] for r in rows] == ["37a1", "32a2"]
    assert all(v["status"] == "Pass" for r in rows for v in r["verdicts"].values())
    for name in ("height_conductor", "matrix_lemma", "lang_silverman"):
        png = out.parent / f"report_{name}.png"
        assert png.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
    assert "2 curves; verdicts: Pass 10" in capsys.readouterr().err


def test_csv_report_and_csv_corpus(tmp_path):
    src = tmp_path / "small.csv"
    src.write_text(corpus_text(ingest_text(SMALL), "csv"))
    out = tmp_path / "report.csv"
    assert main(["--corpus", str(src), "--out", str(out), "--format", "csv", "--no-plots"]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [r["label"] for r in rows] == ["37a1", "32a2"]
    assert rows[0]["verdicts.height_conductor.status"] == "Pass"
    assert rows[0]["hF_plus.value"].startswith("0.4947612684920056809")
    assert not list(tmp_path.glob("*.png"))


def test_plots_directory_with_stdout(tmp_path, capsys):
    src = tmp_path / "small.jsonl"
    src.write_text(SMALL)
    assert main(["--corpus", str(src), "--plots", str(tmp_path / "figs"),
                 "--checks", "height_conductor,matrix_lemma"]) == 0
    out = capsys.readouterr().out
    assert len(out.splitlines()) == 2
    assert sorted(p.name for p in (tmp_path / "figs").iterdir()) == [
        "report_height_conductor.png", "report_lang_silverman.png", "report_matrix_lemma.png"]


def test_ingest_error_exit_code(tmp_path, capsys):
    src = tmp_path / "bad.jsonl"
    src.write_text(SMALL + '{"label": "x", "ainvs": ["0", "0", "0", "1/0", "0"]}\n')
    assert main(["--corpus", str(src)]) == 2
    assert "line 3" in capsys.readouterr().err


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "ecfaltings", "--constants", "g=1"],
                         capture_output=True, text=True, check=True)
    assert res.stdout.startswith("c = +exp^3(")
