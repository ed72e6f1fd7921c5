import csv
import io
import json
from importlib import resources

import jsonschema
import pytest

from eccensus.cli import main

SCHEMA = json.loads(resources.files("eccensus").joinpath("schema/verify_report.schema.json").read_text())


@pytest.fixture(autouse=True)
def cache(tmp_path, monkeypatch):
    monkeypatch.setenv("ECCENSUS_CACHE", str(tmp_path / "cache"))
    return tmp_path / "cache"


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def rows(text):
    return list(csv.DictReader(io.StringIO(text)))


def test_census_group(capsys, tmp_path, cache):
    out = tmp_path / "g.csv"
    code, _, _ = run(capsys, "census", "--group", "3x9", "--out", str(out))
    assert code == 0
    raw = out.read_bytes()
    assert b"\r" not in raw
    rs = rows(raw.decode())
    assert [int(r["p"]) for r in rs] == [19, 23, 29, 31, 37]
    assert all(r["N"] == "27" and r["match"] == "1" and "/" in r["weighted"] for r in rs)
    assert list(cache.glob("shape-v1-p*.csv"))


def test_census_order(capsys):
    code, out, err = run(capsys, "census", "--order", "7", "--m", "1")
    assert code == 0
    rs = rows(out)
    assert [int(r["p"]) for r in rs] == [5, 7, 11, 13]
    assert rs[0]["weighted"] == "1/2"


def test_logging_goes_to_stderr_only(tmp_path):
    import subprocess
    import sys

    proc = subprocess.run(
        [sys.executable, "-m", "eccensus.cli", "census", "--order", "7", "--m", "1"],
        capture_output=True, text=True, env={"ECCENSUS_CACHE": str(tmp_path), "PATH": ""},
    )
    assert proc.returncode == 0
    assert "excluded" in proc.stderr and "excluded" not in proc.stdout
    assert proc.stdout.splitlines()[0] == "N,N1,N2,m,p,weighted,class_value,match"


@pytest.mark.parametrize("argv", [("census", "--order", "4"), ("census", "--order", "9", "--m", "2"), ("census",), ("census", "--group", "2x3"), ("verify", "nosuch"), ("constants", "bdh", "--x", "10", "--y", "100", "--q", "1")])
def test_invalid_config_exits_2(capsys, argv):
    assert run(capsys, *argv)[0] == 2


def test_verify_schoof_passes(capsys):
    code, out, _ = run(capsys, "verify", "schoof", "--nmax", "60")
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert code == 0 and report["passed"] and report["runs"][0]["cases"] > 0


def test_verify_lemma14_original_fails(capsys, tmp_path):
    out = tmp_path / "r.json"
    code, _, _ = run(capsys, "verify", "lemma14", "--variant", "original", "--nmax", "81", "--out", str(out))
    report = json.loads(out.read_text())
    jsonschema.validate(report, SCHEMA)
    assert code == 3 and not report["passed"]
    assert report["runs"][0]["failures"][0]["N"] == 9


@pytest.mark.parametrize("suite, extra", [("sieve", ["--gmax", "60"]), ("lemma14", ["--nmax", "81"]), ("assembly", ["--gmax", "500"]), ("gl2", ["--ell-cutoff", "7"]), ("aut", ["--gmax", "60"])])
def test_verify_suites_pass(capsys, suite, extra):
    code, out, _ = run(capsys, "verify", suite, *extra)
    report = json.loads(out)
    jsonschema.validate(report, SCHEMA)
    assert code == 0, report


def test_verify_gl2_reports_divisible_residues_as_skipped(capsys):
    _, out, _ = run(capsys, "verify", "gl2", "--ell-cutoff", "5")
    run_ = json.loads(out)["runs"][0]
    assert sorted(s["ell"] for s in run_["skipped"]) == [3, 5]


def test_constants_kg_both(capsys):
    code, out, _ = run(capsys, "constants", "kg", "--group", "3x3", "--variant", "both")
    rs = {r["variant"]: r for r in rows(out)}
    assert code == 0
    assert rs["erratum"]["finite"] == "8/9" and rs["original"]["finite"] == "20/27"
    assert rs["erratum"]["differs"] == "1"


def test_constants_k0(capsys):
    code, out, _ = run(capsys, "constants", "k0", "--n", "9", "--m", "3", "--u", "300", "--v", "10")
    r = rows(out)[0]
    assert code == 0 and r["euler_finite"] == "1/6" and abs(float(r["rel_gap"])) < 0.05


def test_constants_bdh_json(capsys):
    code, out, _ = run(capsys, "constants", "bdh", "--x", "100000", "--y", "1000", "--q", "100", "--format", "json")
    rec = json.loads(out)[0]
    assert code == 0 and rec["variance"] > 0 and rec["comparator"] > 0


@pytest.mark.parametrize("what, extra", [("kn", ["--order", "9"]), ("knm", ["--order", "9", "--m", "3"]), ("mps", ["--x", "1000"]), ("classnumbers", ["--dmin", "-50"]), ("factors", ["--order", "45", "--m", "3", "--f", "3"])])
def test_constants_tables(capsys, what, extra):
    code, out, _ = run(capsys, "constants", what, *extra)
    assert code == 0 and len(rows(out)) >= 1


def test_factor_rows_are_exact(capsys):
    _, out, _ = run(capsys, "constants", "factors", "--order", "9", "--m", "3", "--f", "3", "--ell-cutoff", "7", "--variant", "both")
    rs = rows(out)
    f6 = {r["variant"]: (r["numerator"], r["denominator"], r["differs"]) for r in rs if r["ell"] == "3" and r["kind"] == "F6"}
    assert f6 == {"erratum": ("8", "9", "1"), "original": ("20", "27", "1")}


def test_deterministic_across_threads(capsys, tmp_path, monkeypatch):
    outs = []
    for threads in ("1", "2"):
        monkeypatch.setenv("ECCENSUS_CACHE", str(tmp_path / f"c{threads}"))
        path = tmp_path / f"out{threads}.csv"
        assert run(capsys, "census", "--nmax", "45", "--threads", threads, "--out", str(path))[0] == 0
        outs.append(path.read_bytes())
    assert outs[0] == outs[1]
    # a second run against a warm cache is byte-identical too
    path = tmp_path / "again.csv"
    run(capsys, "census", "--nmax", "45", "--out", str(path))
    assert path.read_bytes() == outs[1]
