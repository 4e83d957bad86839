import csv
import json
from fractions import Fraction

import pytest

from quartic.cli import EX_USAGE, RunConfig, main
from quartic.maps import closed_form_count
from quartic.topo import closed_form_f


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    return code, capsys.readouterr()


@pytest.mark.parametrize("re,im,want", [(1, 0, "OneCut"), (-3, 0, "TwoCut"), (-2, 0, "MultiCritical(-2)"),
                                        (-1, 2, "ThreeCut")])
def test_classify(capsys, re, im, want):
    code, out = run(capsys, "classify", re, im)
    assert code == 0
    assert out.out.splitlines()[0] == want


def test_classify_json(capsys):
    code, out = run(capsys, "classify", "--json", "--verify", "--", -1, 2)
    d = json.loads(out.out)
    assert code == 0 and d["schemaVersion"] == 1 and d["regime"] == "ThreeCut" and d["verified"]


def test_classify_mismatch_exit(capsys, monkeypatch):
    import quartic.phase as ph
    monkeypatch.setattr(ph._Locator, "region", lambda self, s: ph.ONE_CUT)
    code, out = run(capsys, "classify", "--verify", "--", -1, 2)
    assert code == 2 and "VerificationMismatch" in out.err


@pytest.mark.parametrize("ext", ["csv", "svg", "json"])
def test_trace_exports(capsys, tmp_path, ext):
    p = tmp_path / f"g.{ext}"
    code, _ = run(capsys, "trace", "--sigma", 1, 0, "--regime", "OneCut", "--out", p)
    assert code == 0 and p.exists()
    if ext == "csv":
        rows = list(csv.reader(open(p)))
        assert rows[0] == ["trajectory", "seed", "terminal", "re", "im"]
        assert len(rows) > 10
    elif ext == "json":
        d = json.loads(p.read_text())
        assert d["schemaVersion"] == 1 and d["census"]["complete"]
    else:
        assert "<svg" in p.read_text()


def test_trace_bad_regime(capsys, tmp_path):
    code, out = run(capsys, "trace", "--sigma", 1, 0, "--regime", "FourCut", "--out", tmp_path / "x.csv")
    assert code == EX_USAGE
    code, _ = run(capsys, "trace", "--sigma", 1, 0, "--regime", "Boundary", "--out", tmp_path / "x.csv")
    assert code == EX_USAGE


def test_trace_bad_extension(capsys, tmp_path):
    code, _ = run(capsys, "trace", "--sigma", 1, 0, "--regime", "OneCut", "--out", tmp_path / "x.txt")
    assert code == EX_USAGE


def test_usage_errors(capsys):
    with pytest.raises(SystemExit) as e:
        main(["classify", "1"])
    assert e.value.code == EX_USAGE
    with pytest.raises(SystemExit) as e:
        main(["nonsense"])
    assert e.value.code == EX_USAGE


def test_phase_boundary_csv(capsys, tmp_path):
    p = tmp_path / "g1.csv"
    code, _ = run(capsys, "phase-boundary", "--curve", "g1", "--out", p)
    rows = list(csv.reader(open(p)))
    assert code == 0 and rows[0] == ["curve", "re", "im"]
    assert abs(complex(float(rows[1][1]), float(rows[1][2])) + 2) < 1e-6


def test_phase_boundary_json_and_unknown(capsys):
    code, out = run(capsys, "phase-boundary", "--curve", "I")
    assert code == 0 and json.loads(out.out)["curves"][0]["id"] == "g1"
    code, _ = run(capsys, "phase-boundary", "--curve", "nope")
    assert code == EX_USAGE


def test_series_matches_closed_form(capsys):
    code, out = run(capsys, "series", "--genus", 3, "--order", 12)
    d = json.loads(out.out)
    assert code == 0 and len(d["coefficients"]) == 13
    for j, c in enumerate(d["coefficients"]):
        if j >= 1:
            assert Fraction(c) == closed_form_f(3, j)


def test_series_genus_cap(capsys):
    code, _ = run(capsys, "series", "--genus", 9)
    assert code == EX_USAGE


def test_genus_counts(capsys):
    code, out = run(capsys, "genus-counts", "--j", 3, "--enumerate")
    d = json.loads(out.out)
    assert code == 0
    for row in d["counts"]:
        assert row["enumerated"][:4] == row["closedForm"] == [closed_form_count(row["j"], g) for g in range(4)]


def test_constants(capsys):
    code, out = run(capsys, "constants", "--genus", 2)
    d = json.loads(out.out)
    assert d["C2g"]["2"] == "1/1728"


def test_verify(capsys):
    code, out = run(capsys, "verify")
    assert code == 0
    assert all(line.startswith("PASS") for line in out.out.splitlines())


def test_run_config_validation():
    RunConfig()
    for bad in ({"rmax": 0}, {"hmin": 1, "hmax": 0.5}, {"G": 9}, {"J": 0}, {"workers": 0}, {"trace_tol": -1}):
        with pytest.raises(ValueError):
            RunConfig(**bad)
