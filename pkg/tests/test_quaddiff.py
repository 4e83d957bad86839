import cmath
import csv
import json
import math

import numpy as np
import pytest

from quartic import endpoints as ep
from quartic.gfunction import support_measure
from quartic.model import ONE_CUT, THREE_CUT, TWO_CUT, PhaseRegime
from quartic.quaddiff import (HMAX, HMIN, TRACE_TOL, BranchLost, OnGraph, SeedNotCritical, build_qd,
                              critical_graph, flood_fill, render_svg, seed_directions, stable_sign,
                              trace, verify_regime, write_csv, write_graph_csv, write_json)


@pytest.fixture(scope="module")
def g_one():
    return critical_graph(build_qd(1, ONE_CUT))


@pytest.fixture(scope="module")
def g_two():
    return critical_graph(build_qd(-3, TWO_CUT))


@pytest.fixture(scope="module")
def g_three():
    return critical_graph(build_qd(-1 + 2j, THREE_CUT))


# ---------------------------------------------------------------- construction

def test_qd_at_minus_two():
    qd = build_qd(-2, ONE_CUT)
    assert np.allclose(qd.coeffs, [0, 0, 0, 0, -4, 0, 1], atol=1e-14)
    assert [cp.order for cp in qd.critical] == [1, 1, 4]


def test_qd_two_cut_minus_three():
    qd = build_qd(-3, TWO_CUT)
    # z^2 (z^2 - 1)(z^2 - 5) = z^6 - 6 z^4 + 5 z^2
    assert np.allclose(qd.coeffs, [0, 0, 5, 0, -6, 0, 1], atol=1e-14)


def test_qd_three_cut_matches_endpoints():
    t = ep.three_cut(-1 + 2j)
    qd = build_qd(-1 + 2j, THREE_CUT, t)
    for e in (t.a3, t.b3, t.c3):
        assert abs(qd.q(e)) < 1e-10
    # same sextic family: z^6 + 2 sigma z^4 + (sigma^2 - 4) z^2 + q0
    assert abs(qd.coeffs[4] - 2 * (-1 + 2j)) < 1e-10
    assert abs(qd.coeffs[2] - ((-1 + 2j) ** 2 - 4)) < 1e-10


def test_evenness(rng):
    for _ in range(100):
        s = complex(*rng.uniform(-4, 4, 2))
        try:
            qd = build_qd(s, ONE_CUT)
        except Exception:
            continue
        assert qd.is_even(0.0)
        qd2 = build_qd(s, TWO_CUT) if s not in (2, -2) else qd
        assert qd2.is_even(0.0)


def test_unknown_regime():
    with pytest.raises(ValueError):
        build_qd(1, PhaseRegime("Boundary", "g1"), endpoints=ep.one_cut(1))


# ---------------------------------------------------------------- local structure

@pytest.mark.parametrize("sg,reg", [(1, ONE_CUT), (-3, TWO_CUT), (-1 + 2j, THREE_CUT), (0.5 + 1j, ONE_CUT)])
def test_seed_angles(sg, reg):
    qd = build_qd(sg, reg)
    for cp in qd.critical:
        th = seed_directions(qd, cp)
        n = cp.order + 2
        assert len(th) == n
        for a, b in zip(th, th[1:]):
            assert abs((b - a) - 2 * math.pi / n) < 1e-6
        # each direction makes Q dz^2 negative
        A = qd.local_coeff(cp.point, cp.order)
        for t in th:
            v = A * cmath.exp(1j * (cp.order + 2) * t)
            assert v.real < 0 and abs(v.imag) < 1e-9 * abs(v)


def test_seed_not_critical():
    qd = build_qd(1, ONE_CUT)
    with pytest.raises(SeedNotCritical):
        trace(qd, 0.3 + 0.2j, 0)
    with pytest.raises(SeedNotCritical):
        trace(qd, "nope", 0)


# ---------------------------------------------------------------- trajectories

def test_sigma_one_support_trajectory():
    qd = build_qd(1, ONE_CUT)
    ends = {}
    for k in range(3):
        t = trace(qd, "b1", k)
        ends[k] = t
    short = [t for t in ends.values() if t.terminal.kind == "HitsCriticalPoint"]
    assert len(short) == 1 and short[0].terminal.label == "-b1"
    assert np.max(np.abs(short[0].samples.imag)) < 1e-8
    angles = sorted(cmath.phase(cmath.exp(1j * t.terminal.angle)) for t in ends.values()
                    if t.terminal.kind == "Asymptotic")
    assert len(angles) == 2
    assert abs(angles[0] + math.pi / 8) < 1e-3 and abs(angles[1] - math.pi / 8) < 1e-3


@pytest.mark.parametrize("fixture", ["g_one", "g_two", "g_three"])
def test_level_and_spacing(fixture, request):
    g = request.getfixturevalue(fixture)
    for t in g.trajectories:
        assert t.level_error() < TRACE_TOL
        lo, hi = t.spacing()
        assert hi <= HMAX * (1 + 1e-9)
        # the last step may be cut short at a critical point or at rmax
        d = np.abs(np.diff(t.samples))[:-1]
        if len(d):
            assert d.min() >= HMIN * (1 - 1e-9)


def test_orthogonal_trajectory():
    qd = build_qd(1, ONE_CUT)
    for k in range(3):
        t = trace(qd, "b1", k, kind="orthogonal")
        assert np.max(np.abs(t.etas.imag)) < 1e-9


# ---------------------------------------------------------------- graphs

def test_graph_sigma_one(g_one):
    assert g_one.connected("b1", "-b1")
    assert len(g_one.connections) == 1
    rep = g_one.census_report()
    assert rep["count"] == 8 and rep["complete"] and rep["maxDeviation"] < 1e-3


def test_graph_two_cut(g_two):
    assert g_two.connected("a2", "b2") and g_two.connected("-a2", "-b2")
    rep = g_two.census_report()
    assert rep["count"] == 8 and rep["directions"] == list(range(8))


def test_graph_three_cut(g_three):
    for p, q in (("c3", "b3"), ("-c3", "-b3"), ("a3", "-a3")):
        assert g_three.connected(p, q)
    assert g_three.census_report()["complete"]


@pytest.mark.parametrize("fixture", ["g_one", "g_two", "g_three"])
def test_graph_symmetry(fixture, request):
    assert request.getfixturevalue(fixture).symmetry_error() < 1e-6


def test_census_complex_one_cut():
    g = critical_graph(build_qd(0.7 - 1.3j, ONE_CUT))
    rep = g.census_report()
    assert rep["count"] == 8 and rep["complete"] and rep["maxDeviation"] < 1e-3


# ---------------------------------------------------------------- stable lands

@pytest.fixture(scope="module")
def m_one(g_one):
    from quartic.gfunction import SupportMeasure
    return SupportMeasure(g_one)


def test_stable_sign_examples(m_one):
    assert stable_sign(1, 10, ONE_CUT, m_one) == -1
    assert stable_sign(1, ep.one_cut(1).z0, ONE_CUT, m_one) == 1
    assert stable_sign(1, -ep.one_cut(1).z0, ONE_CUT, m_one) == 1


def test_stable_sign_flips_across_trajectory(g_one, m_one):
    for t in g_one.trajectories:
        if t.terminal.kind != "Asymptotic":
            continue
        i = len(t.samples) // 3
        z = t.samples[i]
        d = t.samples[i + 1] - t.samples[i - 1]
        n = 1j * d / abs(d) * 1e-3
        assert stable_sign(1, z + n, ONE_CUT, m_one) == -stable_sign(1, z - n, ONE_CUT, m_one)


def test_stable_sign_on_graph(g_one, m_one):
    t = g_one.trajectories[0]
    with pytest.raises(OnGraph):
        stable_sign(1, t.samples[len(t.samples) // 2], ONE_CUT, m_one, band=1e-6)


def test_stable_sign_matches_eta_for_real_sigma(m_one, rng):
    from quartic.gfunction import eta1
    for _ in range(20):
        z = complex(*rng.uniform(-3, 3, 2))
        v = eta1(z, 1).value.real
        if abs(v) < 1e-3:
            continue
        assert stable_sign(1, z, ONE_CUT, m_one) == (-1 if v < 0 else 1)


def test_stable_sign_wrong_regime():
    with pytest.raises(BranchLost):
        stable_sign(-1 + 2j, 5, ONE_CUT)


def test_flood_fill_components(m_one):
    ff = flood_fill(m_one)
    assert ff.component_at(complex(ff.box, 0)) > 0
    assert ff.component_at(complex(ff.box, 0)) != ff.component_at(complex(0, ff.box))


# ---------------------------------------------------------------- regime verification

TRUE = [(1, ONE_CUT), (1 + 1j, ONE_CUT), (-3, TWO_CUT), (-1 + 2j, THREE_CUT), (-1 + 4j, ONE_CUT),
        (1 + 3.92j, ONE_CUT), (-3 + 1j, TWO_CUT), (-3 + 2j, THREE_CUT)]
FALSE = [(-1 + 2j, ONE_CUT), (-3 + 2j, TWO_CUT), (-3 + 1j, THREE_CUT), (-1.35 + 4j, ONE_CUT)]


@pytest.mark.parametrize("sg,reg", TRUE)
def test_verify_true_regimes(sg, reg):
    rep = verify_regime(sg, reg)
    assert rep.ok, rep.failed()
    assert rep.M > 0


@pytest.mark.parametrize("sg,reg", FALSE)
def test_verify_rejects_wrong_regimes(sg, reg):
    assert not verify_regime(sg, reg).ok


def test_one_cut_off_level_double_zeros():
    rep = verify_regime(1 + 1j, ONE_CUT)
    assert rep.details["Re eta(z0)"] > 1e-6 and rep.details["Re eta(-z0)"] > 1e-6


# ---------------------------------------------------------------- export

def test_exports(tmp_path, g_one):
    p = tmp_path / "t.csv"
    write_csv(g_one.trajectories[0], p)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["re", "im"] and len(rows) == len(g_one.trajectories[0].samples) + 1
    p = tmp_path / "g.csv"
    write_graph_csv(g_one, p)
    rows = list(csv.reader(open(p)))
    assert rows[0] == ["trajectory", "seed", "terminal", "re", "im"]
    p = tmp_path / "g.json"
    write_json(g_one, p)
    d = json.loads(p.read_text())
    assert d["schemaVersion"] == 1 and d["M"] == g_one.rmax
    assert d["census"]["complete"]
    p = tmp_path / "g.svg"
    render_svg(g_one, p)
    assert p.read_text().lstrip().startswith("<?xml")
