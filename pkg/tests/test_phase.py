import cmath
import math

import numpy as np
import pytest

from quartic import endpoints as ep
from quartic.gfunction import eta1
from quartic.model import MULTICRITICAL, SQRT12
from quartic.phase import (BetaPoint, psi_z0, PoleAtZero, VerificationMismatch, ZeroBeta, bisect_flip,
                           boundary_curves, boundary_distance, cache_dir, classify,
                           inverse_joukowski, joukowski, phase_grid, phi, psi, render_phase_svg,
                           trace_boundary, upsilon, xi)

I12 = 1j * SQRT12


# ---------------------------------------------------------------- closed forms

def test_psi_values():
    assert abs(psi(I12)) < 1e-12
    assert psi(1).real > 0
    assert abs(psi(-1 + 1.7795j).real) < 5e-4


def test_psi_positive_on_positive_beta():
    # beta in (0, 4) covers sigma > -2
    for b in np.linspace(0.1, 3.9, 20):
        assert psi(joukowski(b)).real > 0


def test_phi_values():
    assert abs(phi(2)) < 1e-15
    assert abs(phi(-2).real) < 1e-15 and abs(abs(phi(-2).imag) - math.pi) < 1e-15
    assert abs(phi(-3 + 1.5025j).real) < 5e-4


def test_xi_upsilon_zeros():
    for b in (4, -4, 4j / math.sqrt(3), -4j / math.sqrt(3)):
        assert abs(xi(b)) < 1e-12
    assert upsilon(2) == 0 and upsilon(-2) == 0
    with pytest.raises(PoleAtZero):
        xi(0)


def test_xi_two_forms():
    for b in (0.3 + 1j, 2 - 0.5j, -1.7j):
        assert abs(xi(b) - (16 - b * b) * (16 + 3 * b * b) ** 3 / (1024 * b ** 6)) < 1e-10 * abs(xi(b))


def test_dpsi_dbeta_squared_is_xi(rng):
    n = 0
    while n < 20:
        b = complex(rng.uniform(0.3, 5), rng.uniform(-3, 3))
        s = joukowski(b)
        if abs(inverse_joukowski(s)[0] - b) > 1e-9:     # other sheet
            continue
        h = 1e-5 * abs(b)
        try:
            d = (psi(joukowski(b + h)) - psi(joukowski(b - h))) / (2 * h)
        except ep.OnBranchCut:
            continue
        n += 1
        assert abs(d * d - xi(b)) <= 1e-6 * abs(xi(b))


def test_joukowski_points():
    assert joukowski(4) == -2 and joukowski(-4) == 2
    assert abs(joukowski(4j / math.sqrt(3)) + I12) < 1e-12
    assert abs(joukowski(-4j / math.sqrt(3)) - I12) < 1e-12
    with pytest.raises(ZeroBeta):
        joukowski(0)
    with pytest.raises(ZeroBeta):
        BetaPoint(0)
    assert joukowski(BetaPoint(4)) == -2


def test_inverse_joukowski(rng):
    for _ in range(100):
        s = complex(*rng.uniform(-6, 6, 2))
        bp, bm = inverse_joukowski(s)
        assert abs(joukowski(bp) - s) < 1e-12 * max(1, abs(s))
        assert abs(joukowski(bm) - s) < 1e-12 * max(1, abs(s))
        # beta+ is b1^2
        try:
            assert abs(bp - ep.one_cut(s).b1 ** 2) < 1e-12 * max(1, abs(s))
        except ep.OnBranchCut:
            pass


def test_psi_equals_eta_at_z0(rng):
    n = 0
    while n < 100:
        s = complex(rng.uniform(-6, 6), rng.uniform(-6, 6))
        if classify(s).tag != "OneCut":
            continue
        n += 1
        assert abs(psi(s) - eta1(psi_z0(ep.one_cut(s)), s).value) < 1e-9


# ---------------------------------------------------------------- curves

def test_gamma1_anchors_and_level():
    c = trace_boundary("g1")
    assert abs(c.points[0] + 2) < 1e-6
    assert abs(c.points[-1] - I12) < 1e-3
    assert c.level_residual() < 1e-7
    assert c.boundary and "I" in c.aliases or trace_boundary("I") is c


def test_gamma_family_anchors():
    for cid, start in (("g2", -2), ("g3", I12), ("g4", -I12), ("g5", -2), ("g6", -2)):
        assert abs(trace_boundary(cid).points[0] - start) < 1e-6, cid
    assert abs(trace_boundary("g2").points[-1] + I12) < 1e-3


def test_level_residuals():
    for cid in ("g1", "g2", "g3", "g4", "g5", "g6", "VI", "VIII", "XI"):
        assert trace_boundary(cid).level_residual() < 1e-7, cid


def test_gamma5_asymptotic_angle():
    c = trace_boundary("g5")
    far = c.points[-20:]
    ang = np.angle(far[-1] - far[0])
    assert abs(ang - 3 * math.pi / 4) < 1e-2
    assert abs(trace_boundary("g6").asymptotic_angle - 5 * math.pi / 4) < 1e-2


def test_fake_curves_marked():
    for cid in ("VI", "VIII", "XI"):
        assert not trace_boundary(cid).boundary
    for cid in ("g1", "g2", "g3", "g4", "g5", "g6"):
        assert trace_boundary(cid).boundary


def test_unknown_curve():
    with pytest.raises(ValueError):
        trace_boundary("g9")


def test_cache_file_written():
    boundary_curves()
    assert (cache_dir() / "boundaries-v2.json").exists()
    again = boundary_curves(refresh=False)
    assert set(again) >= {"g1", "g2", "g3", "g4", "g5", "g6", "VI", "VIII", "XI"}


# ---------------------------------------------------------------- classification

@pytest.mark.parametrize("s,tag", [(1, "OneCut"), (-3, "TwoCut"), (-1 + 2j, "ThreeCut"),
                                   (1 + 3.92j, "OneCut"), (-3 + 1j, "TwoCut"), (-3 + 2j, "ThreeCut"),
                                   (5, "OneCut"), (-1 + 4j, "OneCut"), (-1.35 + 4j, "ThreeCut")])
def test_classify_examples(s, tag):
    assert classify(s).tag == tag


def test_multicritical():
    assert str(classify(-2)) == "MultiCritical(-2)"
    assert classify(I12).tag == "MultiCritical"
    assert classify(-I12 + 1e-8).tag == "MultiCritical"


def test_boundary_tag():
    c = trace_boundary("g1").points
    z = c[len(c) // 2]
    assert classify(z).tag == "Boundary"
    cid, d = boundary_distance(z)
    assert cid == "g1" and d <= 1e-6


def test_conjugation_symmetry(rng):
    for _ in range(500):
        s = complex(rng.uniform(-8, 4), rng.uniform(-8, 8))
        assert classify(s) == classify(s.conjugate())


def test_anchor_pass_through():
    for cid, pts in (("g1", (-2, I12)), ("g3", (I12,)), ("g5", (-2,))):
        c = trace_boundary(cid).points
        for p in pts:
            assert np.min(np.abs(c - p)) < 1e-6


def test_bisection_one_to_three():
    y = bisect_flip(lambda t: complex(-1, t), 1.6, 1.9)
    assert 1.77 < y < 1.79
    assert abs(y - 1.7795) < 0.005


def test_bisection_two_to_three():
    y = bisect_flip(lambda t: complex(-3, t), 1.3, 1.7)
    assert 1.49 < y < 1.51
    assert abs(y - 1.5025) < 0.005


def test_bisection_along_4i():
    x = bisect_flip(lambda t: complex(t, 4), -1.5, -0.8)
    assert abs(x + 1.15) < 0.02


def test_bisection_no_flip():
    with pytest.raises(ValueError):
        bisect_flip(lambda t: complex(t, 0), 0, 1)


def test_fake_transition_point():
    s = 1 + 3.92j
    assert classify(s).tag == "OneCut"
    assert abs(psi(s).real) < 5e-4


def test_classify_verify():
    assert classify(-1 + 2j, verify=True).tag == "ThreeCut"
    assert classify(1 + 3.92j, verify=True).tag == "OneCut"


def test_verification_mismatch(monkeypatch):
    import quartic.phase as ph
    monkeypatch.setattr(ph._Locator, "region", lambda self, s: ph.ONE_CUT)
    with pytest.raises(VerificationMismatch) as exc:
        classify(-1 + 2j, verify=True)
    assert exc.value.claimed.tag == "OneCut" and not exc.value.report.ok


# ---------------------------------------------------------------- output

def test_phase_grid_small():
    g = phase_grid((-4, 2), (-3, 3), 7)
    assert len(g["regime"]) == 7 and len(g["regime"][0]) == 7
    assert g["regime"][3][6] == "OneCut"


def test_render_phase_svg(tmp_path):
    p = tmp_path / "phase.svg"
    render_phase_svg(p, show_fake=True)
    assert "<svg" in p.read_text()
