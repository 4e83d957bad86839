import cmath
import math

import numpy as np
import pytest

from quartic import endpoints as ep
from quartic.model import ONE_CUT, THREE_CUT, TWO_CUT, OnBranchCut
from quartic.phase import classify, trace_boundary


def sample_regime(rng, tag, n, box=(-6, 3, -6, 6)):
    out = []
    while len(out) < n:
        s = complex(rng.uniform(box[0], box[1]), rng.uniform(box[2], box[3]))
        if classify(s).tag == tag:
            out.append(s)
    return out


# ---------------------------------------------------------------- one cut

def test_one_cut_at_minus_two():
    o = ep.one_cut(-2)
    assert abs(o.b1 - 2) < 1e-15 and abs(o.z0) < 1e-15


def test_one_cut_at_zero():
    o = ep.one_cut(0)
    assert abs(o.b1 - 2 * 3 ** -0.25) < 1e-14
    assert abs(o.z0 - 1j * math.sqrt(math.sqrt(12) / 3)) < 1e-14
    assert abs(o.z0 - 1.07457j) < 1e-5
    assert max(o.residuals()) < 1e-12


def test_one_cut_real_sigma_signs():
    for sg in (-1.9, -1, 0.5, 1, 7):
        o = ep.one_cut(sg)
        assert o.b1.imag == 0 and o.b1.real > 0
        assert abs(o.z0.real) < 1e-15 and o.z0.imag > 0


def test_one_cut_on_cut_raises():
    with pytest.raises(OnBranchCut):
        ep.one_cut(-1 + 1j * math.sqrt(12))


def test_one_cut_identities_random(rng):
    n = 0
    while n < 200:
        s = complex(*rng.uniform(-6, 6, 2))
        if classify(s).tag != "OneCut":
            continue
        n += 1
        o = ep.one_cut(s)
        assert max(o.residuals()) <= 1e-12 * max(1, abs(s) ** 2)


def test_one_cut_continuity():
    path = [complex(1, y) for y in np.linspace(-3, 3, 601)]
    pts = [ep.one_cut(s) for s in path]
    jumps = [abs(b.b1 - a.b1) + abs(b.z0 - a.z0) for a, b in zip(pts, pts[1:])]
    assert max(jumps) < 10 * np.median(jumps)


# ---------------------------------------------------------------- two cut

def test_two_cut_values():
    t = ep.two_cut(-3)
    assert abs(t.a2 - 1) < 1e-15 and abs(t.b2 - math.sqrt(5)) < 1e-15
    for sg in (-2.5, -4, -10):
        t = ep.two_cut(sg)
        assert t.a2.real > 0 and t.b2.real > 0 and t.a2.imag == 0 == t.b2.imag


def test_two_cut_degenerate():
    for sg in (-2, 2):
        with pytest.raises(ep.DegenerateEndpoint):
            ep.two_cut(sg)


def test_two_cut_limit_matches_one_cut():
    t = ep.two_cut(-2 - 1e-12)
    o = ep.one_cut(-2)
    assert abs(t.b2 - o.b1) < 1e-6 and abs(t.a2) < 1e-5


def test_two_cut_complex_residuals():
    assert max(ep.two_cut(-3 + 1j).residuals()) < 1e-12


def test_two_cut_identities_random(rng):
    for s in sample_regime(rng, "TwoCut", 200):
        assert max(ep.two_cut(s).residuals()) <= 1e-12 * max(1, abs(s) ** 2)


# ---------------------------------------------------------------- three cut

def _check_three(t):
    assert max(t.algebraic_residuals()) < 1e-10
    assert max(t.gap_residuals()) < 1e-8
    assert t.residual < 1e-10


def test_three_cut_minus_one_plus_2i():
    _check_three(ep.three_cut(-1 + 2j))


def test_three_cut_minus_three_plus_2i():
    t = ep.three_cut(-3 + 2j)
    _check_three(t)
    # just past the birth of a cut at the origin
    assert abs(t.a3) < min(abs(t.b3), abs(t.c3))


def test_three_cut_near_birth_curve():
    g5 = trace_boundary("g5").points
    z = g5[np.argmin(np.abs(g5 - (-3 + 1.5025j)))]
    # a point just inside the three-cut side
    s = z + 0.002j
    assert classify(s).tag == "ThreeCut"
    t = ep.three_cut(s)
    _check_three(t)
    assert abs(t.a3) < 0.1
    t2 = ep.three_cut(z + 0.0005j, seed=t)
    assert abs(t2.a3) < abs(t.a3)


def test_three_cut_random(rng):
    for s in sample_regime(rng, "ThreeCut", 40):
        _check_three(ep.three_cut(s))


def test_three_cut_seeded_continuation():
    t = ep.three_cut(-1 + 2j)
    t2 = ep.three_cut(-1.2 + 2.3j, seed=t, path_steps=4)
    _check_three(t2)
    assert abs(t2.c3 - ep.three_cut(-1.2 + 2.3j).c3) < 1e-8


def test_no_convergence_carries_best_iterate():
    err = ep.NoConvergence("x", best="iterate", residual=0.5)
    assert err.best == "iterate" and err.residual == 0.5


def test_gap_integral_of_real_two_cut_is_real_zero():
    # for sigma = -3 the gap (1, sqrt 5) is a support arc: Re of the integral vanishes
    sq = [0j, 1 + 0j, 5 + 0j]
    assert abs(ep.gap_integral(1, math.sqrt(5), sq).real) < 1e-12


# ---------------------------------------------------------------- constants

def test_lagrange_constants():
    assert abs(ep.lagrange_constant(-3, TWO_CUT).ellStar - 1.75) < 1e-15
    assert abs(ep.lagrange_constant(-2, ONE_CUT).ellStar - 0.5) < 1e-14
    for s, r in ((1 + 1j, ONE_CUT), (-3 + 1j, TWO_CUT), (-1 + 2j, THREE_CUT)):
        L = ep.lagrange_constant(s, r)
        assert L.ell == -L.ellStar.real / 2
    assert ep.lagrange_constant(-1 + 2j, THREE_CUT).numeric


@pytest.mark.parametrize("sg,reg", [(1, ONE_CUT), (0.4 - 1.1j, ONE_CUT), (-3, TWO_CUT), (-3.5 + 0.8j, TWO_CUT)])
def test_numeric_constant_agrees_with_closed_form(sg, reg):
    e = ep.solve(sg, reg)
    assert abs(ep.ell_star_numeric(sg, e) - ep.lagrange_constant(sg, reg).ellStar) < 1e-9


def test_far_sqrt_branch():
    sq = ep.two_cut(-3).squares
    z = 50 + 10j
    v = ep.far_sqrt(z, sq)
    assert abs(v * v - np.prod([z * z - x for x in sq])) < 1e-6 * abs(v) ** 2
    assert abs(v / z ** 3 - 1) < 0.01
