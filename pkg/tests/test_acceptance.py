"""Acceptance criteria 1-9. Each test prints one PASS/FAIL line and asserts.

Run directly (python3 tests/test_acceptance.py) for just the nine lines.
"""
import cmath
import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from quartic import endpoints as ep
from quartic.algebra import QuadExt
from quartic.gfunction import support_measure
from quartic.maps import (asymptotic_ratio, c2g_constants, closed_form_count, enumerate_census,
                          kg_constant)
from quartic.model import ONE_CUT, THREE_CUT, TWO_CUT, PhaseRegime
from quartic.phase import bisect_flip, classify, psi
from quartic.quaddiff import build_qd, critical_graph, trace
from quartic.topo import (closed_form_f, expansion_tables, free_energy_series, general_order_solve,
                          singular_structure, string_recursion_u, string_residual,
                          verify_ode_identity)

SEED = 20240601
BOX = {"OneCut": (-6, 6, -6, 6), "TwoCut": (-6, 0, -6, 6), "ThreeCut": (-6, 0.5, -6, 6)}


def report(capsys, n, checks, t0):
    """checks: list of (label, ok). Print the criterion line, then assert."""
    bad = [lab for lab, ok in checks if not ok]
    line = (f"CRITERION {n}: {'PASS' if not bad else 'FAIL'}"
            f"  ({time.time() - t0:.1f}s)" + (f"  failing: {'; '.join(bad)}" if bad else ""))
    with capsys.disabled():
        print("\n" + line)
    assert not bad, line


def sample(rng, tag, n):
    x0, x1, y0, y1 = BOX[tag]
    out = []
    while len(out) < n:
        s = complex(rng.uniform(x0, x1), rng.uniform(y0, y1))
        if classify(s).tag == tag:
            out.append(s)
    return out


def test_criterion_1_map_census(capsys):
    t0 = time.time()
    targets = {1: [2, 1, 0, 0], 2: [36, 60, 0, 0], 3: [1728, 6336, 1440, 0],
               4: [145152, 964224, 770688, 0]}
    totals = {1: 3, 2: 96, 3: 9504, 4: 1880064}
    checks = []
    for j in range(1, 5):
        t = time.time()
        c = enumerate_census(j)
        got = (list(c.counts) + [0] * 4)[:4]
        checks.append((f"j={j} enumerated {got}", got == targets[j]))
        checks.append((f"j={j} closed form", [closed_form_count(j, g) for g in range(4)] == targets[j]))
        checks.append((f"j={j} total {c.total_connected}", c.total_connected == totals[j]))
    checks.append(("j<=4 runtime < 10 s", time.time() - t0 < 10))
    report(capsys, 1, checks, t0)


def test_criterion_2_generating_function(capsys):
    t0 = time.time()
    fs = free_energy_series(3, 16)
    bad = [(g, j) for g in range(4) for j in range(1, 17) if fs.coeffs[g][j] != closed_form_f(g, j)]
    report(capsys, 2, [(f"mismatched (g, j) {bad}", not bad)], t0)


def test_criterion_3_constants(capsys):
    t0 = time.time()
    C = c2g_constants(4)
    k2, k3 = kg_constant(2), kg_constant(3)
    checks = [
        ("C2 = 1/1728", C[1] == Fraction(1, 1728)),
        # 7^2 / (2^15 3^(13/2)) = 7^2 sqrt(3) / (2^15 3^7)
        ("C4", C[2] == QuadExt(0, Fraction(7 ** 2, 2 ** 15 * 3 ** 7), 3)),
        ("C6", C[3] == Fraction(5 ** 2 * 7 ** 2, 2 ** 21 * 3 ** 10)),
        ("K2 = 7/(1080 sqrt pi)", k2.coeff == Fraction(7, 1080) and k2.pi_half == 1),
        ("K3 = 245/995328", k3.coeff == Fraction(245, 995328) and k3.pi_half == 0),
    ]
    for g in range(1, 5):
        checks.append((f"singular_structure({g})", singular_structure(g).C == C[g]))
    report(capsys, 3, checks, t0)


def test_criterion_4_asymptotics(capsys):
    t0 = time.time()
    checks = []
    for g in range(4):
        for j in (50, 100, 200):
            r = float(asymptotic_ratio(j, g))
            checks.append((f"g={g} j={j} ratio {r:.6f}", abs(r - 1) <= 5 / math.sqrt(j)))
    corr = float(asymptotic_ratio(200, 1)) - 1
    want = -1 / (math.sqrt(math.pi) * math.sqrt(200))
    checks.append((f"g=1 correction {corr:.3e} vs {want:.3e}", abs(corr - want) <= 0.2 * abs(want)))
    report(capsys, 4, checks, t0)


def test_criterion_5_phase_boundaries(capsys):
    t0 = time.time()
    checks = []
    t = time.time()
    y1 = bisect_flip(lambda y: complex(-1, y), 1.6, 1.9)
    checks.append((f"one/three flip y={y1:.6f}", abs(y1 - 1.7795) <= 0.005 and time.time() - t < 60))
    t = time.time()
    y2 = bisect_flip(lambda y: complex(-3, y), 1.3, 1.7)
    checks.append((f"two/three flip y={y2:.6f}", abs(y2 - 1.5025) <= 0.005 and time.time() - t < 60))
    t = time.time()
    x = bisect_flip(lambda x: complex(x, 4), -1.5, -0.8)
    checks.append((f"flip along 4i x={x:.6f}", abs(x + 1.15) <= 0.02 and time.time() - t < 60))
    s = 1 + 3.92j
    checks.append((f"1+3.92i is {classify(s)}", classify(s).tag == "OneCut"))
    r = abs(psi(s).real)
    checks.append((f"|Re Psi(1+3.92i)| = {r:.3e} (< 5e-4 required)", r < 5e-4))
    report(capsys, 5, checks, t0)


def test_criterion_6_endpoint_identities(capsys):
    t0 = time.time()
    rng = np.random.default_rng(SEED)
    checks = []
    w1 = max(max(ep.one_cut(s).residuals()) / max(1, abs(s) ** 2) for s in sample(rng, "OneCut", 200))
    checks.append((f"one-cut residual {w1:.2e}", w1 <= 1e-12))
    w2 = max(max(ep.two_cut(s).residuals()) / max(1, abs(s) ** 2) for s in sample(rng, "TwoCut", 200))
    checks.append((f"two-cut residual {w2:.2e}", w2 <= 1e-12))
    alg = gap = 0.0
    for s in sample(rng, "ThreeCut", 200):
        t = ep.three_cut(s)
        alg = max(alg, max(t.algebraic_residuals()))
        gap = max(gap, max(t.gap_residuals()))
    checks.append((f"three-cut algebraic {alg:.2e}", alg < 1e-10))
    checks.append((f"three-cut gap {gap:.2e}", gap < 1e-8))
    t2, o = ep.two_cut(-2 - 1e-12), ep.one_cut(-2)
    checks.append(("sigma=-2 degeneration", abs(t2.b2 - o.b1) < 1e-6 and abs(t2.a2) < 1e-5))
    report(capsys, 6, checks, t0)


def test_criterion_7_equilibrium_measure(capsys):
    t0 = time.time()
    checks = []
    for s, reg in ((1, ONE_CUT), (-3, TWO_CUT), (-1 + 2j, THREE_CUT)):
        m = support_measure(s, reg)
        ell = ep.lagrange_constant(s, reg, m.qd.endpoints).ellStar
        dens = [d.density for d in m.density_samples(40)]
        pos = all(abs(d.imag) < 1e-8 and d.real > -1e-8 for d in dens)
        var = max(r for _, r in m.variational_residuals(ell, per_arc=3))
        checks.append((f"sigma={s} complete support", m.complete))
        checks.append((f"sigma={s} density real, >= 0", pos))
        checks.append((f"sigma={s} mass {m.total_mass:.12f}", abs(m.total_mass - 1) <= 1e-6))
        checks.append((f"sigma={s} variational {var:.2e}", var <= 1e-8))
    report(capsys, 7, checks, t0)


def test_criterion_8_series_identities(capsys):
    t0 = time.time()
    res = string_residual(8)
    checks = [("string residual through N^-16", len(res) == 17 and all(r.is_zero() for r in res[1:]))]
    for g in range(5):
        checks.append((f"ODE identity g={g} through u^12", verify_ode_identity(g, 12).is_zero()))
    rho = general_order_solve(7)
    checks.append(("odd r coefficients vanish", all(rho[m].is_zero() for m in (1, 3, 5, 7))))
    T = expansion_tables(string_recursion_u(4))
    checks.append(("odd C coefficients vanish", all(T.C[j].is_zero() for j in range(1, len(T.C), 2))))
    report(capsys, 8, checks, t0)


def test_criterion_9_trajectories(capsys):
    t0 = time.time()
    rng = np.random.default_rng(SEED + 9)
    checks = []
    qd = build_qd(1, ONE_CUT)
    real = [trace(qd, "b1", k) for k in range(3)]
    sup = [t for t in real if t.terminal.kind == "HitsCriticalPoint"]
    dev = np.max(np.abs(sup[0].samples.imag)) if sup else float("inf")
    checks.append((f"sigma=1 support imaginary part {dev:.1e}", dev < 1e-8))
    for tag in ("OneCut", "TwoCut", "ThreeCut"):
        worst_angle = worst_sym = 0.0
        ok = True
        for s in sample(rng, tag, 10):
            g = critical_graph(build_qd(s, PhaseRegime.parse(tag)))
            rep = g.census_report()
            ok &= rep["count"] == 8 and rep["complete"]
            worst_angle = max(worst_angle, rep["maxDeviation"])
            worst_sym = max(worst_sym, g.symmetry_error())
        checks.append((f"{tag} 8 rays", ok))
        checks.append((f"{tag} angle deviation {worst_angle:.1e}", worst_angle <= 1e-3))
        checks.append((f"{tag} symmetry {worst_sym:.1e}", worst_sym <= 1e-6))
    report(capsys, 9, checks, t0)


if __name__ == "__main__":
    sys.exit(pytest.main([__file__, "-q", "-p", "no:warnings"]))
