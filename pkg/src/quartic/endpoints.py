"""Support endpoints for the one-, two- and three-cut equilibrium measures.

Every regime writes its quadratic differential as an even sextic
    Qpoly(z) = z^6 + 2 sigma z^4 + (sigma^2 - 4) z^2 + q0,
so the endpoint systems reduce to choosing q0 (equivalently m2 below):
  one-cut   (z^2 - z0^2)^2 (z^2 - b1^2)
  two-cut   z^2 (z^2 - a2^2) (z^2 - b2^2)
  three-cut (z^2 - a3^2)(z^2 - b3^2)(z^2 - c3^2),  q0 = -4 (sigma + m2).
For three cuts the two real gap conditions fix the complex number m2.
"""
from __future__ import annotations

import cmath
import itertools
import math
import warnings
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np
from scipy import integrate

from .model import DEFAULT_BRANCH, OnBranchCut, PhaseRegime, _above, _c


class DegenerateEndpoint(ValueError):
    pass


class NoConvergence(RuntimeError):
    def __init__(self, msg, best=None, residual=float("inf")):
        super().__init__(msg)
        self.best = best
        self.residual = residual


class BadSeed(ValueError):
    pass


@dataclass(frozen=True)
class OneCutEndpoints:
    sigma: complex
    b1: complex
    z0: complex
    kappa: float = 1.0

    def residuals(self) -> Tuple[float, float]:
        b2, z2 = self.b1 ** 2, self.z0 ** 2
        return (abs(b2 + 2 * z2 + 2 * self.sigma),
                abs(b2 * (b2 - 4 * z2) - 16 * self.kappa))

    @property
    def squares(self):
        return [self.z0 ** 2, self.z0 ** 2, self.b1 ** 2]

    @property
    def outer(self) -> complex:
        return self.b1


@dataclass(frozen=True)
class TwoCutEndpoints:
    sigma: complex
    a2: complex
    b2: complex

    def residuals(self) -> Tuple[float, float]:
        a, b = self.a2 ** 2, self.b2 ** 2
        return abs(a + b + 2 * self.sigma), abs((a - b) ** 2 - 16)

    @property
    def squares(self):
        return [0j, self.a2 ** 2, self.b2 ** 2]

    @property
    def outer(self) -> complex:
        return self.b2


@dataclass(frozen=True)
class ThreeCutEndpoints:
    sigma: complex
    a3: complex
    b3: complex
    c3: complex
    residual: float = 0.0
    m2: complex = 0j

    def algebraic_residuals(self) -> Tuple[float, float]:
        a, b, c = self.a3 ** 2, self.b3 ** 2, self.c3 ** 2
        return (abs(a + b + c + 2 * self.sigma),
                abs(a * a + b * b + c * c - 2 * a * b - 2 * b * c - 2 * a * c - 16))

    def gap_residuals(self) -> Tuple[float, float]:
        sq = self.squares
        return (abs(gap_integral(self.a3, self.b3, sq).real),
                abs(gap_integral(self.b3, self.c3, sq).real))

    @property
    def squares(self):
        return [self.a3 ** 2, self.b3 ** 2, self.c3 ** 2]

    @property
    def outer(self) -> complex:
        return self.c3


@dataclass(frozen=True)
class LagrangeConstant:
    ellStar: complex
    numeric: bool = False

    @property
    def ell(self) -> float:
        return -self.ellStar.real / 2


# ---------------------------------------------------------------- closed forms

def one_cut(sigma, kappa: float = 1.0, allow_cut: bool = False) -> OneCutEndpoints:
    """b1 = sqrt(2/3 (-sigma + s)), z0 = sqrt(1/3 (-2 sigma - s)), s = sqrt(12 kappa + sigma^2)."""
    sg = _c(sigma)
    conv = DEFAULT_BRANCH if kappa == 1.0 else type(DEFAULT_BRANCH)(kappa=kappa)
    cut = conv.on_cut(sg)
    if cut is not None and cut != "L" and not allow_cut:
        raise OnBranchCut(f"sigma={sg} lies on {cut}")
    s = conv.s(sg)
    # cancellation-free forms of 2(s - sigma)/3 and -(2 sigma + s)/3
    num, alt = -sg + s, sg + s
    b1sq = 2 * num / 3 if abs(num) >= abs(alt) else 8 * kappa / alt
    num, alt = -2 * sg - s, s - 2 * sg
    z0sq = num / 3 if abs(num) >= abs(alt) else (sg * sg - 4 * kappa) / alt
    b1 = cmath.sqrt(_above(b1sq))
    z0 = conv.sqrt_arg_0_2pi(z0sq)
    return OneCutEndpoints(sg, b1, z0, kappa)


def two_cut(sigma) -> TwoCutEndpoints:
    sg = _c(sigma)
    if sg in (-2, 2):
        raise DegenerateEndpoint(f"two-cut endpoints degenerate at sigma={sg.real:g}")
    return TwoCutEndpoints(sg, cmath.sqrt(_above(-2 - sg)), cmath.sqrt(_above(2 - sg)))


# ---------------------------------------------------------------- quadrature

def _branch_factors(s, others, mid):
    # prod sqrt(s - e), each factor analytic on the segment: its cut is the
    # ray from e pointing away from the segment midpoint
    out = np.ones_like(s)
    for e in others:
        d = mid - e
        out = out * (cmath.sqrt(d) * np.sqrt((s - e) / d))
    return out


def _roots_of(squares):
    rs = []
    for x in squares:
        r = cmath.sqrt(x)
        rs += [r, -r]
    return rs


def _drop(roots, *pts):
    roots = list(roots)
    for p in pts:
        k = min(range(len(roots)), key=lambda i: abs(roots[i] - p))
        roots.pop(k)
    return roots


def _cquad(f, wvar):
    # QAWS (algebraic endpoint weight); near-degenerate seeds may trip
    # QUADPACK's roundoff detector, which only matters before convergence
    opts = dict(weight="alg", wvar=wvar, epsabs=1e-14, epsrel=1e-12, limit=500)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        re = integrate.quad(lambda t: f(t).real, 0.0, 1.0, **opts)[0]
        im = integrate.quad(lambda t: f(t).imag, 0.0, 1.0, **opts)[0]
    return complex(re, im)


def gap_integral(p: complex, q: complex, squares: Sequence[complex]) -> complex:
    """int_p^q sqrt(R(s)) ds along the straight segment, R = prod (s^2 - e^2).

    p and q must both be zeros of R.  The integrand is written as
    sqrt((s-p)(s-q)) * prod sqrt(s - e) over the remaining zeros, each factor
    analytic on the segment, so the Jacobi weight tau^(1/2)(1-tau)^(1/2)
    absorbs the endpoint singularities.  The overall sign is a branch choice.
    """
    others = _drop(_roots_of(squares), p, q)
    L = q - p
    mid = (p + q) / 2

    def f(t):
        s = np.asarray(p + L * t, dtype=complex)
        return 1j * L * L * _branch_factors(s, others, mid)

    return _cquad(lambda t: complex(f(np.array([t]))[0]), (0.5, 0.5))


def ray_integral(p: complex, z: complex, squares: Sequence[complex]) -> complex:
    """int_p^z sqrt(R(s)) ds along a straight segment from the zero p to a regular z.

    Sign fixed so that sqrt(R) at z equals the far branch z^3 sqrt(prod(1 - e^2/z^2)).
    """
    others = _drop(_roots_of(squares), p)
    L = z - p
    mid = (p + z) / 2

    def g(t):
        s = np.asarray(p + L * t, dtype=complex)
        return cmath.sqrt(L) * L * _branch_factors(s, others, mid)

    val = _cquad(lambda t: complex(g(np.array([t]))[0]), (0.5, 0.0))
    at_z = cmath.sqrt(L) * cmath.sqrt(L) * complex(_branch_factors(np.array([z]), others, mid)[0])
    # at_z equals sqrt(R(z)) up to sign; compare with the far branch
    if abs(far_sqrt(z, squares) + at_z) < abs(far_sqrt(z, squares) - at_z):
        val = -val
    return val


def far_sqrt(z: complex, squares: Sequence[complex]) -> complex:
    """Branch of sqrt(R) behaving like z^3 at infinity (valid outside the cut hull)."""
    z = complex(z)
    w = 1 + 0j
    for e2 in squares:
        w *= cmath.sqrt(1 - e2 / (z * z))
    return z ** 3 * w


def qpoly_coeffs(sigma: complex, squares: Sequence[complex]) -> np.ndarray:
    """Coefficients (ascending in x = z^2) of prod (x - e^2)."""
    c = np.array([1.0 + 0j])
    for e2 in squares:
        c = np.convolve(c, np.array([-e2, 1.0]))
    return c  # c[k] multiplies x^k


def far_series(squares: Sequence[complex], n: int = 40) -> np.ndarray:
    """e_k with sqrt(R)/z^3 = sum e_k z^(-2k)."""
    c = qpoly_coeffs(0, squares)[::-1]  # 1, c1, c2, c3 in powers of x = 1/z^2
    p = np.zeros(n + 1, dtype=complex)
    p[: len(c)] = c
    e = np.zeros(n + 1, dtype=complex)
    e[0] = 1.0
    for k in range(1, n + 1):
        acc = p[k] - sum(e[i] * e[k - i] for i in range(1, k))
        e[k] = acc / 2
    return e


def eta_far(z: complex, squares, K: complex, n: int = 40) -> complex:
    """-int sqrt(R) expanded at infinity plus the constant K."""
    e = far_series(squares, n)
    z = complex(z)
    val = -(z ** 4) / 4 - e[1] * z * z / 2 - e[2] * cmath.log(z)
    for k in range(3, n + 1):
        val -= e[k] * z ** (4 - 2 * k) / (4 - 2 * k)
    return val + K


def far_constant(outer: complex, squares, n: int = 40) -> complex:
    """K such that eta_far matches -int_{outer}^z sqrt(R) along the outward ray."""
    rmax = max(abs(cmath.sqrt(x)) for x in squares)
    R = 3 * rmax + 3
    zr = outer * (R / abs(outer)) if outer != 0 else complex(R)
    eta_zr = -ray_integral(outer, zr, squares)
    return eta_zr - eta_far(zr, squares, 0j, n)


# ---------------------------------------------------------------- three cuts

def cubic_roots(sigma: complex, m2: complex) -> np.ndarray:
    return np.roots([1.0, 2 * sigma, sigma * sigma - 4, -4 * (sigma + m2)])


def _match(prev, new):
    best = min(itertools.permutations(range(3)),
               key=lambda p: sum(abs(prev[i] - new[p[i]]) for i in range(3)))
    return [new[best[i]] for i in range(3)]


def _sqrt_near(x, ref):
    r = cmath.sqrt(x)
    return r if abs(r - ref) <= abs(-r - ref) else -r


def _endpoints_from_squares(sq, ref):
    """(a, b, c) with signs continuous with ref = (a, b, c) of the previous iterate."""
    return tuple(_sqrt_near(x, r) for x, r in zip(sq, ref))


def _gap_vector(sg, m2, prev_sq, prev_ep):
    sq = _match(prev_sq, list(cubic_roots(sg, m2)))
    a, b, c = _endpoints_from_squares(sq, prev_ep)
    i1 = gap_integral(a, b, sq)
    i2 = gap_integral(b, c, sq)
    return np.array([i1.real, i2.real]), sq, (a, b, c)


def _newton(sg, m2, sq, ep, tol_res=1e-12, max_iter=60):
    F, sq, ep = _gap_vector(sg, m2, sq, ep)
    for _ in range(max_iter):
        res = float(np.max(np.abs(F)))
        if res < tol_res:
            break
        h = 1e-7 * max(1.0, abs(m2))
        F1, _, _ = _gap_vector(sg, m2 + h, sq, ep)
        F2, _, _ = _gap_vector(sg, m2 + 1j * h, sq, ep)
        J = np.column_stack([(F1 - F) / h, (F2 - F) / h])
        try:
            d = np.linalg.solve(J, -F)
        except np.linalg.LinAlgError:
            break
        step = complex(d[0], d[1])
        lam = 1.0
        for _ in range(30):
            Fn, sqn, epn = _gap_vector(sg, m2 + lam * step, sq, ep)
            if np.max(np.abs(Fn)) < res:
                break
            lam /= 2
        else:
            break
        m2, F, sq, ep = m2 + lam * step, Fn, sqn, epn
        if abs(lam * step) < 1e-13 * max(1.0, abs(m2)):
            break
    return m2, sq, ep, float(np.max(np.abs(F)))


def _degenerate(sq, tol=1e-6):
    return min(abs(sq[i] - sq[j]) for i in range(3) for j in range(i + 1, 3)) < tol


def _package(sg, m2, sq, ep, res):
    a, b, c = ep
    return ThreeCutEndpoints(sg, a, b, c, res, m2)


def _seeds(sg):
    """Continuation seeds: birth of a cut at 0 (from two cuts) and split of z0 (from one cut)."""
    seeds = []
    try:
        t = two_cut(sg)
        eps = 1e-3
        for ph in (1, 1j, -1, -1j):
            m2 = -sg + eps * ph
            sq = _match([0j, t.a2 ** 2, t.b2 ** 2], list(cubic_roots(sg, m2)))
            seeds.append((m2, sq, (cmath.sqrt(sq[0]), _sqrt_near(sq[1], t.a2), _sqrt_near(sq[2], t.b2))))
    except DegenerateEndpoint:
        pass
    try:
        o = one_cut(sg, allow_cut=True)
        m0 = o.z0 ** 4 * o.b1 ** 2 / 4 - sg
        for eps in (1e-2, 1e-1):
            for ph in (1, 1j, -1, -1j):
                m2 = m0 + eps * ph
                sq = _match([o.z0 ** 2, o.z0 ** 2 * 1.0001, o.b1 ** 2], list(cubic_roots(sg, m2)))
                z0 = o.z0 if (o.z0 * o.b1.conjugate()).real >= 0 else -o.z0
                ep = (_sqrt_near(sq[0], z0), _sqrt_near(sq[1], z0), _sqrt_near(sq[2], o.b1))
                seeds.append((m2, sq, ep))
    except Exception:
        pass
    return seeds


def _canonical(sol: ThreeCutEndpoints) -> ThreeCutEndpoints:
    # c3 outermost with Re >= 0 convention, a3 on the same side as b3
    a, b, c = sol.a3, sol.b3, sol.c3
    if c.real < 0 or (c.real == 0 and c.imag < 0):
        a, b, c = -a, -b, -c
    if abs(-a - b) < abs(a - b):
        a = -a
    return ThreeCutEndpoints(sol.sigma, a, b, c, sol.residual, sol.m2)


def three_cut(sigma, seed: Optional[ThreeCutEndpoints] = None, tol: float = 1e-10,
              path_steps: int = 0) -> ThreeCutEndpoints:
    """Solve the three-cut endpoint system by Newton on m2.

    With a seed, Newton starts there (after continuation in path_steps
    straight-line steps from seed.sigma when path_steps > 0).  Without one,
    the built-in continuation seeds are tried and the best
    non-degenerate converged solution is returned.
    """
    sg = _c(sigma)
    if seed is not None:
        m2 = seed.m2 if seed.m2 != 0 else (seed.a3 ** 2 * seed.b3 ** 2 * seed.c3 ** 2) / 4 - seed.sigma
        sq, ep = seed.squares, (seed.a3, seed.b3, seed.c3)
        s0 = seed.sigma
        for k in range(1, path_steps + 1):
            st = s0 + (sg - s0) * k / path_steps
            m2, sq, ep, res = _newton(st, m2 + (st - s0) * 0, sq, ep)
        m2, sq, ep, res = _newton(sg, m2, sq, ep)
        if res > tol or not np.isfinite(res):
            raise NoConvergence(f"three-cut Newton from seed failed at sigma={sg}",
                                _package(sg, m2, sq, ep, res), res)
        if _degenerate(sq):
            raise BadSeed("seed converged to a degenerate (fewer-cut) configuration")
        return _canonical(_package(sg, m2, sq, ep, res))
    best = None
    for m2, sq, ep in _seeds(sg):
        try:
            m2n, sqn, epn, res = _newton(sg, m2, sq, ep)
        except (ValueError, ZeroDivisionError, FloatingPointError):
            continue
        if not np.isfinite(res) or _degenerate(sqn):
            continue
        cand = _package(sg, m2n, sqn, epn, res)
        if best is None or res < best.residual:
            best = cand
        if res < tol:
            break
    if best is None:
        raise BadSeed(f"no built-in seed applies at sigma={sg}")
    if best.residual > tol:
        raise NoConvergence(f"three-cut Newton did not converge at sigma={sg}", best, best.residual)
    return _canonical(best)


# ---------------------------------------------------------------- constants

def ell_star_one_cut(sigma) -> complex:
    sg = _c(sigma)
    s = DEFAULT_BRANCH.s(sg)
    return (sg * sg - sg * s) / 12 + cmath.log(-sg + s) - 0.5 - math.log(6)


def ell_star_two_cut(sigma) -> complex:
    sg = _c(sigma)
    return sg * sg / 4 - 0.5


def ell_star_numeric(sigma, endpoints) -> complex:
    """-K, where eta = -z^4/4 - sigma z^2/2 + 2 log z + K + o(1) with eta(outer) = 0."""
    return -far_constant(endpoints.outer, endpoints.squares)


def lagrange_constant(sigma, regime: PhaseRegime, endpoints=None) -> LagrangeConstant:
    sg = _c(sigma)
    tag = regime.tag
    if tag == "MultiCritical":
        tag = "OneCut"
    if tag == "OneCut":
        return LagrangeConstant(ell_star_one_cut(sg))
    if tag == "TwoCut":
        return LagrangeConstant(ell_star_two_cut(sg))
    if tag == "ThreeCut":
        ep = endpoints if endpoints is not None else three_cut(sg)
        return LagrangeConstant(ell_star_numeric(sg, ep), numeric=True)
    raise ValueError(f"no Lagrange constant for regime {regime}")


def solve(sigma, regime: PhaseRegime, seed=None):
    """Endpoints for the named regime."""
    if regime.tag == "OneCut":
        return one_cut(sigma)
    if regime.tag == "TwoCut":
        return two_cut(sigma)
    if regime.tag == "ThreeCut":
        return three_cut(sigma, seed=seed)
    raise ValueError(f"cannot solve endpoints for {regime}")
