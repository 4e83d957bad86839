"""String-equation recursions and the genus expansion of the free energy.

Both sides are handled with kappa kept symbolic, since the recursions need
kappa-derivatives of lower-genus coefficients.  kappa = 1 is substituted
only when series are extracted.

u-side:      R_n(u) [1 + u R_{n-1} + u R_n + u R_{n+1}] = kappa
sigma-side:  R_n (sigma + R_{n-1} + R_n + R_{n+1})       = kappa
with R_{n +- 1} the kappa -> kappa +- 1/N shifts.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

from .algebra import (FieldElement, QuadExt, RationalSeries, Relation, SIGMA_SIDE, U_SIDE,
                      SingularPart, expand_at_singularity, expand_at_zero)

GENUS_CAP = 8
DEFAULT_J = 64


class CapExceeded(ValueError):
    pass


class DegenerateDenominator(ZeroDivisionError):
    pass


def _fact(n: int) -> int:
    return math.factorial(n)


class GenusCoeffTable:
    """r_0, r_2, ..., r_{2G} on one side, with a kappa-derivative cache.

    `self[g]` is the coefficient of N^{-2g}.
    """

    def __init__(self, side: str, rel: Relation, G: int):
        self.side = side
        self.rel = rel
        self.G = G
        self.r: List[FieldElement] = []
        self._d: Dict[Tuple[int, int], FieldElement] = {}

    def __getitem__(self, g: int) -> FieldElement:
        return self.r[g]

    def __len__(self):
        return len(self.r)

    def d(self, g: int, ell: int) -> FieldElement:
        """ell-th kappa derivative of r_{2g}."""
        if ell == 0:
            return self.r[g]
        key = (g, ell)
        if key not in self._d:
            self._d[key] = self.d(g, ell - 1).dk()
        return self._d[key]

    def series(self, g: int, J: int, k0=1) -> RationalSeries:
        return expand_at_zero(self.r[g], k0, J)


def _recursion_sum(tab: GenusCoeffTable, g: int) -> FieldElement:
    # 3 sum_{l=1}^{g-1} r_{g-l} r_l + 2 sum_{l=1}^{g} r_{g-l} sum_{k<l} r_k^{(2l-2k)}/(2l-2k)!
    rel = tab.rel
    acc = FieldElement.const(0, rel)
    for l in range(1, g):
        acc = acc + 3 * tab[g - l] * tab[l]
    for l in range(1, g + 1):
        inner = FieldElement.const(0, rel)
        for k in range(l):
            o = 2 * l - 2 * k
            inner = inner + tab.d(k, o) * Fraction(1, _fact(o))
        acc = acc + 2 * tab[g - l] * inner
    return acc


def recursion_A(tab: GenusCoeffTable, g: int) -> FieldElement:
    """The sum driving r_{2g} (called A_2g / Lambda_2j in the derivation)."""
    return _recursion_sum(tab, g)


@lru_cache(maxsize=4)
def string_recursion_u(G: int = GENUS_CAP) -> GenusCoeffTable:
    """r_{2g}(kappa; u) for g <= G."""
    if G > GENUS_CAP:
        raise CapExceeded(f"G={G} exceeds cap {GENUS_CAP}")
    rel = U_SIDE
    w = FieldElement.root(rel)
    u = FieldElement.t(rel)
    tab = GenusCoeffTable("u", rel, G)
    tab.r.append((w - 1) / (6 * u))
    for g in range(1, G + 1):
        A = _recursion_sum(tab, g)
        tab.r.append(-(u * A) / w)
    return tab


@lru_cache(maxsize=4)
def string_recursion_sigma(G: int = 4) -> GenusCoeffTable:
    """r_{2j}(kappa; sigma) for j <= G; r_0 = b^2/4, s = sigma + 6 r_0."""
    if G > GENUS_CAP:
        raise CapExceeded(f"G={G} exceeds cap {GENUS_CAP}")
    rel = SIGMA_SIDE
    s = FieldElement.root(rel)
    sig = FieldElement.t(rel)
    tab = GenusCoeffTable("sigma", rel, G)
    tab.r.append((s - sig) / 6)
    for j in range(1, G + 1):
        lam = _recursion_sum(tab, j)
        tab.r.append(-(lam / s))
    return tab


def general_order_solve(M: int) -> List[FieldElement]:
    """Solve the u-side string equation order by order in 1/N (odd orders too).

    Used to confirm that the odd-order coefficients vanish.  rho_m is linear
    at order m with coefficient 1 + 6 u rho_0 = w.
    """
    rel = U_SIDE
    w = FieldElement.root(rel)
    u = FieldElement.t(rel)
    zero = FieldElement.const(0, rel)
    rho: List[FieldElement] = [(w - 1) / (6 * u)]
    dcache: Dict[Tuple[int, int], FieldElement] = {}

    def d(j, l):
        if l == 0:
            return rho[j]
        if (j, l) not in dcache:
            dcache[(j, l)] = d(j, l - 1).dk()
        return dcache[(j, l)]

    def shift(m, sign, skip_top):
        acc = zero
        for j in range(m + 1):
            l = m - j
            if skip_top and l == 0:
                continue
            acc = acc + d(j, l) * Fraction(sign ** l, _fact(l))
        return acc

    for m in range(1, M + 1):
        # residual at order m with rho_m := 0
        rho.append(zero)
        res = zero
        for a in range(m + 1):
            b = m - a
            Sb = shift(b, 1, False) + shift(b, -1, False) + rho[b]
            term = rho[a] * (u * Sb)
            if b == 0:
                term = term + rho[a]
            res = res + term
        rho[m] = -(res / w)
        dcache = {k: v for k, v in dcache.items() if k[0] != m}
    return rho


# ---------------------------------------------------------------------------
# expansion tables
# ---------------------------------------------------------------------------

@dataclass
class ExpansionTables:
    A: List[FieldElement]          # R_{n+1} coefficients, m = 0..2G
    B: List[FieldElement]          # R_{n-1} coefficients
    C: List[FieldElement]          # R_{n-1} R_{n+1} coefficients, all j = 0..2G
    E: List[FieldElement]          # F'(u) coefficients, per genus
    G: int


def expansion_tables(tab: GenusCoeffTable) -> ExpansionTables:
    if tab.side != "u":
        raise ValueError("expansion tables are built on the u-side")
    G = tab.G
    rel = tab.rel
    zero = FieldElement.const(0, rel)
    A, B = [], []
    for m in range(2 * G + 1):
        a = b = zero
        for j in range(m // 2 + 1):
            l = m - 2 * j
            t = tab.d(j, l) * Fraction(1, _fact(l))
            a = a + t
            b = b + (t if l % 2 == 0 else -t)
        A.append(a)
        B.append(b)
    C = []
    for j in range(2 * G + 1):
        c = zero
        for m in range(j + 1):
            c = c + A[m] * B[j - m]
        C.append(c)
    k = FieldElement.k(rel)
    u = FieldElement.t(rel)
    r0 = tab[0]
    pre = r0 * r0 + k / u
    quarter = 1 / (4 * k * k)
    E = [quarter * pre * r0 - 1 / (4 * u)]
    for g in range(1, G + 1):
        acc = pre * tab[g]
        for kk in range(1, g + 1):
            acc = acc + C[2 * kk] * tab[g - kk]
        E.append(quarter * acc)
    return ExpansionTables(A, B, C, E, G)


@lru_cache(maxsize=4)
def _tables(G: int) -> ExpansionTables:
    return expansion_tables(string_recursion_u(G))


# ---------------------------------------------------------------------------
# free energy series
# ---------------------------------------------------------------------------

@dataclass
class FreeEnergySeries:
    """coeffs[g][j] = f^{(j)}_{2g} at kappa = 1, j = 0..J (j = 0 entry is 0)."""

    coeffs: List[List[Fraction]]
    J: int

    def count(self, j: int, g: int) -> Fraction:
        """(-1)^j j! 4^j f^{(j)}_{2g}, the genus-g map count."""
        return (-1) ** j * _fact(j) * 4 ** j * self.coeffs[g][j]


def energy_series(g: int, J: int, G: Optional[int] = None) -> RationalSeries:
    """E_{2g}(1; u) through u^{J}."""
    tabs = _tables(max(g, 1) if G is None else G)
    return expand_at_zero(tabs.E[g], 1, J)


def free_energy_series(G: int, J: int) -> FreeEnergySeries:
    """Termwise integral of E_{2g}: f^{(j)} = [u^{j-1}] E / j."""
    out = []
    for g in range(G + 1):
        e = energy_series(g, J - 1, G=max(G, 1))
        out.append(list(e.integrate().coeffs))
    return FreeEnergySeries(out, J)


# closed-form oracles for f_0 .. f_6 ------------------------------------------

def closed_form_f(g: int, j: int) -> Fraction:
    """Coefficient of u^j in the closed-form f_{2g}, g <= 3."""
    F = Fraction
    f = _fact
    if j < 1:
        return F(0)
    if g == 0:
        return F((-1) ** j * 3 ** j * f(2 * j - 1), f(j) * f(j + 2))
    if g == 1:
        return F(1, 24) * F((-1) ** j * 12 ** j, j) * (1 - F(f(2 * j), 4 ** j * f(j) ** 2))
    if g == 2:
        if j < 3:
            return F(0)
        head = F((-1) ** j * 12 ** j, 2304 * j)
        return head * (F(8 * f(2 * j) * (28 * j + 9), 15 * 4 ** j * f(j - 2) * f(j)) - 13 * j * (j - 1))
    if g == 3:
        if j < 5:
            return F(0)
        i = j - 4
        braces = (F(32892, i) * (F(f(i + 5), f(5)) - F(f(2 * i + 9), 15120 * 4 ** i * f(i + 4)))
                  - F(291 * f(i + 4), 10) - F(292 * f(2 * i + 7), 315 * 4 ** i * f(i + 3)))
        return F(1, 48) * F((-1) ** i * 12 ** i, f(i - 1) * (i + 4)) * braces
    raise ValueError("closed forms exist for g <= 3 only")


# ---------------------------------------------------------------------------
# identities
# ---------------------------------------------------------------------------

def ode_A(tab: GenusCoeffTable, g: int) -> FieldElement:
    """sum_k r_{2g-2k} sum_l r_{2k-2l}^{(2l)}/(2l)!  (source term of the ODE)."""
    rel = tab.rel
    acc = FieldElement.const(0, rel)
    for k in range(g + 1):
        inner = FieldElement.const(0, rel)
        for l in range(k + 1):
            inner = inner + tab.d(k - l, 2 * l) * Fraction(1, _fact(2 * l))
        acc = acc + tab[g - k] * inner
    return acc


def verify_ode_identity(g: int, J: int = 12) -> RationalSeries:
    """Residual series of 4u^2 f'' + 6u f' + [g=0]/2 - A_2g/2 at kappa = 1.

    Returned through u^J; the identity holds iff it is identically zero.
    """
    G = max(g, 1)
    tab = string_recursion_u(max(G, 1)) if g <= GENUS_CAP else None
    tabs = _tables(G)
    E = expand_at_zero(tabs.E[g], 1, J + 1)           # f'
    f1 = E
    f2 = E.deriv()                                      # f''
    lhs = f2.mul_t(2).truncate(J) * 4 + f1.mul_t(1).truncate(J) * 6
    if g == 0:
        lhs = lhs + Fraction(1, 2)
    rhs = expand_at_zero(ode_A(tab, g), 1, J) * Fraction(1, 2)
    return lhs.truncate(J) - rhs


def string_residual(G: int = GENUS_CAP) -> List[FieldElement]:
    """Order-by-order residual of the u-side string equation, orders 0..2G.

    Entry 0 must equal kappa; all others must vanish.
    """
    tab = string_recursion_u(G)
    T = _tables(G)
    rel = tab.rel
    u = FieldElement.t(rel)
    zero = FieldElement.const(0, rel)
    R = [tab[m // 2] if m % 2 == 0 else zero for m in range(2 * G + 1)]
    out = []
    for m in range(2 * G + 1):
        acc = zero
        for a in range(m + 1):
            b = m - a
            if R[a].is_zero():
                continue
            Sb = T.A[b] + T.B[b] + R[b]
            term = R[a] * (u * Sb)
            if b == 0:
                term = term + R[a]
            acc = acc + term
        out.append(acc)
    return out


@dataclass(frozen=True)
class SingularReport:
    g: int
    C: QuadExt                # C_2g(1) from r_2g
    exponent: Fraction        # (1 - 5g)/2
    C_from_E: Optional[QuadExt]
    exponent_E: Optional[Fraction]


def singular_structure(g: int) -> SingularReport:
    """Leading singular data of r_2g and E_2g at u = -1/12 (kappa = 1)."""
    tab = string_recursion_u(max(g, 1))
    sp: SingularPart = expand_at_singularity(tab[g], 1, 3)
    if sp.regular:
        from .algebra import UnexpectedStructure
        raise UnexpectedStructure(f"r_{2*g} is regular at u = -1/12")
    CE = eE = None
    if g >= 1:
        se = expand_at_singularity(_tables(g).E[g], 1, 3)
        if not se.regular:
            eE = se.exponent
            CE = se.coeff * Fraction(3 - 5 * g, 2 ** 4 * 3 ** 2)
    return SingularReport(g, sp.coeff, sp.exponent, CE, eE)


# ---------------------------------------------------------------------------
# sigma-side numerics
# ---------------------------------------------------------------------------

def r0_sigma(sigma: complex, kappa: float = 1.0) -> complex:
    return string_recursion_sigma(1)[0].evaluate(kappa, sigma)


def dF0_sigma(sigma: complex, kappa: float = 1.0) -> complex:
    """Genus-0 part of dF/dsigma: -(1/2k^2) r0 (k + r0^2)."""
    r0 = r0_sigma(sigma, kappa)
    return -r0 * (kappa + r0 * r0) / (2 * kappa ** 2)


def d2F0_sigma(sigma: complex, kappa: float = 1.0) -> complex:
    """Genus-0 part of d2F/dsigma2 from (1/4k^2) R_n (R_{n-1} + R_{n+1})."""
    r0 = r0_sigma(sigma, kappa)
    return r0 * (2 * r0) / (4 * kappa ** 2)


def cross_side_check(g: int, kappa: complex, u: complex) -> Tuple[complex, complex]:
    """(r_2g(kappa;u), u^{-1/2} r_2g(kappa; u^{-1/2})) for comparison."""
    ru = string_recursion_u(max(g, 1))[g].evaluate(kappa, u)
    sig = u ** -0.5
    rs = string_recursion_sigma(max(g, 1))[g].evaluate(kappa, sig)
    return ru, rs / (u ** 0.5)
