"""eta functions, the g-function and the equilibrium measure on traced support.

Conventions: eta = -int sqrt(Qpoly) from the outer endpoint, with Qpoly the
monic even sextic of the regime.  Then
    g = (V + ell*) / 2 + eta / 2,     d nu = (1 / 2 pi i) sqrt(Qpoly)_+ ds.
The closed forms for eta1 and eta2 use straight-line cuts (z sqrt(1 - b^2/z^2));
the true cuts are the traced support arcs, and where the two disagree only the
sign of eta changes, so |Re eta| is branch independent.  Signs of Re eta are
read off the logarithmic potential of the traced measure instead.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import List, Optional, Sequence, Tuple

import mpmath
import numpy as np

from . import endpoints as ep
from .model import THREE_CUT, PhaseRegime, _c, potential

FAR_SWITCH = 1e3
G_FAR_SWITCH = 50.0        # g cancels z^4 terms, so it switches to 50 digits sooner


class OnCut(ValueError):
    pass


class PathCrossesCut(ValueError):
    pass


class NotOnSupport(ValueError):
    pass


@dataclass(frozen=True)
class EtaValue:
    value: complex
    branchPath: str

    def __complex__(self):
        return self.value


@dataclass(frozen=True)
class DensitySample:
    point: complex
    density: complex


# ---------------------------------------------------------------- closed forms

def _outer_sqrt(z: complex, b2: complex) -> complex:
    """sqrt(z^2 - b2) as z sqrt(1 - b2/z^2): principal for large z, cut on the segment."""
    if z == 0:
        return 1j * cmath.sqrt(b2)   # limit from above
    return z * cmath.sqrt(1 - b2 / (z * z))


def eta1(z, sigma, endpoints=None) -> EtaValue:
    z = complex(z)
    o = endpoints or ep.one_cut(sigma)
    b1, z0 = o.b1, o.z0
    if abs(z) > FAR_SWITCH:
        return EtaValue(complex(_eta1_mp(z, _c(sigma))), "closed form, 50 digits")
    r = _outer_sqrt(z, b1 * b1)
    val = z / 8 * (b1 * b1 + 4 * z0 * z0 - 2 * z * z) * r + 2 * cmath.log((z + r) / b1)
    return EtaValue(val, "closed form, straight cut [-b1,b1] and ray from -b1")


def eta1_alt(z, sigma, endpoints=None) -> complex:
    """The same function with the prefactor rewritten through b1^2 + 2 z0^2 = -2 sigma."""
    z = complex(z)
    sg = _c(sigma)
    o = endpoints or ep.one_cut(sg)
    b1 = o.b1
    r = _outer_sqrt(z, b1 * b1)
    return -z / 8 * (b1 * b1 + 4 * sg + 2 * z * z) * r + 2 * cmath.log((z + r) / b1)


def _b1_mp(sg):
    # endpoints recomputed at working precision: for large z the prefactor
    # multiplies any rounding in b1^2 by z^2
    r = mpmath.sqrt(12)
    s = mpmath.sqrt(sg - 1j * r) * mpmath.sqrt(sg + 1j * r)
    b2 = 8 / (sg + s) if abs(sg + s) > abs(s - sg) else 2 * (s - sg) / 3
    return mpmath.sqrt(b2)


def _eta1_mp(z, sg, dps=50):
    with mpmath.workdps(dps):
        z, sg = mpmath.mpc(z), mpmath.mpc(sg)
        b1 = _b1_mp(sg)
        if abs(complex(b1) - ep.one_cut(complex(sg), allow_cut=True).b1) > 1e-6:
            b1 = -b1
        r = z * mpmath.sqrt(1 - b1 ** 2 / z ** 2)
        return -z / 8 * (b1 ** 2 + 4 * sg + 2 * z ** 2) * r + 2 * mpmath.log((z + r) / b1)


def eta2(z, sigma, endpoints=None) -> EtaValue:
    z = complex(z)
    sg = _c(sigma)
    if abs(z) > FAR_SWITCH:
        return EtaValue(complex(_eta2_mp(z, sg)), "closed form, 50 digits")
    w = z * z + sg
    r = _outer_sqrt(w, 4)
    return EtaValue(-w * r / 4 + _log_J(z, w, r, sg, cmath), "closed form, straight cut in z^2")


def _log_J(z, w, r, sg, lib):
    # log((w + r)/2) split as 2 log(z/b2) + 2 log(b2) + log(J/z^2): the
    # principal log of J alone would add a cut where z^2 + sigma < -2,
    # i.e. near the imaginary axis; this way the only far cut is the ray
    # through -b2
    J = (w + r) / 2
    if z == 0:
        return lib.log(J)
    b2 = lib.sqrt(2 - sg)
    return 2 * lib.log(z / b2) + 2 * lib.log(b2) + lib.log(J / (z * z))


def _eta2_mp(z, sg, dps=50):
    with mpmath.workdps(dps):
        z, sg = mpmath.mpc(z), mpmath.mpc(sg)
        w = z ** 2 + sg
        r = w * mpmath.sqrt(1 - 4 / w ** 2)
        return -w * r / 4 + _log_J(z, w, r, sg, mpmath)


def _seg_eta(a: complex, b: complex, sq_a: complex, squares, end_zero: bool = False):
    """-int_a^b sqrt(R) with the branch continued from sq_a; returns (eta increment, sqrt at b).

    Pieces are refined until the phase of R moves by at most pi/8 across each;
    a zero of R at b is smoothed by s = b - (b - a)(1 - tau)^2.
    """
    def R(s):
        x = s * s
        out = 1 + 0j
        for e2 in squares:
            out *= x - e2
        return out

    if end_zero and abs(b - a) > 1e-3:
        # geometric grading into the zero, then one smoothed piece
        pts = [a]
        while abs(b - pts[-1]) > 1e-3:
            pts.append(b + (pts[-1] - b) / 2)
        tot, sq = 0j, sq_a
        for u, v in zip(pts[:-1], pts[1:]):
            d, sq = _seg_eta(u, v, sq, squares)
            tot += d
        d, sq = _seg_eta(pts[-1], b, sq, squares, end_zero=True)
        return tot + d, sq
    n = 1
    while n < 4096:
        pts = [a + (b - a) * k / n for k in range(n + 1)]
        vals = [R(p) for p in pts]
        ok = all(abs(cmath.phase(vals[k + 1] / vals[k])) <= math.pi / 8
                 for k in range(n - (1 if end_zero else 0)) if vals[k] != 0 and vals[k + 1] != 0)
        if ok:
            break
        n *= 2
    xs, ws = np.polynomial.legendre.leggauss(12)
    tot = 0j
    ref = sq_a
    for k in range(n):
        u, v = a + (b - a) * k / n, a + (b - a) * (k + 1) / n
        last = end_zero and k == n - 1
        for x, w in zip(xs, ws):
            tau = (x + 1) / 2
            if last:
                s = v - (v - u) * (1 - tau) ** 2
                jac = 2 * (1 - tau) * (v - u)
            else:
                s = u + (v - u) * tau
                jac = v - u
            val = cmath.sqrt(R(s))
            val = val if (val * ref.conjugate()).real >= 0 else -val
            if not last:
                ref = val
            tot += w / 2 * val * jac
        if not last:
            ref = cmath.sqrt(R(v)) if R(v) != 0 else ref
            ref = ref if (ref * val.conjugate()).real >= 0 else -ref
    end = cmath.sqrt(R(b))
    end = end if (end * ref.conjugate()).real >= 0 else -end
    return -tot, end


def far_radius(squares) -> float:
    return 1.25 * max(abs(cmath.sqrt(x)) for x in squares) + 1.0


def eta3(z, sigma, endpoints=None, waypoints: Optional[Sequence[complex]] = None,
         measure: Optional["SupportMeasure"] = None) -> EtaValue:
    """-int_{c3}^z sqrt(R): Laurent expansion outside the cut hull, then a polyline inward.

    Without waypoints the polyline is a single segment from the far circle,
    its angle chosen so that it misses every traced support arc.  Given
    waypoints are checked against the arcs and PathCrossesCut is raised.
    """
    z = complex(z)
    e3 = endpoints or ep.three_cut(sigma)
    if abs(z) >= far_radius(e3.squares) and not waypoints:
        return eta_path(z, e3, None)
    m = measure or _measure_cached(complex(e3.sigma))
    arcs = [t.samples for t in m.arcs]
    if waypoints:
        pts = [complex(w) for w in waypoints] + [z]
        Rf = far_radius(e3.squares)
        w0 = pts[0]
        pts = [Rf * w0 / abs(w0) if abs(w0) < Rf else w0] + pts
        for a, b in zip(pts[:-1], pts[1:]):
            if _hits(a, b, arcs, z):
                raise PathCrossesCut(f"segment {a} -> {b} crosses a support arc")
        return eta_path(z, e3, waypoints)
    Rf = far_radius(e3.squares)
    base = cmath.phase(z) if z != 0 else 0.0
    for j in range(0, 97):
        ang = base + (j + 1) // 2 * (1 if j % 2 else -1) * math.pi / 48
        start = Rf * cmath.exp(1j * ang)
        if not _hits(start, z, arcs, z):
            return eta_path(z, e3, [start] if j else None)
    raise PathCrossesCut(f"no straight cut-free path to {z}")


def _hits(a: complex, b: complex, arcs, target: complex, eps: float = 1e-7) -> bool:
    """Does segment a-b cross any polyline (touching at target excluded)?"""
    d = b - a
    for pts in arcs:
        p, q = pts[:-1], pts[1:]
        e = q - p
        den = (d.conjugate() * e).imag
        ok = np.abs(den) > 1e-300
        den = np.where(ok, den, 1.0)
        w = p - a
        t = (w.conjugate() * e).imag / den      # along a-b
        u = (w.conjugate() * d).imag / den      # along p-q
        hit = ok & (t >= 0) & (t <= 1) & (u >= 0) & (u <= 1)
        if np.any(hit):
            xs = a + t[hit] * d
            if np.any(np.abs(xs - target) > eps):
                return True
    return False


@lru_cache(maxsize=32)
def _measure_cached(sigma: complex) -> "SupportMeasure":
    return support_measure(sigma, THREE_CUT)


def eta_path(z, endpoints, waypoints=None) -> EtaValue:
    squares = endpoints.squares
    K = _far_K(tuple(squares), endpoints.outer)
    Rf = far_radius(squares)
    if abs(z) >= Rf and not waypoints:
        return EtaValue(ep.eta_far(z, squares, K), "Laurent expansion at infinity")
    start = (Rf * z / abs(z)) if z != 0 else complex(Rf)
    if waypoints:
        w0 = complex(waypoints[0])
        start = Rf * w0 / abs(w0) if abs(w0) < Rf else w0
        pts = [start] + [complex(w) for w in waypoints] + [z]
    else:
        pts = [start, z]
    eta = ep.eta_far(start, squares, K)
    sq = ep.far_sqrt(start, squares)
    is_zero = any(abs(z * z - e2) < 1e-14 * max(1, abs(e2)) for e2 in squares)
    for k in range(len(pts) - 1):
        if pts[k] == pts[k + 1]:
            continue
        d, sq = _seg_eta(pts[k], pts[k + 1], sq, squares,
                         end_zero=is_zero and k == len(pts) - 2)
        eta += d
    return EtaValue(eta, "Laurent expansion then polyline " +
                    " -> ".join(f"{p.real:.4g}{p.imag:+.4g}i" for p in pts))


@lru_cache(maxsize=256)
def _far_K(squares: Tuple[complex, ...], outer: complex) -> complex:
    return ep.far_constant(outer, list(squares))


def eta(z, sigma, regime: PhaseRegime, endpoints=None) -> EtaValue:
    if regime.tag in ("OneCut", "MultiCritical"):
        return eta1(z, sigma, endpoints)
    if regime.tag == "TwoCut":
        return eta2(z, sigma, endpoints)
    if regime.tag == "ThreeCut":
        return eta3(z, sigma, endpoints)
    raise ValueError(f"no eta for {regime}")


def g_value(z, sigma, regime: PhaseRegime, endpoints=None) -> complex:
    """g = (V + ell*)/2 + eta/2, evaluated without cancellation for large |z|."""
    z = complex(z)
    sg = _c(sigma)
    if regime.tag == "ThreeCut":
        e3 = endpoints or ep.three_cut(sg)
        ell = ep.lagrange_constant(sg, regime, e3).ellStar
        squares = e3.squares
        if abs(z) >= far_radius(squares):
            K = _far_K(tuple(squares), e3.outer)
            e = ep.far_series(squares)
            x = 1 / (z * z)
            tail = 0j
            for k in range(len(e) - 1, 2, -1):     # Horner in 1/z^2
                tail = tail * x + e[k] / (4 - 2 * k)
            tail *= x
            return (ell + K) / 2 + cmath.log(z) - tail / 2
        return (potential(z, sg) + ell) / 2 + eta3(z, sg, e3).value / 2
    ell = ep.lagrange_constant(sg, regime).ellStar
    if abs(z) > G_FAR_SWITCH:
        with mpmath.workdps(50):
            if regime.tag == "TwoCut":
                et = _eta2_mp(z, sg)
            else:
                et = _eta1_mp(z, sg)
            zz = mpmath.mpc(z)
            V = mpmath.mpc(sg) * zz ** 2 / 2 + zz ** 4 / 4
            return complex((V + ell) / 2 + et / 2)
    return (potential(z, sg) + ell) / 2 + eta(z, sg, regime, endpoints).value / 2


def sqrt_q(z, sigma, regime: PhaseRegime, endpoints=None) -> complex:
    """sqrt(Qpoly) on the straight-cut branch (behaves like z^3 at infinity)."""
    z = complex(z)
    sg = _c(sigma)
    if regime.tag in ("OneCut", "MultiCritical"):
        o = endpoints or ep.one_cut(sg)
        return (z * z - o.z0 ** 2) * _outer_sqrt(z, o.b1 ** 2)
    if regime.tag == "TwoCut":
        return z * _outer_sqrt(z * z + sg, 4)
    e3 = endpoints or ep.three_cut(sg)
    return ep.far_sqrt(z, e3.squares)


# ---------------------------------------------------------------- support measure

_TS_CACHE = {}


def _tanh_sinh(n_half: int = 80, h: float = 1 / 24):
    """Double-exponential rule on (-1, 1): abscissa sign, distance to the
    nearer endpoint (computed without cancellation) and weights."""
    key = (n_half, h)
    if key not in _TS_CACHE:
        k = np.arange(-n_half, n_half + 1) * h
        s = 0.5 * math.pi * np.sinh(k)
        comp = 1 / (np.exp(np.abs(s)) * np.cosh(s))      # 1 - tanh|s|
        w = h * 0.5 * math.pi * np.cosh(k) / np.cosh(s) ** 2
        _TS_CACHE[key] = (np.sign(s), comp, w)
    return _TS_CACHE[key]


def _ts_integrate(f, a: float, b: float) -> float:
    """int_a^b f(t) dt for vectorized f; endpoint singularities allowed."""
    sgn, comp, w = _tanh_sinh()
    half = (b - a) / 2
    t = np.where(sgn >= 0, b - comp * half, a + comp * half)
    keep = (t > a) & (t < b) & (comp > 1e-13)
    return float(np.sum(w[keep] * half * f(t[keep])))


class SupportMeasure:
    """Equilibrium measure carried by the traced support arcs of a critical graph."""

    PAIRS = {"OneCut": [("-b1", "b1")],
             "MultiCritical": [("-b1", "b1")],
             "TwoCut": [("a2", "b2"), ("-a2", "-b2")],
             "ThreeCut": [("b3", "c3"), ("-b3", "-c3"), ("-a3", "a3")]}

    def __init__(self, graph):
        self.graph = graph
        self.qd = graph.qd
        self.sigma = self.qd.sigma
        self.regime = self.qd.regime
        self.arcs = []
        missing = []
        for p, q in self.PAIRS[self.regime.tag]:
            t = graph.arc(p, q)
            if t is None:
                missing.append((p, q))
            else:
                self.arcs.append(t)
        self.missing = missing
        self.masses = [abs(t.etas[-1].imag - t.etas[0].imag) / (2 * math.pi) for t in self.arcs]
        self._nodes()

    @property
    def complete(self) -> bool:
        return not self.missing

    @property
    def total_mass(self) -> float:
        return float(sum(self.masses))

    def _nodes(self):
        zs, ws = [], []
        xs, wg = np.polynomial.legendre.leggauss(3)
        for t in self.arcs:
            z, e = t.samples, t.etas.imag
            dm = np.abs(np.diff(e)) / (2 * math.pi)
            for x, w in zip(xs, wg):
                zs.append(z[:-1] + (z[1:] - z[:-1]) * (x + 1) / 2)
                ws.append(dm * w / 2)
        self.node_z = np.concatenate(zs) if zs else np.zeros(0, complex)
        self.node_w = np.concatenate(ws) if ws else np.zeros(0)

    def log_potential(self, z) -> np.ndarray:
        """U(z) = int log|z - s| d nu(s), coarse (chord Gauss nodes)."""
        z = np.atleast_1d(np.asarray(z, dtype=complex))
        out = np.empty(z.shape, dtype=float)
        flat_z, flat_o = z.ravel(), out.ravel()
        for i in range(0, len(flat_z), 2048):
            blk = flat_z[i:i + 2048]
            d = np.abs(blk[:, None] - self.node_z[None, :])
            d[d == 0] = 1e-300
            flat_o[i:i + 2048] = np.log(d) @ self.node_w
        return flat_o.reshape(z.shape)

    def ell_re_coarse(self) -> float:
        b = self.qd.outer
        return float(2 * self.log_potential(b)[0] - potential(b, self.sigma).real)

    def F(self, z) -> np.ndarray:
        """2U - Re V - Re ell*: the single-valued Re eta of the true branch (coarse)."""
        z = np.asarray(z, dtype=complex)
        V = (self.sigma * z * z / 2 + z ** 4 / 4).real
        return 2 * self.log_potential(z) - V - self.ell_re_coarse()

    # -- precise evaluation through the eta parametrization of each arc
    def arc_point(self, k: int, t) -> np.ndarray:
        """Points on arc k with |Im eta - Im eta(start)| = t (Newton on eta)."""
        tr = self.arcs[k]
        e = tr.etas.imag - tr.etas[0].imag
        sgn = 1.0 if e[-1] >= 0 else -1.0
        tt = np.atleast_1d(np.asarray(t, dtype=float))
        target = tr.etas[0] + 1j * sgn * tt
        es = sgn * e
        idx = np.clip(np.searchsorted(es, tt), 1, len(es) - 2)
        # nearest interior sample with a usable branch value
        j = np.where(np.abs(es[idx] - tt) < np.abs(es[idx - 1] - tt), idx, idx - 1)
        j = np.clip(j, 1, len(es) - 2)
        z = tr.samples[j] + (tr.samples[j + 1] - tr.samples[j]) * np.clip(
            (tt - es[j]) / np.where(es[j + 1] != es[j], es[j + 1] - es[j], 1), -1, 2)
        zb, eb, sb = tr.samples[j], tr.etas[j], tr.sqrts[j]
        qd = self.qd
        xs, ws = np.polynomial.legendre.leggauss(8)
        for _ in range(30):
            mid, half = (zb + z) / 2, (z - zb) / 2
            ref = sb.copy()
            tot = np.zeros_like(z)
            for x, w in sorted(zip(xs, ws)):
                v = np.sqrt(qd(mid + half * x))
                v = np.where((v * np.conj(ref)).real >= 0, v, -v)
                ref = v
                tot += w * v
            et = eb - tot * half
            sq = ref
            dz = np.where(np.abs(sq) > 0, (et - target) / np.where(sq == 0, 1, sq), 0)
            z = z + dz
            if np.max(np.abs(dz)) < 1e-15:
                break
        return z

    def log_potential_precise(self, s0: complex, k0: Optional[int] = None, t0: Optional[float] = None) -> float:
        """U(s0) to ~1e-12: double-exponential quadrature in the eta parameter.

        If s0 lies on arc k0 at parameter t0 the log singularity is split out.
        """
        total = 0.0
        for k, tr in enumerate(self.arcs):
            T = abs(tr.etas[-1].imag - tr.etas[0].imag)
            f = lambda t, k=k: np.log(np.maximum(np.abs(s0 - self.arc_point(k, t)), 1e-300))
            if k == k0 and t0 is not None:
                val = _ts_integrate(f, 0.0, t0) + _ts_integrate(f, t0, T)
            else:
                val = _ts_integrate(f, 0.0, T)
            total += val / (2 * math.pi)
        return total

    def variational_residuals(self, ell_star: complex, per_arc: int = 4) -> List[Tuple[complex, float]]:
        """|2U(s) - Re V(s) - Re ell*| at interior support points."""
        out = []
        for k, tr in enumerate(self.arcs):
            T = abs(tr.etas[-1].imag - tr.etas[0].imag)
            for j in range(1, per_arc + 1):
                t0 = T * j / (per_arc + 1)
                s0 = complex(self.arc_point(k, t0)[0])
                U = self.log_potential_precise(s0, k, t0)
                r = 2 * U - potential(s0, self.sigma).real - ell_star.real
                out.append((s0, abs(r)))
        return out

    def density_samples(self, per_arc: int = 50) -> List[DensitySample]:
        """(1/2 pi i) sqrt(Q)_+ times the unit tangent, oriented along increasing mass."""
        out = []
        for tr in self.arcs:
            sgn = 1.0 if tr.etas[-1].imag >= tr.etas[0].imag else -1.0
            n = len(tr.samples)
            for i in np.linspace(1, n - 2, min(per_arc, n - 2)).astype(int):
                sq = tr.sqrts[i]
                chord = tr.samples[i + 1] - tr.samples[i - 1]
                tan = 1j * np.conj(sq) / abs(sq)
                tan = tan if (tan * np.conj(chord)).real >= 0 else -tan
                # d eta = -sq ds, so d Im eta / ds = Im(-sq tan)
                val = sgn * (-sq * tan) / (2j * math.pi)
                out.append(DensitySample(complex(tr.samples[i]), complex(val)))
        return out


def support_measure(sigma, regime: PhaseRegime, endpoints=None) -> SupportMeasure:
    from .quaddiff import build_qd, critical_graph
    qd = build_qd(sigma, regime, endpoints)
    g = critical_graph(qd, humps=False, off_level=False)
    return SupportMeasure(g)


def density(s, sigma, regime: PhaseRegime, endpoints=None, measure: Optional[SupportMeasure] = None,
            tol: float = 1e-6) -> DensitySample:
    """Line density at a support point s; s must be within tol of a traced arc."""
    from .quaddiff import _seg_dist
    s = complex(s)
    m = measure or support_measure(sigma, regime, endpoints)
    best = None
    for tr in m.arcs:
        d = float(_seg_dist(np.array([s]), tr.samples)[0])
        if best is None or d < best[0]:
            best = (d, tr)
    if best is None or best[0] > tol:
        raise NotOnSupport(f"{s} is not on the traced support")
    tr = best[1]
    q = 1 + 0j
    for e2 in m.qd.squares:       # product form vanishes exactly at an endpoint
        q *= s * s - e2
    sq = cmath.sqrt(q)
    i = int(np.argmin(np.abs(tr.samples - s)))
    i = min(max(i, 1), len(tr.samples) - 2)
    if sq == 0:
        return DensitySample(s, 0j)
    sq = sq if (sq * np.conj(tr.sqrts[i])).real >= 0 else -sq
    chord = tr.samples[i + 1] - tr.samples[i - 1]
    tan = 1j * sq.conjugate() / abs(sq)
    tan = tan if (tan * chord.conjugate()).real >= 0 else -tan
    sgn = 1.0 if tr.etas[-1].imag >= tr.etas[0].imag else -1.0
    return DensitySample(s, complex(-sgn * sq * tan / (2j * math.pi)))


def real_line_density(x: float, sigma: float, regime: PhaseRegime) -> float:
    """Closed-form density for real sigma (support on the real line)."""
    if regime.tag == "TwoCut":
        t = ep.two_cut(sigma)
        a, b = t.a2.real, t.b2.real
        v = (x * x - a * a) * (b * b - x * x)
        return abs(x) * math.sqrt(v) / (2 * math.pi) if v > 0 else 0.0
    o = ep.one_cut(sigma)
    b, z2 = o.b1.real, (o.z0 ** 2).real
    v = b * b - x * x
    return abs(x * x - z2) * math.sqrt(v) / (2 * math.pi) if v > 0 else 0.0
