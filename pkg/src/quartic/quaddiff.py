"""Quadratic differentials Q(z) dz^2, trajectory tracing and critical graphs.

A critical trajectory through a zero p of Q is a level curve of Re eta with
eta = -int_p sqrt(Q).  We follow it with an embedded Dormand-Prince pair in
arclength, keeping the branch of sqrt(Q) by continuity, and after every
accepted step a Newton corrector pulls the point back onto the level set.
eta itself is accumulated along the path with a 4-point Gauss rule on each
chord, so every sample carries its own eta value.
"""
from __future__ import annotations

import cmath
import csv
import json
import math
from pathlib import Path
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
from scipy import optimize

from . import endpoints as ep
from .model import PhaseRegime, _c

TRACE_TOL = 1e-9
RMAX = 20.0
HMIN, HMAX = 1e-6, 0.05
STEP_TOL = 1e-10
MAX_STEPS = 100_000
LOCAL_RADIUS = 1e-4
ANGLE_TOL = 1e-3


class SeedNotCritical(ValueError):
    pass


class BranchLost(RuntimeError):
    pass


class OnGraph(ValueError):
    pass


@dataclass(frozen=True)
class CriticalPoint:
    point: complex
    order: int
    label: str
    on_level: bool = True   # lies on the Re eta = 0 level of the outer endpoint


class QuadraticDifferential:
    """Even sextic Q(z) = prod (z^2 - e_k^2) for a regime and its endpoints."""

    def __init__(self, sigma, regime: PhaseRegime, endpoints, critical: List[CriticalPoint]):
        self.sigma = _c(sigma)
        self.regime = regime
        self.endpoints = endpoints
        self.squares = list(endpoints.squares)
        self.critical = critical
        c = ep.qpoly_coeffs(self.sigma, self.squares)   # ascending in x = z^2
        self.x_coeffs = c
        full = np.zeros(7, dtype=complex)
        full[0::2] = c
        self.coeffs = full                              # ascending in z
        self.poles: List[complex] = []
        self.scale = max(1.0, max(abs(cp.point) for cp in critical))

    def __call__(self, z):
        x = np.asarray(z, dtype=complex) ** 2
        c = self.x_coeffs
        return ((c[3] * x + c[2]) * x + c[1]) * x + c[0]

    def q(self, z):
        return complex(self(z))

    def local_coeff(self, p: complex, m: int) -> complex:
        d = np.polynomial.polynomial.polyder(self.coeffs, m)
        return complex(np.polynomial.polynomial.polyval(p, d)) / math.factorial(m)

    def asymptotic_angle(self, z: complex) -> float:
        """Limit direction of a level curve through z, from 1/2 arg(z^2 + sigma)."""
        a = 0.5 * cmath.phase(z * z + self.sigma)
        az = cmath.phase(z)
        cands = [a, a + math.pi, a - math.pi]
        best = min(cands, key=lambda t: abs(cmath.phase(cmath.exp(1j * (t - az)))))
        return best % (2 * math.pi)

    @property
    def outer(self) -> complex:
        return self.endpoints.outer

    def is_even(self, tol=0.0) -> bool:
        return bool(np.all(np.abs(self.coeffs[1::2]) <= tol))

    def far_constant(self) -> complex:
        if not hasattr(self, "_K"):
            self._K = ep.far_constant(self.outer, self.squares)
        return self._K

    def eta_far(self, z) -> complex:
        return ep.eta_far(z, self.squares, self.far_constant())


class RationalField:
    """A quadratic differential given by a callable, used for the auxiliary
    differentials in the parameter planes."""

    def __init__(self, f: Callable, critical: List[CriticalPoint], poles: Sequence[complex] = (),
                 scale: float = 1.0, angle: Optional[Callable] = None):
        self.f = f
        self.critical = critical
        self.poles = list(poles)
        self.scale = scale
        self._angle = angle

    def __call__(self, z):
        return self.f(np.asarray(z, dtype=complex))

    def q(self, z):
        return complex(self.f(complex(z)))

    def local_coeff(self, p: complex, m: int) -> complex:
        # mean value of Q(z)/(z-p)^m over a small circle equals the leading coefficient
        r = 1e-3 * self.scale
        phis = np.exp(2j * np.pi * np.arange(32) / 32)
        zs = p + r * phis
        return complex(np.mean(self.f(zs) / (r * phis) ** m))

    def asymptotic_angle(self, z: complex) -> float:
        if self._angle is not None:
            return self._angle(z)
        return cmath.phase(z) % (2 * math.pi)


@dataclass
class Terminal:
    kind: str                   # HitsCriticalPoint, Asymptotic, Pole, StepLimit
    point: Optional[complex] = None
    label: Optional[str] = None
    angle: Optional[float] = None

    def __str__(self):
        if self.kind == "HitsCriticalPoint":
            return f"HitsCriticalPoint({self.label})"
        if self.kind == "Asymptotic":
            return f"Asymptotic({self.angle:.6f})"
        return self.kind


@dataclass
class Trajectory:
    samples: np.ndarray
    etas: np.ndarray
    sqrts: np.ndarray
    seed: Optional[str]
    seed_index: Optional[int]
    kind: str
    terminal: Terminal
    level: float = 0.0

    def level_error(self) -> float:
        part = self.etas.real if self.kind == "critical" else self.etas.imag
        return float(np.max(np.abs(part - self.level)))

    def spacing(self) -> Tuple[float, float]:
        d = np.abs(np.diff(self.samples))
        return float(d.min()), float(d.max())

    def to_rows(self):
        return [(float(z.real), float(z.imag)) for z in self.samples]

    def as_dict(self):
        return {"seed": self.seed, "seedDirectionIndex": self.seed_index, "kind": self.kind,
                "terminal": str(self.terminal), "level": self.level,
                "samples": [[float(z.real), float(z.imag)] for z in self.samples]}


# ---------------------------------------------------------------- building

def build_qd(sigma, regime: PhaseRegime, endpoints=None) -> QuadraticDifferential:
    sg = _c(sigma)
    tag = regime.tag
    if endpoints is None:
        endpoints = ep.solve(sg, regime)
    if tag == "OneCut":
        b1, z0 = endpoints.b1, endpoints.z0
        if abs(z0) < 1e-12:
            crit = [CriticalPoint(b1, 1, "b1"), CriticalPoint(-b1, 1, "-b1"),
                    CriticalPoint(0j, 4, "0", True)]
        else:
            crit = [CriticalPoint(b1, 1, "b1"), CriticalPoint(-b1, 1, "-b1"),
                    CriticalPoint(z0, 2, "z0", False), CriticalPoint(-z0, 2, "-z0", False)]
    elif tag == "TwoCut":
        a2, b2 = endpoints.a2, endpoints.b2
        crit = [CriticalPoint(b2, 1, "b2"), CriticalPoint(-b2, 1, "-b2"),
                CriticalPoint(a2, 1, "a2"), CriticalPoint(-a2, 1, "-a2"),
                CriticalPoint(0j, 2, "0", False)]
    elif tag == "ThreeCut":
        a3, b3, c3 = endpoints.a3, endpoints.b3, endpoints.c3
        crit = [CriticalPoint(c3, 1, "c3"), CriticalPoint(-c3, 1, "-c3"),
                CriticalPoint(b3, 1, "b3"), CriticalPoint(-b3, 1, "-b3"),
                CriticalPoint(a3, 1, "a3"), CriticalPoint(-a3, 1, "-a3")]
    else:
        raise ValueError(f"no quadratic differential for regime {regime}")
    return QuadraticDifferential(sg, regime, endpoints, crit)


# ---------------------------------------------------------------- tracing

_DP_A = [
    [],
    [1 / 5],
    [3 / 40, 9 / 40],
    [44 / 45, -56 / 15, 32 / 9],
    [19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729],
    [9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656],
    [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84],
]
_DP_B5 = [35 / 384, 0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0]
_DP_B4 = [5179 / 57600, 0, 7571 / 16695, 393 / 640, -92097 / 339200, 187 / 2100, 1 / 40]
_GL4_X, _GL4_W = np.polynomial.legendre.leggauss(4)
_GL10_X, _GL10_W = np.polynomial.legendre.leggauss(10)


def _align(v: complex, ref: complex) -> complex:
    return v if (v * ref.conjugate()).real >= 0 else -v


def _sqrt_aligned(qd, z, ref):
    return _align(cmath.sqrt(qd.q(z)), ref)


def seed_directions(qd, p: CriticalPoint, kind: str = "critical") -> List[float]:
    """Local directions theta_k leaving p: critical Q dz^2 < 0, orthogonal Q dz^2 > 0."""
    m = p.order
    A = qd.local_coeff(p.point, m)
    base = math.pi if kind == "critical" else 0.0
    return [(base - cmath.phase(A) + 2 * math.pi * k) / (m + 2) for k in range(m + 2)]


def _chord_eta(qd, z0, z1, sq0):
    """-int_{z0}^{z1} sqrt(Q) along the chord with the branch continued from sq0."""
    mid, half = (z0 + z1) / 2, (z1 - z0) / 2
    tot = 0j
    ref = sq0
    for x, w in sorted(zip(_GL4_X, _GL4_W)):
        s = mid + half * x
        v = _sqrt_aligned(qd, s, ref)
        ref = v
        tot += w * v
    return -tot * half


def _end_eta(qd, z, q, sq, m):
    """-int_z^q sqrt(Q) into a zero of order m; s = q + (z - q) tau^2 smooths it."""
    tot = 0j
    for x, w in zip(_GL10_X, _GL10_W / 2):
        tau = (x + 1) / 2
        s = q + (z - q) * tau * tau
        v = _align(cmath.sqrt(qd.q(s)), sq * tau ** m)
        tot += w * v * 2 * tau * (z - q)
    return tot


class _Tracer:
    def __init__(self, qd, kind, level, rmax, hmin, hmax, tol, max_steps, hmax_fn, pole_radius,
                 capture: bool = True):
        self.qd, self.kind, self.level = qd, kind, level
        self.rmax, self.hmin, self.hmax, self.tol = rmax, hmin, hmax, tol
        self.max_steps, self.hmax_fn, self.pole_radius = max_steps, hmax_fn, pole_radius
        self.capture = capture
        self.crit = list(qd.critical)

    def tangent(self, z, ref, dirn):
        sq = _sqrt_aligned(self.qd, z, ref)
        a = abs(sq)
        if a == 0:
            raise BranchLost(f"tangent undefined at zero {z}")
        t = dirn * sq.conjugate() / a
        return (1j * t if self.kind == "critical" else t), sq

    def part(self, eta):
        return eta.real if self.kind == "critical" else eta.imag

    def correct(self, z, eta, sq, h):
        err = self.part(eta) - self.level
        d = -sq  # eta'
        if abs(d) == 0:
            return z, eta
        if self.kind == "critical":
            dz = -err * d.conjugate() / abs(d) ** 2
        else:
            dz = -err * 1j * d.conjugate() / abs(d) ** 2
        if abs(dz) > 0.1 * h:
            return z, eta
        return z + dz, eta + d * dz

    def run(self, z, eta, sq, dirn, seed_label=None, seed_point=None, seed_index=None):
        samples, etas, sqs = [z], [eta], [sq]
        h = min(self.hmax, 1e-3 * self.qd.scale)
        left_seed = seed_point is None
        t_prev, _ = self.tangent(z, sq, dirn)
        for _ in range(self.max_steps):
            # proximity bookkeeping
            dists = [(abs(z - cp.point), cp) for cp in self.crit]
            if seed_point is not None and not left_seed and abs(z - seed_point) > 20 * LOCAL_RADIUS * self.qd.scale:
                left_seed = True
            near = [(d, cp) for d, cp in dists if left_seed or cp.point != seed_point]
            for d, cp in near:
                if self.capture and d < LOCAL_RADIUS * self.qd.scale:
                    m = cp.order
                    eta_q = eta + (2.0 / (m + 2)) * sq * (z - cp.point)
                    if abs(self.part(eta_q) - self.level) < 1e-7:
                        samples.append(cp.point)
                        etas.append(eta + _end_eta(self.qd, z, cp.point, sq, m))
                        sqs.append(0j)
                        return self._done(samples, etas, sqs, seed_label, seed_index,
                                          Terminal("HitsCriticalPoint", cp.point, cp.label))
            if abs(z) > self.rmax:
                return self._done(samples, etas, sqs, seed_label, seed_index,
                                  Terminal("Asymptotic", z, angle=self.qd.asymptotic_angle(z)))
            for pz in self.qd.poles:
                if abs(z - pz) < self.pole_radius:
                    return self._done(samples, etas, sqs, seed_label, seed_index,
                                      Terminal("Pole", pz))
            hcap = self.hmax
            if self.hmax_fn is not None:
                hcap = min(hcap, self.hmax_fn(z))
            # the seed still limits the step: chords must not sample its branch point
            dstep = min((d for d, _ in dists), default=math.inf)
            hcap = min(hcap, max(self.hmin, 0.3 * dstep))
            for pz in self.qd.poles:
                hcap = min(hcap, max(self.hmin, 0.3 * abs(z - pz)))
            h = min(h, hcap)
            # one Dormand-Prince step, retried with smaller h on rejection
            while True:
                ks = []
                ref = sq
                for i in range(7):
                    zi = z + h * sum(a * k for a, k in zip(_DP_A[i], ks))
                    k, ref_i = self.tangent(zi, ref, dirn)
                    ks.append(k)
                z5 = z + h * sum(b * k for b, k in zip(_DP_B5, ks))
                z4 = z + h * sum(b * k for b, k in zip(_DP_B4, ks))
                err = abs(z5 - z4)
                if err <= self.tol or h <= self.hmin:
                    break
                h = max(self.hmin, h * max(0.2, 0.9 * (self.tol / err) ** 0.2))
            if err > self.tol and h <= self.hmin and err > 1e3 * self.tol:
                raise BranchLost(f"step control failed near {z}")
            eta_new = eta + _chord_eta(self.qd, z, z5, sq)
            sq_new = _sqrt_aligned(self.qd, z5, sq)
            z_new, eta_new = self.correct(z5, eta_new, sq_new, h)
            if z_new != z5:
                eta_fix = eta + _chord_eta(self.qd, z, z_new, sq)
                sq_new = _sqrt_aligned(self.qd, z_new, sq)
                eta_new = eta_fix
            t_new, _ = self.tangent(z_new, sq_new, dirn)
            if (t_new * t_prev.conjugate()).real < -0.5:
                raise BranchLost(f"tangent reversal at {z_new}")
            z, eta, sq, t_prev = z_new, eta_new, sq_new, t_new
            samples.append(z)
            etas.append(eta)
            sqs.append(sq)
            grow = 5.0 if err == 0 else min(5.0, max(0.2, 0.9 * (self.tol / err) ** 0.2))
            h = min(hcap if hcap > 0 else self.hmax, h * grow, self.hmax)
        return self._done(samples, etas, sqs, seed_label, seed_index, Terminal("StepLimit", z))

    def _done(self, samples, etas, sqs, seed_label, seed_index, term):
        return Trajectory(np.array(samples), np.array(etas), np.array(sqs), seed_label,
                          seed_index, self.kind, term, self.level)


def trace(qd, seed, direction_index: int, kind: str = "critical", rmax: float = RMAX,
          hmin: float = HMIN, hmax: float = HMAX, tol: float = STEP_TOL,
          max_steps: int = MAX_STEPS, hmax_fn=None, pole_radius: float = 1e-3,
          r0: Optional[float] = None) -> Trajectory:
    """Trace the critical (or orthogonal) trajectory leaving a zero of qd.

    seed is a CriticalPoint, its label, or its location.  eta is normalized
    to 0 at the seed, so the traced level is Re eta = 0 (Im eta = 0 for the
    orthogonal kind).
    """
    cp = _resolve_seed(qd, seed)
    thetas = seed_directions(qd, cp, kind)
    theta = thetas[direction_index % len(thetas)]
    m = cp.order
    A = qd.local_coeff(cp.point, m)
    r0 = (LOCAL_RADIUS * 2 * qd.scale) if r0 is None else r0
    w_unit = cmath.sqrt(A) * r0 ** (m / 2)
    taus = (_GL10_X + 1) / 2

    def start(phi):
        # eta and sqrt(Q) at p + r0 e^{i phi}; s = p + (z1-p) tau^2 smooths the endpoint
        z1 = cp.point + r0 * cmath.exp(1j * phi)
        w1 = w_unit * cmath.exp(1j * m * phi / 2)
        tot = 0j
        for tau, w in zip(taus, _GL10_W / 2):
            s = cp.point + (z1 - cp.point) * tau * tau
            v = _align(cmath.sqrt(qd.q(s)), tau ** m * w1)
            tot += w * v * 2 * tau * (z1 - cp.point)
        return z1, -tot, _align(cmath.sqrt(qd.q(z1)), w1)

    part = (lambda v: v.real) if kind == "critical" else (lambda v: v.imag)
    phi = theta
    for _ in range(6):
        # Newton along the small circle so the first sample sits on the level
        z1, eta1, sq1 = start(phi)
        d = part(-sq1 * 1j * r0 * cmath.exp(1j * phi))
        if d == 0 or abs(part(eta1)) < 1e-15:
            break
        phi -= part(eta1) / d
    z1, eta1, sq1 = start(phi)
    e = cmath.exp(1j * theta)
    proj = sq1 * e
    dirn = (1 if proj.imag >= 0 else -1) if kind == "critical" else (1 if proj.real >= 0 else -1)
    tr = _Tracer(qd, kind, 0.0, rmax, hmin, hmax, tol, max_steps, hmax_fn, pole_radius)
    traj = tr.run(z1, eta1, sq1, dirn, seed_label=cp.label, seed_point=cp.point,
                  seed_index=direction_index)
    traj.samples = np.concatenate([[cp.point], traj.samples])
    traj.etas = np.concatenate([[0j], traj.etas])
    traj.sqrts = np.concatenate([[0j], traj.sqrts])
    return traj


def trace_from(qd, z, eta, sq, inward: bool = True, kind: str = "critical", level=None,
               rmax: float = RMAX, **kw) -> Trajectory:
    """Trace the level curve through a regular point z (eta, sqrt(Q) given there)."""
    level = (eta.real if kind == "critical" else eta.imag) if level is None else level
    t = (1j if kind == "critical" else 1) * sq.conjugate() / abs(sq)
    dirn = 1 if (t * z.conjugate()).real < 0 else -1
    if not inward:
        dirn = -dirn
    tr = _Tracer(qd, kind, level, rmax * 1.0000001 if inward else rmax,
                 kw.get("hmin", HMIN), kw.get("hmax", HMAX), kw.get("tol", STEP_TOL),
                 kw.get("max_steps", MAX_STEPS), kw.get("hmax_fn"), kw.get("pole_radius", 1e-3))
    # step inside the circle first so the rmax test does not fire at once
    return tr.run(z, eta, sq, dirn)


def _resolve_seed(qd, seed) -> CriticalPoint:
    if isinstance(seed, CriticalPoint):
        return seed
    for cp in qd.critical:
        if seed == cp.label:
            return cp
    if isinstance(seed, (int, float, complex)):
        for cp in qd.critical:
            if abs(cp.point - complex(seed)) < 1e-9:
                return cp
    raise SeedNotCritical(f"{seed!r} is not a critical point of this differential")


# ---------------------------------------------------------------- graphs

def _nearest_k(angle: float) -> Tuple[int, float]:
    k = round((angle - math.pi / 8) / (math.pi / 4)) % 8
    target = math.pi / 8 + k * math.pi / 4
    dev = abs(cmath.phase(cmath.exp(1j * (angle - target))))
    return k, dev


@dataclass
class CriticalGraph:
    qd: QuadraticDifferential
    trajectories: List[Trajectory]
    off_level: List[Trajectory]
    connections: List[Tuple[str, str]]
    census: List[float]
    rmax: float

    def connected(self, p: str, q: str) -> bool:
        return (p, q) in self.connections or (q, p) in self.connections

    def census_report(self) -> Dict:
        ks, devs = [], []
        for a in self.census:
            k, d = _nearest_k(a)
            ks.append(k)
            devs.append(d)
        return {"count": len(self.census), "directions": sorted(ks),
                "maxDeviation": max(devs) if devs else None,
                "complete": sorted(ks) == list(range(8))}

    def arc(self, p: str, q: str) -> Optional[Trajectory]:
        for t in self.trajectories:
            if t.terminal.kind == "HitsCriticalPoint" and {t.seed, t.terminal.label} == {p, q}:
                return t
        return None

    def symmetry_error(self) -> float:
        """max distance between each trajectory mirrored by z -> -z and the graph."""
        worst = 0.0
        polys = [_densify(t) for t in self.trajectories]
        for t in self.trajectories:
            pts = -t.samples[np.abs(t.samples) <= self.rmax]   # ends past rmax differ by design
            best = min(_hausdorff_one_sided(pts, P) for P in polys)
            worst = max(worst, best)
        return worst

    def as_dict(self):
        return {"sigma": [self.qd.sigma.real, self.qd.sigma.imag], "regime": str(self.qd.regime),
                "M": self.rmax, "connections": [list(c) for c in self.connections],
                "census": self.census_report(),
                "trajectories": [t.as_dict() for t in self.trajectories],
                "offLevel": [t.as_dict() for t in self.off_level]}


def _densify(t: Trajectory, n: int = 8) -> np.ndarray:
    """Cubic Hermite refinement of the sample polyline using the exact tangents."""
    z = t.samples
    if len(z) < 2:
        return z
    chords = np.diff(z)
    tan = np.empty(len(z), dtype=complex)
    sq = t.sqrts
    for i in range(len(z)):
        ch = chords[min(i, len(chords) - 1)]
        if sq[i] == 0:
            tan[i] = ch / abs(ch) if ch != 0 else 0
            continue
        d = (1j if t.kind == "critical" else 1) * np.conj(sq[i]) / abs(sq[i])
        tan[i] = d if (d * np.conj(ch)).real >= 0 else -d
    s = np.linspace(0, 1, n + 1)[:-1]
    h00, h10 = 2 * s ** 3 - 3 * s ** 2 + 1, s ** 3 - 2 * s ** 2 + s
    h01, h11 = -2 * s ** 3 + 3 * s ** 2, s ** 3 - s ** 2
    L = np.abs(chords)[:, None]
    pts = (h00 * z[:-1, None] + h10 * L * tan[:-1, None] + h01 * z[1:, None] + h11 * L * tan[1:, None])
    return np.concatenate([pts.ravel(), z[-1:]])


def _seg_dist(points: np.ndarray, poly: np.ndarray) -> np.ndarray:
    a, b = poly[:-1], poly[1:]
    d = b - a
    L2 = np.abs(d) ** 2
    L2[L2 == 0] = 1.0
    t = ((points[:, None] - a[None, :]) * d.conjugate()[None, :]).real / L2[None, :]
    t = np.clip(t, 0, 1)
    proj = a[None, :] + t * d[None, :]
    return np.min(np.abs(points[:, None] - proj), axis=1)


def _hausdorff_one_sided(P: np.ndarray, Q: np.ndarray) -> float:
    if len(Q) < 2:
        return float(np.min(np.abs(P[:, None] - Q[None, :])))
    return float(np.max(_seg_dist(P, Q)))


def crossings(qd: QuadraticDifferential, R: float) -> List[complex]:
    """Points on |z| = R where the Re eta = 0 level crosses (eight for large R)."""
    out = []
    f = lambda th: qd.eta_far(R * cmath.exp(1j * th)).real
    for k in range(8):
        c = math.pi / 8 + k * math.pi / 4
        lo, hi = c - math.pi / 9, c + math.pi / 9
        try:
            th = optimize.brentq(f, lo, hi, xtol=1e-14)
        except ValueError:
            continue
        out.append(R * cmath.exp(1j * th))
    return out


def critical_graph(qd: QuadraticDifferential, rmax: float = RMAX, humps: bool = True,
                   off_level: bool = True) -> CriticalGraph:
    trajs, offs = [], []
    for cp in qd.critical:
        n = cp.order + 2
        for k in range(n):
            if not cp.on_level and not off_level:
                continue
            t = trace(qd, cp, k, rmax=rmax)
            (trajs if cp.on_level else offs).append(t)
    conns = []
    for t in trajs:
        if t.terminal.kind == "HitsCriticalPoint":
            pair = (t.seed, t.terminal.label)
            if pair not in conns and pair[::-1] not in conns:
                conns.append(pair)
    ends = [t.samples[-1] for t in trajs if t.terminal.kind == "Asymptotic"]
    census = [t.terminal.angle for t in trajs if t.terminal.kind == "Asymptotic"]
    if humps:
        R = rmax * 0.999
        for zc in crossings(qd, R):
            if any(abs(cmath.phase(e / zc)) < 1e-3 for e in ends):
                continue
            eta = qd.eta_far(zc)
            sq = ep.far_sqrt(zc, qd.squares)
            t = trace_from(qd, zc, eta, sq, inward=True, level=0.0, rmax=rmax)
            trajs.append(t)
            census.append(qd.asymptotic_angle(zc))
            ends.append(zc)
            if t.terminal.kind == "Asymptotic":
                census.append(t.terminal.angle)
                ends.append(t.samples[-1])
            elif t.terminal.kind == "HitsCriticalPoint":
                conns.append(("inf", t.terminal.label))
    return CriticalGraph(qd, trajs, offs, conns, census, rmax)


# ---------------------------------------------------------------- export

def write_csv(traj: Trajectory, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["re", "im"])
        w.writerows(traj.to_rows())


def write_graph_csv(graph: CriticalGraph, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["trajectory", "seed", "terminal", "re", "im"])
        for i, t in enumerate(graph.trajectories + graph.off_level):
            for z in t.samples:
                w.writerow([i, t.seed, str(t.terminal), float(z.real), float(z.imag)])


def write_json(obj, path) -> None:
    with open(path, "w") as fh:
        json.dump({"schemaVersion": 1, **obj.as_dict()}, fh, indent=1)


# ---------------------------------------------------------------- stable lands

FLOOD_H = 0.05

_EXPECTED = {"OneCut": [("b1", "-b1")],
             "MultiCritical": [("b1", "-b1")],
             "TwoCut": [("b2", "a2"), ("-b2", "-a2")],
             "ThreeCut": [("c3", "b3"), ("-c3", "-b3"), ("a3", "-a3")]}


def stable_sign(sigma, z, regime: PhaseRegime, measure=None, band: float = 1e-8) -> int:
    """-1 if z lies in a stable land (Re eta < 0), +1 if unstable.

    The sign is that of 2U - Re V - Re ell*, with U the logarithmic potential
    of the traced measure, so it does not depend on where any cut is drawn.
    """
    from .gfunction import support_measure
    m = measure or support_measure(sigma, regime)
    if not m.complete:
        raise BranchLost(f"support arcs {m.missing} were not found; {regime} is not the regime")
    z = complex(z)
    ell = ep.lagrange_constant(m.sigma, regime).ellStar
    F = 2 * m.log_potential_precise(z) - (m.sigma * z * z / 2 + z ** 4 / 4).real - ell.real
    if abs(F) < band:
        raise OnGraph(f"|Re eta({z})| = {abs(F):.2e} is inside the tolerance band")
    return -1 if F < 0 else 1


@dataclass
class FloodFill:
    box: float
    h: float
    x: np.ndarray
    F: np.ndarray
    labels: np.ndarray

    def component_at(self, z: complex) -> int:
        i = int(round((z.imag + self.box) / self.h))
        j = int(round((z.real + self.box) / self.h))
        i = min(max(i, 0), len(self.x) - 1)
        j = min(max(j, 0), len(self.x) - 1)
        return int(self.labels[i, j])

    def components_near(self, z: complex, radius: Optional[float] = None) -> set:
        r = 2.5 * self.h if radius is None else radius
        X, Y = np.meshgrid(self.x, self.x)
        near = np.abs(X + 1j * Y - z) <= r
        return set(int(v) for v in np.unique(self.labels[near]) if v > 0)


def flood_fill(measure, h: float = FLOOD_H, box: Optional[float] = None) -> FloodFill:
    """Label the connected components of the stable set on a square grid."""
    from scipy import ndimage
    sg = measure.sigma
    ends = [abs(cmath.sqrt(x)) for x in measure.qd.squares]
    R = box or max(1.5 * max(ends), 2.4 * math.sqrt(abs(sg)), 3.0)
    x = np.arange(-R, R + h / 2, h)
    X, Y = np.meshgrid(x, x)
    Z = X + 1j * Y
    ell = ep.lagrange_constant(sg, measure.regime).ellStar
    F = 2 * measure.log_potential(Z) - (sg * Z * Z / 2 + Z ** 4 / 4).real - ell.real
    labels, _ = ndimage.label(F < 0)
    return FloodFill(R, h, x, F, labels)


@dataclass
class VerificationReport:
    sigma: complex
    regime: PhaseRegime
    checks: Dict[str, bool]
    details: Dict[str, object]
    M: float

    @property
    def ok(self) -> bool:
        return all(self.checks.values())

    def failed(self) -> List[str]:
        return [k for k, v in self.checks.items() if not v]

    def as_dict(self):
        return {"sigma": [self.sigma.real, self.sigma.imag], "regime": str(self.regime),
                "ok": self.ok, "checks": self.checks, "M": self.M,
                "details": {k: (str(v) if not isinstance(v, (int, float, bool, list)) else v)
                            for k, v in self.details.items()}}


def verify_regime(sigma, regime: PhaseRegime, rmax: float = RMAX) -> VerificationReport:
    """Check the regime's defining conditions on a traced critical graph.

    Conditions: the expected short trajectories exist, zeros outside the
    level set stay off it, the asymptotic census is complete, the measure
    has mass one, and the stable lands connect the outer endpoint to the
    positive real axis (and, with several cuts, the gap endpoints to each
    other), the last tested by a flood fill.
    """
    from .gfunction import SupportMeasure
    sg = _c(sigma)
    checks, details = {}, {}
    try:
        endpoints = ep.solve(sg, regime)
    except (ep.NoConvergence, ep.DegenerateEndpoint, ep.BadSeed) as exc:
        return VerificationReport(sg, regime, {"endpoints": False}, {"error": str(exc)}, math.nan)
    qd = build_qd(sg, regime, endpoints)
    graph = critical_graph(qd, rmax=rmax)
    tag = "OneCut" if regime.tag == "MultiCritical" else regime.tag
    for p, q in _EXPECTED[tag]:
        checks[f"connects {p},{q}"] = graph.connected(p, q)
    for t in graph.off_level:
        details[f"Re eta({t.seed})"] = float(_offset_level(qd, t))
    for cp in qd.critical:
        if not cp.on_level:
            checks[f"{cp.label} off level"] = abs(details.get(f"Re eta({cp.label})", 1.0)) > 1e-6
    rep = graph.census_report()
    checks["census"] = bool(rep["complete"])
    details["census"] = rep["directions"]
    m = SupportMeasure(graph)
    checks["support"] = m.complete
    M = math.nan
    if m.complete:
        checks["mass"] = abs(m.total_mass - 1) < 1e-6
        details["mass"] = m.total_mass
        ff = flood_fill(m)
        M = ff.box
        outer = qd.outer
        far = ff.component_at(complex(ff.box, 0))
        checks["stable +inf reaches outer"] = far > 0 and far in ff.components_near(outer)
        farm = ff.component_at(complex(-ff.box, 0))
        checks["stable -inf reaches -outer"] = farm > 0 and farm in ff.components_near(-outer)
        inner = {"TwoCut": ("a2", "-a2"), "ThreeCut": ("a3", "b3")}.get(tag)
        if inner:
            pts = {cp.label: cp.point for cp in qd.critical}
            common = ff.components_near(pts[inner[0]]) & ff.components_near(pts[inner[1]])
            checks[f"stable gap {inner[0]},{inner[1]}"] = bool(common)
            if tag == "ThreeCut":
                common = ff.components_near(-pts["a3"]) & ff.components_near(-pts["b3"])
                checks["stable gap -a3,-b3"] = bool(common)
    details["connections"] = [list(c) for c in graph.connections]
    return VerificationReport(sg, regime, checks, details, M)


def _offset_level(qd, t: Trajectory) -> float:
    """Re eta at an off-level zero, from the closed forms (branch free in modulus)."""
    from .gfunction import eta
    return abs(eta(t.samples[0] + 0j, qd.sigma, qd.regime, qd.endpoints).value.real)


# ---------------------------------------------------------------- SVG

def render_svg(graph: CriticalGraph, path, shade: bool = True, extent: Optional[float] = None) -> None:
    """Critical graph with the stable lands shaded."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    from .gfunction import SupportMeasure
    fig, ax = plt.subplots(figsize=(6, 6))
    qd = graph.qd
    R = extent or max(3.0, 1.6 * max(abs(cmath.sqrt(x)) for x in qd.squares))
    if shade:
        m = SupportMeasure(graph)
        if m.complete:
            ff = flood_fill(m, h=R / 150, box=R)
            ax.contourf(ff.x, ff.x, (ff.F < 0).astype(float), levels=[0.5, 1.5], colors=["#cde6f7"])
    for t in graph.trajectories:
        z = t.samples
        short = t.terminal.kind == "HitsCriticalPoint"
        ax.plot(z.real, z.imag, "-", lw=1.4 if short else 0.8, color="k" if short else "#555555")
    for t in graph.off_level:
        ax.plot(t.samples.real, t.samples.imag, ":", color="#999999", lw=0.6)
    for cp in qd.critical:
        ax.plot(cp.point.real, cp.point.imag, "o", color="#c0392b" if cp.on_level else "#27ae60", ms=4)
        ax.annotate(cp.label, (cp.point.real, cp.point.imag), fontsize=7,
                    xytext=(3, 3), textcoords="offset points")
    ax.set_xlim(-R, R)
    ax.set_ylim(-R, R)
    ax.set_aspect("equal")
    ax.set_title(f"sigma = {qd.sigma.real:g}{qd.sigma.imag:+g}i, {qd.regime}")
    fig.savefig(path, format=Path(path).suffix.lstrip(".") or "svg")
    plt.close(fig)
