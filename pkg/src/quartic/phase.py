"""Phase boundaries in the sigma-plane and the point classifier.

Psi(sigma) = eta1(z0(sigma); sigma) vanishes in real part where a double zero
of the one-cut differential meets the support level set; Phi(sigma) =
eta2(0; sigma) does the same for the birth of a cut at the origin.  Their
zero level sets are traced as critical trajectories of

    Xi(beta) dbeta^2,  Xi = -(3 beta^2 + 16)^3 (beta^2 - 16) / (1024 beta^6),
    Upsilon(sigma) dsigma^2,  Upsilon = sigma^2/4 - 1,

with beta = b1^2 and sigma = -3 beta/4 + 4/beta.

Curve names (upper half plane; the lower ones are conjugates):
  g1 = I     -2 -> i sqrt12                        one/three-cut
  g3 = VII   i sqrt12 -> infinity along 3 pi/4     one/three-cut
  g5         -2 -> infinity along 3 pi/4           two/three-cut
  VI         i sqrt12 -> infinity along pi/4       Re Psi = 0 but not a boundary
  XI         (-infinity, -2)                       Re Psi = 0 on the cut L, not a boundary
g2 = XII, g4 = IX, g6 and VIII are the conjugates of g1, g3, g5 and VI.
"""
from __future__ import annotations

import cmath
import json
import math
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Optional, Tuple

import numpy as np
from matplotlib.path import Path as MplPath

from . import endpoints as ep
from .model import (DEFAULT_BRANCH, MULTICRITICAL, ONE_CUT, SQRT12, THREE_CUT, TWO_CUT,
                    OnBranchCut, PhaseRegime, _c, is_multicritical)
from .quaddiff import CriticalPoint, RationalField, trace

R_TRUNC = 40.0
BOUNDARY_TOL = 1e-6
CACHE_VERSION = 2
BETA3 = complex(0, 4 / math.sqrt(3))


class ZeroBeta(ValueError):
    pass


class PoleAtZero(ValueError):
    pass


class VerificationMismatch(RuntimeError):
    def __init__(self, claimed: PhaseRegime, report):
        super().__init__(f"{claimed} failed verification: {', '.join(report.failed())}")
        self.claimed = claimed
        self.report = report


@dataclass(frozen=True)
class BetaPoint:
    beta: complex

    def __post_init__(self):
        if complex(self.beta) == 0:
            raise ZeroBeta("beta = 0 has no sigma")


# ---------------------------------------------------------------- closed forms

def psi_z0(o) -> complex:
    """The double zero Psi is evaluated at: +-z0 with Re(z0 conj b1) >= 0."""
    return o.z0 if (o.z0 * o.b1.conjugate()).real >= 0 else -o.z0


def psi(sigma) -> complex:
    """Psi = -sigma z0 r / 4 + 2 log((z0 + r) / b1) with r = sqrt(z0^2 - b1^2) = sqrt(-s).

    r is z0 sqrt(1 - b1^2/z0^2), the branch eta1 uses, so Psi = eta1(z0).
    Of the two double zeros +-z0 we take the one on b1's side (see psi_z0),
    so Psi(i sqrt 12) = 0 where z0 meets b1. The other choice only moves
    Im Psi by 2 pi.
    """
    sg = _c(sigma)
    o = ep.one_cut(sg)
    b1, z0 = o.b1, psi_z0(o)
    if z0 == 0:
        r = 1j * b1
    else:
        r = z0 * cmath.sqrt(1 - b1 * b1 / (z0 * z0))
    return -sg * z0 * r / 4 + 2 * cmath.log((z0 + r) / b1)


def phi(sigma) -> complex:
    """Phi = -sigma r / 4 + log((sigma + r) / 2), r = sigma sqrt(1 - 4/sigma^2)."""
    sg = _c(sigma)
    if sg == 0:
        r = 2j
    else:
        r = sg * cmath.sqrt(1 - 4 / (sg * sg))
    return -sg * r / 4 + cmath.log((sg + r) / 2)


def xi(beta) -> complex:
    b = complex(beta)
    if b == 0:
        raise PoleAtZero("Xi has a pole at beta = 0")
    return -(3 * b * b + 16) ** 3 * (b * b - 16) / (1024 * b ** 6)


def upsilon(sigma) -> complex:
    s = _c(sigma)
    return s * s / 4 - 1


def joukowski(beta) -> complex:
    b = complex(beta.beta if isinstance(beta, BetaPoint) else beta)
    if b == 0:
        raise ZeroBeta("beta = 0 has no sigma")
    return -3 * b / 4 + 4 / b


def inverse_joukowski(sigma) -> Tuple[complex, complex]:
    """(beta+, beta-) = 2/3 (-sigma +- sqrt(12 + sigma^2)); beta+ = b1^2."""
    sg = _c(sigma)
    s = DEFAULT_BRANCH.s(sg)
    return 2 * (-sg + s) / 3, 2 * (-sg - s) / 3


# ---------------------------------------------------------------- curves

@dataclass
class BoundaryCurve:
    id: str
    points: np.ndarray                       # complex sigma samples
    anchors: Tuple[str, ...]
    boundary: bool                           # False for VI, VIII, XI
    level: str                               # "psi" or "phi"
    asymptotic_angle: Optional[float] = None
    aliases: Tuple[str, ...] = ()

    def level_residual(self) -> float:
        f = psi if self.level == "psi" else phi
        return max(abs(f(z).real) for z in self.points if 0 < abs(z) < R_TRUNC
                   and DEFAULT_BRANCH.on_cut(z) is None)

    def conj(self, new_id: str, aliases=()) -> "BoundaryCurve":
        flip = {"+i√12": "-i√12", "-i√12": "+i√12"}
        return BoundaryCurve(new_id, np.conj(self.points), tuple(flip.get(a, a) for a in self.anchors),
                             self.boundary, self.level,
                             None if self.asymptotic_angle is None else (-self.asymptotic_angle) % (2 * math.pi),
                             aliases)

    def as_dict(self):
        return {"id": self.id, "aliases": list(self.aliases), "boundary": self.boundary,
                "level": self.level, "anchors": list(self.anchors),
                "asymptoticAngle": self.asymptotic_angle,
                "points": [[float(z.real), float(z.imag)] for z in self.points]}

    @classmethod
    def from_dict(cls, d):
        return cls(d["id"], np.array([complex(a, b) for a, b in d["points"]]), tuple(d["anchors"]),
                   d["boundary"], d["level"], d["asymptoticAngle"], tuple(d.get("aliases", ())))


_ALIASES = {"g1": "g1", "I": "g1", "γ1": "g1", "g2": "g2", "XII": "g2", "γ2": "g2",
            "g3": "g3", "VII": "g3", "γ3": "g3", "g4": "g4", "IX": "g4", "γ4": "g4",
            "g5": "g5", "γ5": "g5", "g6": "g6", "γ6": "g6",
            "VI": "VI", "VIII": "VIII", "XI": "XI"}


def _spacing(sg: complex) -> float:
    # 1e-3 near the anchors, 1e-2 elsewhere
    d = min(abs(sg - p) for p in MULTICRITICAL)
    return 1e-3 if d < 0.1 else 1e-2


def _xi_field() -> RationalField:
    f = lambda b: -(3 * b * b + 16) ** 3 * (b * b - 16) / (1024 * b ** 6)
    crit = [CriticalPoint(4 + 0j, 1, "4"), CriticalPoint(-4 + 0j, 1, "-4"),
            CriticalPoint(BETA3, 3, "4i/√3"), CriticalPoint(-BETA3, 3, "-4i/√3")]
    return RationalField(f, crit, poles=[0j], scale=1.0)


def _ups_field() -> RationalField:
    f = lambda s: s * s / 4 - 1
    crit = [CriticalPoint(-2 + 0j, 1, "-2"), CriticalPoint(2 + 0j, 1, "2")]
    return RationalField(f, crit, scale=1.0,
                         angle=lambda z: cmath.phase(z) % (2 * math.pi))


def _beta_hmax(b: complex) -> float:
    d = abs(-0.75 - 4 / (b * b))
    return _spacing(joukowski(b)) / max(d, 1e-3)


def _truncate(points: np.ndarray) -> np.ndarray:
    """Cut a sigma polyline at |sigma| = R_TRUNC (interpolating the crossing)."""
    out = [points[0]]
    for a, b in zip(points[:-1], points[1:]):
        if abs(b) >= R_TRUNC:
            t = (R_TRUNC - abs(a)) / (abs(b) - abs(a))
            out.append(a + t * (b - a))
            break
        out.append(b)
    return np.array(out)


def _trace_xi_family() -> Dict[str, BoundaryCurve]:
    F = _xi_field()
    out = {}
    # from beta = -4i/sqrt3 (sigma = +i sqrt12): five directions
    for k in range(5):
        t = trace(F, "-4i/√3", k, rmax=100.0, hmax=0.02, hmax_fn=_beta_hmax, pole_radius=0.09,
                  max_steps=400_000)
        sig = np.array([joukowski(b) for b in t.samples[1:]])
        sig = np.concatenate([[1j * SQRT12], sig])
        if t.terminal.kind == "HitsCriticalPoint" and t.terminal.label == "4":
            out["g1"] = BoundaryCurve("g1", sig[::-1], ("-2", "+i√12"), True, "psi", None, ("I",))
        elif t.terminal.kind == "Pole":
            ang = cmath.phase(t.samples[-1])
            sig = _truncate(sig)
            far = cmath.phase(sig[-1]) % (2 * math.pi)
            if abs(ang + 3 * math.pi / 4) < 0.3:
                out["g3"] = BoundaryCurve("g3", sig, ("+i√12",), True, "psi", far, ("VII",))
            elif abs(ang + math.pi / 4) < 0.3:
                out["VI"] = BoundaryCurve("VI", sig, ("+i√12",), False, "psi", far)
    # the real ray beta > 4 maps onto (-infinity, -2)
    for k in range(3):
        t = trace(F, "4", k, rmax=60.0, hmax=0.05, hmax_fn=_beta_hmax, max_steps=400_000)
        if t.terminal.kind == "Asymptotic" and abs(t.samples[-1].imag) < 1e-6 * abs(t.samples[-1]):
            sig = _truncate(np.array([joukowski(b) for b in t.samples]))
            out["XI"] = BoundaryCurve("XI", sig, ("-2",), False, "psi", math.pi)
    return out


def _trace_ups() -> BoundaryCurve:
    F = _ups_field()
    for k in range(3):
        t = trace(F, "-2", k, rmax=R_TRUNC, hmax=0.01, hmax_fn=_spacing, max_steps=400_000)
        if t.terminal.kind == "Asymptotic" and t.samples[-1].imag > 0:
            pts = _truncate(t.samples)
            return BoundaryCurve("g5", pts, ("-2",), True, "phi",
                                 cmath.phase(pts[-1]) % (2 * math.pi))
    raise RuntimeError("no Upsilon trajectory from -2 into the upper half plane")


def cache_dir() -> Path:
    d = os.environ.get("QUARTIC_CACHE_DIR")
    return Path(d) if d else Path.home() / ".cache" / "quartic"


def _build_curves() -> Dict[str, BoundaryCurve]:
    up = _trace_xi_family()
    up["g5"] = _trace_ups()
    missing = {"g1", "g3", "g5", "VI", "XI"} - set(up)
    if missing:
        raise RuntimeError(f"boundary tracing did not find {sorted(missing)}")
    curves = dict(up)
    curves["g2"] = up["g1"].conj("g2", ("XII",))
    curves["g4"] = up["g3"].conj("g4", ("IX",))
    curves["g6"] = up["g5"].conj("g6")
    curves["VIII"] = up["VI"].conj("VIII")
    return curves


_CURVES: Optional[Dict[str, BoundaryCurve]] = None


def boundary_curves(refresh: bool = False) -> Dict[str, BoundaryCurve]:
    """All curves, traced once and cached on disk (QUARTIC_CACHE_DIR overrides the place)."""
    global _CURVES, _LOCATOR
    if _CURVES is not None and not refresh:
        return _CURVES
    path = cache_dir() / f"boundaries-v{CACHE_VERSION}.json"
    if path.exists() and not refresh:
        try:
            data = json.loads(path.read_text())
            _CURVES = {d["id"]: BoundaryCurve.from_dict(d) for d in data["curves"]}
            _LOCATOR = None
            return _CURVES
        except (ValueError, KeyError):
            pass
    _CURVES = _build_curves()
    _LOCATOR = None
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        tmp = path.with_suffix(".tmp")
        tmp.write_text(json.dumps({"schemaVersion": 1, "curves": [c.as_dict() for c in _CURVES.values()]}))
        tmp.replace(path)
    except OSError:
        pass
    return _CURVES


def trace_boundary(id: str) -> BoundaryCurve:
    key = _ALIASES.get(id)
    if key is None:
        raise ValueError(f"unknown curve {id!r}; expected one of {sorted(_ALIASES)}")
    return boundary_curves()[key]


# ---------------------------------------------------------------- classification

def _extend(points: np.ndarray, R: float = 1e6) -> np.ndarray:
    """Continue a truncated curve along its final direction out to radius R."""
    a, b = points[-2], points[-1]
    d = (b - a) / abs(b - a)
    return np.concatenate([points, [b + d * R]])


def _arc(z0: complex, z1: complex, R: float, n: int = 64) -> np.ndarray:
    a0, a1 = cmath.phase(z0) % (2 * math.pi), cmath.phase(z1) % (2 * math.pi)
    return R * np.exp(1j * np.linspace(a0, a1, n))


class _Locator:
    def __init__(self, curves: Dict[str, BoundaryCurve]):
        g1, g3, g5 = curves["g1"].points, _extend(curves["g3"].points), _extend(curves["g5"].points)
        R = abs(g3[-1])
        # three-cut region: -2 -> g1 -> i sqrt12 -> g3 -> far -> back along g5
        t_poly = np.concatenate([g1, g3[1:], _arc(g3[-1], g5[-1], R), g5[::-1]])
        # two-cut region: -2 -> g5 -> far -> arc to pi -> real axis back to -2
        two_poly = np.concatenate([g5, _arc(g5[-1], complex(-R, 0), R), [complex(-R, 0), -2 + 0j]])
        self.three = MplPath(np.column_stack([t_poly.real, t_poly.imag]))
        self.two = MplPath(np.column_stack([two_poly.real, two_poly.imag]))
        self.curves = curves

    def region(self, sg: complex) -> PhaseRegime:
        p = (sg.real, sg.imag)
        if self.three.contains_point(p):
            return THREE_CUT
        if self.two.contains_point(p):
            return TWO_CUT
        return ONE_CUT


_LOCATOR: Optional[_Locator] = None


def _locator() -> _Locator:
    global _LOCATOR
    if _LOCATOR is None:
        _LOCATOR = _Locator(boundary_curves())
    return _LOCATOR


def _poly_dist(z: complex, pts: np.ndarray) -> Tuple[float, int]:
    a, b = pts[:-1], pts[1:]
    d = b - a
    L2 = np.abs(d) ** 2
    L2[L2 == 0] = 1
    t = np.clip(((z - a) * np.conj(d)).real / L2, 0, 1)
    dist = np.abs(z - (a + t * d))
    i = int(np.argmin(dist))
    return float(dist[i]), i


def _level_distance(sg: complex, level: str) -> float:
    """|Re f| / |f'| for the curve's level function: distance to the exact curve."""
    f = psi if level == "psi" else phi
    h = 1e-6 * max(1.0, abs(sg))
    try:
        v = f(sg)
        d = (f(sg + h) - f(sg - h)) / (2 * h)
    except (OnBranchCut, ZeroDivisionError, ValueError):
        return math.inf
    if d == 0:
        return math.inf
    return abs(v.real) / abs(d)


def boundary_distance(sigma) -> Tuple[str, float]:
    """Nearest true phase boundary and the distance to it."""
    sg = _c(sigma)
    best = ("", math.inf)
    for cid, c in boundary_curves().items():
        if not c.boundary:
            continue
        d, _ = _poly_dist(sg, c.points)
        if d < 1e-3:
            d = min(d, _level_distance(sg, c.level))
        if d < best[1]:
            best = (cid, d)
    return best


def classify(sigma, verify: bool = False) -> PhaseRegime:
    """Phase of sigma by point location against the traced boundaries.

    Within BOUNDARY_TOL of a boundary curve the answer is Boundary(gk), at the
    three anchors MultiCritical(...).  With verify=True the claimed regime is
    re-derived from endpoints, critical graph and stable lands, and a
    disagreement raises VerificationMismatch.
    """
    sg = _c(sigma)
    mc = is_multicritical(sg, BOUNDARY_TOL)
    if mc is not None:
        return PhaseRegime("MultiCritical", mc)
    cid, d = boundary_distance(sg)
    if d <= BOUNDARY_TOL:
        return PhaseRegime("Boundary", cid)
    if sg.imag == 0:
        regime = ONE_CUT if sg.real > -2 else TWO_CUT
    else:
        w = sg if sg.imag > 0 else sg.conjugate()
        regime = _locator().region(w)
    if verify:
        from .quaddiff import verify_regime
        rep = verify_regime(sg, regime)
        if not rep.ok:
            raise VerificationMismatch(regime, rep)
    return regime


def bisect_flip(path, lo: float, hi: float, tol: float = 1e-4) -> float:
    """Parameter where classify(path(t)) changes between lo and hi."""
    r_lo = classify(path(lo)).tag
    r_hi = classify(path(hi)).tag
    if r_lo == r_hi:
        raise ValueError(f"no flip on [{lo}, {hi}]: both {r_lo}")
    while hi - lo > tol:
        mid = (lo + hi) / 2
        r = classify(path(mid)).tag
        if r == "Boundary":
            return mid
        if r == r_lo:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def phase_grid(re_range=(-6, 4), im_range=(-6, 6), n: int = 101) -> Dict:
    xs = np.linspace(*re_range, n)
    ys = np.linspace(*im_range, n)
    rows = [[str(classify(complex(x, y))) for x in xs] for y in ys]
    return {"re": xs.tolist(), "im": ys.tolist(), "regime": rows}


def render_phase_svg(path, show_fake: bool = False, extent: float = 8.0) -> None:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
    curves = boundary_curves()
    fig, ax = plt.subplots(figsize=(6, 6))
    loc = _locator()
    for name, poly, col in (("three-cut", loc.three, "#f6d7b0"), ("two-cut", loc.two, "#cde6f7")):
        for sgn in (1, -1):
            v = poly.vertices.copy()
            v[:, 1] *= sgn
            ax.fill(v[:, 0], v[:, 1], color=col, label=name if sgn == 1 else None)
    for cid, c in curves.items():
        if not c.boundary and not show_fake:
            continue
        ax.plot(c.points.real, c.points.imag, "-" if c.boundary else "--",
                color="k" if c.boundary else "#888888", lw=1)
    for p in MULTICRITICAL:
        ax.plot(p.real, p.imag, "ro", ms=4)
    ax.text(1.5, 1.0, "one-cut")
    ax.set_xlim(-extent, extent / 2)
    ax.set_ylim(-extent, extent)
    ax.set_aspect("equal")
    ax.legend(loc="lower right", fontsize=7)
    fig.savefig(path, format=Path(path).suffix.lstrip(".") or "svg")
    plt.close(fig)
