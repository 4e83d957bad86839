"""Parameters, potential and the global branch conventions.

V(z; sigma) = sigma z^2 / 2 + z^4 / 4, and u = sigma^-2.

Branch cuts (shared by every multivalued map in the package):
  L+ : i sqrt(12) - t,  L- : -i sqrt(12) - t,  L : -2 - t,  t > 0.
s(sigma) = sqrt(12 kappa + sigma^2) is taken as
sqrt(sigma - i sqrt(12 kappa)) * sqrt(sigma + i sqrt(12 kappa)) with
principal factors, which puts its cuts exactly on L+- and makes s > 0 on
the whole real axis.  z0 is fixed by arg(z0^2) in [0, 2 pi), so its only
extra cut is L.  Points on a cut are evaluated as limits from above.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import List, Optional

SQRT12 = math.sqrt(12.0)
MULTICRITICAL = (complex(-2, 0), complex(0, SQRT12), complex(0, -SQRT12))
_MC_NAMES = {MULTICRITICAL[0]: "-2", MULTICRITICAL[1]: "+i√12", MULTICRITICAL[2]: "-i√12"}


class ZeroParameter(ValueError):
    pass


class OnBranchCut(ValueError):
    pass


@dataclass(frozen=True)
class SigmaPoint:
    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("sigma must be finite")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, x) -> "SigmaPoint":
        if isinstance(x, SigmaPoint):
            return x
        x = complex(x)
        return cls(x.real, x.imag)

    def conj(self) -> "SigmaPoint":
        return SigmaPoint(self.re, -self.im)


@dataclass(frozen=True)
class UPoint:
    re: float
    im: float = 0.0

    def __post_init__(self):
        if not (math.isfinite(self.re) and math.isfinite(self.im)):
            raise ValueError("u must be finite")

    @property
    def z(self) -> complex:
        return complex(self.re, self.im)

    @classmethod
    def of(cls, x) -> "UPoint":
        if isinstance(x, UPoint):
            return x
        x = complex(x)
        return cls(x.real, x.imag)


def _c(x) -> complex:
    if isinstance(x, (SigmaPoint, UPoint)):
        return x.z
    return complex(x)


def _above(x: complex) -> complex:
    # negative zero imaginary parts would select the lower limit
    return complex(x.real, 0.0) if x.imag == 0 else x


@dataclass(frozen=True)
class BranchConvention:
    kappa: float = 1.0
    cut_tol: float = 0.0

    @property
    def branch_points(self):
        r = math.sqrt(12 * self.kappa)
        return complex(0, r), complex(0, -r), complex(-2 * math.sqrt(self.kappa), 0)

    def on_cut(self, sigma) -> Optional[str]:
        """Name of the cut containing sigma, if any."""
        s = _c(sigma)
        r = math.sqrt(12 * self.kappa)
        tol = self.cut_tol
        if s.real < 0 and abs(s.imag - r) <= tol:
            return "L+"
        if s.real < 0 and abs(s.imag + r) <= tol:
            return "L-"
        if s.real < -2 * math.sqrt(self.kappa) and abs(s.imag) <= tol:
            return "L"
        return None

    def s(self, sigma) -> complex:
        """sqrt(12 kappa + sigma^2), cuts on L+-, positive on the real axis."""
        s = _c(sigma)
        r = math.sqrt(12 * self.kappa)
        return cmath.sqrt(_above(s - 1j * r)) * cmath.sqrt(_above(s + 1j * r))

    @staticmethod
    def sqrt_arg_0_2pi(x: complex) -> complex:
        """sqrt with arg(x) in [0, 2 pi): result in the closed upper half plane.

        On the positive real axis the limit from above (arg -> 2 pi) is used,
        i.e. the negative root; see the ledger.
        """
        x = complex(x)
        if x == 0:
            return 0j
        return 1j * cmath.sqrt(_above(-x))


DEFAULT_BRANCH = BranchConvention()


@dataclass(frozen=True)
class PhaseRegime:
    tag: str                        # OneCut, TwoCut, ThreeCut, Boundary, MultiCritical
    detail: Optional[str] = None

    def __str__(self):
        return self.tag if self.detail is None else f"{self.tag}({self.detail})"

    @classmethod
    def parse(cls, text: str) -> "PhaseRegime":
        text = text.strip()
        aliases = {"1": "OneCut", "one": "OneCut", "onecut": "OneCut",
                   "2": "TwoCut", "two": "TwoCut", "twocut": "TwoCut",
                   "3": "ThreeCut", "three": "ThreeCut", "threecut": "ThreeCut"}
        key = text.lower().replace("-", "").replace("_", "")
        if key in aliases:
            return cls(aliases[key])
        if "(" in text and text.endswith(")"):
            tag, det = text[:-1].split("(", 1)
            if tag in ("Boundary", "MultiCritical"):
                return cls(tag, det)
        raise ValueError(f"unknown regime {text!r}")

    @property
    def cuts(self) -> int:
        return {"OneCut": 1, "TwoCut": 2, "ThreeCut": 3}.get(self.tag, 0)


ONE_CUT = PhaseRegime("OneCut")
TWO_CUT = PhaseRegime("TwoCut")
THREE_CUT = PhaseRegime("ThreeCut")


def potential(z, sigma) -> complex:
    z = complex(z)
    return _c(sigma) * z * z / 2 + z ** 4 / 4


def u_from_sigma(sigma) -> UPoint:
    s = _c(sigma)
    if s == 0:
        raise ZeroParameter("sigma = 0 has no u")
    return UPoint.of(1 / (s * s))


def sheet_of(sigma) -> int:
    """+1 if sigma = 1/sqrt(u) with the principal root, else -1."""
    s = _c(sigma)
    u = _above(1 / (s * s))
    return 1 if abs(1 / cmath.sqrt(u) - s) <= abs(-1 / cmath.sqrt(u) - s) else -1


def sigma_from_u(u, sheet: int = 1) -> SigmaPoint:
    """sigma = u^{-1/2}; sheet +1 is the principal root."""
    u = _c(u)
    if u == 0:
        raise ZeroParameter("u = 0 has no sigma")
    return SigmaPoint.of(sheet / cmath.sqrt(_above(u)))


def multicritical_points() -> List[SigmaPoint]:
    return [SigmaPoint.of(p) for p in MULTICRITICAL]


def is_multicritical(sigma, tol: float = 1e-9) -> Optional[str]:
    s = _c(sigma)
    for p in MULTICRITICAL:
        if abs(s - p) <= tol:
            return _MC_NAMES[p]
    return None
