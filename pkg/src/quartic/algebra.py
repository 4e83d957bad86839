"""Exact arithmetic substrate.

Rationals are `fractions.Fraction`.  On top of that:

* `QuadExt`   -- a + b*sqrt(d) over Q, d a positive squarefree integer.
* `Poly`      -- sparse bivariate polynomial in (k, t) over Q.  `k` is the
                 't Hooft-like parameter kappa, `t` is u or sigma.
* `Relation`  -- the radicand S2(k, t) of the adjoined square root
                 (w^2 = 1 + 12 k u on the u-side, s^2 = 12 k + sigma^2 on
                 the sigma-side).
* `FieldElement` -- (P + Q*S) / D with D = k^a t^b S2^n E.
* `RationalSeries` -- truncated power series with exact coefficients.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, Iterable, List, Optional, Tuple


class DivisionByZeroElement(ZeroDivisionError):
    pass


class SeriesPole(ValueError):
    pass


class UnexpectedStructure(ValueError):
    pass


def _frac(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {type(x).__name__} to Fraction")


def frac_str(x: Fraction) -> str:
    x = _frac(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def _squarefree_split(n: int) -> Tuple[int, int]:
    """n = r^2 * m with m squarefree; returns (r, m)."""
    r, m, p = 1, 1, 2
    while p * p <= n:
        while n % (p * p) == 0:
            n //= p * p
            r *= p
        if n % p == 0:
            n //= p
            m *= p
        p += 1
    return r, m * n


def rational_sqrt(x: Fraction) -> Optional[Fraction]:
    """Exact square root of a nonnegative rational, or None."""
    x = _frac(x)
    if x < 0:
        return None
    a, b = math.isqrt(x.numerator), math.isqrt(x.denominator)
    if a * a == x.numerator and b * b == x.denominator:
        return Fraction(a, b)
    return None


# ---------------------------------------------------------------------------
# Q(sqrt d)
# ---------------------------------------------------------------------------

class QuadExt:
    """a + b*sqrt(d), exact.  Plain rationals mix in freely."""

    __slots__ = ("a", "b", "d")

    def __init__(self, a=0, b=0, d: int = 3):
        self.a = _frac(a)
        self.b = _frac(b)
        if d <= 0 or _squarefree_split(d)[0] != 1:
            raise ValueError("d must be a positive squarefree integer")
        self.d = d

    @classmethod
    def sqrt_of(cls, x, d: int) -> "QuadExt":
        """sqrt(x) for rational x >= 0 as an element of Q(sqrt d)."""
        x = _frac(x)
        r = rational_sqrt(x)
        if r is not None:
            return cls(r, 0, d)
        r = rational_sqrt(x / d)
        if r is None:
            raise ValueError(f"sqrt({x}) not in Q(sqrt {d})")
        return cls(0, r, d)

    def _coerce(self, o) -> "QuadExt":
        if isinstance(o, QuadExt):
            if o.d != self.d and o.b != 0 and self.b != 0:
                raise ValueError("mixing different quadratic fields")
            if o.d != self.d:
                return QuadExt(o.a, o.b, self.d) if o.b == 0 else o
            return o
        return QuadExt(_frac(o), 0, self.d)

    def _field(self, o: "QuadExt") -> int:
        return self.d if self.b != 0 or o.b == 0 else o.d

    def __add__(self, o):
        o = self._coerce(o)
        return QuadExt(self.a + o.a, self.b + o.b, self._field(o))

    __radd__ = __add__

    def __neg__(self):
        return QuadExt(-self.a, -self.b, self.d)

    def __sub__(self, o):
        return self + (-self._coerce(o))

    def __rsub__(self, o):
        return self._coerce(o) - self

    def __mul__(self, o):
        o = self._coerce(o)
        d = self._field(o)
        return QuadExt(self.a * o.a + d * self.b * o.b, self.a * o.b + self.b * o.a, d)

    __rmul__ = __mul__

    def conj(self) -> "QuadExt":
        return QuadExt(self.a, -self.b, self.d)

    def norm(self) -> Fraction:
        return self.a * self.a - self.d * self.b * self.b

    def inverse(self) -> "QuadExt":
        n = self.norm()
        if n == 0:
            raise DivisionByZeroElement("inverse of zero in Q(sqrt d)")
        c = self.conj()
        return QuadExt(c.a / n, c.b / n, self.d)

    def __truediv__(self, o):
        return self * self._coerce(o).inverse()

    def __rtruediv__(self, o):
        return self._coerce(o) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out, base = QuadExt(1, 0, self.d), self
        while n:
            if n & 1:
                out = out * base
            base = base * base
            n >>= 1
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            return self.b == 0 and self.a == o
        if isinstance(o, QuadExt):
            if self.b == 0 and o.b == 0:
                return self.a == o.a
            return self.d == o.d and self.a == o.a and self.b == o.b
        return NotImplemented

    def __hash__(self):
        return hash((self.a, self.b, self.d if self.b else 0))

    def __float__(self):
        return float(self.a) + float(self.b) * math.sqrt(self.d)

    def is_rational(self) -> bool:
        return self.b == 0

    def serialize(self) -> str:
        """Lossless "a+b*sqrt(d)" form."""
        return f"{frac_str(self.a)}+{frac_str(self.b)}*sqrt({self.d})"

    def __str__(self):
        if self.b == 0:
            return frac_str(self.a)
        bn, bd = self.b.numerator, self.b.denominator
        sb = f"{bn}*sqrt({self.d})" if bn not in (1, -1) else ("-" if bn < 0 else "") + f"sqrt({self.d})"
        if bd != 1:
            sb += f"/{bd}"
        if self.a == 0:
            return sb
        return f"{frac_str(self.a)}{'' if sb.startswith('-') else '+'}{sb}"

    def __repr__(self):
        return f"QuadExt({self})"

    @classmethod
    def parse(cls, text: str) -> "QuadExt":
        a, rest = text.split("+", 1) if not text.startswith("-") else _split_signed(text)
        b, d = rest.split("*sqrt(")
        return cls(Fraction(a), Fraction(b), int(d.rstrip(")")))


def _split_signed(text: str):
    i = text.index("+", 1)
    return text[:i], text[i + 1:]


# ---------------------------------------------------------------------------
# bivariate polynomials
# ---------------------------------------------------------------------------

Mono = Tuple[int, int]


class Poly:
    """Sparse polynomial in (k, t) with Fraction coefficients.

    Terms map (i, j) -> coeff for k^i t^j.  Immutable by convention.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Optional[Dict[Mono, Fraction]] = None):
        self.terms = {m: c for m, c in (terms or {}).items() if c != 0}

    # constructors
    @staticmethod
    def const(c) -> "Poly":
        return Poly({(0, 0): _frac(c)})

    @staticmethod
    def mono(i: int, j: int, c=1) -> "Poly":
        return Poly({(i, j): _frac(c)})

    @staticmethod
    def from_dict(d: Dict[Mono, object]) -> "Poly":
        return Poly({m: _frac(c) for m, c in d.items()})

    def is_zero(self) -> bool:
        return not self.terms

    def is_const(self) -> bool:
        return all(m == (0, 0) for m in self.terms)

    def const_value(self) -> Fraction:
        return self.terms.get((0, 0), Fraction(0))

    def __add__(self, o: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) + c
        return Poly(out)

    def __sub__(self, o: "Poly") -> "Poly":
        out = dict(self.terms)
        for m, c in o.terms.items():
            out[m] = out.get(m, 0) - c
        return Poly(out)

    def __neg__(self) -> "Poly":
        return Poly({m: -c for m, c in self.terms.items()})

    def scale(self, c) -> "Poly":
        c = _frac(c)
        if c == 0:
            return Poly()
        return Poly({m: v * c for m, v in self.terms.items()})

    def __mul__(self, o) -> "Poly":
        if not isinstance(o, Poly):
            return self.scale(o)
        out: Dict[Mono, Fraction] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in o.terms.items():
                m = (i1 + i2, j1 + j2)
                out[m] = out.get(m, 0) + c1 * c2
        return Poly(out)

    __rmul__ = __mul__

    def shift_mono(self, a: int, b: int) -> "Poly":
        return Poly({(i + a, j + b): c for (i, j), c in self.terms.items()})

    def pow(self, n: int) -> "Poly":
        out = Poly.const(1)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, o):
        return isinstance(o, Poly) and self.terms == o.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    def min_exponents(self) -> Mono:
        if not self.terms:
            return (0, 0)
        return (min(i for i, _ in self.terms), min(j for _, j in self.terms))

    def degree(self, var: int) -> int:
        if not self.terms:
            return -1
        return max(m[var] for m in self.terms)

    def deriv(self, var: int) -> "Poly":
        out = {}
        for (i, j), c in self.terms.items():
            e = (i, j)[var]
            if e:
                out[(i - 1, j) if var == 0 else (i, j - 1)] = c * e
        return Poly(out)

    def _lead(self):
        m = max(self.terms, key=lambda m: (m[1], m[0]))
        return m, self.terms[m]

    def exact_div(self, o: "Poly") -> Optional["Poly"]:
        """self / o if o divides self exactly, else None."""
        if o.is_zero():
            raise DivisionByZeroElement("polynomial division by zero")
        if self.is_zero():
            return Poly()
        (oi, oj), oc = o._lead()
        rem = dict(self.terms)
        quot: Dict[Mono, Fraction] = {}
        while rem:
            (ri, rj) = max(rem, key=lambda m: (m[1], m[0]))
            rc = rem[(ri, rj)]
            if ri < oi or rj < oj:
                return None
            qm, qc = (ri - oi, rj - oj), rc / oc
            quot[qm] = quot.get(qm, 0) + qc
            for (i, j), c in o.terms.items():
                m = (i + qm[0], j + qm[1])
                v = rem.get(m, 0) - qc * c
                if v == 0:
                    rem.pop(m, None)
                else:
                    rem[m] = v
        return Poly(quot)

    def subs_k(self, k0) -> List[Fraction]:
        """Univariate coefficient list in t after k := k0."""
        k0 = _frac(k0)
        n = self.degree(1)
        out = [Fraction(0)] * (n + 1)
        for (i, j), c in self.terms.items():
            out[j] += c * k0 ** i
        return out

    def evaluate(self, k, t):
        return sum(float(c) * (k ** i) * (t ** j) for (i, j), c in self.terms.items()) if self.terms else 0.0

    def __repr__(self):
        if not self.terms:
            return "0"
        parts = []
        for (i, j), c in sorted(self.terms.items(), key=lambda x: (x[0][1], x[0][0])):
            parts.append(f"{frac_str(c)}*k^{i}*t^{j}")
        return " + ".join(parts)


ONE = Poly.const(1)
ZERO = Poly()


# ---------------------------------------------------------------------------
# relation and field elements
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Relation:
    """Adjoined root S with S^2 = radicand(k, t).

    `numeric_sqrt(k, t)` fixes the branch used for floating evaluation.
    """

    name: str
    radicand: Poly
    numeric_sqrt: Callable[[complex, complex], complex]

    def __eq__(self, o):
        return isinstance(o, Relation) and self.name == o.name

    def __hash__(self):
        return hash(self.name)


def _u_sqrt(k, u):
    return cmath.sqrt(1 + 12 * k * u)


def _sigma_sqrt(k, s):
    r = cmath.sqrt(12 * k)
    return cmath.sqrt(s - 1j * r) * cmath.sqrt(s + 1j * r)


U_SIDE = Relation("u", Poly.from_dict({(0, 0): 1, (1, 1): 12}), _u_sqrt)
SIGMA_SIDE = Relation("sigma", Poly.from_dict({(1, 0): 12, (0, 2): 1}), _sigma_sqrt)


@dataclass(frozen=True)
class Den:
    a: int = 0          # power of k
    b: int = 0          # power of t
    n: int = 0          # power of the radicand
    E: Poly = ONE       # any further factor

    def poly(self, rel: Relation) -> Poly:
        return (rel.radicand.pow(self.n) * self.E).shift_mono(self.a, self.b)


class FieldElement:
    """(P + Q*S) / D over Q(k, t)[S], S^2 = radicand."""

    __slots__ = ("P", "Q", "D", "rel")

    def __init__(self, P: Poly, Q: Poly, D: Den, rel: Relation, _norm: bool = True):
        self.P, self.Q, self.D, self.rel = P, Q, D, rel
        if _norm:
            self._normalize()

    # -- constructors
    @classmethod
    def const(cls, c, rel: Relation) -> "FieldElement":
        return cls(Poly.const(c), ZERO, Den(), rel)

    @classmethod
    def poly(cls, p: Poly, rel: Relation) -> "FieldElement":
        return cls(p, ZERO, Den(), rel)

    @classmethod
    def root(cls, rel: Relation) -> "FieldElement":
        return cls(ZERO, ONE, Den(), rel)

    @classmethod
    def k(cls, rel: Relation) -> "FieldElement":
        return cls(Poly.mono(1, 0), ZERO, Den(), rel)

    @classmethod
    def t(cls, rel: Relation) -> "FieldElement":
        return cls(Poly.mono(0, 1), ZERO, Den(), rel)

    def _normalize(self):
        P, Q, D = self.P, self.Q, self.D
        if P.is_zero() and Q.is_zero():
            self.P, self.Q, self.D = ZERO, ZERO, Den()
            return
        # common monomial factors
        mp = [P.min_exponents()] if not P.is_zero() else []
        mq = [Q.min_exponents()] if not Q.is_zero() else []
        mins = mp + mq
        ca = min(min(m[0] for m in mins), D.a)
        cb = min(min(m[1] for m in mins), D.b)
        if ca or cb:
            P, Q = P.shift_mono(-ca, -cb), Q.shift_mono(-ca, -cb)
        a, b, n, E = D.a - ca, D.b - cb, D.n, D.E
        # powers of the radicand
        R = self.rel.radicand
        while n > 0:
            p2 = P.exact_div(R)
            if p2 is None:
                break
            q2 = Q.exact_div(R)
            if q2 is None:
                break
            P, Q, n = p2, q2, n - 1
        # the extra factor
        if E != ONE:
            p2 = P.exact_div(E)
            q2 = Q.exact_div(E) if p2 is not None else None
            if p2 is not None and q2 is not None:
                P, Q, E = p2, q2, ONE
            elif E.is_const():
                c = E.const_value()
                P, Q, E = P.scale(1 / c), Q.scale(1 / c), ONE
        self.P, self.Q, self.D = P, Q, Den(a, b, n, E)

    def _like(self, P, Q, D) -> "FieldElement":
        return FieldElement(P, Q, D, self.rel)

    def _lift(self, o) -> "FieldElement":
        if isinstance(o, FieldElement):
            if o.rel != self.rel:
                raise ValueError("elements over different relations")
            return o
        return FieldElement.const(o, self.rel)

    def is_zero(self) -> bool:
        return self.P.is_zero() and self.Q.is_zero()

    # -- ring operations
    def _to_common(self, o: "FieldElement"):
        d1, d2 = self.D, o.D
        a, b, n = max(d1.a, d2.a), max(d1.b, d2.b), max(d1.n, d2.n)
        R = self.rel.radicand
        if d1.E == d2.E:
            E, e1, e2 = d1.E, ONE, ONE
        else:
            E, e1, e2 = d1.E * d2.E, d2.E, d1.E
        m1 = (R.pow(n - d1.n) * e1).shift_mono(a - d1.a, b - d1.b)
        m2 = (R.pow(n - d2.n) * e2).shift_mono(a - d2.a, b - d2.b)
        return m1, m2, Den(a, b, n, E)

    def __add__(self, o):
        o = self._lift(o)
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        m1, m2, D = self._to_common(o)
        return self._like(self.P * m1 + o.P * m2, self.Q * m1 + o.Q * m2, D)

    __radd__ = __add__

    def __neg__(self):
        return FieldElement(-self.P, -self.Q, self.D, self.rel, _norm=False)

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if isinstance(o, (int, Fraction)):
            if o == 0:
                return FieldElement.const(0, self.rel)
            return FieldElement(self.P.scale(o), self.Q.scale(o), self.D, self.rel, _norm=False)
        o = self._lift(o)
        R = self.rel.radicand
        P = self.P * o.P + self.Q * o.Q * R
        Q = self.P * o.Q + self.Q * o.P
        d1, d2 = self.D, o.D
        E = d1.E * d2.E
        return self._like(P, Q, Den(d1.a + d2.a, d1.b + d2.b, d1.n + d2.n, E))

    __rmul__ = __mul__

    def inverse(self) -> "FieldElement":
        if self.is_zero():
            raise DivisionByZeroElement("inverse of the zero element")
        R = self.rel.radicand
        Dp = self.D.poly(self.rel)
        # pure monomial or pure root fast paths
        if self.Q.is_zero() and len(self.P.terms) == 1:
            (i, j), c = next(iter(self.P.terms.items()))
            return self._like(Dp.scale(1 / c), ZERO, Den(i, j, 0, ONE))
        if self.P.is_zero() and len(self.Q.terms) == 1:
            (i, j), c = next(iter(self.Q.terms.items()))
            return self._like(ZERO, Dp.scale(1 / c), Den(i, j, 1, ONE))
        N = self.P * self.P - self.Q * self.Q * R
        if N.is_zero():
            raise DivisionByZeroElement("element has zero norm")
        a, b = N.min_exponents()
        N = N.shift_mono(-a, -b)
        n = 0
        while True:
            q = N.exact_div(R)
            if q is None:
                break
            N, n = q, n + 1
        P, Q = self.P * Dp, -(self.Q * Dp)
        if N.is_const():
            c = N.const_value()
            P, Q, N = P.scale(1 / c), Q.scale(1 / c), ONE
        return self._like(P, Q, Den(a, b, n, N))

    def __truediv__(self, o):
        if isinstance(o, (int, Fraction)):
            if o == 0:
                raise DivisionByZeroElement("division by zero")
            return self * (1 / _frac(o))
        return self * self._lift(o).inverse()

    def __rtruediv__(self, o):
        return self._lift(o) * self.inverse()

    def __pow__(self, n: int):
        if n < 0:
            return self.inverse() ** (-n)
        out = FieldElement.const(1, self.rel)
        for _ in range(n):
            out = out * self
        return out

    def __eq__(self, o):
        if isinstance(o, (int, Fraction)):
            o = FieldElement.const(o, self.rel)
        if not isinstance(o, FieldElement):
            return NotImplemented
        d1, d2 = self.D.poly(self.rel), o.D.poly(self.rel)
        return self.P * d2 == o.P * d1 and self.Q * d2 == o.Q * d1

    def __hash__(self):
        raise TypeError("FieldElement is unhashable")

    # -- calculus
    def deriv(self, var: int) -> "FieldElement":
        """Partial derivative; var 0 is k, var 1 is t."""
        R = self.rel.radicand
        Rv = R.deriv(var)
        rel = self.rel
        # d(P + Q S) = P' + Q' S + Q Rv/(2 R) * S
        dN = FieldElement(self.P.deriv(var) * R,
                          self.Q.deriv(var) * R + self.Q * Rv.scale(Fraction(1, 2)),
                          Den(0, 0, 1, ONE), rel)
        N = FieldElement(self.P, self.Q, Den(), rel, _norm=False)
        out = dN
        D = self.D
        if D.a == D.b == D.n == 0 and D.E == ONE:
            return dN
        e = D.a if var == 0 else D.b
        logd = FieldElement.const(0, rel)
        if e:
            logd = logd + FieldElement(Poly.const(e), ZERO, Den(1, 0) if var == 0 else Den(0, 1), rel)
        if D.n:
            logd = logd + FieldElement(Rv.scale(D.n), ZERO, Den(0, 0, 1), rel)
        if D.E != ONE:
            logd = logd + FieldElement(D.E.deriv(var), ZERO, Den(0, 0, 0, D.E), rel)
        out = dN - N * logd
        return out * FieldElement(ONE, ZERO, D, rel)

    def dk(self) -> "FieldElement":
        return self.deriv(0)

    def dt(self) -> "FieldElement":
        return self.deriv(1)

    # -- evaluation
    def evaluate(self, k, t) -> complex:
        s = self.rel.numeric_sqrt(k, t)
        num = self.P.evaluate(k, t) + self.Q.evaluate(k, t) * s
        den = self.D.poly(self.rel).evaluate(k, t)
        return num / den

    def is_rational(self) -> bool:
        return self.Q.is_zero()

    def __repr__(self):
        return f"FieldElement[{self.rel.name}](({self.P}) + ({self.Q})*S) / {self.D}"


# ---------------------------------------------------------------------------
# truncated series
# ---------------------------------------------------------------------------

class RationalSeries:
    """c_0 + c_1 t + ... + c_J t^J (+ O(t^{J+1})).

    Coefficients are Fractions or QuadExt.  `order` is J; binary operations
    keep the smaller order.
    """

    __slots__ = ("coeffs",)

    def __init__(self, coeffs: Iterable):
        self.coeffs = [c if isinstance(c, QuadExt) else _frac(c) for c in coeffs]
        if not self.coeffs:
            raise ValueError("empty series")

    @property
    def order(self) -> int:
        return len(self.coeffs) - 1

    def __getitem__(self, j):
        return self.coeffs[j]

    def __len__(self):
        return len(self.coeffs)

    def _lift(self, o) -> "RationalSeries":
        if isinstance(o, RationalSeries):
            return o
        return RationalSeries([o] + [0] * self.order)

    def __add__(self, o):
        o = self._lift(o)
        n = min(len(self), len(o))
        return RationalSeries([self.coeffs[i] + o.coeffs[i] for i in range(n)])

    __radd__ = __add__

    def __neg__(self):
        return RationalSeries([-c for c in self.coeffs])

    def __sub__(self, o):
        return self + (-self._lift(o))

    def __rsub__(self, o):
        return self._lift(o) - self

    def __mul__(self, o):
        if not isinstance(o, RationalSeries):
            return RationalSeries([c * o for c in self.coeffs])
        n = min(len(self), len(o))
        a, b = self.coeffs, o.coeffs
        return RationalSeries([sum((a[i] * b[m - i] for i in range(m + 1)), Fraction(0)) for m in range(n)])

    __rmul__ = __mul__

    def inverse(self) -> "RationalSeries":
        a = self.coeffs
        if a[0] == 0:
            raise SeriesPole("series with zero constant term is not invertible")
        inv0 = 1 / a[0]
        out = [inv0]
        for m in range(1, len(a)):
            s = sum((a[i] * out[m - i] for i in range(1, m + 1)), Fraction(0))
            out.append(-s * inv0)
        return RationalSeries(out)

    def __truediv__(self, o):
        if not isinstance(o, RationalSeries):
            return RationalSeries([c / o for c in self.coeffs])
        return self * o.inverse()

    def deriv(self) -> "RationalSeries":
        if len(self) == 1:
            return RationalSeries([0])
        return RationalSeries([c * i for i, c in enumerate(self.coeffs)][1:])

    def integrate(self, c0=0) -> "RationalSeries":
        return RationalSeries([c0] + [c / (i + 1) for i, c in enumerate(self.coeffs)])

    def mul_t(self, p: int = 1) -> "RationalSeries":
        """Multiply by t^p keeping the order J fixed."""
        return RationalSeries(([0] * p + self.coeffs)[: len(self)])

    def truncate(self, J: int) -> "RationalSeries":
        return RationalSeries(self.coeffs[: J + 1])

    def sqrt(self) -> "RationalSeries":
        """Principal square root; requires a rational square constant term."""
        r0 = rational_sqrt(self.coeffs[0])
        if r0 is None or r0 == 0:
            raise SeriesPole("constant term is not a nonzero rational square")
        out = [r0]
        for m in range(1, len(self)):
            s = sum((out[i] * out[m - i] for i in range(1, m)), Fraction(0))
            out.append((self.coeffs[m] - s) / (2 * r0))
        return RationalSeries(out)

    def __eq__(self, o):
        if not isinstance(o, RationalSeries):
            return NotImplemented
        n = min(len(self), len(o))
        return all(self.coeffs[i] == o.coeffs[i] for i in range(n))

    def is_zero(self) -> bool:
        return all(c == 0 for c in self.coeffs)

    def __repr__(self):
        return "RationalSeries([" + ", ".join(str(c) if isinstance(c, QuadExt) else frac_str(c) for c in self.coeffs) + "])"


def _poly_series(coeffs: List[Fraction], J: int) -> RationalSeries:
    return RationalSeries((coeffs + [Fraction(0)] * (J + 1))[: J + 1])


def expand_at_zero(e: FieldElement, k0, J: int) -> RationalSeries:
    """Taylor series in t about t = 0 at k = k0, through t^J."""
    k0 = _frac(k0)
    D = e.D
    Jx = J + D.b
    P = _poly_series(e.P.subs_k(k0), Jx)
    Q = _poly_series(e.Q.subs_k(k0), Jx)
    R = _poly_series(e.rel.radicand.subs_k(k0), Jx)
    num = P + Q * R.sqrt() if not e.Q.is_zero() else P
    for j in range(D.b):
        if num.coeffs[j] != 0:
            raise SeriesPole(f"pole of order {D.b - j} at t = 0")
    num = RationalSeries(num.coeffs[D.b:])
    den = _poly_series([Fraction(1)], J) * (k0 ** D.a)
    for _ in range(D.n):
        den = den * R.truncate(J)
    if D.E != ONE:
        den = den * _poly_series(D.E.subs_k(k0), J)
    if den.coeffs[0] == 0:
        raise SeriesPole("denominator vanishes at t = 0")
    return num.truncate(J) / den


def _taylor_shift(c: List[Fraction], t0: Fraction) -> List[Fraction]:
    """Coefficients of p(v + t0) in v."""
    out = list(c)
    n = len(out)
    for i in range(n):
        for j in range(n - 2, i - 1, -1):
            out[j] += t0 * out[j + 1]
    return out


@dataclass(frozen=True)
class SingularPart:
    exponent: Optional[Fraction]   # leading non-analytic exponent in v = t - t*
    coeff: Optional[QuadExt]
    regular: bool
    point: Fraction                # t*


def expand_at_singularity(e: FieldElement, k0=1, d: int = 3) -> SingularPart:
    """Leading non-analytic term of e at the zero t* of the radicand.

    Needs a radicand linear in t, R = beta*(t - t*), with sqrt(beta) in
    Q(sqrt d).  Non-analytic terms are the negative integer powers from the
    rational part and every power from the root part.
    """
    k0 = _frac(k0)
    Rc = e.rel.radicand.subs_k(k0)
    while Rc and Rc[-1] == 0:
        Rc.pop()
    if len(Rc) != 2:
        raise UnexpectedStructure("radicand is not linear in t at this k0")
    beta = Rc[1]
    tstar = -Rc[0] / beta
    D = e.D
    if tstar == 0:
        raise UnexpectedStructure("branch point at t = 0")
    const = (k0 ** D.a) * (tstar ** D.b) * (beta ** D.n)
    if D.E != ONE:
        Ev = _taylor_shift(D.E.subs_k(k0), tstar)
        if Ev[0] == 0:
            raise UnexpectedStructure("extra denominator vanishes at the branch point")
        const *= Ev[0]
    candidates = []
    if not e.P.is_zero():
        Pv = _taylor_shift(e.P.subs_k(k0), tstar)
        p = next((i for i, c in enumerate(Pv) if c != 0), None)
        if p is not None and p - D.n < 0:
            candidates.append((Fraction(p - D.n), QuadExt(Pv[p] / const, 0, d)))
    if not e.Q.is_zero():
        Qv = _taylor_shift(e.Q.subs_k(k0), tstar)
        q = next((i for i, c in enumerate(Qv) if c != 0), None)
        if q is not None:
            if beta < 0:
                raise UnexpectedStructure("negative leading radicand coefficient")
            rb = QuadExt.sqrt_of(beta, d)
            candidates.append((Fraction(2 * (q - D.n) + 1, 2), rb * (Qv[q] / const)))
    if not candidates:
        return SingularPart(None, None, True, tstar)
    ex, c = min(candidates, key=lambda x: x[0])
    return SingularPart(ex, c, False, tstar)
