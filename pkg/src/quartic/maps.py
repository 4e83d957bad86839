"""Labeled 4-valent ribbon graphs: brute-force census, closed-form counts,
and the constants governing large-j asymptotics.

Half-edges are 0..4j-1; half-edge h sits on vertex h // 4 and the rotation
sends h to 4(h//4) + (h+1) % 4.  A pairing is a fixed-point-free
involution; faces are the cycles of rotation o pairing, and
V - E + F = 2 - 2g with V = j, E = 2j.
"""
from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, Iterator, List, Optional, Tuple

import mpmath
import numpy as np

from .algebra import QuadExt

CENSUS_CAP = 5
HARD_CAP = 6


class CapExceeded(ValueError):
    pass


class UnsupportedGenus(ValueError):
    pass


def double_factorial(n: int) -> int:
    out = 1
    while n > 1:
        out *= n
        n -= 2
    return out


# ---------------------------------------------------------------------------
# pairings
# ---------------------------------------------------------------------------

def rotation(j: int) -> np.ndarray:
    h = np.arange(4 * j)
    return 4 * (h // 4) + (h + 1) % 4


def _extend(partner: np.ndarray, remaining: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Match the smallest remaining half-edge in every possible way."""
    n_rem = remaining.shape[1]
    rows = partner.shape[0]
    parts, rems = [], []
    first = remaining[:, 0]
    cols = np.arange(n_rem)
    for c in range(1, n_rem):
        other = remaining[:, c]
        p = partner.copy()
        p[np.arange(rows), first] = other
        p[np.arange(rows), other] = first
        keep = (cols != 0) & (cols != c)
        parts.append(p)
        rems.append(remaining[:, keep])
    return np.concatenate(parts), np.concatenate(rems)


def all_pairings(j: int, prefix: Optional[np.ndarray] = None) -> np.ndarray:
    """All (4j-1)!! pairings as rows of partner indices (canonical order).

    With `prefix` (a partial partner row, -1 = unmatched) only completions
    of that prefix are produced.
    """
    n = 4 * j
    if prefix is None:
        partner = -np.ones((1, n), dtype=np.int16)
    else:
        partner = prefix.reshape(1, n).astype(np.int16)
    remaining = np.flatnonzero(partner[0] < 0).astype(np.int16).reshape(1, -1)
    while remaining.shape[1]:
        partner, remaining = _extend(partner, remaining)
    return partner


def _orbit_count(perm: np.ndarray) -> np.ndarray:
    """Cycle count of each row permutation (pointer doubling on min labels)."""
    rows, n = perm.shape
    off = (np.arange(rows, dtype=np.int64) * n)[:, None]
    p = (perm.astype(np.int64) + off).ravel()          # flat successor
    label = np.tile(np.arange(n, dtype=np.int8 if n < 128 else np.int16), rows)
    steps = 1
    while steps < n:
        label = np.minimum(label, label[p])
        p = p[p]
        steps *= 2
    return (label.reshape(rows, n) == np.arange(n)).sum(axis=1)


def _connected(partner: np.ndarray, j: int) -> np.ndarray:
    """Vertex-graph connectivity via neighbour bitmasks."""
    rows, n = partner.shape
    dt = np.uint8 if j <= 8 else np.uint32
    bits = (np.ones(1, dtype=dt) << (partner // 4).astype(dt))   # vertex of each partner
    masks = np.bitwise_or.reduce(bits.reshape(rows, j, 4), axis=2)
    reach = np.ones(rows, dtype=dt)
    for _ in range(j):
        new = reach.copy()
        for v in range(j):
            has = (reach >> dt(v)) & dt(1)
            new |= masks[:, v] * has
        if np.array_equal(new, reach):
            break
        reach = new
    return reach == dt((1 << j) - 1)


def genus_of_pairings(partner: np.ndarray, j: int) -> Tuple[np.ndarray, np.ndarray]:
    """(genus, connected) for each row."""
    rot = rotation(j).astype(partner.dtype)
    phi = rot[partner]
    faces = _orbit_count(phi)
    genus = (2 + j - faces) // 2
    return genus, _connected(partner, j)


@dataclass
class MapCensus:
    j: int
    counts: List[int]                 # connected pairings by genus, g = 0..2j
    total_connected: int
    total_pairings: int

    def as_dict(self) -> dict:
        return {"vertices": self.j, "counts": self.counts,
                "totalConnected": self.total_connected, "totalPairings": self.total_pairings}


def _census_chunk(args) -> np.ndarray:
    j, prefix = args
    P = all_pairings(j, prefix)
    g, conn = genus_of_pairings(P, j)
    return np.bincount(g[conn], minlength=2 * j + 1), len(P)


def _prefixes(j: int, depth: int) -> List[np.ndarray]:
    n = 4 * j
    partner = -np.ones((1, n), dtype=np.int16)
    remaining = np.arange(n, dtype=np.int16).reshape(1, -1)
    for _ in range(depth):
        partner, remaining = _extend(partner, remaining)
    return list(partner)


def enumerate_census(j: int, allow_hard_cap: bool = False, workers: int = 1) -> MapCensus:
    """Count connected labeled 4-valent pairings on j vertices by genus."""
    cap = HARD_CAP if allow_hard_cap else CENSUS_CAP
    if j < 1 or j > cap:
        raise CapExceeded(f"j={j} outside 1..{cap}")
    depth = max(0, j - 3)
    chunks = [(j, p) for p in _prefixes(j, depth)] if depth else [(j, None)]
    counts = np.zeros(2 * j + 1, dtype=np.int64)
    total = 0
    if workers > 1 and len(chunks) > 1:
        with ProcessPoolExecutor(workers) as ex:
            results = list(ex.map(_census_chunk, chunks))
    else:
        results = map(_census_chunk, chunks)
    for c, n in results:
        counts[: len(c)] += c
        total += n
    return MapCensus(j, [int(c) for c in counts], int(counts.sum()), total)


def census_slow(j: int) -> MapCensus:
    """Reference census with explicit union-find and cycle walks (small j)."""
    from scipy.cluster.hierarchy import DisjointSet

    if j > 3:
        raise CapExceeded("slow census is meant for j <= 3")
    rot = rotation(j)
    counts = [0] * (2 * j + 1)
    total = 0
    for partner in _iter_pairings(4 * j):
        total += 1
        ds = DisjointSet(range(j))
        for h, p in enumerate(partner):
            ds.merge(h // 4, p // 4)
        if ds.n_subsets != 1:
            continue
        seen = [False] * (4 * j)
        faces = 0
        for h in range(4 * j):
            if not seen[h]:
                faces += 1
                x = h
                while not seen[x]:
                    seen[x] = True
                    x = rot[partner[x]]
        counts[(2 + j - faces) // 2] += 1
    return MapCensus(j, counts, sum(counts), total)


def _iter_pairings(n: int) -> Iterator[List[int]]:
    partner = [-1] * n

    def rec():
        try:
            a = partner.index(-1)
        except ValueError:
            yield list(partner)
            return
        for b in range(a + 1, n):
            if partner[b] == -1:
                partner[a], partner[b] = b, a
                yield from rec()
                partner[a] = partner[b] = -1

    yield from rec()


def set_partition_identity(connected: Dict[int, int], j: int) -> int:
    """sum over set partitions of [j] of prod c_|block|, by the exponential formula.

    For labeled vertices with 4 ordered half-edges the total must be (4j-1)!!.
    """
    # t_n = sum_k C(n-1, k-1) c_k t_{n-k}
    t = [1] + [0] * j
    for n in range(1, j + 1):
        t[n] = sum(math.comb(n - 1, k - 1) * connected[k] * t[n - k] for k in range(1, n + 1))
    return t[j]


# ---------------------------------------------------------------------------
# closed forms
# ---------------------------------------------------------------------------

def closed_form_count(j: int, g: int) -> int:
    """N_j(g) for g <= 3 from the exact formulas."""
    f = math.factorial
    F = Fraction
    if j < 1:
        raise ValueError("j >= 1")
    if g == 0:
        v = F(12 ** j * f(2 * j - 1), f(j + 2))
    elif g == 1:
        v = F(12 ** j * (4 ** j * f(j) ** 2 - f(2 * j)), 24 * j * f(j))
    elif g == 2:
        if j == 1:
            return 0
        i = j - 1
        v = F(12 ** i * f(2 * i + 2) * (28 * i + 37), 360 * (i + 1) * f(i - 1)) \
            - 13 * i * (i + 1) * f(i) * F(48) ** (i - 1)
    elif g == 3:
        if j <= 4:
            return 0
        i = j - 4
        brace = (F(2741, 10) * f(i + 5) - F(291, 10) * i * f(i + 4)
                 - F(2741, 1260) * F(f(2 * i + 9), 4 ** i * f(i + 4))
                 - F(292 * i * f(2 * i + 7), 315 * 4 ** i * f(i + 3)))
        v = F(16 * 48 ** i * f(i + 3), 3 * f(i)) * brace
    else:
        raise UnsupportedGenus(f"no closed form for g={g}")
    if v.denominator != 1:
        raise ArithmeticError(f"non-integer count for j={j}, g={g}: {v}")
    return int(v)


# ---------------------------------------------------------------------------
# constants
# ---------------------------------------------------------------------------

SQRT3 = QuadExt(0, 1, 3)


def c2g_constants(G: int) -> List[QuadExt]:
    """C_0..C_2G in Q(sqrt 3)."""
    C = [QuadExt(0, -4, 3)]
    lin = Fraction(1, 2 ** 3) / SQRT3                       # 1/(2^3 3^(1/2))
    quad = Fraction(1, 2 ** 8 * 27) / SQRT3                 # 1/(2^8 3^(7/2))
    for g in range(1, G + 1):
        s = QuadExt(0, 0, 3)
        for l in range(1, g):
            s = s + C[g - l] * C[l]
        C.append(lin * s + quad * ((5 * g - 6) * (5 * g - 4)) * C[g - 1])
    return C


@dataclass(frozen=True)
class KValue:
    """coeff * pi^(-1/2 * pi_half), exact."""

    coeff: QuadExt
    pi_half: int = 0          # 0 or 1

    def __float__(self):
        return float(self.coeff) / (math.sqrt(math.pi) if self.pi_half else 1.0)

    def mp(self):
        c = mpmath.mpf(self.coeff.a.numerator) / self.coeff.a.denominator \
            + mpmath.mpf(self.coeff.b.numerator) / self.coeff.b.denominator * mpmath.sqrt(self.coeff.d)
        return c / mpmath.sqrt(mpmath.pi) if self.pi_half else c

    def __str__(self):
        if not self.pi_half:
            return str(self.coeff)
        if self.coeff.is_rational():
            a = self.coeff.a
            return f"{a.numerator}/({a.denominator}*sqrt(pi))"
        return f"({self.coeff})/sqrt(pi)"


def _sqrt12_pow(m2: int) -> QuadExt:
    """12^(m2/2) for integer m2 >= 0."""
    out = QuadExt(12 ** (m2 // 2), 0, 3)
    if m2 % 2:
        out = out * QuadExt(0, 2, 3)
    return out


def kg_constant(g: int) -> KValue:
    f = math.factorial
    if g == 0:
        return KValue(QuadExt(Fraction(1, 2), 0, 3), 1)
    if g == 1:
        return KValue(QuadExt(Fraction(1, 24), 0, 3), 0)
    C = c2g_constants(g)[g]
    p = _sqrt12_pow(5 * g - 1)
    if g % 2:
        return KValue(p * C * Fraction(1, f((5 * g - 5) // 2) * (5 * g - 3)), 0)
    return KValue(p * C * Fraction(2 ** (5 * g - 4) * f((5 * g - 4) // 2), f(5 * g - 3)), 1)


def painleve_a(K: int) -> List[QuadExt]:
    """a_0..a_K in Q(sqrt 6)."""
    inv = QuadExt(1, 0, 6) / QuadExt(0, 8, 6)           # 1/(8 sqrt 6)
    a = [QuadExt(1, 0, 6)]
    for k in range(K):
        s = QuadExt(0, 0, 6)
        for m in range(1, k + 1):
            s = s + a[m] * a[k + 1 - m]
        a.append(inv * (25 * k * k - 1) * a[k] - s * Fraction(1, 2))
    return a


def c2g_from_painleve(G: int) -> List[QuadExt]:
    """C_2k = -4 sqrt3 a_k (2^(9/2) 27)^(-k), carried out exactly in Q(sqrt 3).

    a_k is a rational multiple of 6^(-k/2) and 2^(9/2) 27 = sqrt(2) 432, so
    a_k (2^(9/2) 27)^(-k) = (a_k 6^(k/2)) (864 sqrt 3)^(-k).
    """
    a = painleve_a(G)
    out = []
    base = QuadExt(0, 864, 3)
    for k, ak in enumerate(a):
        r = ak * (QuadExt(0, 1, 6) ** k if k % 2 else QuadExt(6 ** (k // 2), 0, 6))
        if not r.is_rational():
            raise ArithmeticError("unexpected irrational part in a_k 6^(k/2)")
        out.append(QuadExt(0, -4, 3) * r.a / base ** k)
    return out


def painleve_numeric_bridge(G: int, dps: int = 30) -> List[float]:
    """C_2g from the Painleve coefficients through the real rescaling.

    With u(tau) ~ sqrt(-tau/6) sum a_k (-tau)^(-5k/2) and
    y(t) = -2^(8/5) 3^(2/5) u(-lam t), lam = 2^(9/5) 3^(6/5), the
    coefficient of t^((1-5k)/2) is -2^(8/5) 3^(2/5) a_k lam^((1-5k)/2) / sqrt 6.
    """
    a = painleve_a(G)
    with mpmath.workdps(dps):
        lam = mpmath.mpf(2) ** (mpmath.mpf(9) / 5) * mpmath.mpf(3) ** (mpmath.mpf(6) / 5)
        pref = mpmath.mpf(2) ** (mpmath.mpf(8) / 5) * mpmath.mpf(3) ** (mpmath.mpf(2) / 5) / mpmath.sqrt(6)
        out = []
        for k, ak in enumerate(a):
            akf = mpmath.mpf(ak.a.numerator) / ak.a.denominator \
                + mpmath.mpf(ak.b.numerator) / ak.b.denominator * mpmath.sqrt(6)
            out.append(float(-pref * akf * lam ** ((1 - 5 * mpmath.mpf(k)) / 2)))
    return out


# ---------------------------------------------------------------------------
# asymptotics
# ---------------------------------------------------------------------------

def count_any(j: int, g: int) -> int:
    return closed_form_count(j, g)


def asymptotic_ratio(j: int, g: int, dps: int = 40):
    """N_j(g) / (K_g 48^j j! j^((5g-7)/2)) as an mpmath float."""
    with mpmath.workdps(dps):
        N = mpmath.mpf(closed_form_count(j, g))
        K = kg_constant(g).mp()
        den = K * mpmath.mpf(48) ** j * mpmath.factorial(j) * mpmath.mpf(j) ** (mpmath.mpf(5 * g - 7) / 2)
        return N / den


def first_correction(g: int) -> float:
    """Coefficient c in ratio ~ 1 + c / sqrt(j) (c = 0 for g = 0)."""
    sp = math.sqrt(math.pi)
    return {0: 0.0, 1: -1 / sp, 2: -195 * sp / 224, 3: -43136 / (8575 * sp)}[g]
