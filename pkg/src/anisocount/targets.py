"""Dyadic decompositions of hyperbolic regions and rectangle covers.

A dyadic shape is a vector (2^-z_1, ..., 2^-z_n) of box side scales whose
product matches psi(2^t) up to a factor of two.  These shapes discretise
one slab of the hyperbolic target region; the rectangle cover does the
same for the flat-case target on the torus.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, List, Optional, Sequence, Tuple

from .approx import ApproxFunction
from .scalars import as_fraction

__all__ = [
    "DyadicShape",
    "TorusInterval",
    "AxisRectangle",
    "ShapeList",
    "NoWitnessError",
    "enumerate_dyadic_shapes",
    "surjection_decompose",
    "cover_hyperbolic_region",
]


@dataclass(frozen=True, order=True)
class DyadicShape:
    """Exponent vector z with derived side lengths delta_i = 2^-z_i."""

    z: Tuple[int, ...]

    def __post_init__(self):
        if not self.z or any(zi < 1 for zi in self.z):
            raise ValueError("all exponents must be integers >= 1")

    @property
    def n(self) -> int:
        return len(self.z)

    @property
    def z_sum(self) -> int:
        return sum(self.z)

    @property
    def z_max(self) -> int:
        return max(self.z)

    @property
    def delta(self) -> Tuple[Fraction, ...]:
        return tuple(Fraction(1, 1 << zi) for zi in self.z)

    @property
    def delta_min(self) -> Fraction:
        return Fraction(1, 1 << self.z_max)

    @property
    def delta_prod(self) -> Fraction:
        return Fraction(1, 1 << self.z_sum)

    @property
    def delta_cross(self) -> Fraction:
        """delta^x: the product of all sides divided by the smallest."""
        return Fraction(1, 1 << (self.z_sum - self.z_max))

    @property
    def min_index(self) -> int:
        """Index (0-based) of the smallest side; first one on ties."""
        return self.z.index(self.z_max)

    def scaled(self, factor_exp: int) -> Tuple[Fraction, ...]:
        """Sides multiplied by 2**factor_exp (e.g. 2 for the 4*delta boxes)."""
        return tuple(Fraction(1 << factor_exp, 1 << zi) if factor_exp <= zi
                     else Fraction(1 << (factor_exp - zi)) for zi in self.z)

    def to_json(self) -> list:
        return list(self.z)


class ShapeList(list):
    """List of shapes; carries a note when enumeration was degenerate."""

    note: Optional[str] = None


class NoWitnessError(ValueError):
    pass


def _compositions(total: int, parts: int, minimum: int) -> Iterator[Tuple[int, ...]]:
    """All integer tuples of length `parts`, entries >= minimum, given sum."""
    if parts == 1:
        if total >= minimum:
            yield (total,)
        return
    for first in range(minimum, total - minimum * (parts - 1) + 1):
        for rest in _compositions(total - first, parts - 1, minimum):
            yield (first,) + rest


def enumerate_dyadic_shapes(psi: ApproxFunction, t: int, n: int, xi: int = 1,
                            floored: bool = False) -> ShapeList:
    """Every shape with z_i >= xi and prod 2^-z_i <= psi(2^t) <= 2 prod 2^-z_i.

    Enumeration order is lexicographic in z, so parallel callers always see
    the same list.  xi = 1 gives the unpruned family; larger xi shrinks it.
    """
    if t < 1 or n < 1 or xi < 1:
        raise ValueError("need t >= 1, n >= 1, xi >= 1")
    result = ShapeList()
    q = 1 << t
    if psi.is_zero() or psi.cmp_pow2(q, -(60 * (t + n + xi)), floored=floored) <= 0:
        # psi(2^t) == 0 (or absurdly below any reachable dyadic scale)
        if psi.is_zero():
            result.note = "degenerate psi: psi(2^t) = 0"
            return result
    # Admissible sums S satisfy 2^-S <= psi(2^t) <= 2^(1-S).  There are at
    # most two; locate them around a floating estimate and verify exactly.
    enc = psi.eval_interval(q, floored=floored)
    if enc.hi <= 0:
        result.note = "degenerate psi: psi(2^t) = 0"
        return result
    est = -math.log2(float(enc.midpoint())) if enc.midpoint() > 0 else 60 * t
    candidates = range(max(1, int(est) - 2), int(est) + 4)
    sums = []
    for s in candidates:
        ge_lower = psi.cmp_pow2(q, -s, floored=floored) >= 0       # 2^-S <= psi
        le_upper = psi.cmp_pow2(q, 1 - s, floored=floored) <= 0     # psi <= 2^(1-S)
        if ge_lower and le_upper:
            sums.append(s)
    for s in sums:
        if s < n * xi:
            continue
        for z in _compositions(s, n, xi):
            result.append(DyadicShape(z))
    result.sort()
    return result


def surjection_decompose(s: int, caps: Sequence[int]) -> Tuple[int, ...]:
    """A witness (z_1..z_n), 1 <= z_i <= caps_i, sum z_i = s.

    Greedy: fill coordinates left to right at their caps, leaving room for
    the mandatory 1 in every later slot.
    """
    n = len(caps)
    if n < 1 or any(u < 1 for u in caps):
        raise ValueError("caps must be positive integers")
    if not n <= s <= sum(caps):
        raise NoWitnessError(f"sum {s} outside [{n}, {sum(caps)}]")
    witness = []
    remaining = s
    for i, cap in enumerate(caps):
        slots_after = n - i - 1
        zi = min(cap, remaining - slots_after)
        witness.append(zi)
        remaining -= zi
    assert remaining == 0
    return tuple(witness)


# ---------------------------------------------------------------------------
# Torus rectangles
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class TorusInterval:
    """Interval [start, start + length) on R/Z (length in (0, 1])."""

    start: Fraction
    length: Fraction

    def __post_init__(self):
        object.__setattr__(self, "start", as_fraction(self.start) % 1)
        object.__setattr__(self, "length", as_fraction(self.length))
        if not 0 < self.length <= 1:
            raise ValueError("torus interval length must lie in (0, 1]")

    def contains(self, x, closed: bool = False) -> bool:
        """Membership mod 1; `closed` includes the right endpoint."""
        from .scalars import Surd, scalar_cmp

        if isinstance(x, Surd):
            off = x - self.start
            off = off - Fraction(off.floor())
            c = scalar_cmp(off, self.length)
            return c <= 0 if closed else c < 0
        offset = (as_fraction(x) - self.start) % 1
        if closed:
            return offset <= self.length
        return offset < self.length

    @staticmethod
    def centered(c: Fraction) -> "TorusInterval":
        """{x: ||x|| <= c} as a single wrapped interval (c <= 1/2)."""
        c = as_fraction(c)
        if not 0 < c <= Fraction(1, 2):
            raise ValueError("centered radius must lie in (0, 1/2]")
        return TorusInterval(start=(1 - c) % 1, length=2 * c)

    @staticmethod
    def band(k: int) -> List["TorusInterval"]:
        """{x: 2^-(k+1) <= ||x|| <= 2^-k} as plain pieces (k >= 1)."""
        lo = Fraction(1, 1 << (k + 1))
        hi = Fraction(1, 1 << k)
        if k == 1:
            # the two halves meet at 1/2: contiguous
            return [TorusInterval(lo, 2 * (hi - lo))]
        return [TorusInterval(lo, hi - lo), TorusInterval(1 - hi, hi - lo)]

    def plain_pieces(self) -> List[Tuple[Fraction, Fraction]]:
        """Non-wrapped [lo, hi) pieces inside [0, 1)."""
        end = self.start + self.length
        if end <= 1:
            return [(self.start, end)]
        return [(self.start, Fraction(1)), (Fraction(0), end - 1)]


@dataclass(frozen=True)
class AxisRectangle:
    """Axis-aligned rectangle on the n-torus."""

    intervals: Tuple[TorusInterval, ...]

    @property
    def n(self) -> int:
        return len(self.intervals)

    @property
    def sides(self) -> Tuple[Fraction, ...]:
        return tuple(iv.length for iv in self.intervals)

    @property
    def sorted_sides(self) -> Tuple[Fraction, ...]:
        return tuple(sorted(self.sides))

    @property
    def volume(self) -> Fraction:
        v = Fraction(1)
        for iv in self.intervals:
            v *= iv.length
        return v

    def contains(self, point: Sequence, closed: bool = False) -> bool:
        if len(point) != self.n:
            raise ValueError("dimension mismatch")
        return all(iv.contains(x, closed=closed) for iv, x in zip(self.intervals, point))

    @staticmethod
    def box(bounds: Sequence[Tuple[Fraction, Fraction]]) -> "AxisRectangle":
        return AxisRectangle(tuple(TorusInterval(lo, as_fraction(hi) - as_fraction(lo))
                                   for lo, hi in bounds))


def _ceil_div_exp(p: Fraction, n: int, at_least: int) -> int:
    """Smallest m >= at_least with 2^(-m n) <= p."""
    m = max(at_least, 0)
    while Fraction(1, 1 << (m * n)) > p:
        m += 1
    return m


def _cover_rec(p: Fraction, n: int, cap_exp: int) -> List[List[TorusInterval]]:
    """Cover of the ordered region ||x_1|| <= ... <= ||x_n|| <= 2^-cap_exp,
    prod ||x_i|| <= p, as lists of per-coordinate torus intervals."""
    if p <= 0:
        return []
    if n == 1:
        c = min(p, Fraction(1, 1 << cap_exp), Fraction(1, 2))
        return [[TorusInterval.centered(c)]]
    m_core = _ceil_div_exp(p, n, cap_exp)
    boxes: List[List[TorusInterval]] = []
    for k in range(max(cap_exp, 1), m_core):
        sub_p = min(p * (1 << (k + 1)), Fraction(1))
        for band_piece in TorusInterval.band(k):
            for sub in _cover_rec(sub_p, n - 1, k):
                boxes.append(sub + [band_piece])
    core = min(Fraction(1, 1 << m_core), Fraction(1, 2))
    boxes.append([TorusInterval.centered(core)] * n)
    return boxes


def cover_hyperbolic_region(psi_q: Fraction, n: int) -> List[AxisRectangle]:
    """Dyadic rectangles covering the ordered hyperbolic slab.

    The union contains {x in T^n: ||x_1||...||x_n|| <= psi_q,
    ||x_1|| <= ... <= ||x_n||}; each rectangle has volume <= 4 psi_q and
    the count is O(log(1/psi_q)^(n-1)).  Symmetrisation over coordinate
    orderings is the caller's job.
    """
    psi_q = as_fraction(psi_q)
    if not 0 < psi_q < 1:
        raise ValueError("psi_q must lie strictly between 0 and 1")
    if n < 1:
        raise ValueError("dimension must be >= 1")
    raw = _cover_rec(psi_q, n, 1)
    out = []
    for ivs in raw:
        # split wrapped coordinate intervals into plain pieces
        choices = []
        for iv in ivs:
            pieces = iv.plain_pieces()
            choices.append([TorusInterval(lo, hi - lo) for lo, hi in pieces if hi > lo])
        for combo in itertools.product(*choices):
            out.append(AxisRectangle(tuple(combo)))
    return out
