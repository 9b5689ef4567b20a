"""Exact scalars and certified enclosures.

Three kinds of scalar values flow through the library:

* ``fractions.Fraction`` -- exact rationals (also plain ``int``),
* :class:`Surd` -- exact quadratic irrationals ``(a + b*sqrt(D)) / c``,
* :class:`Interval` -- dyadic intervals ``[lo, hi]`` with outward rounding
  at a configurable bit precision.

Counting predicates must never be decided by rounding noise, so every
comparison is either exact (rational / surd kinds) or goes through
:func:`resolve`, which doubles the working precision until the comparison
resolves or the precision cap is reached.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Iterable, Sequence, Union

import gmpy2

__all__ = [
    "DEFAULT_PRECISION",
    "PRECISION_CAP",
    "IndeterminateComparison",
    "Interval",
    "Surd",
    "Scalar",
    "as_fraction",
    "dist_to_nearest_int",
    "nearest_int",
    "height_product",
    "sup_norm",
    "resolve",
    "scalar_cmp",
    "scalar_floor",
    "scalar_sign",
]

DEFAULT_PRECISION = 128
PRECISION_CAP = 1024


class IndeterminateComparison(Exception):
    """An interval comparison could not be resolved at the precision cap."""

    def __init__(self, message, candidates=None):
        super().__init__(message)
        self.candidates = candidates


def as_fraction(x) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        return Fraction(x)
    raise TypeError(f"cannot coerce {x!r} to an exact rational")


def _dyadic_floor(x: Fraction, prec: int) -> Fraction:
    """Largest multiple of 2**-prec that is <= x."""
    scaled = x * (1 << prec)
    return Fraction(math.floor(scaled), 1 << prec)


def _dyadic_ceil(x: Fraction, prec: int) -> Fraction:
    scaled = x * (1 << prec)
    return Fraction(math.ceil(scaled), 1 << prec)


class Interval:
    """Closed dyadic interval with outward rounding.

    Endpoints are Fractions whose denominators are powers of two; after
    every operation the result is widened outward to ``prec`` fractional
    bits, so widths are tracked conservatively through whole pipelines.
    """

    __slots__ = ("lo", "hi", "prec")

    def __init__(self, lo, hi=None, prec: int = DEFAULT_PRECISION):
        if hi is None:
            hi = lo
        lo = as_fraction(lo)
        hi = as_fraction(hi)
        if lo > hi:
            raise ValueError("interval endpoints out of order")
        self.lo = _dyadic_floor(lo, prec)
        self.hi = _dyadic_ceil(hi, prec)
        self.prec = prec

    # -- construction helpers ------------------------------------------------

    @staticmethod
    def exact(x, prec: int = DEFAULT_PRECISION) -> "Interval":
        return Interval(x, x, prec=prec)

    @staticmethod
    def hull(items: Iterable["Interval"]) -> "Interval":
        items = list(items)
        prec = max(i.prec for i in items)
        return Interval(min(i.lo for i in items), max(i.hi for i in items), prec=prec)

    # -- basic queries -------------------------------------------------------

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo

    def midpoint(self) -> Fraction:
        return (self.lo + self.hi) / 2

    def contains(self, x) -> bool:
        x = as_fraction(x)
        return self.lo <= x <= self.hi

    def strictly_positive(self) -> bool:
        return self.lo > 0

    def strictly_negative(self) -> bool:
        return self.hi < 0

    def __repr__(self):
        return f"Interval({self.lo}, {self.hi})"

    # -- arithmetic ----------------------------------------------------------

    def _coerce(self, other) -> "Interval":
        if isinstance(other, Interval):
            return other
        if isinstance(other, Surd):
            return other.enclosure(self.prec)
        return Interval.exact(other, prec=self.prec)

    def __add__(self, other):
        o = self._coerce(other)
        return Interval(self.lo + o.lo, self.hi + o.hi, prec=min(self.prec, o.prec))

    __radd__ = __add__

    def __neg__(self):
        return Interval(-self.hi, -self.lo, prec=self.prec)

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) + (-self)

    def __mul__(self, other):
        o = self._coerce(other)
        products = (self.lo * o.lo, self.lo * o.hi, self.hi * o.lo, self.hi * o.hi)
        return Interval(min(products), max(products), prec=min(self.prec, o.prec))

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._coerce(other)
        if o.lo <= 0 <= o.hi:
            raise ZeroDivisionError("interval divisor straddles zero")
        recips = (1 / o.lo, 1 / o.hi)
        return self * Interval(min(recips), max(recips), prec=o.prec)

    def __rtruediv__(self, other):
        return self._coerce(other) / self

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("integer power expected")
        result = Interval.exact(1, prec=self.prec)
        base = self
        e = k
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        if k % 2 == 0 and self.lo < 0 < self.hi:
            result = Interval(0, result.hi, prec=self.prec)
        return result

    def nth_root(self, n: int) -> "Interval":
        """Enclosure of the n-th root (binary directed rounding)."""
        if self.lo < 0:
            raise ValueError("nth_root of an interval below zero")
        prec = self.prec
        lo = _root_lower(self.lo, n, prec)
        hi = _root_upper(self.hi, n, prec)
        return Interval(lo, hi, prec=prec)

    def abs(self) -> "Interval":
        if self.lo >= 0:
            return self
        if self.hi <= 0:
            return -self
        return Interval(0, max(-self.lo, self.hi), prec=self.prec)

    # -- three-valued comparisons against exact scalars ----------------------

    def cmp(self, other) -> str:
        """Return '<', '>', or '?' comparing this enclosure against a scalar."""
        o = self._coerce(other)
        if self.hi < o.lo:
            return "<"
        if self.lo > o.hi:
            return ">"
        return "?"


def _root_lower(x: Fraction, n: int, prec: int) -> Fraction:
    """Largest 2**-prec multiple r with r**n <= x."""
    if x == 0:
        return Fraction(0)
    scaled = (x.numerator << (n * prec)) // x.denominator
    root, _ = gmpy2.iroot(scaled, n)
    root = int(root)
    # floor division loses at most one unit of the scaled root; fix up exactly
    while Fraction(root + 1, 1 << prec) ** n <= x:
        root += 1
    while Fraction(root, 1 << prec) ** n > x:
        root -= 1
    return Fraction(root, 1 << prec)


def _root_upper(x: Fraction, n: int, prec: int) -> Fraction:
    if x == 0:
        return Fraction(0)
    lo = _root_lower(x, n, prec)
    if lo**n == x:
        return lo
    return lo + Fraction(1, 1 << prec)


class Surd:
    """Exact quadratic irrational (a + b*sqrt(D)) / c with integer a, b, c, D.

    D must be positive and not a perfect square; c is normalised positive
    and the triple (a, b, c) is reduced. b == 0 inputs are permitted and
    behave like rationals, so field arithmetic in Q(sqrt(D)) stays closed.
    """

    __slots__ = ("a", "b", "c", "D")

    def __init__(self, a: int, b: int, c: int, D: int):
        if c == 0:
            raise ValueError("surd denominator must be nonzero")
        if D <= 0:
            raise ValueError("surd discriminant must be positive")
        s, D = _extract_square_part(D)
        b *= s
        if D == 1:
            # collapsed to a rational; keep b == 0 form with a dummy radicand
            a, b, D = a + b, 0, 2
        r = gmpy2.isqrt(D)
        if r * r == D:
            raise ValueError("surd discriminant must not be a perfect square")
        if c < 0:
            a, b, c = -a, -b, -c
        g = math.gcd(math.gcd(abs(a), abs(b)), c)
        if g > 1:
            a //= g
            b //= g
            c //= g
        self.a = a
        self.b = b
        self.c = c
        self.D = D

    # -- helpers -------------------------------------------------------------

    @staticmethod
    def from_rational(x, D: int) -> "Surd":
        x = as_fraction(x)
        return Surd(x.numerator, 0, x.denominator, D)

    def is_rational(self) -> bool:
        return self.b == 0

    def to_fraction(self) -> Fraction:
        if not self.is_rational():
            raise ValueError("surd with irrational part")
        return Fraction(self.a, self.c)

    def _pair(self, other):
        """Both operands on a common radicand, or None when truly mixed."""
        if not isinstance(other, Surd):
            return self, Surd.from_rational(other, self.D)
        if other.D == self.D:
            return self, other
        if other.b == 0:
            return self, Surd(other.a, 0, other.c, self.D)
        if self.b == 0:
            return Surd(self.a, 0, self.c, other.D), other
        return None

    # -- field arithmetic ----------------------------------------------------

    def __add__(self, other):
        pair = self._pair(other)
        if pair is None:
            raise ValueError("sum of surds with mixed radicands")
        x, o = pair
        return Surd(x.a * o.c + o.a * x.c, x.b * o.c + o.b * x.c, x.c * o.c, x.D)

    __radd__ = __add__

    def __neg__(self):
        return Surd(-self.a, -self.b, self.c, self.D)

    def __sub__(self, other):
        if isinstance(other, Surd):
            return self + (-other)
        return self + (-as_fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        pair = self._pair(other)
        if pair is not None:
            x, o = pair
            a = x.a * o.a + x.b * o.b * x.D
            b = x.a * o.b + x.b * o.a
            return Surd(a, b, x.c * o.c, x.D)
        if self.a == 0 and other.a == 0:
            # pure roots multiply into a single radicand
            return Surd(0, self.b * other.b, self.c * other.c, self.D * other.D)
        raise ValueError("product of mixed surds is outside a quadratic field")

    __rmul__ = __mul__

    def _reciprocal(self) -> "Surd":
        norm = self.a * self.a - self.b * self.b * self.D
        if norm == 0:
            raise ZeroDivisionError("division by zero surd")
        return Surd(self.a * self.c, -self.b * self.c, norm, self.D)

    def __truediv__(self, other):
        if isinstance(other, Surd):
            return self * other._reciprocal()
        other = as_fraction(other)
        return Surd(self.a * other.denominator, self.b * other.denominator,
                    self.c * other.numerator, self.D)

    def __rtruediv__(self, other):
        return self._reciprocal() * other

    def __pow__(self, k: int):
        result = Surd(1, 0, 1, self.D)
        base = self
        e = k
        while e:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    # -- exact ordering ------------------------------------------------------

    def sign(self) -> int:
        """Exact sign of the real value."""
        # sign of a + b*sqrt(D)  (c > 0 after normalisation)
        a, b = self.a, self.b
        if b == 0:
            return (a > 0) - (a < 0)
        if a == 0:
            return 1 if b > 0 else -1
        if a > 0 and b > 0:
            return 1
        if a < 0 and b < 0:
            return -1
        # opposite signs: compare a^2 against b^2 D
        lhs = a * a
        rhs = b * b * self.D
        if lhs == rhs:
            return 0  # cannot happen with non-square D and b != 0
        bigger_is_a = lhs > rhs
        return (1 if a > 0 else -1) if bigger_is_a else (1 if b > 0 else -1)

    def _cmp_exact(self, other) -> int:
        if isinstance(other, Surd) and self._pair(other) is None:
            return _cmp_mixed_surds(self, other)
        return (self - other).sign()

    def __lt__(self, other):
        return self._cmp_exact(other) < 0

    def __le__(self, other):
        return self._cmp_exact(other) <= 0

    def __gt__(self, other):
        return self._cmp_exact(other) > 0

    def __ge__(self, other):
        return self._cmp_exact(other) >= 0

    def __eq__(self, other):
        if isinstance(other, (Surd, int, Fraction)):
            try:
                return self._cmp_exact(other) == 0
            except ValueError:
                return False
        return NotImplemented

    def __hash__(self):
        if self.b == 0:
            return hash(Fraction(self.a, self.c))
        return hash((self.a, self.b, self.c, self.D))

    def __repr__(self):
        return f"Surd(({self.a} + {self.b}*sqrt({self.D}))/{self.c})"

    # -- floor and enclosures --------------------------------------------------

    def floor(self) -> int:
        """Exact floor via integer square-root bounds."""
        # a + b*sqrt(D): bound b*sqrt(D) between consecutive integers.
        s = gmpy2.isqrt(self.b * self.b * self.D)  # |b|sqrt(D) in [s, s+1)
        t = self.a + (int(s) if self.b >= 0 else -int(s) - 1)
        # value*c in [t, t+2); candidate floors: floor(t/c) .. floor((t+2)/c)
        lo = t // self.c
        for m in range(lo, lo + 3):
            if Surd(self.a - (m + 1) * self.c, self.b, self.c, self.D).sign() < 0 and (
                Surd(self.a - m * self.c, self.b, self.c, self.D).sign() >= 0
            ):
                return m
        raise AssertionError("floor bracketing failed")

    def enclosure(self, prec: int = DEFAULT_PRECISION) -> Interval:
        scale = 1 << prec
        s_lo = gmpy2.isqrt(self.b * self.b * self.D * scale * scale)
        if self.b >= 0:
            num_lo, num_hi = int(s_lo), int(s_lo) + 1
        else:
            num_lo, num_hi = -int(s_lo) - 1, -int(s_lo)
        lo = Fraction(self.a * scale + num_lo, self.c * scale)
        hi = Fraction(self.a * scale + num_hi, self.c * scale)
        return Interval(lo, hi, prec=prec)


def _extract_square_part(D: int) -> tuple:
    """D = s^2 * D' with D' square-reduced; returns (s, D')."""
    s = 1
    f = 2
    while f * f <= D and f <= 100_000:
        ff = f * f
        while D % ff == 0:
            D //= ff
            s *= f
        f += 1
    r = int(gmpy2.isqrt(D))
    if r > 1 and r * r == D:
        s *= r
        D = 1
    return s, D


def _cmp_mixed_surds(x: "Surd", y: "Surd") -> int:
    """Exact sign of x - y for surds over different radicands."""
    # equality test: r + u sqrt(D1) = v sqrt(D2) with r, u, v rational
    r = Fraction(x.a, x.c) - Fraction(y.a, y.c)
    u = Fraction(x.b, x.c)
    v = Fraction(y.b, y.c)
    if r == 0:
        if u == 0 and v == 0:
            return 0
        if u != 0 and v != 0 and (u > 0) == (v > 0) and u * u * x.D == v * v * y.D:
            return 0
    elif u != 0:
        # r + u sqrt(D1) = v sqrt(D2) would force sqrt(D1) rational
        pass
    prec = DEFAULT_PRECISION
    while prec <= 16 * PRECISION_CAP:
        ex = x.enclosure(prec)
        ey = y.enclosure(prec)
        if ex.hi < ey.lo:
            return -1
        if ex.lo > ey.hi:
            return 1
        prec *= 2
    raise IndeterminateComparison("mixed surd comparison unresolved")


def scalar_cmp(x, y) -> int:
    """Exact three-way comparison across scalar kinds (no intervals)."""
    if isinstance(x, Surd) or isinstance(y, Surd):
        if not isinstance(x, Surd):
            return -scalar_cmp(y, x)
        return x._cmp_exact(y)
    xf, yf = as_fraction(x), as_fraction(y)
    return (xf > yf) - (xf < yf)


Scalar = Union[int, Fraction, Surd, Interval]


def scalar_sign(x: Scalar) -> int:
    """Exact sign for exact kinds; raises on straddling intervals."""
    if isinstance(x, Interval):
        if x.lo > 0:
            return 1
        if x.hi < 0:
            return -1
        if x.lo == x.hi == 0:
            return 0
        raise IndeterminateComparison("interval straddles zero")
    if isinstance(x, Surd):
        return x.sign()
    x = as_fraction(x)
    return (x > 0) - (x < 0)


def scalar_floor(x: Scalar) -> int:
    if isinstance(x, Surd):
        return x.floor()
    if isinstance(x, Interval):
        lo = math.floor(x.lo)
        hi = math.floor(x.hi)
        if lo != hi:
            raise IndeterminateComparison(
                "interval too wide to resolve floor", candidates=list(range(lo, hi + 1))
            )
        return lo
    return math.floor(as_fraction(x))


def resolve(compute: Callable[[int], Interval], against: Scalar = 0,
            start: int = DEFAULT_PRECISION, cap: int = PRECISION_CAP) -> str:
    """Compare compute(prec) against a scalar, doubling precision on demand.

    ``compute`` must return an enclosure that shrinks as ``prec`` grows.
    Returns '<' or '>'.  Raises IndeterminateComparison at the cap, which
    callers treat as an exact tie needing algebraic handling.
    """
    prec = start
    while True:
        verdict = compute(prec).cmp(against)
        if verdict != "?":
            return verdict
        if prec >= cap:
            raise IndeterminateComparison(
                f"comparison unresolved at precision cap {cap}"
            )
        prec *= 2


# ---------------------------------------------------------------------------
# Distance to the nearest integer and integer-vector heights
# ---------------------------------------------------------------------------


def nearest_int(x: Scalar) -> int:
    """The integer minimising |x - k|, exact for exact kinds.

    Ties at half-integers resolve downward (the distance is unaffected).
    """
    if isinstance(x, Interval):
        k_lo = math.floor(x.lo + Fraction(1, 2))
        k_hi = math.floor(x.hi + Fraction(1, 2))
        if k_lo != k_hi:
            raise IndeterminateComparison(
                "interval too wide to resolve the nearest integer",
                candidates=list(range(k_lo, k_hi + 1)),
            )
        return k_lo
    if isinstance(x, Surd):
        m = x.floor()
        # compare x - m against 1/2 exactly
        return m if (x - Fraction(m)) - Fraction(1, 2) <= 0 else m + 1
    xf = as_fraction(x)
    m = math.floor(xf)
    return m if xf - m <= Fraction(1, 2) else m + 1


def dist_to_nearest_int(x: Scalar) -> Scalar:
    """||x||: min over integers k of |x - k|, in [0, 1/2].

    Exact for rational and surd kinds.  For intervals, returns the exact
    image enclosure {||t||: t in x} (when the input spans an integer the
    enclosure starts at 0 -- no guessing).
    """
    if isinstance(x, Interval):
        if x.width >= 1:
            return Interval(0, Fraction(1, 2), prec=x.prec)
        k_lo = math.floor(x.lo + Fraction(1, 2))
        k_hi = math.floor(x.hi + Fraction(1, 2))
        if k_lo == k_hi:
            d_lo = abs(x.lo - k_lo)
            d_hi = abs(x.hi - k_lo)
            if x.lo <= k_lo <= x.hi:
                return Interval(0, max(d_lo, d_hi), prec=x.prec)
            return Interval(min(d_lo, d_hi), max(d_lo, d_hi), prec=x.prec)
        # spans the midpoint between two candidates: image still an interval
        hi = max(abs(x.lo - k_lo), abs(x.hi - k_hi), Fraction(1, 2))
        lo = min(abs(x.lo - k_lo), abs(x.hi - k_hi), Fraction(1, 2))
        if any(x.lo <= k <= x.hi for k in range(k_lo, k_hi + 1)):
            lo = Fraction(0)
        return Interval(lo, min(hi, Fraction(1, 2)), prec=x.prec)
    if isinstance(x, Surd):
        m = x.floor()
        frac = x - Fraction(m)
        alt = Fraction(1) - frac  # 1 - {x}, also a surd expression
        return frac if (frac - alt).sign() <= 0 else alt
    xf = as_fraction(x)
    frac = xf - math.floor(xf)
    return min(frac, 1 - frac)


def height_product(m: Sequence[int]) -> int:
    """H(m) = prod_j max(1, |m_j|)."""
    h = 1
    for entry in m:
        h *= max(1, abs(entry))
    return h


def sup_norm(m: Sequence[int]) -> int:
    return max(abs(entry) for entry in m) if m else 0


@dataclass(frozen=True)
class ScalarContext:
    """Precision policy: default bits and the escalation cap."""

    precision: int = DEFAULT_PRECISION
    cap: int = PRECISION_CAP
