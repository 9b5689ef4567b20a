"""Approximation functions and their series diagnostics.

An approximation function is a non-increasing map on the positive integers
with values in [0, 1) from q = 2 onward.  Three closed-form families are
supported, plus the theta-floor modification max(psi(q), q^-(1+theta))
that bounds how fast a function is allowed to decay.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence, Tuple

import gmpy2

from .scalars import (
    DEFAULT_PRECISION,
    IndeterminateComparison,
    Interval,
    as_fraction,
)

__all__ = [
    "ApproxFunction",
    "approx_eval",
    "gallagher_partial_sums",
    "ln_interval",
    "rational_power_interval",
]


def _mpfr_to_fraction(x) -> Fraction:
    m, e = x.as_mantissa_exp()
    m = int(m)
    e = int(e)
    if e >= 0:
        return Fraction(m * (1 << e))
    return Fraction(m, 1 << (-e))


def ln_interval(x: Fraction, prec: int = DEFAULT_PRECISION) -> Interval:
    """Directed-rounding enclosure of the natural log of a positive rational."""
    x = as_fraction(x)
    if x <= 0:
        raise ValueError("log of a non-positive value")
    down = gmpy2.context(precision=prec + 8, round=gmpy2.RoundDown)
    up = gmpy2.context(precision=prec + 8, round=gmpy2.RoundUp)
    with gmpy2.local_context(down):
        lo = gmpy2.log(gmpy2.mpfr(x.numerator)) - gmpy2.log(gmpy2.mpfr(x.denominator) * (1 + gmpy2.mpfr(2) ** -(prec + 6)))
    with gmpy2.local_context(up):
        hi = gmpy2.log(gmpy2.mpfr(x.numerator) * (1 + gmpy2.mpfr(2) ** -(prec + 6))) - gmpy2.log(gmpy2.mpfr(x.denominator))
    return Interval(_mpfr_to_fraction(lo), _mpfr_to_fraction(hi), prec=prec)


def rational_power_interval(base: Fraction, exponent: Fraction,
                            prec: int = DEFAULT_PRECISION) -> Interval:
    """Enclosure of base**exponent for positive rational base, rational exponent."""
    base = as_fraction(base)
    exponent = as_fraction(exponent)
    if base <= 0:
        raise ValueError("power of a non-positive base")
    p, r = exponent.numerator, exponent.denominator
    if p < 0:
        base = 1 / base
        p = -p
    powered = base**p
    return Interval.exact(powered, prec=prec).nth_root(r)


@dataclass(frozen=True)
class ApproxFunction:
    """A monotone approximation function with a theta-floor.

    family:
      * "power":      psi(q) = coeff * q**(-tau)
      * "power_log":  psi(q) = coeff * q**-1 * (ln q)**(-s), integer s >= 1
      * "tabulated":  explicit non-increasing values, constant beyond the table
      * "zero":       psi identically 0
    """

    family: str
    tau: Optional[Fraction] = None
    s: Optional[int] = None
    coeff: Fraction = Fraction(1)
    table: Optional[Tuple[Fraction, ...]] = None
    theta: Fraction = Fraction(1, 10)

    def __post_init__(self):
        if self.theta <= 0:
            raise ValueError("theta must be positive")
        if self.family == "power":
            if self.tau is None or self.tau <= 0:
                raise ValueError("power family needs tau > 0")
        elif self.family == "power_log":
            if self.s is None or self.s < 1:
                raise ValueError("power_log family needs integer s >= 1")
        elif self.family == "tabulated":
            if not self.table:
                raise ValueError("tabulated family needs values")
            vals = [as_fraction(v) for v in self.table]
            if any(v < 0 or v >= 1 for v in vals):
                raise ValueError("tabulated values must lie in [0, 1)")
            if any(vals[i] < vals[i + 1] for i in range(len(vals) - 1)):
                raise ValueError("tabulated values must be non-increasing")
        elif self.family != "zero":
            raise ValueError(f"unknown family {self.family!r}")

    # -- named constructors ----------------------------------------------------

    @staticmethod
    def power(tau, theta=Fraction(1, 10), coeff=1) -> "ApproxFunction":
        return ApproxFunction("power", tau=as_fraction(tau), theta=as_fraction(theta),
                              coeff=as_fraction(coeff))

    @staticmethod
    def power_log(s: int, theta=Fraction(1, 10), coeff=1) -> "ApproxFunction":
        return ApproxFunction("power_log", s=s, theta=as_fraction(theta),
                              coeff=as_fraction(coeff))

    @staticmethod
    def tabulated(values: Sequence, theta=Fraction(1, 10)) -> "ApproxFunction":
        return ApproxFunction("tabulated", table=tuple(as_fraction(v) for v in values),
                              theta=as_fraction(theta))

    @staticmethod
    def zero() -> "ApproxFunction":
        return ApproxFunction("zero")

    # -- evaluation --------------------------------------------------------------

    def is_zero(self) -> bool:
        return self.family == "zero" or (self.family == "tabulated" and self.table[-1] == 0 and all(v == 0 for v in self.table))

    def eval_interval(self, q: int, prec: int = DEFAULT_PRECISION,
                      floored: bool = False) -> Interval:
        """Enclosure of psi(q) (or of the floored psi'(q))."""
        if q < 1:
            raise ValueError("q must be a positive integer")
        raw = self._raw_interval(q, prec)
        if not floored:
            return raw
        floor_val = rational_power_interval(Fraction(q), -(1 + self.theta), prec)
        if raw.lo >= floor_val.hi:
            return raw
        if raw.hi <= floor_val.lo:
            return floor_val
        return Interval(max(raw.lo, floor_val.lo), max(raw.hi, floor_val.hi), prec=prec)

    def _raw_interval(self, q: int, prec: int) -> Interval:
        if self.family == "zero":
            return Interval.exact(0, prec=prec)
        if self.family == "power":
            return rational_power_interval(Fraction(q), -self.tau, prec) * Interval.exact(self.coeff, prec=prec)
        if self.family == "power_log":
            if q == 1:
                raise ValueError("power_log family undefined at q = 1")
            lnq = ln_interval(Fraction(q), prec)
            return Interval.exact(self.coeff / q, prec=prec) / lnq**self.s
        # tabulated: 1-indexed, constant beyond the end
        idx = min(q, len(self.table)) - 1
        return Interval.exact(self.table[idx], prec=prec)

    def eval_exact(self, q: int):
        """Exact (unfloored) value when it is rational, else None."""
        if self.family == "zero":
            return Fraction(0)
        if self.family == "tabulated":
            return self.table[min(q, len(self.table)) - 1]
        if self.family == "power":
            val = _exact_rational_power(q, -self.tau)
            return None if val is None else self.coeff * val
        return None

    # -- exact comparisons -------------------------------------------------------

    def cmp_pow2(self, q: int, k: int, floored: bool = False) -> int:
        """Exact sign of psi(q) - 2**k (floored variant optional).

        Used by the dyadic shape enumeration, where psi(2**t) is compared
        against powers of two and no rounding may decide the verdict.
        """
        if self.family == "zero":
            return -1  # 0 < 2^k always
        if self.family == "power":
            expo = self.tau if not floored else min(self.tau, 1 + self.theta)
            # coeff * q^(-expo) vs 2^k  <=>  coeff^r * q^(-p) vs 2^(k r), expo = p/r
            p, r = expo.numerator, expo.denominator
            lhs_num = self.coeff.numerator**r
            lhs_den = self.coeff.denominator**r * q**p
            if k >= 0:
                rhs_num, rhs_den = 1 << (k * r), 1
            else:
                rhs_num, rhs_den = 1, 1 << (-k * r)
            lhs = lhs_num * rhs_den
            rhs = rhs_num * lhs_den
            return (lhs > rhs) - (lhs < rhs)
        if self.family == "tabulated" and not floored:
            val = self.eval_exact(q)
            target = Fraction(1 << k) if k >= 0 else Fraction(1, 1 << (-k))
            return (val > target) - (val < target)
        return self._cmp_pow2_interval(q, k, floored)

    def _cmp_pow2_interval(self, q: int, k: int, floored: bool) -> int:
        target = Fraction(1 << k) if k >= 0 else Fraction(1, 1 << (-k))
        prec = DEFAULT_PRECISION
        while prec <= 4096:
            enc = self.eval_interval(q, prec, floored=floored)
            verdict = enc.cmp(target)
            if verdict == "<":
                return -1
            if verdict == ">":
                return 1
            prec *= 2
        raise IndeterminateComparison(f"psi({q}) ties with 2^{k} beyond precision cap")


def _exact_rational_power(q: int, expo: Fraction):
    """q**expo as an exact Fraction when the root is exact, else None."""
    p, r = expo.numerator, expo.denominator
    invert = p < 0
    p = abs(p)
    root, exact = gmpy2.iroot(gmpy2.mpz(q) ** p, r)
    if not exact:
        return None
    root = int(root)
    return Fraction(1, root) if invert else Fraction(root)


def approx_eval(psi: ApproxFunction, q: int, floored: bool = False,
                prec: int = DEFAULT_PRECISION):
    """psi(q), or the floored psi'(q) = max(psi(q), q^-(1+theta)).

    Returns an exact Fraction when the value is rational, otherwise a
    certified Interval enclosure.  Both branches of the max are evaluated;
    the winner is decided exactly (power family) or by enclosure refinement.
    """
    if q < 1:
        raise ValueError("q must be a positive integer")
    if not floored:
        exact = psi.eval_exact(q)
        return exact if exact is not None else psi.eval_interval(q, prec)
    if psi.family == "power" and psi.coeff == 1:
        expo = min(psi.tau, 1 + psi.theta)
        exact = _exact_rational_power(q, -expo)
        if exact is not None:
            return exact
        return rational_power_interval(Fraction(q), -expo, prec)
    raw = psi.eval_exact(q)
    fl = _exact_rational_power(q, -(1 + psi.theta))
    if raw is not None and fl is not None:
        return max(raw, fl)
    if raw is not None:
        # irrational floor branch: refine until the max is decided
        p = prec
        while p <= 4096:
            fenc = rational_power_interval(Fraction(q), -(1 + psi.theta), p)
            if fenc.hi <= raw:
                return raw
            if fenc.lo >= raw:
                return fenc
            p *= 2
        raise IndeterminateComparison("floored max unresolved at precision cap")
    return psi.eval_interval(q, prec, floored=True)


def gallagher_partial_sums(psi: ApproxFunction, n: int, T: int,
                           prec: int = DEFAULT_PRECISION) -> Tuple[Interval, Interval]:
    """Partial sums of the convergence series and its dyadic condensation.

    raw       = sum_{q=2}^{T} psi(q) (ln q)^(n-1)
    condensed = sum_{t=1}^{floor(log2 T)} 2^t t^(n-1) psi(2^t)

    Both come back as interval enclosures.
    """
    if T < 2:
        raise ValueError("cutoff T must be at least 2")
    if n < 1:
        raise ValueError("dimension n must be at least 1")
    raw = Interval.exact(0, prec=prec)
    if psi.is_zero():
        return raw, raw
    for q in range(2, T + 1):
        term = psi.eval_interval(q, prec)
        if n > 1:
            term = term * ln_interval(Fraction(q), prec) ** (n - 1)
        raw = raw + term
    condensed = Interval.exact(0, prec=prec)
    t_max = T.bit_length() - 1  # floor(log2 T)
    for t in range(1, t_max + 1):
        term = psi.eval_interval(1 << t, prec) * Fraction((1 << t) * t ** (n - 1))
        condensed = condensed + term
    return raw, condensed
