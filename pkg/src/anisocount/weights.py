"""Smooth cutoff weights built from a C^4 polynomial transition.

All profiles are piecewise polynomial with rational breakpoints, so their
supports, plateaus, integrals, and derivative bounds are exactly
computable.  The transition kernel is the degree-9 smoothstep

    S(v) = 126 v^5 - 420 v^6 + 540 v^7 - 315 v^8 + 70 v^9,

which is C^4 at both ends, has S(v) + S(1-v) = 1, and integrates to 1/2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .polyx import (
    Poly,
    isolate_roots,
    poly,
    poly_derivative,
    poly_eval,
    poly_eval_interval,
)
from .scalars import Interval, as_fraction

__all__ = [
    "SMOOTHSTEP",
    "PiecewiseBump",
    "WeightSpec",
    "omega_weight",
    "w_weight",
    "adapted_weight",
    "rough_weight",
    "w_hat_zero",
    "certified_profile_integral",
]

SMOOTHSTEP: Poly = poly([0, 0, 0, 0, 0, 126, -420, 540, -315, 70])

_S_INTEGRAL = Fraction(1, 2)  # int_0^1 S, exact by the symmetry S(v)+S(1-v)=1


def _smoothstep_exact(v: Fraction) -> Fraction:
    if v <= 0:
        return Fraction(0)
    if v >= 1:
        return Fraction(1)
    return poly_eval(SMOOTHSTEP, v)


def _smoothstep_float(v: float) -> float:
    if v <= 0.0:
        return 0.0
    if v >= 1.0:
        return 1.0
    return v**5 * (126 + v * (-420 + v * (540 + v * (-315 + v * 70))))


@dataclass(frozen=True)
class Segment:
    lo: Fraction
    hi: Fraction
    kind: str  # "one", "rise", "fall"


class PiecewiseBump:
    """[0,1]-valued bump: plateaus and smoothstep transitions."""

    def __init__(self, segments: Sequence[Segment]):
        self.segments = sorted(segments, key=lambda s: s.lo)
        for a, b in zip(self.segments, self.segments[1:]):
            if a.hi > b.lo:
                raise ValueError("overlapping bump segments")

    # -- evaluation ----------------------------------------------------------

    def value(self, x) -> Fraction:
        x = as_fraction(x)
        for seg in self.segments:
            if seg.lo <= x <= seg.hi:
                if seg.kind == "one":
                    return Fraction(1)
                t = (x - seg.lo) / (seg.hi - seg.lo)
                if seg.kind == "rise":
                    return _smoothstep_exact(t)
                return _smoothstep_exact(1 - t)
        return Fraction(0)

    def value_float(self, x: float) -> float:
        for seg in self.segments:
            lo, hi = float(seg.lo), float(seg.hi)
            if lo <= x <= hi:
                if seg.kind == "one":
                    return 1.0
                t = (x - lo) / (hi - lo)
                return _smoothstep_float(t if seg.kind == "rise" else 1.0 - t)
        return 0.0

    def value_interval(self, x: Interval) -> Interval:
        vals = []
        for endpoint in (x.lo, x.hi):
            vals.append(self.value(endpoint))
        # profiles are monotone on each segment; a conservative hull over
        # the straddled segments is enough for our certified sums
        lo_v, hi_v = min(vals), max(vals)
        for seg in self.segments:
            if x.lo < seg.hi and x.hi > seg.lo:
                if seg.kind == "one":
                    hi_v = max(hi_v, Fraction(1))
                else:
                    hi_v = max(hi_v, Fraction(1))
                    lo_v = min(lo_v, self.value(max(x.lo, seg.lo)),
                               self.value(min(x.hi, seg.hi)))
        return Interval(max(Fraction(0), lo_v), min(Fraction(1), hi_v), prec=x.prec)

    # -- exact aggregates ------------------------------------------------------

    @property
    def support(self) -> Tuple[Fraction, Fraction]:
        return (self.segments[0].lo, self.segments[-1].hi)

    def plateau_intervals(self) -> List[Tuple[Fraction, Fraction]]:
        return [(s.lo, s.hi) for s in self.segments if s.kind == "one"]

    def integral(self) -> Fraction:
        total = Fraction(0)
        for seg in self.segments:
            width = seg.hi - seg.lo
            total += width if seg.kind == "one" else width * _S_INTEGRAL
        return total

    def derivative_sup_bound(self, order: int) -> Fraction:
        """Exact sup |d^order profile| via root isolation on S^(order+1)."""
        if order == 0:
            return Fraction(1)
        sup_s = _smoothstep_derivative_sup(order)
        best = Fraction(0)
        for seg in self.segments:
            if seg.kind == "one":
                continue
            width = seg.hi - seg.lo
            best = max(best, sup_s / width**order)
        return best

    def to_kernel_arrays(self):
        """(breaks, kinds) for the compiled evaluator: kinds 0=one 1=rise 2=fall."""
        kind_code = {"one": 0, "rise": 1, "fall": 2}
        return ([(float(s.lo), float(s.hi), kind_code[s.kind]) for s in self.segments])


_DERIV_SUP_CACHE: Dict[int, Fraction] = {}


def _smoothstep_derivative_sup(order: int) -> Fraction:
    if order in _DERIV_SUP_CACHE:
        return _DERIV_SUP_CACHE[order]
    d = poly_derivative(SMOOTHSTEP, order)
    crit = [Fraction(0), Fraction(1)]
    for a, b in isolate_roots(poly_derivative(d), 0, 1, Fraction(1, 1 << 30)):
        crit.append((a + b) / 2)
    sup = max(abs(poly_eval(d, x)) for x in crit)
    # pad by the maximal slope times the isolation width, keeping it a bound
    pad = _poly_abs_coef_sum(poly_derivative(d)) * Fraction(1, 1 << 30)
    _DERIV_SUP_CACHE[order] = sup + pad
    return _DERIV_SUP_CACHE[order]


def _poly_abs_coef_sum(p: Poly) -> Fraction:
    return sum((abs(c) for c in p), Fraction(0))


# ---------------------------------------------------------------------------
# The concrete weight family
# ---------------------------------------------------------------------------


@dataclass
class WeightSpec:
    """An evaluable weight plus the metadata tests assert against."""

    kind: str
    profile: PiecewiseBump
    params: Dict
    even: bool = False

    def __call__(self, x):
        if self.even:
            x = abs(as_fraction(x)) if not isinstance(x, Interval) else x.abs()
        if isinstance(x, Interval):
            return self.profile.value_interval(x)
        return self.profile.value(x)

    def value_float(self, x: float) -> float:
        if self.even and x < 0:
            x = -x
        return self.profile.value_float(x)

    @property
    def support(self):
        return self.profile.support

    def integral(self) -> Fraction:
        total = self.profile.integral()
        if self.even:
            sup = self.profile.support
            # profile describes x >= 0; reflect, but do not double-count [0, ..)
            total = 2 * total - (self.profile.value(Fraction(0)) * 0)
            if sup[0] < 0:
                raise ValueError("even profile must be given on x >= 0")
        return total


def omega_weight() -> WeightSpec:
    """Denominator cutoff: support in [1/2, 4], identically 1 on [1, 2]."""
    profile = PiecewiseBump([
        Segment(Fraction(5, 8), Fraction(1), "rise"),
        Segment(Fraction(1), Fraction(2), "one"),
        Segment(Fraction(2), Fraction(15, 4), "fall"),
    ])
    return WeightSpec("omega", profile, {})


def w_weight() -> WeightSpec:
    """Even window: support in (-2, 2), identically 1 on [-1, 1]."""
    profile = PiecewiseBump([
        Segment(Fraction(0), Fraction(1), "one"),
        Segment(Fraction(1), Fraction(15, 8), "fall"),
    ])
    return WeightSpec("w", profile, {}, even=True)


def w_hat_zero() -> Fraction:
    """Integral of the w window over R (its zero Fourier coefficient)."""
    return w_weight().integral()


def _bump_from_union(intervals, plateau_pad: Fraction, transition: Fraction) -> PiecewiseBump:
    merged: List[Tuple[Fraction, Fraction]] = []
    for lo, hi in sorted((as_fraction(a), as_fraction(b)) for a, b in intervals):
        lo, hi = lo - plateau_pad, hi + plateau_pad
        if merged and lo <= merged[-1][1] + 2 * transition:
            merged[-1] = (merged[-1][0], max(merged[-1][1], hi))
        else:
            merged.append((lo, hi))
    segments: List[Segment] = []
    for lo, hi in merged:
        segments.append(Segment(lo - transition, lo, "rise"))
        segments.append(Segment(lo, hi, "one"))
        segments.append(Segment(hi, hi + transition, "fall"))
    return PiecewiseBump(segments)


def adapted_weight(intervals: Sequence[Tuple[Fraction, Fraction]], kappa) -> WeightSpec:
    """Weight that is 1 on the kappa-neighbourhood of the interval union and
    supported inside the 2*kappa-neighbourhood."""
    kappa = as_fraction(kappa)
    if kappa <= 0:
        raise ValueError("kappa must be positive")
    profile = _bump_from_union(intervals, kappa, kappa)
    return WeightSpec("adapted", profile,
                      {"kappa": kappa, "plateau": profile.plateau_intervals()})


def rough_weight(cover: Sequence[Tuple[Fraction, Fraction]], r) -> WeightSpec:
    """Mollified indicator of a detected set U: identically 1 on U and
    supported in U + 7r/16, so a net of centers in U at spacing r traps the
    support inside the union of (x_i - r, x_i + r).

    Transition width 3r/8 keeps the first-derivative bound below 8/r.
    """
    r = as_fraction(r)
    spec = WeightSpec("rough", _bump_from_union(cover, r / 16, 3 * r / 8),
                      {"r": r})
    return spec


def certified_profile_integral(spec: WeightSpec, tol: Fraction = Fraction(1, 1 << 40)) -> Interval:
    """Enclosure of the integral; exact for these polynomial profiles.

    The exact value is computed by per-segment antiderivatives; the
    returned interval has zero width and trivially meets any tolerance.
    """
    val = spec.integral()
    return Interval(val, val)
