"""Anisotropic counting near curves: exact counts, smoothed counts, the
main/error split, and the derived parameter schedule.

The exact count R is decided entirely in integer arithmetic for monomial
curves (no rounding enters any accept/reject); smooth counts come back
with conservative floating-point error budgets.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

from .curves import CurveSpec, ratio_sup_bound, sup_abs_bound
from .scalars import as_fraction
from .targets import DyadicShape
from .weights import WeightSpec, adapted_weight, omega_weight, w_hat_zero, w_weight

__all__ = [
    "PowTwo",
    "ParameterSet",
    "choose_parameters",
    "CurveConstants",
    "curve_constants",
    "ExactCountResult",
    "exact_count",
    "smooth_count",
    "SmoothCountResult",
    "main_and_error",
    "MainErrorResult",
    "CountReport",
]


@dataclass(frozen=True)
class PowTwo:
    """Exact positive quantity coeff * 2**exp with rational coeff and exp."""

    coeff: Fraction
    exp: Fraction

    def __post_init__(self):
        if self.coeff <= 0:
            raise ValueError("PowTwo coefficients must be positive")

    @staticmethod
    def of(coeff, exp=0) -> "PowTwo":
        return PowTwo(as_fraction(coeff), as_fraction(exp))

    def __mul__(self, other: "PowTwo") -> "PowTwo":
        return PowTwo(self.coeff * other.coeff, self.exp + other.exp)

    def __truediv__(self, other: "PowTwo") -> "PowTwo":
        return PowTwo(self.coeff / other.coeff, self.exp - other.exp)

    def pow(self, k: int) -> "PowTwo":
        return PowTwo(self.coeff**k, self.exp * k)

    def cmp(self, other: "PowTwo") -> int:
        """Exact sign of self - other."""
        e = self.exp - other.exp
        ratio = self.coeff / other.coeff  # want ratio vs 2^-e
        # fast screen with logs; margins below 1e-9 fall through to exact
        approx = math.log2(float(ratio)) + float(e) if ratio > 0 else -1e30
        if abs(approx) > 1e-9:
            return 1 if approx > 0 else -1
        p, s = (-e).numerator, (-e).denominator
        lhs = ratio.numerator**s
        rhs = ratio.denominator**s
        if p >= 0:
            rhs *= 1 << p
        else:
            lhs *= 1 << (-p)
        return (lhs > rhs) - (lhs < rhs)

    def le(self, other: "PowTwo") -> bool:
        return self.cmp(other) <= 0

    def lt(self, other: "PowTwo") -> bool:
        return self.cmp(other) < 0

    def __float__(self) -> float:
        return float(self.coeff) * 2.0 ** float(self.exp)

    def to_fraction(self) -> Fraction:
        if self.exp.denominator != 1:
            raise ValueError("fractional binary exponent")
        e = self.exp.numerator
        return self.coeff * (Fraction(1 << e) if e >= 0 else Fraction(1, 1 << -e))


ONE = PowTwo(Fraction(1), Fraction(0))


@dataclass
class CurveConstants:
    """Certified per-curve constants used by the schedule and smoothing."""

    rho: Fraction
    C_rho: Fraction
    L: Fraction
    Xi: int
    C_F: Fraction

    def to_json(self) -> Dict:
        return {
            "rho": str(self.rho),
            "C_rho": str(self.C_rho),
            "L": str(self.L),
            "Xi": self.Xi,
            "C_F": str(self.C_F),
        }


def curve_constants(curve: CurveSpec, rho=Fraction(1, 2),
                    intervals: Optional[List[Tuple[Fraction, Fraction]]] = None) -> CurveConstants:
    """C_rho = sup |(f_j o f_i^-1)'|, L = 10 C_rho, Xi = ceil(10 + log2 L),
    C_F = 2 (1 + sup reparametrised slope); all certified upper bounds."""
    rho = as_fraction(rho)
    if intervals is None:
        intervals = [curve.domain]
    best = Fraction(1)  # identity pairs give exactly 1
    derivs = [((Fraction(1),)), *[curve.derivative(i) for i in range(curve.n)]]
    from .polyx import poly

    derivs = [poly([1])] + [curve.derivative(i) for i in range(curve.n)]
    for jnum in derivs:
        for iden in derivs:
            if jnum is iden:
                continue
            best = max(best, ratio_sup_bound(jnum, iden, intervals, rho))
    c_rho = best
    L = 10 * c_rho
    xi = 10
    while Fraction(1 << (xi - 10)) < L:
        xi += 1
    c_f = 2 * (1 + c_rho)
    return CurveConstants(rho=rho, C_rho=c_rho, L=L, Xi=xi, C_F=c_f)


@dataclass
class ParameterSet:
    """The derived schedule for one (shape, t) cell with condition verdicts."""

    t: int
    shape: DyadicShape
    eta: Fraction
    nu: Fraction
    theta: Fraction
    C_F: Fraction
    Q: int = field(init=False)
    T: List[PowTwo] = field(init=False)
    J: List[PowTwo] = field(init=False)
    Delta: PowTwo = field(init=False)
    K: PowTwo = field(init=False)
    r: PowTwo = field(init=False)
    conditions: Dict[str, bool] = field(init=False)
    constraints_ok: bool = field(init=False)

    def __post_init__(self):
        t, z = self.t, self.shape.z
        eta, nu = self.eta, self.nu
        self.Q = 1 << t
        q_eta = PowTwo(Fraction(1), eta * t)
        self.T = [PowTwo(2 * self.C_F, eta * t + zi) for zi in z]
        self.J = [PowTwo(Fraction(1), eta * t + zi) for zi in z]
        z_max = self.shape.z_max
        self.Delta = PowTwo(Fraction(1), 10 * eta * t - t)
        self.K = PowTwo(Fraction(1), -4 * nu * t + z_max)
        self.r = PowTwo(Fraction(1), 4 * eta * t - t) / self.K
        self.conditions = self._conditions()
        n = self.shape.n
        self.constraints_ok = (
            eta <= nu / (100 * n)
            and 10 * eta + 8 * nu <= Fraction(1, 2)
            and self.theta < min(eta, nu)
        )

    @property
    def J_max(self) -> PowTwo:
        return self.J[self.shape.min_index]

    def _conditions(self) -> Dict[str, bool]:
        t = self.t
        eta, nu = self.eta, self.nu
        z_max = self.shape.z_max
        delta_min = PowTwo(Fraction(1), Fraction(-z_max))
        # Cond 1: Delta K (prod T_i / max T_i) < 1
        prod_over_max = ONE
        for idx, ti in enumerate(self.T):
            if idx != self.shape.min_index:
                prod_over_max = prod_over_max * ti
        cond1 = (self.Delta * self.K * prod_over_max).lt(ONE)
        # Cond 2: r <= (Q^-2eta / 2) min(K delta_min, Delta / K)
        k_dmin = self.K * delta_min
        delta_over_k = self.Delta / self.K
        smaller = k_dmin if k_dmin.le(delta_over_k) else delta_over_k
        cond2 = self.r.le(PowTwo(Fraction(1, 2), -2 * eta * t) * smaller)
        # Cond 3: r >= Q^(eta-1) delta_min
        cond3 = PowTwo(Fraction(1), (eta - 1) * t - z_max).le(self.r)
        # Cond 4: delta_min >= 2 Q^(-eta-1)
        cond4 = PowTwo(Fraction(2), (-eta - 1) * t).le(delta_min)
        # Cond 5: Delta >= Q^(eta-1)
        cond5 = PowTwo(Fraction(1), (eta - 1) * t).le(self.Delta)
        # Cond 6: Q^(eta-1)/K <= r <= Q^-eta K delta_min <= 1
        lhs6 = PowTwo(Fraction(1), (eta - 1) * t) / self.K
        mid6 = PowTwo(Fraction(1), -eta * t) * k_dmin
        cond6 = lhs6.le(self.r) and self.r.le(mid6) and mid6.le(ONE)
        return {
            "cond1": cond1, "cond2": cond2, "cond3": cond3,
            "cond4": cond4, "cond5": cond5, "cond6": cond6,
        }

    @property
    def all_conditions(self) -> bool:
        return all(self.conditions.values())

    def to_json(self) -> Dict:
        return {
            "t": self.t,
            "z": list(self.shape.z),
            "eta": str(self.eta),
            "nu": str(self.nu),
            "theta": str(self.theta),
            "C_F": str(self.C_F),
            "Delta": float(self.Delta),
            "K": float(self.K),
            "r": float(self.r),
            "T": [float(x) for x in self.T],
            "conditions": self.conditions,
            "constraints_ok": self.constraints_ok,
        }


def choose_parameters(shape: DyadicShape, t: int, eta, nu, theta=Fraction(1, 5),
                      C_F=Fraction(6)) -> ParameterSet:
    """Derive (T_i, J_i, Delta, K, r) and evaluate the six side conditions.

    Violated proof-side constraints on (eta, nu, theta) are recorded in
    constraints_ok rather than raised: verdicts, not exceptions.
    """
    return ParameterSet(t=t, shape=shape, eta=as_fraction(eta), nu=as_fraction(nu),
                        theta=as_fraction(theta), C_F=as_fraction(C_F))


# ---------------------------------------------------------------------------
# Exact counting
# ---------------------------------------------------------------------------


@dataclass
class ExactCountResult:
    count: int
    undecided: int
    witnesses: Optional[List[Tuple[Tuple[int, ...], int]]] = None

    def to_json(self) -> Dict:
        return {"count": self.count, "undecided": self.undecided}


def exact_count(curve: CurveSpec, domain: Sequence[Tuple[Fraction, Fraction]],
                widths: Sequence[Fraction], t: int,
                collect_witnesses: bool = False,
                use_kernel: Optional[bool] = None) -> ExactCountResult:
    """R: #{(a, q): 2^t <= q < 2^(t+1), some x in the domain has
    |f_i(x) - a_i/q| < widths_i / q for every i}.

    widths are the already-scaled box half-widths (pass 4*delta for the
    usual inflated boxes).  Monomial curves go through the integer kernel;
    general polynomial curves use the certified generic path.
    """
    exps = curve.monomial_exponents
    domain = [(as_fraction(a), as_fraction(b)) for a, b in domain]
    domain = [(a, b) for a, b in domain if b >= a]
    widths = [as_fraction(w) for w in widths]
    if exps is not None and exps[0] == 1 and all(a >= 0 for a, _ in domain):
        from . import kernels

        return kernels.count_cell(exps, domain, widths, t, collect_witnesses,
                                  prefer_compiled=use_kernel)
    return _exact_count_generic(curve, domain, widths, t, collect_witnesses)


def _exact_count_generic(curve, domain, widths, t, collect_witnesses):
    """Certified fallback for arbitrary polynomial curves (small scales).

    Feasibility of each candidate tuple is decided by isolating the roots
    of the product of all constraint polynomials and sampling the sign
    pattern on every gap -- exact, no rounding anywhere.
    """
    import itertools as _it

    from .polyx import poly_eval
    from .scalars import Interval

    n = curve.n
    count = 0
    witnesses = [] if collect_witnesses else None
    for glo, ghi in domain:
        ranges = _coordinate_ranges(curve, glo, ghi)
        for q in range(1 << t, 1 << (t + 1)):
            cand_ranges = []
            for i in range(n):
                lo_i, hi_i = ranges[i]
                a_lo = math.floor(q * lo_i - widths[i]) + 1
                a_hi = math.ceil(q * hi_i + widths[i]) - 1
                cand_ranges.append(range(a_lo, a_hi + 1))
            for combo in _it.product(*cand_ranges):
                if _tuple_feasible(curve, glo, ghi, widths, q, combo):
                    count += 1
                    if collect_witnesses:
                        witnesses.append((combo, q))
    return ExactCountResult(count=count, undecided=0, witnesses=witnesses)


def _coordinate_ranges(curve, lo, hi, parts: int = 8):
    from .polyx import poly_eval_interval
    from .scalars import Interval

    out = []
    step = (hi - lo) / parts
    for i in range(curve.n):
        lo_v = hi_v = None
        for k in range(parts):
            enc = poly_eval_interval(curve.components[i],
                                     Interval(lo + k * step, lo + (k + 1) * step))
            lo_v = enc.lo if lo_v is None else min(lo_v, enc.lo)
            hi_v = enc.hi if hi_v is None else max(hi_v, enc.hi)
        out.append((lo_v, hi_v))
    return out


def _tuple_feasible(curve, glo, ghi, widths, q, combo) -> bool:
    """Is {x in [glo, ghi]: |q f_i(x) - a_i| < w_i for all i} nonempty?"""
    from .polyx import isolate_roots, poly, poly_eval, poly_mul

    bounds = []
    product = poly([1])
    for i, ai in enumerate(combo):
        base = [c * q for c in curve.components[i]]
        lo_p = list(base)
        lo_p[0] = lo_p[0] - (ai - widths[i])
        hi_p = list(base)
        hi_p[0] = hi_p[0] - (ai + widths[i])
        bounds.append((poly(lo_p), poly(hi_p)))
        product = poly_mul(product, poly_mul(poly(lo_p), poly(hi_p)))

    samples = [glo, ghi]
    prev = glo
    for ra, rb in isolate_roots(product, glo, ghi):
        if ra > prev:
            samples.append((prev + ra) / 2)
        prev = rb
    if ghi > prev:
        samples.append((prev + ghi) / 2)
    for x in samples:
        ok = True
        for lo_p, hi_p in bounds:
            if not (poly_eval(lo_p, x) > 0 and poly_eval(hi_p, x) < 0):
                ok = False
                break
        if ok:
            return True
    return False


# ---------------------------------------------------------------------------
# Smooth counts
# ---------------------------------------------------------------------------


@dataclass
class SmoothCountResult:
    value: float
    error_bound: float
    terms: int

    @property
    def lower(self) -> float:
        return self.value - self.error_bound

    @property
    def upper(self) -> float:
        return self.value + self.error_bound

    def to_json(self) -> Dict:
        return {"value": self.value, "error_bound": self.error_bound, "terms": self.terms}


def smooth_count(curve: CurveSpec, j: int, mho: WeightSpec, shape: DyadicShape,
                 t: int, L: Fraction,
                 use_kernel: Optional[bool] = None) -> SmoothCountResult:
    """The smoothed count with thresholds 4 L delta_i:

    sum over (q, a) of (mho o f_j^-1)(a/q) omega(q/2^t)
        prod_{i != j} w(||q (f_i o f_j^-1)(a/q)|| / (4 L delta_i)).
    """
    exps = curve.monomial_exponents
    if exps is None:
        raise NotImplementedError("smooth counts require monomial curves")
    from . import kernels

    thresholds = [4 * as_fraction(L) * d for d in shape.delta]
    return kernels.smooth_cell(exps, j, t, thresholds, mho, omega_weight(),
                               w_weight(), prefer_compiled=use_kernel)


@dataclass
class MainErrorResult:
    N: SmoothCountResult
    M: float
    E: float
    M_sum: float
    what0: Fraction

    def to_json(self) -> Dict:
        return {
            "N": self.N.to_json(),
            "M": self.M,
            "E": self.E,
        }


def main_and_error(curve: CurveSpec, j: int, shape: DyadicShape, t: int,
                   omega_g: WeightSpec,
                   use_kernel: Optional[bool] = None) -> MainErrorResult:
    """Main term M = delta^x what(0)^(n-1) sum Omega_g(a/q) omega(q/Q) and
    the exact-by-construction error E = N - M.

    N here is the plain-threshold smoothed count (which the main term
    matches scale for scale); the 4L-threshold variant serves only the
    domination inequality.
    """
    exps = curve.monomial_exponents
    if exps is None:
        raise NotImplementedError("smooth counts require monomial curves")
    from . import kernels

    thresholds = list(shape.delta)
    n_res, m_sum = kernels.smooth_and_base_cell(
        exps, j, t, thresholds, omega_g, omega_weight(), w_weight(),
        prefer_compiled=use_kernel,
    )
    what0 = w_hat_zero()
    m_val = float(shape.delta_cross * what0 ** (curve.n - 1)) * m_sum
    return MainErrorResult(N=n_res, M=m_val, E=n_res.value - m_val,
                           M_sum=m_sum, what0=what0)


# ---------------------------------------------------------------------------
# Per-cell report
# ---------------------------------------------------------------------------


@dataclass
class CountReport:
    t: int
    z: Tuple[int, ...]
    curve: str
    R: int
    undecided: int
    N: float
    M: float
    E: float
    ratio_R: float          # R / (2^2t delta^x)
    ratio_E: float          # |E| / (delta^x 2^t)
    exceptional_measure: float
    exceptional_intervals: int
    decay_ratio: float      # measure / 2^(-t nu alpha)
    conditions: Dict[str, bool]
    constraints_ok: bool
    detection: str
    schedule: Dict

    def to_json(self) -> Dict:
        return {
            "schema": 1,
            "t": self.t,
            "z": list(self.z),
            "curve": self.curve,
            "R": self.R,
            "undecided": self.undecided,
            "N": self.N,
            "M": self.M,
            "E": self.E,
            "ratio_R": self.ratio_R,
            "ratio_E": self.ratio_E,
            "exceptional_measure": self.exceptional_measure,
            "exceptional_intervals": self.exceptional_intervals,
            "decay_ratio": self.decay_ratio,
            "conditions": self.conditions,
            "constraints_ok": self.constraints_ok,
            "detection": self.detection,
            "schedule": self.schedule,
        }

    def csv_row(self) -> List:
        conds = "".join("1" if self.conditions[f"cond{i}"] else "0" for i in range(1, 7))
        return [self.t, "|".join(map(str, self.z)), self.curve, self.R, self.N,
                self.M, self.E, f"{self.ratio_R:.6g}", f"{self.ratio_E:.6g}",
                f"{self.exceptional_measure:.6g}", f"{self.decay_ratio:.6g}",
                conds, self.undecided]

    CSV_HEADER = ["t", "z", "curve", "R", "N", "M", "E", "ratio_R", "ratio_E",
                  "exc_measure", "decay_ratio", "conds", "undecided"]
