"""Polynomial curves and manifold maps: non-degeneracy, reparametrisation,
slicing into curves.

Components are restricted to exact polynomials (plus a named catalog), so
Wronskians, derivative floors, and inverse evaluations are all decidable.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple

import gmpy2

from .polyx import (
    MultiPoly,
    Poly,
    certify_no_zero,
    det_exact,
    isolate_roots,
    matrix_rank_exact,
    poly,
    poly_add,
    poly_compose,
    poly_derivative,
    poly_degree,
    poly_eval,
    poly_eval_interval,
    poly_mul,
    poly_pow,
    sublevel_set_1d,
    union_measure,
    _merge_union,
)
from .scalars import DEFAULT_PRECISION, Interval, as_fraction

__all__ = [
    "CurveSpec",
    "ManifoldMap",
    "ModelReduction",
    "MongeCurve",
    "FibreConfig",
    "FibredCurve",
    "wronskian_det",
    "nondegeneracy_order",
    "model_reduction",
    "reparametrize_monge",
    "encode_exponent",
    "check_encoding",
    "fibre_curve",
    "curve_from_config",
    "sup_abs_bound",
    "ratio_sup_bound",
]


@dataclass(frozen=True)
class CurveSpec:
    """A curve x -> (f_1(x), ..., f_n(x)) on a closed interval inside U."""

    components: Tuple[Poly, ...]
    domain: Tuple[Fraction, Fraction]
    margin: Fraction = Fraction(1, 16)
    name: str = "poly"

    def __post_init__(self):
        lo, hi = self.domain
        if lo >= hi:
            raise ValueError("domain must be a nondegenerate closed interval")

    @property
    def n(self) -> int:
        return len(self.components)

    @property
    def open_domain(self) -> Tuple[Fraction, Fraction]:
        lo, hi = self.domain
        return (lo - self.margin, hi + self.margin)

    def derivative(self, i: int, order: int = 1) -> Poly:
        return poly_derivative(self.components[i], order)

    def eval(self, x) -> Tuple[Fraction, ...]:
        return tuple(poly_eval(c, x) for c in self.components)

    def eval_interval(self, x: Interval) -> Tuple[Interval, ...]:
        return tuple(poly_eval_interval(c, x) for c in self.components)

    @property
    def monomial_exponents(self) -> Optional[Tuple[int, ...]]:
        """Exponents (e_1, ..., e_n) when every component is x**e_i."""
        exps = []
        for c in self.components:
            nz = [k for k, v in enumerate(c) if v != 0]
            if len(nz) != 1 or c[nz[0]] != 1 or nz[0] == 0:
                return None
            exps.append(nz[0])
        return tuple(exps)

    @staticmethod
    def veronese(n: int, domain=(Fraction(1, 2), Fraction(1))) -> "CurveSpec":
        comps = tuple(poly([0] * k + [1]) for k in range(1, n + 1))
        return CurveSpec(comps, (as_fraction(domain[0]), as_fraction(domain[1])),
                         name=f"veronese{n}")

    @staticmethod
    def monomial(exponents: Sequence[int], domain=(Fraction(1, 2), Fraction(1))) -> "CurveSpec":
        comps = tuple(poly([0] * e + [1]) for e in exponents)
        return CurveSpec(comps, (as_fraction(domain[0]), as_fraction(domain[1])),
                         name="monomial" + "_".join(map(str, exponents)))

    @staticmethod
    def from_polys(coeff_lists: Sequence[Sequence], domain) -> "CurveSpec":
        comps = tuple(poly(c) for c in coeff_lists)
        return CurveSpec(comps, (as_fraction(domain[0]), as_fraction(domain[1])))


@dataclass(frozen=True)
class ManifoldMap:
    """A polynomial map g: R^d -> R^n (domain: a box around a base point)."""

    d: int
    components: Tuple[MultiPoly, ...]
    base_point: Tuple[Fraction, ...] = None  # defaults to the origin

    def __post_init__(self):
        if self.base_point is None:
            object.__setattr__(self, "base_point", (Fraction(0),) * self.d)

    @property
    def n(self) -> int:
        return len(self.components)

    def partial_vector(self, alpha: Sequence[int], point=None) -> List[Fraction]:
        point = self.base_point if point is None else point
        return [g.partial_multi(alpha).eval(point) for g in self.components]


def wronskian_det(curve: CurveSpec, x) -> Tuple[List[List], object]:
    """The n x n matrix of derivatives f_i^(k), k = 1..n, and its determinant.

    Exact at rational x; interval-enclosed at interval x.
    """
    n = curve.n
    if isinstance(x, Interval):
        rows = [[poly_eval_interval(curve.derivative(i, k), x) for i in range(n)]
                for k in range(1, n + 1)]
        det = _det_interval(rows)
        return rows, det
    x = as_fraction(x)
    rows = [[poly_eval(curve.derivative(i, k), x) for i in range(n)]
            for k in range(1, n + 1)]
    return rows, det_exact(rows)


def _det_interval(rows: List[List[Interval]]):
    n = len(rows)
    if n == 1:
        return rows[0][0]
    total = None
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = rows[0][j] * _det_interval(minor)
        if j % 2 == 1:
            term = -term
        total = term if total is None else total + term
    return total


def nondegeneracy_order(obj, x=None, l_max: int = 8):
    """Least l <= l_max with span{derivatives of order 1..l} = R^n.

    Returns the integer l, or None when degenerate up to l_max.
    """
    if isinstance(obj, CurveSpec):
        x = as_fraction(curve_point(obj, x))
        vectors: List[List[Fraction]] = []
        for k in range(1, l_max + 1):
            vectors.append([poly_eval(obj.derivative(i, k), x) for i in range(obj.n)])
            if matrix_rank_exact(vectors) == obj.n:
                return k
        return None
    if isinstance(obj, ManifoldMap):
        point = obj.base_point if x is None else tuple(map(as_fraction, x))
        vectors = []
        for l in range(1, l_max + 1):
            for alpha in _multi_indices(obj.d, l):
                vectors.append(obj.partial_vector(alpha, point))
            if matrix_rank_exact(vectors) == obj.n:
                return l
        return None
    raise TypeError("expected CurveSpec or ManifoldMap")


def curve_point(curve: CurveSpec, x) -> Fraction:
    if x is None:
        lo, hi = curve.domain
        return (lo + hi) / 2
    return as_fraction(x)


def _multi_indices(d: int, total: int):
    """All alpha in Z_{>=0}^d with |alpha| = total (lexicographic)."""
    if d == 1:
        yield (total,)
        return
    for first in range(total, -1, -1):
        for rest in _multi_indices(d - 1, total - first):
            yield (first,) + rest


def _graded_lex_indices(d: int, l: int):
    for total in range(1, l + 1):
        yield from _multi_indices(d, total)


# ---------------------------------------------------------------------------
# Model reduction: derivative floors and the working sub-intervals
# ---------------------------------------------------------------------------


@dataclass
class ModelReduction:
    """Sub-intervals of the domain where every |f_i'| >= rho (certified)."""

    rho: Fraction
    intervals: List[Tuple[Fraction, Fraction]]
    complement_measure_lo: Fraction
    complement_measure_hi: Fraction

    @property
    def measure(self) -> Fraction:
        return union_measure(self.intervals)


def model_reduction(curve: CurveSpec, rho,
                    width: Fraction = Fraction(1, 1 << 45)) -> ModelReduction:
    """Closed intervals where all component derivatives clear the floor rho.

    The complement measure comes back as a two-sided enclosure; endpoints
    are exact rationals whenever the critical equations solve rationally.
    """
    rho = as_fraction(rho)
    lo, hi = curve.domain
    bad_inner: List[Tuple[Fraction, Fraction]] = []
    bad_outer: List[Tuple[Fraction, Fraction]] = []
    for i in range(curve.n):
        deriv = curve.derivative(i)
        if poly_degree(deriv) == 0 and deriv[0] == 0:
            raise ValueError(f"component {i} has identically zero derivative")
        inner, outer = sublevel_set_1d(deriv, rho, lo, hi, width)
        bad_inner.extend(inner)
        bad_outer.extend(outer)
    bad_inner = _merge_union(bad_inner)
    bad_outer = _merge_union(bad_outer)
    good: List[Tuple[Fraction, Fraction]] = []
    cursor = lo
    for a, b in bad_outer:
        if a > cursor:
            good.append((cursor, a))
        cursor = max(cursor, b)
    if cursor < hi:
        good.append((cursor, hi))
    return ModelReduction(
        rho=rho,
        intervals=good,
        complement_measure_lo=union_measure([(max(a, lo), min(b, hi)) for a, b in bad_inner]),
        complement_measure_hi=union_measure([(max(a, lo), min(b, hi)) for a, b in bad_outer]),
    )


def sup_abs_bound(p: Poly, lo: Fraction, hi: Fraction, parts: int = 64) -> Fraction:
    """Certified upper bound for sup |p| on [lo, hi] via interval pieces."""
    lo, hi = as_fraction(lo), as_fraction(hi)
    step = (hi - lo) / parts
    best = Fraction(0)
    for k in range(parts):
        enc = poly_eval_interval(p, Interval(lo + k * step, lo + (k + 1) * step))
        best = max(best, abs(enc.lo), abs(enc.hi))
    return best


def ratio_sup_bound(num: Poly, den: Poly, intervals: Sequence[Tuple[Fraction, Fraction]],
                    den_floor: Fraction, parts: int = 64) -> Fraction:
    """Upper bound for sup |num/den| over the given intervals.

    den must be certified to clear den_floor there (model_reduction output).
    """
    best = Fraction(0)
    for lo, hi in intervals:
        step = (hi - lo) / parts
        for k in range(parts):
            piece = Interval(lo + k * step, lo + (k + 1) * step)
            n_enc = poly_eval_interval(num, piece)
            d_enc = poly_eval_interval(den, piece)
            d_lo = max(min(abs(d_enc.lo), abs(d_enc.hi)), den_floor)
            if d_enc.lo <= 0 <= d_enc.hi:
                d_lo = den_floor
            best = max(best, max(abs(n_enc.lo), abs(n_enc.hi)) / d_lo)
    return best


# ---------------------------------------------------------------------------
# Monge reparametrisation
# ---------------------------------------------------------------------------


class MongeCurve:
    """The curve rewritten as a graph over coordinate j: y -> (.., y, .., F_i(y)).

    Evaluations go through a certified inverse of f_j (monotone on the
    working interval); for pure monomial components exact roots are used
    when they exist.
    """

    def __init__(self, curve: CurveSpec, j: int, interval: Tuple[Fraction, Fraction],
                 rho: Fraction):
        self.curve = curve
        self.j = j
        self.x_interval = (as_fraction(interval[0]), as_fraction(interval[1]))
        self.rho = as_fraction(rho)
        fj = curve.components[j]
        lo, hi = self.x_interval
        va, vb = poly_eval(fj, lo), poly_eval(fj, hi)
        self.increasing = vb > va
        self.y_interval = (min(va, vb), max(va, vb))

    def invert(self, y, width: Fraction = Fraction(1, 1 << 60)):
        """x with f_j(x) = y: exact Fraction when available, else an Interval."""
        y = as_fraction(y)
        fj = self.curve.components[self.j]
        exps = self.curve.monomial_exponents
        if exps is not None:
            e = exps[self.j]
            root = _exact_fraction_root(y, e)
            if root is not None:
                return root
        lo, hi = self.x_interval
        shifted = poly_add(fj, poly([-y]))
        flo = poly_eval(shifted, lo)
        if flo == 0:
            return lo
        fhi = poly_eval(shifted, hi)
        if fhi == 0:
            return hi
        a, b = lo, hi
        fa = flo
        while b - a > width:
            mid = (a + b) / 2
            fm = poly_eval(shifted, mid)
            if fm == 0:
                return mid
            if (fm > 0) == (fa > 0):
                a, fa = mid, fm
            else:
                b = mid
        return Interval(a, b)

    def eval(self, y, width: Fraction = Fraction(1, 1 << 60)) -> Tuple:
        x = self.invert(y, width)
        if isinstance(x, Interval):
            return self.curve.eval_interval(x)
        return self.curve.eval(x)

    def component_at(self, i: int, y, width: Fraction = Fraction(1, 1 << 60)):
        return self.eval(y, width)[i]

    def derivative_bound(self, order: int) -> Fraction:
        """Coarse bound C * rho^-order for the reparametrised derivatives."""
        c = Fraction(1)
        for i in range(self.curve.n):
            c = max(c, sup_abs_bound(self.curve.derivative(i), *self.x_interval))
        return c * (1 / self.rho) ** order


def _exact_fraction_root(y: Fraction, e: int) -> Optional[Fraction]:
    if y < 0 and e % 2 == 0:
        return None
    sign = -1 if y < 0 else 1
    y = abs(y)
    rn, okn = gmpy2.iroot(gmpy2.mpz(y.numerator), e)
    rd, okd = gmpy2.iroot(gmpy2.mpz(y.denominator), e)
    if okn and okd:
        return Fraction(sign * int(rn), int(rd))
    return None


def reparametrize_monge(curve: CurveSpec, j: int,
                        interval: Optional[Tuple[Fraction, Fraction]] = None,
                        rho=Fraction(1, 2)) -> MongeCurve:
    """Graph form over coordinate j; requires |f_j'| >= rho on the interval."""
    interval = interval or curve.domain
    deriv = curve.derivative(j)
    _, outer = sublevel_set_1d(deriv, as_fraction(rho) - Fraction(1, 1 << 50),
                               interval[0], interval[1])
    if outer:
        raise ValueError(f"|f_{j}'| not certified above rho on the interval")
    return MongeCurve(curve, j, interval, as_fraction(rho))


# ---------------------------------------------------------------------------
# Exponent encoding and the fibring of manifolds into curves
# ---------------------------------------------------------------------------


def encode_exponent(alpha: Sequence[int], p: int, d: int) -> int:
    """e_p(alpha) = sum_j alpha_j (p^(j-1) + p^d)."""
    if p < 2:
        raise ValueError("base p must be >= 2")
    if len(alpha) != d or any(a < 0 for a in alpha):
        raise ValueError("alpha must be a nonnegative multi-index of length d")
    return sum(a * (p ** (j - 1) + p**d) for j, a in enumerate(alpha, start=1))


def check_encoding(p: int, d: int, p0: int) -> bool:
    """Brute-force injectivity on S_p0 and image-disjointness outside it."""
    if not 0 < p0 < p:
        raise ValueError("need 0 < p0 < p")
    inside = [alpha for total in range(0, p0 + 1) for alpha in _multi_indices(d, total)]
    images = {}
    for alpha in inside:
        e = encode_exponent(alpha, p, d)
        if e in images and images[e] != alpha:
            return False
        images[e] = alpha
    # outside S_p0, images exceed p^d * (p0 + 1) > max inside image; verify
    # by enumerating all |alpha| up to a bound that covers every inside image
    max_inside = max(images)
    bound = max_inside // (p**d) + 2
    for total in range(p0 + 1, bound + 1):
        for alpha in _multi_indices(d, total):
            if encode_exponent(alpha, p, d) in images:
                return False
    return True


@dataclass(frozen=True)
class FibreConfig:
    """Slicing data: base map g, offset h, non-degeneracy order l."""

    base: ManifoldMap
    l: int
    eps: Fraction
    h: Tuple[Fraction, ...]

    def __post_init__(self):
        if not 1 <= self.l:
            raise ValueError("need l >= 1")
        if any(abs(hj) > self.eps for hj in self.h):
            raise ValueError("offset must satisfy |h|_inf <= eps")
        if len(self.h) != self.base.d:
            raise ValueError("offset dimension mismatch")

    @property
    def p(self) -> int:
        return self.l + 2


class FibredCurve:
    """phi_h(t): the one-dimensional slice through offset h."""

    def __init__(self, cfg: FibreConfig):
        self.cfg = cfg
        d, p = cfg.base.d, cfg.p
        self.exponents = [p ** (j - 1) + p**d for j in range(1, d + 1)]
        subs = []
        for j, e in enumerate(self.exponents):
            mono = [Fraction(0)] * (e + 1)
            mono[e] = Fraction(1)
            mono[0] = cfg.h[j]
            subs.append(poly(mono))
        self.components: Tuple[Poly, ...] = tuple(
            g.compose_univariate(subs) for g in cfg.base.components
        )

    def point(self, t) -> Tuple[Fraction, ...]:
        t = as_fraction(t)
        if abs(t) >= self.cfg.eps:
            raise ValueError("|t| must be below eps")
        return tuple(poly_eval(c, t) for c in self.components)

    def derivatives(self, t, orders: Sequence[int]) -> List[Tuple[Fraction, ...]]:
        t = as_fraction(t)
        if abs(t) >= self.cfg.eps:
            raise ValueError("|t| must be below eps")
        return [tuple(poly_eval(poly_derivative(c, k), t) for c in self.components)
                for k in orders]

    def witness_orders(self) -> List[int]:
        """Derivative orders e_p(beta_k) for greedily chosen multi-indices."""
        base = self.cfg.base
        betas: List[Tuple[int, ...]] = []
        vectors: List[List[Fraction]] = []
        for alpha in _graded_lex_indices(base.d, self.cfg.l):
            candidate = vectors + [base.partial_vector(alpha)]
            if matrix_rank_exact(candidate) > matrix_rank_exact(vectors):
                betas.append(alpha)
                vectors.append(base.partial_vector(alpha))
            if len(betas) == base.n:
                break
        if len(betas) < base.n:
            raise ValueError("base map not non-degenerate of the stated order")
        self.betas = betas
        return [encode_exponent(beta, self.cfg.p, base.d) for beta in betas]

    def determinant_poly(self) -> Poly:
        orders = self.witness_orders()
        cols = [[poly_derivative(c, k) for c in self.components] for k in orders]
        return _poly_det([[cols[j][i] for j in range(len(orders))]
                          for i in range(len(self.components))])

    def certify_determinant_nonvanishing(self, eps: Optional[Fraction] = None,
                                         max_depth: int = 48) -> Tuple[bool, Fraction]:
        eps = as_fraction(eps) if eps is not None else self.cfg.eps
        det = self.determinant_poly()
        return certify_no_zero(det, -eps, eps, max_depth=max_depth)


def _poly_det(rows: List[List[Poly]]) -> Poly:
    n = len(rows)
    if n == 1:
        return rows[0][0]
    acc = poly([0])
    for j in range(n):
        minor = [r[:j] + r[j + 1:] for r in rows[1:]]
        term = poly_mul(rows[0][j], _poly_det(minor))
        if j % 2 == 1:
            term = poly_mul(term, poly([-1]))
        acc = poly_add(acc, term)
    return acc


def fibre_curve(cfg: FibreConfig) -> FibredCurve:
    return FibredCurve(cfg)


# ---------------------------------------------------------------------------
# Catalog addressing for configs
# ---------------------------------------------------------------------------


def curve_from_config(spec: Dict) -> CurveSpec:
    kind = spec.get("kind", "veronese")
    domain = spec.get("domain", ["1/2", "1"])
    domain = (as_fraction(domain[0]), as_fraction(domain[1]))
    if kind == "veronese":
        return CurveSpec.veronese(int(spec["n"]), domain)
    if kind == "monomial":
        return CurveSpec.monomial([int(e) for e in spec["exponents"]], domain)
    if kind == "poly":
        return CurveSpec.from_polys(
            [[as_fraction(c) for c in comp] for comp in spec["components"]], domain
        )
    raise ValueError(f"unknown curve kind {kind!r}")
