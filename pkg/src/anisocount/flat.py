"""Affine subspaces in Monge form: dual Diophantine floor checks,
torus equidistribution counts, target-hitting estimates, and
very-well-multiplicatively-approximable witnesses.

Subspace entries are exact rationals or quadratic surds; every verdict
that decides a count or a pass/fail is computed with exact arithmetic.
"""

from __future__ import annotations

import itertools
import math
import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .scalars import (
    Surd,
    as_fraction,
    dist_to_nearest_int,
    height_product,
    nearest_int,
    scalar_cmp,
    sup_norm,
)
from .targets import AxisRectangle, TorusInterval

__all__ = [
    "parse_scalar",
    "MongeSubspace",
    "HypDConfig",
    "HypDVerdict",
    "hypothesis_d_check",
    "equi_point_set",
    "EquiPointSet",
    "rect_hit_count",
    "target_hit_measure",
    "TargetHitResult",
    "vwma_witness",
    "VwmaWitness",
]

_SURD_RE = re.compile(
    r"^\(?\s*(?P<a>[+-]?\d+)\s*(?P<sign>[+-])\s*(?P<b>\d*)\s*\*?\s*"
    r"sqrt\(\s*(?P<D>\d+)\s*\)\s*\)?\s*(?:/\s*(?P<c>[+-]?\d+))?$"
)
_PURE_SQRT_RE = re.compile(
    r"^(?P<b>[+-]?\d*)\s*\*?\s*sqrt\(\s*(?P<D>\d+)\s*\)\s*(?:/\s*(?P<c>[+-]?\d+))?$"
)


def parse_scalar(text: str) -> Union[Fraction, Surd]:
    """Parse "p/q", "(a+b*sqrt(D))/c", or "b*sqrt(D)" into an exact scalar."""
    text = text.strip()
    m = _SURD_RE.match(text)
    if m:
        a = int(m.group("a"))
        b = int(m.group("b") or "1")
        if m.group("sign") == "-":
            b = -b
        c = int(m.group("c") or "1")
        return Surd(a, b, c, int(m.group("D")))
    m = _PURE_SQRT_RE.match(text)
    if m:
        braw = m.group("b")
        b = int(braw) if braw not in ("", "+", "-") else (-1 if braw == "-" else 1)
        c = int(m.group("c") or "1")
        return Surd(0, b, c, int(m.group("D")))
    return Fraction(text)


def _frac_mod1(x):
    """x mod 1 as the same exact kind."""
    if isinstance(x, Surd):
        return x - Fraction(x.floor())
    x = as_fraction(x)
    return x - math.floor(x)


def _field_solve(matrix: List[List], rhs_cols: List[List]):
    """Solve M X = RHS over the shared exact field; None when singular."""
    n = len(matrix)
    aug = [list(matrix[i]) + list(rhs_cols[i]) for i in range(n)]
    width = len(aug[0])
    row = 0
    for col in range(n):
        pivot = None
        for r in range(row, n):
            entry = aug[r][col]
            if not _is_zero(entry):
                pivot = r
                break
        if pivot is None:
            return None
        aug[row], aug[pivot] = aug[pivot], aug[row]
        pv = aug[row][col]
        aug[row] = [e / pv for e in aug[row]]
        for r in range(n):
            if r != row:
                factor = aug[r][col]
                if not _is_zero(factor):
                    aug[r] = [a - factor * bb for a, bb in zip(aug[r], aug[row])]
        row += 1
    return [r[n:] for r in aug]


def _is_zero(x) -> bool:
    if isinstance(x, Surd):
        return x.sign() == 0
    return as_fraction(x) == 0


class MongeSubspace:
    """d-dimensional affine subspace of R^n: {(t, A t + b)}.

    A has shape (n-d) x d; columns a^(j) and the shift b are the dual data
    for the floor condition.  Every d-subset of coordinates that projects
    surjectively yields another Monge form; singular subsets are recorded
    and skipped.
    """

    def __init__(self, n: int, d: int, A: Sequence[Sequence], b: Sequence):
        if not 1 <= d < n:
            raise ValueError("need 1 <= d < n")
        self.n = n
        self.d = d
        self.A = [[_coerce_entry(x) for x in row] for row in A]
        self.b = [_coerce_entry(x) for x in b]
        if len(self.A) != n - d or any(len(r) != d for r in self.A):
            raise ValueError("A must be (n-d) x d")
        if len(self.b) != n - d:
            raise ValueError("b must have length n-d")

    @staticmethod
    def from_strings(n: int, d: int, A: Sequence[Sequence[str]], b: Sequence[str]) -> "MongeSubspace":
        return MongeSubspace(n, d, [[parse_scalar(s) for s in row] for row in A],
                             [parse_scalar(s) for s in b])

    def column(self, j: int) -> List:
        return [self.A[i][j] for i in range(self.n - self.d)]

    def dual_vectors(self) -> List[List]:
        """a^(1), ..., a^(d), and b as the (d+1)-th vector."""
        return [self.column(j) for j in range(self.d)] + [list(self.b)]

    def point(self, t: Sequence) -> List:
        t = [_coerce_entry(x) for x in t]
        out = list(t)
        for i in range(self.n - self.d):
            acc = self.b[i]
            for j in range(self.d):
                acc = acc + self.A[i][j] * t[j]
            out.append(acc)
        return out

    def orderings(self) -> List[Tuple[Tuple[int, ...], "MongeSubspace"]]:
        """Monge forms over every surjective d-subset of coordinates."""
        out = []
        self.skipped_orderings: List[Tuple[int, ...]] = []
        for subset in itertools.combinations(range(self.n), self.d):
            form = self._reparametrise(subset)
            if form is None:
                self.skipped_orderings.append(subset)
            else:
                out.append((subset, form))
        return out

    def _reparametrise(self, subset: Tuple[int, ...]) -> Optional["MongeSubspace"]:
        n, d = self.n, self.d
        if subset == tuple(range(d)):
            return self
        # rows of [I_d; A] and [0; b] in the global coordinate order
        def row_of(i: int) -> Tuple[List, object]:
            if i < d:
                r = [Fraction(0)] * d
                r[i] = Fraction(1)
                return r, Fraction(0)
            return list(self.A[i - d]), self.b[i - d]

        comp = [i for i in range(n) if i not in subset]
        m_s = []
        c_s = []
        for i in subset:
            r, c = row_of(i)
            m_s.append(r)
            c_s.append(c)
        inv = _field_solve(m_s, [[Fraction(1) if k == i else Fraction(0) for k in range(d)]
                                 for i in range(d)])
        if inv is None:
            return None
        new_a = []
        new_b = []
        for i in comp:
            r, c = row_of(i)
            # row_i = r . M_S^{-1}; b'_i = c - row_i . c_S
            arow = []
            for col in range(d):
                acc = None
                for k in range(d):
                    term = r[k] * inv[k][col]
                    acc = term if acc is None else acc + term
                arow.append(acc)
            shift = c
            for k in range(d):
                shift = shift - arow[k] * c_s[k]
            new_a.append(arow)
            new_b.append(shift)
        return MongeSubspace(n, d, new_a, new_b)

    def zero_columns(self) -> List[int]:
        return [j for j in range(self.d)
                if all(_is_zero(self.A[i][j]) for i in range(self.n - self.d))]

    def drop_parameters(self, cols: Sequence[int]) -> "MongeSubspace":
        """Remove parameter directions (used for vanishing-column reduction)."""
        keep = [j for j in range(self.d) if j not in cols]
        if not keep:
            raise ValueError("cannot drop every parameter")
        new_a = [[self.A[i][j] for j in keep] for i in range(self.n - self.d)]
        return MongeSubspace(self.n - len(cols), len(keep), new_a, self.b)


def _coerce_entry(x):
    if isinstance(x, Surd):
        return x
    if isinstance(x, str):
        return parse_scalar(x)
    return as_fraction(x)


# ---------------------------------------------------------------------------
# The dual floor condition
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class HypDConfig:
    c: Fraction
    sigma1: Fraction
    sigma2: Fraction
    T_max: int
    gamma: Optional[Fraction] = None

    def __post_init__(self):
        if self.c <= 0 or self.T_max < 1:
            raise ValueError("need c > 0 and T_max >= 1")

    @staticmethod
    def driven(gamma, sigma2, c, T_max) -> "HypDConfig":
        """sigma1 = gamma (1 + d sigma2) is filled in per subspace dimension."""
        return HypDConfig(as_fraction(c), Fraction(-1), as_fraction(sigma2),
                          T_max, gamma=as_fraction(gamma))

    def sigma1_for(self, d: int) -> Fraction:
        if self.sigma1 > 0:
            return self.sigma1
        return self.gamma * (1 + d * self.sigma2)


@dataclass
class HypDVerdict:
    passed: bool
    checked: int
    T_max: int
    witness_xi: Optional[Tuple[int, ...]] = None
    witness_ordering: Optional[Tuple[int, ...]] = None
    witness_T: Optional[Fraction] = None
    witness_dist: Optional[object] = None
    reduced_dimensions: Optional[Tuple[int, int]] = None
    skipped_orderings: int = 0

    def to_json(self) -> Dict:
        return {
            "passed": self.passed,
            "checked": self.checked,
            "T_max": self.T_max,
            "witness_xi": list(self.witness_xi) if self.witness_xi else None,
            "witness_ordering": list(self.witness_ordering) if self.witness_ordering else None,
            "skipped_orderings": self.skipped_orderings,
        }


def _xi_candidates(k: int, T_max: int, sigma2: Fraction):
    """Nonzero xi in Z^k with H(xi) <= T_max and |xi| <= T_max^sigma2.

    Canonical signs: the first nonzero entry is positive (the floor
    condition is symmetric under xi -> -xi).
    """
    # |xi| <= T_max^sigma2: exact integer bound B = floor(T_max^sigma2)
    B = _floor_int_power(T_max, sigma2)
    if k == 1:
        for v in range(1, min(B, T_max) + 1):
            yield (v,)
        return

    def rec(prefix: Tuple[int, ...], h: int, first_nonzero_seen: bool):
        idx = len(prefix)
        if idx == k:
            if any(prefix):
                yield prefix
            return
        for v in range(-B, B + 1):
            if not first_nonzero_seen and v < 0:
                continue
            nh = h * max(1, abs(v))
            if nh > T_max:
                continue
            yield from rec(prefix + (v,), nh, first_nonzero_seen or v != 0)

    yield from rec((), 1, False)


def _floor_int_power(base: int, expo: Fraction) -> int:
    """floor(base**expo) exactly for rational expo >= 0."""
    p, r = expo.numerator, expo.denominator
    if p < 0:
        raise ValueError("nonnegative exponent expected")
    import gmpy2

    root, _ = gmpy2.iroot(gmpy2.mpz(base) ** p, r)
    return int(root)


def _dist_ge_c_T_pow(dist, c: Fraction, T_pow_base, sigma1: Fraction) -> bool:
    """Exact check dist >= c * T^(-sigma1).

    T_pow_base is (kind, value): ("int", T) for integer T, or
    ("root", (m, r)) meaning T = m^(1/r) for integers m, r.
    """
    p1, r1 = sigma1.numerator, sigma1.denominator
    if _is_zero(dist):
        return False  # c T^-s is strictly positive
    kind, val = T_pow_base
    if kind == "int":
        # dist^r1 * T^p1 >= c^r1
        lhs = _pow_scalar(dist, r1) * Fraction(val**p1)
        return _scalar_ge(lhs, c**r1)
    m, r = val  # T = m^(1/r): T^sigma1 = m^(p1/(r1 r))
    # dist^(r1 r) * m^p1 >= c^(r1 r)
    lhs = _pow_scalar(dist, r1 * r) * Fraction(m**p1)
    return _scalar_ge(lhs, c ** (r1 * r))


def _pow_scalar(x, k: int):
    if isinstance(x, Surd):
        return x**k
    return as_fraction(x) ** k


def _scalar_ge(x, y) -> bool:
    return scalar_cmp(x, y) >= 0


def hypothesis_d_check(subspace: MongeSubspace, cfg: HypDConfig) -> HypDVerdict:
    """Sweep every admissible frequency vector against the dual floor.

    For each xi the floor c T^-sigma1 is evaluated at the minimal
    admissible T(xi) = max(H(xi), |xi|^(1/sigma2)); since the floor
    decreases in T this single evaluation decides all T >= T(xi).
    """
    zero_cols = subspace.zero_columns()
    reduced = None
    if zero_cols:
        reduced = (subspace.n, subspace.n - len(zero_cols))
        subspace = subspace.drop_parameters(zero_cols)
    k = subspace.n - subspace.d
    sigma1 = cfg.sigma1_for(subspace.d)
    orderings = subspace.orderings()
    checked = 0
    for xi in _xi_candidates(k, cfg.T_max, cfg.sigma2):
        h = height_product(xi)
        s = sup_norm(xi)
        # T(xi) = max(H, |xi|^(1/sigma2)): compare H^sigma2 vs |xi| exactly
        p2, r2 = cfg.sigma2.numerator, cfg.sigma2.denominator
        if h ** p2 >= s ** r2:
            t_base = ("int", h)
            t_value = Fraction(h)
        else:
            t_base = ("root", (s ** r2, p2))
            t_value = None  # irrational T; reported as (s, 1/sigma2)
        for subset, form in orderings:
            checked += 1
            best = None
            for vec in form.dual_vectors():
                acc = None
                for xi_i, entry in zip(xi, vec):
                    term = entry * xi_i
                    acc = term if acc is None else acc + term
                dist = dist_to_nearest_int(acc)
                if best is None or not _scalar_ge(best, dist):
                    best = dist
            if not _dist_ge_c_T_pow(best, cfg.c, t_base, sigma1):
                return HypDVerdict(
                    passed=False, checked=checked, T_max=cfg.T_max,
                    witness_xi=xi, witness_ordering=subset,
                    witness_T=t_value, witness_dist=best,
                    reduced_dimensions=reduced,
                    skipped_orderings=len(getattr(subspace, "skipped_orderings", [])),
                )
    return HypDVerdict(passed=True, checked=checked, T_max=cfg.T_max,
                       reduced_dimensions=reduced,
                       skipped_orderings=len(getattr(subspace, "skipped_orderings", [])))


# ---------------------------------------------------------------------------
# Equidistribution point sets and rectangle hits
# ---------------------------------------------------------------------------


class EquiPointSet:
    """The multiset {q_1 a^(1) + ... + q_d a^(d) + q_(d+1) b mod Z^(n-d)}.

    Stored structurally (generators + Q); points materialise on demand.
    Hit counting uses a float prefilter with exact recheck near interval
    endpoints, so counts are exact and deterministic.
    """

    MEMBER_CAP = 1 << 22

    def __init__(self, subspace: MongeSubspace, Q: int, cap: int = MEMBER_CAP):
        if Q < 1:
            raise ValueError("Q must be >= 1")
        self.subspace = subspace
        self.Q = Q
        self.generators = subspace.dual_vectors()  # d+1 vectors in R^(n-d)
        self.k = subspace.n - subspace.d
        if Q ** len(self.generators) > cap:
            raise MemoryError(
                f"point multiset of size Q^{len(self.generators)} exceeds the cap {cap}"
            )

    def __len__(self) -> int:
        return self.Q ** len(self.generators)

    def points(self):
        for qs in itertools.product(range(self.Q), repeat=len(self.generators)):
            point = []
            for i in range(self.k):
                acc = None
                for q, gen in zip(qs, self.generators):
                    term = gen[i] * q
                    acc = term if acc is None else acc + term
                point.append(_frac_mod1(acc))
            yield tuple(point)


def equi_point_set(subspace: MongeSubspace, Q: int, cap: int = EquiPointSet.MEMBER_CAP) -> EquiPointSet:
    return EquiPointSet(subspace, Q, cap)


def rect_hit_count(points, rect: AxisRectangle) -> int:
    """Exact #(multiset points inside the half-open torus rectangle)."""
    if isinstance(points, EquiPointSet):
        return _hit_count_structured(points, rect)
    count = 0
    for p in points:
        if rect.contains(p, closed=False):
            count += 1
    return count


def _scalar_float(x) -> float:
    if isinstance(x, Surd):
        return (x.a + x.b * math.sqrt(x.D)) / x.c
    return float(as_fraction(x))


def _hit_count_structured(pset: EquiPointSet, rect: AxisRectangle) -> int:
    Q = pset.Q
    gens = pset.generators
    k = pset.k
    margin = 2.0**-26
    total = 0
    frac = getattr(pset, "_frac_cache", None)
    if frac is None:
        gen_floats = np.array([[_scalar_float(g[i]) for i in range(k)] for g in gens])
        grid = np.zeros((1, k))
        for gi in range(len(gens)):
            qs = np.arange(Q).reshape(-1, 1, 1)
            grid = (grid.reshape(1, -1, k) + qs * gen_floats[gi].reshape(1, 1, k)).reshape(-1, k)
            if grid.shape[0] > (1 << 24):
                raise MemoryError("hit-count grid too large")
        frac = np.mod(grid, 1.0)
        pset._frac_cache = frac
    inside = np.ones(frac.shape[0], dtype=bool)
    suspicious = np.zeros(frac.shape[0], dtype=bool)
    for i, iv in enumerate(rect.intervals):
        start, length = float(iv.start), float(iv.length)
        off = np.mod(frac[:, i] - start, 1.0)
        inside &= off < length
        suspicious |= (np.abs(off) < margin) | (np.abs(off - length) < margin) | (
            np.abs(off - 1.0) < margin)
    total = int(np.count_nonzero(inside & ~suspicious))
    # exact recheck for points that sit near an interval boundary
    if np.any(suspicious):
        idx = np.nonzero(suspicious)[0]
        radix = [Q] * len(gens)
        for flat in idx:
            qs = []
            rem = int(flat)
            for _ in range(len(gens)):
                qs.append(rem % Q)
                rem //= Q
            point = []
            for i in range(k):
                acc = None
                for q, gen in zip(qs, gens):
                    term = gen[i] * q
                    acc = term if acc is None else acc + term
                point.append(_frac_mod1(acc))
            if rect.contains(tuple(point), closed=False):
                total += 1
    return total


# ---------------------------------------------------------------------------
# Target-hitting estimate
# ---------------------------------------------------------------------------


@dataclass
class TargetHitResult:
    region_count: int
    measure_bound: Fraction
    monte_carlo: float
    samples: int

    def to_json(self) -> Dict:
        return {
            "region_count": self.region_count,
            "measure_bound": str(self.measure_bound),
            "measure_bound_float": float(self.measure_bound),
            "monte_carlo": self.monte_carlo,
            "samples": self.samples,
        }


def target_hit_measure(subspace: MongeSubspace, rect: AxisRectangle, Q: int,
                       ball_radius: int = 2, mc_samples: int = 100_000,
                       seed: int = 1) -> TargetHitResult:
    """Count starting regions hitting the rectangle and bound the measure.

    The projection pi(x, y) = y - A x maps the rectangle into T^(n-d); a
    region starting at (m, p) can only hit when p falls in that projected
    set.  The returned bound is Q^-d r_1...r_d N; a deterministic
    low-discrepancy sample of the parameter ball provides an independent
    reference value for the hit-set measure.
    """
    n, d = subspace.n, subspace.d
    k = n - d
    if rect.n != n:
        raise ValueError("rectangle dimension must match the ambient space")
    T = ball_radius
    # projected rectangle: per coordinate i of the last k, interval of
    # length r_(d+i) + sum_j |A_ij| r_j, starting at start_(d+i) - max(A x)
    proj: List[TorusInterval] = []
    slack = Fraction(1, 1 << 80)
    for i in range(k):
        length = as_fraction(rect.intervals[d + i].length)
        start = rect.intervals[d + i].start  # may become a surd below
        for j in range(d):
            aij = subspace.A[i][j]
            rj_start = rect.intervals[j].start
            u = aij * rj_start
            v = aij * (rj_start + rect.intervals[j].length)
            lo_bound, hi_bound = (u, v) if _scalar_ge(v, u) else (v, u)
            start = start - hi_bound
            width = hi_bound - lo_bound
            length = length + (as_fraction(width) if not isinstance(width, Surd)
                               else width.enclosure(96).hi)
        # outward rounding keeps the containment pi(R) mod 1 within proj
        length = length + 2 * slack
        if length >= 1:
            proj.append(TorusInterval(Fraction(0), Fraction(1)))
        else:
            proj.append(TorusInterval(_as_rational_approx(start) - slack, length))
    if Q < 1:
        return TargetHitResult(0, Fraction(0), 0.0, 0)

    count = 0
    bound_range = 2 * T * Q
    for q in range(Q, 2 * Q + 1):
        for ms in itertools.product(range(-bound_range, bound_range + 1), repeat=d):
            point = []
            for i in range(k):
                acc = subspace.b[i] * q
                for j in range(d):
                    acc = acc + subspace.A[i][j] * ms[j]
                point.append(_frac_mod1(acc))
            if all(iv.contains(x, closed=False) for iv, x in zip(proj, point)):
                count += 1
    r_param = Fraction(1)
    for j in range(d):
        r_param *= rect.intervals[j].length
    bound = Fraction(1, Q**d) * r_param * count

    # low-discrepancy reference for the hit-set measure on the ball [-T, T]^d
    alphas = _kronecker_alphas(d, seed)
    ks = np.arange(1, mc_samples + 1).reshape(-1, 1)
    u = np.mod(ks * alphas.reshape(1, -1), 1.0)
    t_samples = (2 * u - 1.0) * T
    a_float = np.array([[_scalar_float(subspace.A[i][j]) for j in range(d)] for i in range(k)])
    b_float = np.array([_scalar_float(x) for x in subspace.b])
    hit = np.zeros(mc_samples, dtype=bool)
    starts = np.array([float(iv.start) for iv in rect.intervals])
    lengths = np.array([float(iv.length) for iv in rect.intervals])
    for q in range(Q, 2 * Q + 1):
        coords = np.concatenate([q * t_samples, q * (t_samples @ a_float.T + b_float)], axis=1)
        off = np.mod(coords - starts, 1.0)
        hit |= np.all(off < lengths, axis=1)
    volume = float((2 * T) ** d)
    mc = float(np.count_nonzero(hit)) / mc_samples * volume
    return TargetHitResult(count, bound, mc, mc_samples)


def _as_rational_approx(x) -> Fraction:
    if isinstance(x, Surd):
        enc = x.enclosure(96)
        return enc.lo
    return as_fraction(x)


def _kronecker_alphas(d: int, seed: int) -> np.ndarray:
    primes = [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]
    alphas = np.sqrt(np.array(primes[:d], dtype=float))
    offset = (seed * 0.6180339887498949) % 1.0
    return np.mod(alphas + offset, 1.0)


# ---------------------------------------------------------------------------
# VWMA witness construction
# ---------------------------------------------------------------------------


@dataclass
class VwmaWitness:
    m: Tuple[int, ...]
    dist: object
    height: int
    tau: Fraction
    T0: Fraction
    hypothesis_ok: bool

    def to_json(self) -> Dict:
        return {
            "m": list(self.m),
            "dist_float": _scalar_float(self.dist) if not isinstance(self.dist, Fraction) else float(self.dist),
            "height": self.height,
            "tau": str(self.tau),
            "hypothesis_ok": self.hypothesis_ok,
        }


def vwma_witness(subspace: MongeSubspace, t_point: Sequence, xi: Sequence[int],
                 T: int, sigma2: Fraction, gamma: Fraction,
                 eps: Fraction = Fraction(1, 100)) -> VwmaWitness:
    """Build the integer vector m certifying a very good approximation.

    p_j is the nearest integer to -(xi . a^(j)); m = (p_1..p_d, xi).  The
    achieved ||m . x|| and the exponent tau = (1+gamma)/2 against
    T0 = T^(1+d sigma2) come back exactly.
    """
    d = subspace.d
    sigma2, gamma, eps = as_fraction(sigma2), as_fraction(gamma), as_fraction(eps)
    vecs = subspace.dual_vectors()
    dots = []
    for vec in vecs:
        acc = None
        for xi_i, entry in zip(xi, vec):
            term = entry * xi_i
            acc = term if acc is None else acc + term
        dots.append(acc)
    # hypothesis: max_j || xi . a^(j) || <= T^(-gamma (1 + d sigma2))
    expo = gamma * (1 + d * sigma2)
    hyp_ok = True
    for acc in dots:
        dist = dist_to_nearest_int(acc)
        # dist <= T^-expo  <=>  dist^r * T^p <= 1
        p, r = expo.numerator, expo.denominator
        lhs = _pow_scalar(dist, r) * Fraction(T**p)
        if not _scalar_ge(Fraction(1), lhs):
            hyp_ok = False
    p_ints = [-nearest_int(acc) for acc in dots]
    m = tuple(p_ints[:d]) + tuple(xi)
    x = subspace.point(t_point)
    acc = None
    for mi, xv in zip(m, x):
        term = xv * mi
        acc = term if acc is None else acc + term
    dist = dist_to_nearest_int(acc)
    tau = (1 + gamma) / 2
    # T0 = T^(1 + d sigma2); rational-power lower enclosure when fractional
    e = 1 + d * sigma2
    if e.denominator == 1:
        T0 = Fraction(T) ** e.numerator
    else:
        from .approx import rational_power_interval

        T0 = rational_power_interval(Fraction(T), e, 96).lo
    return VwmaWitness(m=m, dist=dist, height=height_product(m), tau=tau,
                       T0=T0, hypothesis_ok=hyp_ok)
