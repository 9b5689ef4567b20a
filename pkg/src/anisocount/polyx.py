"""Exact univariate/multivariate polynomial helpers.

Polynomials are dense coefficient tuples (lowest degree first) over
Fraction.  Root isolation is Sturm-based with exact sign evaluation, so
every interval handed out is certified.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

from .scalars import Interval, as_fraction

Poly = Tuple[Fraction, ...]

__all__ = [
    "Poly",
    "poly",
    "poly_eval",
    "poly_eval_interval",
    "poly_derivative",
    "poly_degree",
    "poly_add",
    "poly_sub",
    "poly_scale",
    "poly_mul",
    "poly_pow",
    "poly_compose",
    "squarefree_part",
    "isolate_roots",
    "refine_root",
    "sublevel_set_1d",
    "union_measure",
    "certify_no_zero",
    "MultiPoly",
    "matrix_rank_exact",
    "det_exact",
]


def poly(coeffs: Iterable) -> Poly:
    c = [as_fraction(x) for x in coeffs]
    while len(c) > 1 and c[-1] == 0:
        c.pop()
    return tuple(c) if c else (Fraction(0),)


def poly_degree(c: Poly) -> int:
    return len(c) - 1


def poly_eval(c: Poly, x) -> Fraction:
    x = as_fraction(x)
    acc = Fraction(0)
    for coef in reversed(c):
        acc = acc * x + coef
    return acc


def poly_eval_interval(c: Poly, x: Interval) -> Interval:
    acc = Interval.exact(0, prec=x.prec)
    for coef in reversed(c):
        acc = acc * x + Interval.exact(coef, prec=x.prec)
    return acc


def poly_derivative(c: Poly, order: int = 1) -> Poly:
    for _ in range(order):
        if len(c) == 1:
            return (Fraction(0),)
        c = tuple(c[i] * i for i in range(1, len(c)))
    return c


def poly_add(a: Poly, b: Poly) -> Poly:
    n = max(len(a), len(b))
    return poly([(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)])


def poly_sub(a: Poly, b: Poly) -> Poly:
    return poly_add(a, poly_scale(b, -1))


def poly_scale(a: Poly, s) -> Poly:
    s = as_fraction(s)
    return poly([c * s for c in a])


def poly_mul(a: Poly, b: Poly) -> Poly:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca == 0:
            continue
        for j, cb in enumerate(b):
            out[i + j] += ca * cb
    return poly(out)


def poly_pow(a: Poly, k: int) -> Poly:
    result = poly([1])
    base = a
    while k:
        if k & 1:
            result = poly_mul(result, base)
        base = poly_mul(base, base)
        k >>= 1
    return result


def poly_compose(outer: Poly, inner: Poly) -> Poly:
    acc = poly([0])
    for coef in reversed(outer):
        acc = poly_add(poly_mul(acc, inner), poly([coef]))
    return acc


# ---------------------------------------------------------------------------
# Sturm sequences and root isolation
# ---------------------------------------------------------------------------


def _poly_rem(a: Poly, b: Poly) -> Poly:
    a = list(a)
    db, lb = poly_degree(b), b[-1]
    while len(a) - 1 >= db and any(x != 0 for x in a):
        da = len(a) - 1
        if a[-1] == 0:
            a.pop()
            continue
        factor = a[-1] / lb
        shift = da - db
        for i in range(len(b)):
            a[shift + i] -= factor * b[i]
        a.pop()
    return poly(a)


def _poly_gcd(a: Poly, b: Poly) -> Poly:
    a, b = poly(a), poly(b)
    while poly_degree(b) > 0 or b[0] != 0:
        a, b = b, _poly_rem(a, b)
        if len(b) == 1 and b[0] == 0:
            break
    if a[-1] != 0:
        a = poly_scale(a, 1 / a[-1])
    return a


def squarefree_part(c: Poly) -> Poly:
    if poly_degree(c) <= 1:
        return c
    g = _poly_gcd(c, poly_derivative(c))
    if poly_degree(g) == 0:
        return c
    # exact division c / g
    q, r = _poly_divmod(c, g)
    assert all(x == 0 for x in r), "squarefree division not exact"
    return q


def _poly_divmod(a: Poly, b: Poly) -> Tuple[Poly, Poly]:
    a = list(a)
    db, lb = poly_degree(b), b[-1]
    q = [Fraction(0)] * max(1, len(a) - db)
    while len(a) - 1 >= db and any(x != 0 for x in a):
        if a[-1] == 0:
            a.pop()
            continue
        da = len(a) - 1
        factor = a[-1] / lb
        q[da - db] = factor
        for i in range(len(b)):
            a[da - db + i] -= factor * b[i]
        a.pop()
    return poly(q), poly(a)


def _sturm_sequence(c: Poly) -> List[Poly]:
    seq = [c, poly_derivative(c)]
    while poly_degree(seq[-1]) > 0:
        rem = _poly_rem(seq[-2], seq[-1])
        if len(rem) == 1 and rem[0] == 0:
            break
        seq.append(poly_scale(rem, -1))
    return seq


def _sign_variations(seq: Sequence[Poly], x: Fraction) -> int:
    signs = []
    for p in seq:
        v = poly_eval(p, x)
        if v != 0:
            signs.append(1 if v > 0 else -1)
    return sum(1 for i in range(len(signs) - 1) if signs[i] != signs[i + 1])


def _count_roots(seq: Sequence[Poly], lo: Fraction, hi: Fraction) -> int:
    """Distinct roots in (lo, hi] for a square-free polynomial."""
    return _sign_variations(seq, lo) - _sign_variations(seq, hi)


def isolate_roots(c: Poly, lo, hi, width: Fraction = Fraction(1, 1 << 40)) -> List[Tuple[Fraction, Fraction]]:
    """Disjoint intervals isolating every distinct real root in [lo, hi].

    Each returned (a, b) satisfies b - a <= width and contains exactly one
    root of the square-free part; exact rational roots come back as
    degenerate intervals (r, r).
    """
    lo, hi = as_fraction(lo), as_fraction(hi)
    if hi < lo:
        return []
    c = squarefree_part(poly(c))
    if poly_degree(c) == 0:
        return []
    if poly_degree(c) == 1:
        r = -c[0] / c[1]
        return [(r, r)] if lo <= r <= hi else []
    if poly_degree(c) == 2:
        exact = _exact_quadratic_roots(c)
        if exact is not None:
            return [(r, r) for r in exact if lo <= r <= hi]
    seq = _sturm_sequence(c)
    out: List[Tuple[Fraction, Fraction]] = []
    if poly_eval(c, lo) == 0:
        out.append((lo, lo))
    if hi > lo and poly_eval(c, hi) == 0:
        out.append((hi, hi))

    def recurse(a: Fraction, b: Fraction):
        # isolates roots in (a, b); assumes c(a) != 0 and c(b) != 0
        k = _count_roots(seq, a, b)
        if k == 0:
            return
        if k == 1:
            out.append(refine_root(c, a, b, width))
            return
        mid = (a + b) / 2
        if poly_eval(c, mid) == 0:
            out.append((mid, mid))
            # back off both ways to root-free gaps around mid
            eps = (mid - a) / 2
            while _count_roots(seq, mid - eps, mid) > 1 or poly_eval(c, mid - eps) == 0:
                eps /= 2
            eps_r = (b - mid) / 2
            while _count_roots(seq, mid, mid + eps_r) > 0 or poly_eval(c, mid + eps_r) == 0:
                eps_r /= 2
            recurse(a, mid - eps)
            recurse(mid + eps_r, b)
            return
        recurse(a, mid)
        recurse(mid, b)

    if hi > lo:
        a, b = lo, hi
        if poly_eval(c, a) == 0:
            eps = (hi - lo) / 4
            while _count_roots(seq, a, a + eps) > 0 or poly_eval(c, a + eps) == 0:
                eps /= 2
            a = a + eps
        if poly_eval(c, b) == 0:
            eps = (hi - lo) / 4
            while _count_roots(seq, b - eps, b) > 1 or poly_eval(c, b - eps) == 0:
                eps /= 2
            b = b - eps
        if a < b:
            recurse(a, b)
    out.sort()
    dedup: List[Tuple[Fraction, Fraction]] = []
    for iv in out:
        if iv not in dedup:
            dedup.append(iv)
    return dedup


def _exact_quadratic_roots(c: Poly) -> Optional[List[Fraction]]:
    """Roots of a quadratic when the discriminant is a perfect square."""
    import gmpy2

    c0, c1, c2 = c[0], c[1], c[2]
    disc = c1 * c1 - 4 * c0 * c2
    if disc < 0:
        return []
    rn = gmpy2.isqrt(disc.numerator)
    rd = gmpy2.isqrt(disc.denominator)
    if rn * rn != disc.numerator or rd * rd != disc.denominator:
        return None
    s = Fraction(int(rn), int(rd))
    roots = sorted({(-c1 - s) / (2 * c2), (-c1 + s) / (2 * c2)})
    return roots


def refine_root(c: Poly, a: Fraction, b: Fraction, width: Fraction) -> Tuple[Fraction, Fraction]:
    """Shrink a sign-change bracket by exact bisection."""
    c = poly(c)
    fa = poly_eval(c, a)
    if fa == 0:
        return (a, a)
    fb = poly_eval(c, b)
    if fb == 0:
        return (b, b)
    assert (fa > 0) != (fb > 0), "refine_root needs a sign change"
    while b - a > width:
        mid = (a + b) / 2
        fm = poly_eval(c, mid)
        if fm == 0:
            return (mid, mid)
        if (fm > 0) == (fa > 0):
            a, fa = mid, fm
        else:
            b, fb = mid, fm
    return (a, b)


def sublevel_set_1d(c: Poly, z: Fraction, lo, hi,
                    width: Fraction = Fraction(1, 1 << 40)) -> Tuple[List[Tuple[Fraction, Fraction]], List[Tuple[Fraction, Fraction]]]:
    """(inner, outer) interval unions for {x in [lo, hi]: |p(x)| <= z}.

    inner is certified inside the set, outer certified to contain it; the
    gap is at most the isolation width per boundary crossing.
    """
    lo, hi, z = as_fraction(lo), as_fraction(hi), as_fraction(z)
    if z < 0:
        return [], []
    c = poly(c)
    brackets = []
    for shifted in (poly_sub(c, poly([z])), poly_add(c, poly([z]))):
        brackets.extend(isolate_roots(shifted, lo, hi, width))
    brackets.sort()
    # breakpoints partition [lo, hi]; on each open cell the predicate is constant
    pts = [lo]
    for a, b in brackets:
        pts.extend((a, b))
    pts.append(hi)
    pts = sorted(set(pts))
    inner: List[Tuple[Fraction, Fraction]] = []
    outer: List[Tuple[Fraction, Fraction]] = []
    for i in range(len(pts) - 1):
        a, b = pts[i], pts[i + 1]
        if a >= b:
            continue
        mid = (a + b) / 2
        if any(ba <= mid <= bb for ba, bb in brackets):
            outer.append((a, b))   # boundary cell: unknown side, outer only
            continue
        if abs(poly_eval(c, mid)) <= z:
            inner.append((a, b))
            outer.append((a, b))
    return _merge_union(inner), _merge_union(outer)


def _merge_union(ivs: List[Tuple[Fraction, Fraction]]) -> List[Tuple[Fraction, Fraction]]:
    if not ivs:
        return []
    ivs = sorted(ivs)
    out = [ivs[0]]
    for a, b in ivs[1:]:
        la, lb = out[-1]
        if a <= lb:
            out[-1] = (la, max(lb, b))
        else:
            out.append((a, b))
    return [iv for iv in out if iv[1] > iv[0]]


def union_measure(ivs: List[Tuple[Fraction, Fraction]]) -> Fraction:
    return sum((b - a for a, b in _merge_union(ivs)), Fraction(0))


def certify_no_zero(c: Poly, lo, hi, max_depth: int = 40,
                    prec: int = 128) -> Tuple[bool, Fraction]:
    """Adaptive interval cover certifying p != 0 on [lo, hi].

    Returns (certified, lower bound on min |p|).  Bisects wherever the
    interval enclosure straddles zero, up to max_depth.
    """
    lo, hi = as_fraction(lo), as_fraction(hi)
    c = poly(c)
    min_abs = None
    stack = [(lo, hi, 0)]
    while stack:
        a, b, depth = stack.pop()
        enc = poly_eval_interval(c, Interval(a, b, prec=prec))
        if enc.lo > 0 or enc.hi < 0:
            bound = min(abs(enc.lo), abs(enc.hi))
            min_abs = bound if min_abs is None else min(min_abs, bound)
            continue
        if depth >= max_depth:
            return False, Fraction(0)
        mid = (a + b) / 2
        stack.append((a, mid, depth + 1))
        stack.append((mid, b, depth + 1))
    return True, (min_abs if min_abs is not None else Fraction(0))


# ---------------------------------------------------------------------------
# Minimal multivariate support (for manifold maps and fibring)
# ---------------------------------------------------------------------------


class MultiPoly:
    """Sparse multivariate polynomial: {exponent tuple: Fraction}."""

    def __init__(self, d: int, terms: Dict[Tuple[int, ...], Fraction]):
        self.d = d
        self.terms = {e: as_fraction(v) for e, v in terms.items() if v != 0}
        if not self.terms:
            self.terms = {(0,) * d: Fraction(0)}

    @staticmethod
    def variable(d: int, j: int) -> "MultiPoly":
        e = [0] * d
        e[j] = 1
        return MultiPoly(d, {tuple(e): Fraction(1)})

    @staticmethod
    def constant(d: int, v) -> "MultiPoly":
        return MultiPoly(d, {(0,) * d: as_fraction(v)})

    def partial(self, j: int) -> "MultiPoly":
        out: Dict[Tuple[int, ...], Fraction] = {}
        for e, v in self.terms.items():
            if e[j] == 0:
                continue
            ne = list(e)
            ne[j] -= 1
            out[tuple(ne)] = out.get(tuple(ne), Fraction(0)) + v * e[j]
        return MultiPoly(self.d, out)

    def partial_multi(self, alpha: Sequence[int]) -> "MultiPoly":
        p = self
        for j, k in enumerate(alpha):
            for _ in range(k):
                p = p.partial(j)
        return p

    def eval(self, point: Sequence) -> Fraction:
        point = [as_fraction(x) for x in point]
        total = Fraction(0)
        for e, v in self.terms.items():
            term = v
            for xj, ej in zip(point, e):
                term *= xj**ej
            total += term
        return total

    def compose_univariate(self, substitutions: Sequence[Poly]) -> Poly:
        """Substitute x_j := substitutions[j](t); returns a poly in t."""
        acc = poly([0])
        for e, v in self.terms.items():
            term = poly([v])
            for sub, ej in zip(substitutions, e):
                if ej:
                    term = poly_mul(term, poly_pow(sub, ej))
            acc = poly_add(acc, term)
        return acc

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        out = dict(self.terms)
        for e, v in other.terms.items():
            out[e] = out.get(e, Fraction(0)) + v
        return MultiPoly(self.d, out)

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        out: Dict[Tuple[int, ...], Fraction] = {}
        for e1, v1 in self.terms.items():
            for e2, v2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                out[e] = out.get(e, Fraction(0)) + v1 * v2
        return MultiPoly(self.d, out)


def matrix_rank_exact(rows: List[List[Fraction]]) -> int:
    """Rank over Q by fraction-free-ish Gaussian elimination."""
    m = [list(map(as_fraction, r)) for r in rows]
    rank = 0
    cols = len(m[0]) if m else 0
    for col in range(cols):
        pivot = None
        for r in range(rank, len(m)):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            continue
        m[rank], m[pivot] = m[pivot], m[rank]
        pv = m[rank][col]
        for r in range(len(m)):
            if r != rank and m[r][col] != 0:
                factor = m[r][col] / pv
                m[r] = [a - factor * b for a, b in zip(m[r], m[rank])]
        rank += 1
        if rank == len(m):
            break
    return rank


def det_exact(rows: List[List[Fraction]]) -> Fraction:
    m = [list(map(as_fraction, r)) for r in rows]
    n = len(m)
    det = Fraction(1)
    for col in range(n):
        pivot = None
        for r in range(col, n):
            if m[r][col] != 0:
                pivot = r
                break
        if pivot is None:
            return Fraction(0)
        if pivot != col:
            m[col], m[pivot] = m[pivot], m[col]
            det = -det
        pv = m[col][col]
        det *= pv
        for r in range(col + 1, n):
            if m[r][col] != 0:
                factor = m[r][col] / pv
                m[r] = [a - factor * b for a, b in zip(m[r], m[col])]
    return det
