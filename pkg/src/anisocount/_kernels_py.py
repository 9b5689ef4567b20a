"""Pure-Python counting kernels (reference implementation).

These mirror the compiled kernels in `_kernels.pyx` operation for
operation: the exact count is integer arithmetic throughout, and the
smooth sums accumulate in the same order with the same double-precision
operations, so the two lanes agree exactly on counts and to the last bit
(modulo libm) on sums.
"""

from __future__ import annotations

import math
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

BACKEND = "python"


def count_cell(exps: Sequence[int], domain: Sequence[Tuple[Fraction, Fraction]],
               widths: Sequence[Fraction], t: int,
               collect_witnesses: bool = False):
    """Exact count of (a, q) boxes touching the monomial curve.

    exps[0] must be 1 (the curve starts with the identity coordinate), so
    every window endpoint in x is rational and all accept/reject tests are
    integer comparisons.
    """
    if exps[0] != 1:
        raise ValueError("count kernel requires the identity first coordinate")
    count = 0
    witnesses = [] if collect_witnesses else None
    w0 = widths[0]
    for q in range(1 << t, 1 << (t + 1)):
        for glo, ghi in domain:
            a_lo = _floor_frac(q * glo - w0) + 1
            a_hi = _ceil_frac(q * ghi + w0) - 1
            for a0 in range(a_lo, a_hi + 1):
                combos = pair_combos(exps, widths, q, a0, glo, ghi)
                count += len(combos)
                if collect_witnesses:
                    witnesses.extend(((a0,) + c, q) for c in combos)
    from .counting import ExactCountResult

    return ExactCountResult(count=count, undecided=0, witnesses=witnesses)


def pair_combos(exps, widths, q: int, a0: int, glo: Fraction, ghi: Fraction):
    """All exact completions (a_1..a_(n-1)) of the pair (a_0=a0, q)."""
    n = len(exps)
    w0 = widths[0]
    lo_x = max(glo, (a0 - w0) / q)
    hi_x = min(ghi, (a0 + w0) / q)
    if not lo_x < hi_x:
        return []
    if n == 1:
        return [()]
    cands = []
    for i in range(1, n):
        e = exps[i]
        m_lo = q * lo_x**e
        m_hi = q * hi_x**e
        ai_lo = _floor_frac(m_lo - widths[i]) + 1
        ai_hi = _ceil_frac(m_hi + widths[i]) - 1
        if ai_hi < ai_lo:
            return []
        cands.append(range(ai_lo, ai_hi + 1))
    out = []
    if all(len(c) == 1 for c in cands):
        combo = tuple(c[0] for c in cands)
        if n == 2 or _combo_feasible(exps, widths, q, lo_x, hi_x, combo):
            out.append(combo)
        return out
    import itertools as _it

    for combo in _it.product(*cands):
        if n == 2 or _combo_feasible(exps, widths, q, lo_x, hi_x, combo):
            out.append(combo)
    return out

def pair_count(exps, widths, q: int, a0: int, glo: Fraction, ghi: Fraction) -> int:
    return len(pair_combos(exps, widths, q, a0, glo, ghi))


def _floor_frac(x: Fraction) -> int:
    return x.numerator // x.denominator


def _ceil_frac(x: Fraction) -> int:
    return -((-x.numerator) // x.denominator)


def _combo_feasible(exps, widths, q, lo_x: Fraction, hi_x: Fraction,
                    combo: Sequence[int]) -> bool:
    """Does some x in (lo_x, hi_x) satisfy every coordinate window strictly?

    Lower/upper endpoints are e-th roots of rationals; comparisons between
    them are exact integer power comparisons.
    """
    # lowers: (value, e) meaning value^(1/e); rationals use e = 1
    lowers: List[Tuple[Fraction, int]] = [(lo_x, 1)]
    uppers: List[Tuple[Fraction, int]] = [(hi_x, 1)]
    for i, ai in enumerate(combo, start=1):
        e = exps[i]
        lo_val = Fraction(ai) - widths[i]
        hi_val = Fraction(ai) + widths[i]
        if hi_val <= 0:
            return False
        uppers.append((hi_val / q, e))
        if lo_val > 0:
            lowers.append((lo_val / q, e))
    for lv, le in lowers:
        for uv, ue in uppers:
            # need lv^(1/le) < uv^(1/ue)  <=>  lv^ue < uv^le  (positive)
            if lv < 0:
                continue
            if lv**ue >= uv**le:
                return False
    return True


# ---------------------------------------------------------------------------
# Smooth sums
# ---------------------------------------------------------------------------


def _profile_arrays(spec) -> List[Tuple[float, float, int]]:
    return spec.profile.to_kernel_arrays()


def _eval_profile(segs: List[Tuple[float, float, int]], x: float) -> float:
    for lo, hi, kind in segs:
        if lo <= x <= hi:
            if kind == 0:
                return 1.0
            v = (x - lo) / (hi - lo)
            if kind == 2:
                v = 1.0 - v
            if v <= 0.0:
                return 0.0
            if v >= 1.0:
                return 1.0
            return v * v * v * v * v * (126 + v * (-420 + v * (540 + v * (-315 + v * 70))))
    return 0.0


_WPRIME_SUP = 2.4610595703125  # sup |S'| = 630/256, padded


def smooth_cell(exps: Sequence[int], j: int, t: int, thresholds: Sequence[Fraction],
                mho, omega, w, mho_on_x: bool = True):
    """sum over (q, a) of weight(a/q) omega(q/2^t) prod w(||q F_i(a/q)||/th_i).

    mho is evaluated at x = (a/q)^(1/e_j) when mho_on_x, else directly at
    a/q.  Returns a SmoothCountResult with a conservative error budget.
    """
    value, err, terms, _ = _smooth_loop(exps, j, t, thresholds, mho, omega, w,
                                        mho_on_x, want_base=False)
    from .counting import SmoothCountResult

    return SmoothCountResult(value=value, error_bound=err, terms=terms)


def smooth_and_base_cell(exps, j, t, thresholds, mho, omega, w,
                         mho_on_x: bool = True):
    value, err, terms, base = _smooth_loop(exps, j, t, thresholds, mho, omega, w,
                                           mho_on_x, want_base=True)
    from .counting import SmoothCountResult

    return SmoothCountResult(value=value, error_bound=err, terms=terms), base


CAP_MAX = 24


def dominance_table(cell_z, k: int):
    """CSR table over clamped caps: bucket (c_1..c_k) -> cells with
    z_i <= c_i for every i.  Flattened with stride CAP_MAX + 1."""
    size = (CAP_MAX + 1) ** k
    lists = [[] for _ in range(size)]
    for idx in range(size):
        caps = []
        rem = idx
        for _ in range(k):
            caps.append(rem % (CAP_MAX + 1))
            rem //= CAP_MAX + 1
        for ci, z in enumerate(cell_z):
            if all(z[i] <= caps[i] or caps[i] >= CAP_MAX for i in range(k)):
                lists[idx].append(ci)
    offsets = [0]
    indices = []
    for lst in lists:
        indices.extend(lst)
        offsets.append(len(indices))
    return offsets, indices


def smooth_level(exps, j: int, t: int, cells, omega_base, omega, w):
    """Shared pass over (q, a) serving every cell with min-coordinate j.

    cells: list of dicts with keys "z" (tuple) and "wr_segs" (profile
    arrays of the cell's rough cutoff, possibly empty).  Returns per cell
    (N_value, N_err, shared_base) where shared_base = sum Omega(x) omega(q/Q)
    over all pairs (the same for every cell; subtract the per-cell
    support sum to get the cell's own base sum) and N is the
    plain-threshold smoothed count with Omega_g = Omega (1 - W_r) weights.
    """
    n = len(exps)
    e_j = exps[j]
    Q = 1 << t
    omega_segs = _profile_arrays(omega)
    w_segs = _profile_arrays(w)
    base_segs = _profile_arrays(omega_base)
    others = [i for i in range(n) if i != j]
    k = len(others)
    e_others = [exps[i] for i in others]
    cell_z = [[c["z"][i] for i in others] for c in cells]
    cell_wr = [c["wr_segs"] for c in cells]
    ncells = len(cells)
    offsets, indices = dominance_table(cell_z, k)
    xlo, xhi = (float(omega_base.support[0]), float(omega_base.support[1]))
    ylo = max(0.0, xlo) ** e_j
    yhi = xhi**e_j
    inv_ej = 1.0 / e_j
    eps = 2.0**-52
    totals = [0.0] * ncells
    comps = [0.0] * ncells
    errs = [0.0] * ncells
    shared_base = 0.0
    shared_comp = 0.0
    frexp = math.frexp
    q_lo = max(1, math.floor(Q * 0.625))
    q_hi = math.ceil(Q * 3.75)
    stride = CAP_MAX + 1
    for q in range(q_lo, q_hi + 1):
        wq = _eval_profile(omega_segs, q / Q)
        if wq == 0.0:
            continue
        a_lo = math.floor(q * ylo)
        a_hi = math.ceil(q * yhi)
        for a in range(a_lo, a_hi + 1):
            y = a / q
            x = y**inv_ej if e_j > 1 else y
            base_val = _eval_profile(base_segs, x)
            if base_val == 0.0:
                continue
            contrib = base_val * wq
            yb = contrib - shared_comp
            tb = shared_base + yb
            shared_comp = (tb - shared_base) - yb
            shared_base = tb
            dists = []
            bucket = 0
            mult = 1
            for e_i in e_others:
                u = q * x**e_i if e_i != 1 else q * x
                fu = u - math.floor(u)
                dist = fu if fu <= 0.5 else 1.0 - fu
                dists.append((u, dist))
                if dist <= 2.0**-60:
                    cap = CAP_MAX
                else:
                    cap = -frexp(dist / 1.875)[1] + 1  # floor(log2(1.875/dist)) + 1-ish
                    if cap < 0:
                        cap = 0
                    elif cap > CAP_MAX:
                        cap = CAP_MAX
                bucket += mult * cap
                mult *= stride
            for ptr in range(offsets[bucket], offsets[bucket + 1]):
                ci = indices[ptr]
                z = cell_z[ci]
                wr_v = _eval_profile(cell_wr[ci], x) if cell_wr[ci] else 0.0
                og = base_val * (1.0 - wr_v)
                if og == 0.0:
                    continue
                prod = og * wq
                term_err = 0.0
                dead = False
                for kk in range(k):
                    u, dist = dists[kk]
                    v = dist * float(1 << z[kk])
                    if v >= 2.0:
                        dead = True
                        break
                    prod *= _eval_profile(w_segs, v)
                    term_err += _WPRIME_SUP * float(1 << z[kk]) * abs(u) * 8 * eps
                errs[ci] += term_err
                if not dead and prod != 0.0:
                    yk = prod - comps[ci]
                    tk = totals[ci] + yk
                    comps[ci] = (tk - totals[ci]) - yk
                    totals[ci] = tk
                    errs[ci] += eps * abs(prod)
    return [(totals[ci], errs[ci] + 4 * eps * abs(totals[ci]), shared_base)
            for ci in range(ncells)]


def support_weighted_sum(exps, j: int, t: int, intervals, omega_base, wr, omega):
    """sum over pairs with x in the given intervals of
    Omega(x) W_r(x) omega(q/Q), evaluated at x = (a/q)^(1/e_j)."""
    e_j = exps[j]
    Q = 1 << t
    omega_segs = _profile_arrays(omega)
    base_segs = _profile_arrays(omega_base)
    wr_segs = _profile_arrays(wr)
    inv_ej = 1.0 / e_j
    total = 0.0
    comp = 0.0
    q_lo = max(1, math.floor(Q * 0.625))
    q_hi = math.ceil(Q * 3.75)
    spans = [(max(0.0, float(a)) ** e_j, max(0.0, float(b)) ** e_j)
             for a, b in intervals]
    for q in range(q_lo, q_hi + 1):
        wq = _eval_profile(omega_segs, q / Q)
        if wq == 0.0:
            continue
        for ylo, yhi in spans:
            a_lo = math.floor(q * ylo)
            a_hi = math.ceil(q * yhi)
            for a in range(a_lo, a_hi + 1):
                y = a / q
                x = y**inv_ej if e_j > 1 else y
                bv = _eval_profile(base_segs, x)
                if bv == 0.0:
                    continue
                wv = _eval_profile(wr_segs, x)
                if wv == 0.0:
                    continue
                term = bv * wv * wq
                yk = term - comp
                tk = total + yk
                comp = (tk - total) - yk
                total = tk
    return total


def _smooth_loop(exps, j, t, thresholds, mho, omega, w, mho_on_x, want_base):
    n = len(exps)
    e_j = exps[j]
    Q = 1 << t
    omega_segs = _profile_arrays(omega)
    w_segs = _profile_arrays(w)
    mho_segs = _profile_arrays(mho)
    mho_slope = float(mho.profile.derivative_sup_bound(1))
    e_all = list(exps)
    th = [float(x) for x in thresholds]
    xlo, xhi = (float(mho.support[0]), float(mho.support[1]))
    if mho_on_x:
        ylo = max(0.0, xlo) ** e_j
        yhi = xhi**e_j
    else:
        ylo, yhi = xlo, xhi
    inv_ej = 1.0 / e_j
    eps = 2.0**-52
    total = 0.0
    comp = 0.0  # Kahan compensation
    err = 0.0
    base_total = 0.0
    base_comp = 0.0
    terms = 0
    q_lo = max(1, math.floor(Q * 0.625))
    q_hi = math.ceil(Q * 3.75)
    for q in range(q_lo, q_hi + 1):
        wq = _eval_profile(omega_segs, q / Q)
        if wq == 0.0:
            continue
        a_lo = math.floor(q * ylo)
        a_hi = math.ceil(q * yhi)
        for a in range(a_lo, a_hi + 1):
            y = a / q
            x = y**inv_ej if e_j > 1 else y
            mh = _eval_profile(mho_segs, x if mho_on_x else y)
            if mh == 0.0:
                continue
            terms += 1
            base_term = mh * wq
            if want_base:
                yb = base_term - base_comp
                tb = base_total + yb
                base_comp = (tb - base_total) - yb
                base_total = tb
            prod = base_term
            term_err = mho_slope * abs(x) * 4 * eps * wq
            for i in range(n):
                if i == j:
                    continue
                u = q * x ** e_all[i] if e_all[i] != 1 else q * x
                fu = u - math.floor(u)
                dist = fu if fu <= 0.5 else 1.0 - fu
                v = dist / th[i]
                if v >= 2.0:
                    prod = 0.0
                    break
                wv = _eval_profile(w_segs, v)
                term_err += _WPRIME_SUP / th[i] * (abs(u) * 8 * eps)
                prod *= wv
            err += term_err
            if prod != 0.0:
                yk = prod - comp
                tk = total + yk
                comp = (tk - total) - yk
                total = tk
                err += eps * abs(prod)
    err += eps * abs(total) * 4
    return total, err, terms, base_total
