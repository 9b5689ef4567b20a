# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled counting kernels.

Same algorithms as `_kernels_py`: the exact count runs a double-precision
fast path with a certified margin and falls back to the exact
rational-arithmetic pair helper whenever a comparison lands inside the
margin, so accepted/rejected pairs match the pure lane exactly.  Smooth
sums accumulate in the same order with the same libm calls.
"""

from libc.math cimport floor, ceil, sqrt, cbrt, pow, fabs

from fractions import Fraction

from . import _kernels_py

BACKEND = "compiled"

cdef double MARGIN = 2.0 ** -26
cdef double WPRIME_SUP = 2.4610595703125
cdef double EPS = 2.0 ** -52

cdef extern from "math.h":
    double c_frexp "frexp"(double x, int* exponent) nogil


cdef inline double pow_small(double x, long long e) nogil:
    if e == 1:
        return x
    if e == 2:
        return x * x
    if e == 3:
        return x * x * x
    if e == 4:
        return (x * x) * (x * x)
    cdef double acc = 1.0
    cdef long long k
    for k in range(e):
        acc *= x
    return acc


cdef inline double ratio_pow(double y, double ratio, int num, int den) nogil:
    # y^(num/den) with fast paths for the monomial ratios that occur
    if den == 1:
        return pow_small(y, num)
    if den == 2:
        if num == 1:
            return sqrt(y)
        if num == 3:
            return y * sqrt(y)
    if den == 3:
        if num == 1:
            return cbrt(y)
        if num == 2:
            return cbrt(y * y)
    return pow(y, ratio)


cdef inline double eval_profile(double[:, ::1] segs, int nseg, double x) nogil:
    cdef int k
    cdef double lo, hi, v
    for k in range(nseg):
        lo = segs[k, 0]
        hi = segs[k, 1]
        if lo <= x <= hi:
            if segs[k, 2] == 0.0:
                return 1.0
            v = (x - lo) / (hi - lo)
            if segs[k, 2] == 2.0:
                v = 1.0 - v
            if v <= 0.0:
                return 0.0
            if v >= 1.0:
                return 1.0
            return v * v * v * v * v * (126 + v * (-420 + v * (540 + v * (-315 + v * 70))))
    return 0.0


cdef inline double eval_profile_range(double[:, ::1] segs, long long lo_i,
                                      long long hi_i, double x) nogil:
    # binary search for the segment containing x (segments are sorted)
    cdef long long lo = lo_i, hi = hi_i, mid
    cdef double slo, shi, v
    while lo < hi:
        mid = (lo + hi) // 2
        if segs[mid, 1] < x:
            lo = mid + 1
        else:
            hi = mid
    if lo >= hi_i:
        return 0.0
    slo = segs[lo, 0]
    shi = segs[lo, 1]
    if x < slo or x > shi:
        return 0.0
    if segs[lo, 2] == 0.0:
        return 1.0
    v = (x - slo) / (shi - slo)
    if segs[lo, 2] == 2.0:
        v = 1.0 - v
    if v <= 0.0:
        return 0.0
    if v >= 1.0:
        return 1.0
    return v * v * v * v * v * (126 + v * (-420 + v * (540 + v * (-315 + v * 70))))


cdef inline double eval_profile_bs(double[:, ::1] segs, int nseg, double x) nogil:
    if nseg <= 8:
        return eval_profile(segs, nseg, x)
    return eval_profile_range(segs, 0, nseg, x)


cdef inline int cap_of(double dist) nogil:
    # any value >= ceil(log2(1.875/dist)) is a safe visiting cap
    cdef int e
    if dist <= 1e-18:
        return 24
    c_frexp(dist / 1.875, &e)
    e = 1 - e
    if e < 0:
        return 0
    if e > 24:
        return 24
    return e


# ---------------------------------------------------------------------------
# Exact counting
# ---------------------------------------------------------------------------


def count_cell(exps, domain, widths, int t, bint collect_witnesses=False):
    """Exact count with a float fast path; ambiguous pairs go exact."""
    if collect_witnesses:
        return _kernels_py.count_cell(exps, domain, widths, t, True)
    if exps[0] != 1:
        raise ValueError("count kernel requires the identity first coordinate")
    cdef int n = len(exps)
    if n > 8:
        raise ValueError("too many coordinates for the compiled kernel")
    cdef long long e_arr[8]
    cdef double w_arr[8]
    cdef int i
    for i in range(n):
        e_arr[i] = exps[i]
        w_arr[i] = float(widths[i])
    cdef double w0 = w_arr[0]
    cdef long long count = 0
    cdef long long q
    cdef long long q_lo = 1 << t
    cdef long long q_hi = (1 << (t + 1)) - 1
    cdef long long a0, a_lo, a_hi, int_lo, int_hi
    cdef double lo_x, hi_x, m_lo, m_hi, bound_lo, bound_hi, s_lo, s_hi
    cdef long long ai_lo, ai_hi, m_count
    cdef bint ambiguous
    cdef double qd
    w0_frac = widths[0]
    for q in range(q_lo, q_hi + 1):
        qd = <double> q
        for piece in domain:
            glo, ghi = piece
            # exact a0 range and the interior (unclipped window) subrange
            a_lo = _floor_frac(q * glo - w0_frac) + 1
            a_hi = _ceil_frac(q * ghi + w0_frac) - 1
            if a_hi < a_lo:
                continue
            int_lo = _ceil_frac(q * glo + w0_frac)
            int_hi = _floor_frac(q * ghi - w0_frac)
            for a0 in range(a_lo, a_hi + 1):
                if a0 < int_lo or a0 > int_hi:
                    # window clips the piece boundary: decide exactly
                    count += _kernels_py.pair_count(exps, widths, q, a0, glo, ghi)
                    continue
                lo_x = (a0 - w0) / qd
                hi_x = (a0 + w0) / qd
                m_count = 1
                ambiguous = False
                for i in range(1, n):
                    m_lo = qd * pow_small(lo_x, e_arr[i])
                    m_hi = qd * pow_small(hi_x, e_arr[i])
                    bound_lo = m_lo - w_arr[i]
                    bound_hi = m_hi + w_arr[i]
                    s_lo = floor(bound_lo)
                    s_hi = ceil(bound_hi)
                    if fabs(bound_lo - s_lo) < MARGIN or fabs(bound_lo - s_lo - 1.0) < MARGIN \
                       or fabs(bound_hi - s_hi) < MARGIN or fabs(bound_hi - s_hi + 1.0) < MARGIN:
                        ambiguous = True
                        break
                    ai_lo = <long long> s_lo + 1
                    ai_hi = <long long> s_hi - 1
                    if ai_hi < ai_lo:
                        m_count = 0
                        break
                    m_count *= (ai_hi - ai_lo + 1)
                if ambiguous:
                    count += _kernels_py.pair_count(exps, widths, q, a0, glo, ghi)
                    continue
                if m_count == 0:
                    continue
                if n > 2:
                    count += _joint_count(exps, widths, q, a0, glo, ghi,
                                          lo_x, hi_x, e_arr, w_arr, n, m_count)
                else:
                    count += m_count
    from .counting import ExactCountResult

    return ExactCountResult(count=int(count), undecided=0, witnesses=None)


cdef long long _joint_count(exps, widths, long long q, long long a0,
                            glo, ghi, double lo_x, double hi_x,
                            long long* e_arr, double* w_arr, int n,
                            long long m_count):
    # single-combo fast check via float root comparisons with margin
    cdef double qd = <double> q
    cdef double lowers[9]
    cdef double uppers[9]
    cdef int nl = 1, nu = 1, i
    cdef double m_lo, lo_val, hi_val
    cdef double max_lo, min_hi
    cdef long long ai
    if m_count == 1:
        lowers[0] = lo_x
        uppers[0] = hi_x
        for i in range(1, n):
            m_lo = qd * pow_small(lo_x, e_arr[i])
            ai = <long long> floor(m_lo - w_arr[i]) + 1
            lo_val = (ai - w_arr[i]) / qd
            hi_val = (ai + w_arr[i]) / qd
            if hi_val <= 0:
                return 0
            uppers[nu] = pow(hi_val, 1.0 / e_arr[i])
            nu += 1
            if lo_val > 0:
                lowers[nl] = pow(lo_val, 1.0 / e_arr[i])
                nl += 1
        max_lo = lowers[0]
        min_hi = uppers[0]
        for i in range(1, nl):
            if lowers[i] > max_lo:
                max_lo = lowers[i]
        for i in range(1, nu):
            if uppers[i] < min_hi:
                min_hi = uppers[i]
        if min_hi - max_lo > MARGIN:
            return 1
        if max_lo - min_hi > MARGIN:
            return 0
    # ambiguous or multi-combo: exact
    return _kernels_py.pair_count(exps, widths, q, a0, glo, ghi)


def _floor_frac(x):
    return x.numerator // x.denominator


def _ceil_frac(x):
    return -((-x.numerator) // x.denominator)


# ---------------------------------------------------------------------------
# Smooth sums (single cell)
# ---------------------------------------------------------------------------


def smooth_cell(exps, int j, int t, thresholds, mho, omega, w, bint mho_on_x=True):
    value, err, terms, _ = _smooth_loop(exps, j, t, thresholds, mho, omega, w,
                                        mho_on_x, False)
    from .counting import SmoothCountResult

    return SmoothCountResult(value=value, error_bound=err, terms=terms)


def smooth_and_base_cell(exps, int j, int t, thresholds, mho, omega, w,
                         bint mho_on_x=True):
    value, err, terms, base = _smooth_loop(exps, j, t, thresholds, mho, omega, w,
                                           mho_on_x, True)
    from .counting import SmoothCountResult

    return SmoothCountResult(value=value, error_bound=err, terms=terms), base


def _smooth_loop(exps, int j, int t, thresholds, mho, omega, w,
                 bint mho_on_x, bint want_base):
    import numpy as np

    cdef int n = len(exps)
    if n > 8:
        raise ValueError("too many coordinates")
    cdef long long e_j = exps[j]
    omega_np = np.array(omega.profile.to_kernel_arrays(), dtype=np.float64)
    w_np = np.array(w.profile.to_kernel_arrays(), dtype=np.float64)
    mho_np = np.array(mho.profile.to_kernel_arrays(), dtype=np.float64)
    cdef double[:, ::1] omega_segs = omega_np
    cdef double[:, ::1] w_segs = w_np
    cdef double[:, ::1] mho_segs = mho_np
    cdef int n_omega = omega_np.shape[0]
    cdef int n_w = w_np.shape[0]
    cdef int n_mho = mho_np.shape[0]
    cdef double mho_slope = float(mho.profile.derivative_sup_bound(1))
    cdef double th[8]
    cdef long long e_all[8]
    cdef int i
    for i in range(n):
        th[i] = float(thresholds[i])
        e_all[i] = exps[i]
    cdef double xlo = float(mho.support[0])
    cdef double xhi = float(mho.support[1])
    cdef double ylo, yhi
    if mho_on_x:
        ylo = pow_small(max(0.0, xlo), e_j)
        yhi = pow_small(xhi, e_j)
    else:
        ylo = xlo
        yhi = xhi
    cdef double inv_ej = 1.0 / e_j
    cdef long long Q = 1 << t
    cdef double Qd = <double> Q
    cdef double total = 0.0, comp = 0.0, err = 0.0
    cdef double base_total = 0.0, base_comp = 0.0
    cdef long long terms = 0
    cdef long long q, a, a_lo, a_hi
    cdef long long q_lo = <long long> floor(Qd * 0.625)
    cdef long long q_hi = <long long> ceil(Qd * 3.75)
    if q_lo < 1:
        q_lo = 1
    cdef double wq, y, x, mh, prod, u, fu, dist, v, wv, term_err
    cdef double yk, tk, base_term
    for q in range(q_lo, q_hi + 1):
        wq = eval_profile(omega_segs, n_omega, q / Qd)
        if wq == 0.0:
            continue
        a_lo = <long long> floor(q * ylo)
        a_hi = <long long> ceil(q * yhi)
        for a in range(a_lo, a_hi + 1):
            y = (<double> a) / (<double> q)
            if e_j == 2:
                x = sqrt(y)
            elif e_j == 3:
                x = cbrt(y)
            elif e_j == 1:
                x = y
            else:
                x = pow(y, inv_ej)
            mh = eval_profile_bs(mho_segs, n_mho, x if mho_on_x else y)
            if mh == 0.0:
                continue
            terms += 1
            base_term = mh * wq
            if want_base:
                yk = base_term - base_comp
                tk = base_total + yk
                base_comp = (tk - base_total) - yk
                base_total = tk
            prod = base_term
            term_err = mho_slope * fabs(x) * 4 * EPS * wq
            for i in range(n):
                if i == j:
                    continue
                u = (<double> q) * pow_small(x, e_all[i])
                fu = u - floor(u)
                dist = fu if fu <= 0.5 else 1.0 - fu
                v = dist / th[i]
                if v >= 2.0:
                    prod = 0.0
                    break
                wv = eval_profile(w_segs, n_w, v)
                term_err += WPRIME_SUP / th[i] * (fabs(u) * 8 * EPS)
                prod *= wv
            err += term_err
            if prod != 0.0:
                yk = prod - comp
                tk = total + yk
                comp = (tk - total) - yk
                total = tk
                err += EPS * fabs(prod)
    err += EPS * fabs(total) * 4
    return total, err, int(terms), base_total


# ---------------------------------------------------------------------------
# Shared multi-cell pass
# ---------------------------------------------------------------------------


def smooth_level(exps, int j, int t, cells, omega_base, omega, w):
    """Shared pass over (q, a); see the pure lane for the contract."""
    import numpy as np

    cdef int n = len(exps)
    cdef long long e_j = exps[j]
    others = [i for i in range(n) if i != j]
    cdef int k = len(others)
    if k > 2:
        raise ValueError("shared pass supports n <= 3")
    cell_z = [[c["z"][i] for i in others] for c in cells]
    cdef int ncells = len(cells)
    offsets_l, indices_l = _kernels_py.dominance_table(cell_z, k)
    offs_np = np.array(offsets_l, dtype=np.int64)
    idx_np = (np.array(indices_l, dtype=np.int64) if indices_l
              else np.zeros(1, dtype=np.int64))
    cdef long long[::1] offsets = offs_np
    cdef long long[::1] indices = idx_np
    z_np = (np.array(cell_z, dtype=np.int64).reshape(ncells, k) if ncells
            else np.zeros((1, 1), dtype=np.int64))
    cdef long long[:, ::1] zmat = z_np
    wr_flat = []
    wr_off = [0]
    for c in cells:
        segs = c["wr_segs"] or []
        wr_flat.extend(segs)
        wr_off.append(len(wr_flat))
    wrf_np = (np.array(wr_flat, dtype=np.float64).reshape(-1, 3) if wr_flat
              else np.zeros((1, 3), dtype=np.float64))
    wro_np = np.array(wr_off, dtype=np.int64)
    cdef double[:, ::1] wr_segs = wrf_np
    cdef long long[::1] wr_offs = wro_np
    omega_np = np.array(omega.profile.to_kernel_arrays(), dtype=np.float64)
    w_np = np.array(w.profile.to_kernel_arrays(), dtype=np.float64)
    base_np = np.array(omega_base.profile.to_kernel_arrays(), dtype=np.float64)
    cdef double[:, ::1] omega_segs = omega_np
    cdef double[:, ::1] w_segs = w_np
    cdef double[:, ::1] base_segs = base_np
    cdef int n_omega = omega_np.shape[0]
    cdef int n_w = w_np.shape[0]
    cdef int n_base = base_np.shape[0]
    cdef long long e_oth[2]
    cdef int kk
    for kk in range(k):
        e_oth[kk] = exps[others[kk]]
    cdef double xlo = float(omega_base.support[0])
    cdef double xhi = float(omega_base.support[1])
    cdef double ylo = pow_small(max(0.0, xlo), e_j)
    cdef double yhi = pow_small(xhi, e_j)
    cdef double inv_ej = 1.0 / e_j
    cdef long long Q = 1 << t
    cdef double Qd = <double> Q
    totals_np = np.zeros(max(ncells, 1), dtype=np.float64)
    comps_np = np.zeros(max(ncells, 1), dtype=np.float64)
    errs_np = np.zeros(max(ncells, 1), dtype=np.float64)
    cdef double[::1] totals = totals_np
    cdef double[::1] comps = comps_np
    cdef double[::1] errs = errs_np
    cdef double shared_base = 0.0, shared_comp = 0.0
    cdef long long q, a, a_lo, a_hi, ptr, ci
    cdef long long q_lo = <long long> floor(Qd * 0.625)
    cdef long long q_hi = <long long> ceil(Qd * 3.75)
    if q_lo < 1:
        q_lo = 1
    cdef double wq, y, x, base_val, yb, tb, u0, u1, d0, d1, v
    cdef double og, prod, term_err, yk, tk, wr_v
    cdef int cap0, cap1
    cdef long long bucket
    cdef bint dead
    cdef int stride = 25  # CAP_MAX + 1 in the pure lane
    cdef long long zi
    u1 = 0.0
    d1 = 0.0
    for q in range(q_lo, q_hi + 1):
        wq = eval_profile(omega_segs, n_omega, q / Qd)
        if wq == 0.0:
            continue
        a_lo = <long long> floor(q * ylo)
        a_hi = <long long> ceil(q * yhi)
        for a in range(a_lo, a_hi + 1):
            y = (<double> a) / (<double> q)
            if e_j == 2:
                x = sqrt(y)
            elif e_j == 3:
                x = cbrt(y)
            elif e_j == 1:
                x = y
            else:
                x = pow(y, inv_ej)
            base_val = eval_profile_bs(base_segs, n_base, x)
            if base_val == 0.0:
                continue
            yb = base_val * wq - shared_comp
            tb = shared_base + yb
            shared_comp = (tb - shared_base) - yb
            shared_base = tb
            u0 = (<double> q) * pow_small(x, e_oth[0])
            d0 = u0 - floor(u0)
            if d0 > 0.5:
                d0 = 1.0 - d0
            cap0 = cap_of(d0)
            bucket = cap0
            if k == 2:
                u1 = (<double> q) * pow_small(x, e_oth[1])
                d1 = u1 - floor(u1)
                if d1 > 0.5:
                    d1 = 1.0 - d1
                cap1 = cap_of(d1)
                bucket += stride * cap1
            for ptr in range(offsets[bucket], offsets[bucket + 1]):
                ci = indices[ptr]
                if wr_offs[ci + 1] > wr_offs[ci]:
                    wr_v = eval_profile_range(wr_segs, wr_offs[ci], wr_offs[ci + 1], x)
                else:
                    wr_v = 0.0
                og = base_val * (1.0 - wr_v)
                if og == 0.0:
                    continue
                prod = og * wq
                term_err = 0.0
                dead = False
                zi = zmat[ci, 0]
                v = d0 * (<double> (1 << zi))
                if v >= 2.0:
                    dead = True
                else:
                    prod *= eval_profile(w_segs, n_w, v)
                    term_err += WPRIME_SUP * (<double> (1 << zi)) * fabs(u0) * 8 * EPS
                if not dead and k == 2:
                    zi = zmat[ci, 1]
                    v = d1 * (<double> (1 << zi))
                    if v >= 2.0:
                        dead = True
                    else:
                        prod *= eval_profile(w_segs, n_w, v)
                        term_err += WPRIME_SUP * (<double> (1 << zi)) * fabs(u1) * 8 * EPS
                errs[ci] += term_err
                if not dead and prod != 0.0:
                    yk = prod - comps[ci]
                    tk = totals[ci] + yk
                    comps[ci] = (tk - totals[ci]) - yk
                    totals[ci] = tk
                    errs[ci] += EPS * fabs(prod)
    return [(float(totals_np[c2]), float(errs_np[c2]) + 4 * EPS * abs(float(totals_np[c2])),
             float(shared_base)) for c2 in range(ncells)]


def support_weighted_sum(exps, int j, int t, intervals, omega_base, wr, omega):
    import numpy as np

    cdef long long e_j = exps[j]
    omega_np = np.array(omega.profile.to_kernel_arrays(), dtype=np.float64)
    base_np = np.array(omega_base.profile.to_kernel_arrays(), dtype=np.float64)
    wr_np = np.array(wr.profile.to_kernel_arrays(), dtype=np.float64)
    cdef double[:, ::1] omega_segs = omega_np
    cdef double[:, ::1] base_segs = base_np
    cdef double[:, ::1] wr_segs = wr_np
    cdef int n_omega = omega_np.shape[0]
    cdef int n_base = base_np.shape[0]
    cdef int n_wr = wr_np.shape[0]
    spans_l = [(pow_small(max(0.0, float(aa)), e_j), pow_small(max(0.0, float(bb)), e_j))
               for aa, bb in intervals]
    spans_np = (np.array(spans_l, dtype=np.float64) if spans_l
                else np.zeros((0, 2), dtype=np.float64))
    cdef double[:, ::1] spans = spans_np
    cdef int nspans = spans_np.shape[0]
    cdef double inv_ej = 1.0 / e_j
    cdef long long Q = 1 << t
    cdef double Qd = <double> Q
    cdef double total = 0.0, comp = 0.0
    cdef long long q, a, a_lo, a_hi
    cdef int si
    cdef long long q_lo = <long long> floor(Qd * 0.625)
    cdef long long q_hi = <long long> ceil(Qd * 3.75)
    if q_lo < 1:
        q_lo = 1
    cdef double wq, y, x, bv, wv, term, yk, tk
    for q in range(q_lo, q_hi + 1):
        wq = eval_profile(omega_segs, n_omega, q / Qd)
        if wq == 0.0:
            continue
        for si in range(nspans):
            a_lo = <long long> floor(q * spans[si, 0])
            a_hi = <long long> ceil(q * spans[si, 1])
            for a in range(a_lo, a_hi + 1):
                y = (<double> a) / (<double> q)
                if e_j == 2:
                    x = sqrt(y)
                elif e_j == 3:
                    x = cbrt(y)
                elif e_j == 1:
                    x = y
                else:
                    x = pow(y, inv_ej)
                bv = eval_profile_bs(base_segs, n_base, x)
                if bv == 0.0:
                    continue
                wv = eval_profile_bs(wr_segs, n_wr, x)
                if wv == 0.0:
                    continue
                term = bv * wv * wq
                yk = term - comp
                tk = total + yk
                comp = (tk - total) - yk
                total = tk
    return total
