# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled iteration kernel.

Statement-for-statement transcription of ``pure.advance_chunk``; both
backends call the same libm routines on the same pregenerated draw blocks,
so trajectories agree bit for bit.  Keep in sync with pure.py.
"""

from libc.math cimport NAN, exp, pow, sqrt
from libc.stdlib cimport free, malloc
from libc.stdint cimport int32_t, int64_t

cdef double CLAMP = 1e300


def advance_chunk(
    int64_t[::1] ints,
    double[::1] flts,
    int32_t[::1] block_start,
    int32_t[::1] block_dim,
    int32_t[::1] dom_kind,
    int32_t[::1] reg_kind,
    double[::1] lo,
    double[::1] hi,
    double[::1] thr,
    double[:, ::1] A1,
    double[:, ::1] A2,
    double[::1] pivot,
    double[::1] radius,
    double[::1] basis_data,
    int32_t[::1] basis_off,
    int32_t[::1] basis_m,
    double[::1] x_ref,
    double[::1] y,
    double[::1] x,
    long n_start,
    long chunk,
    double[:, ::1] gauss,
    int64_t[:, ::1] idraws,
    int64_t[::1] rec_ns,
    double[:, ::1] rec_x,
    double[:, ::1] rec_y,
    double[::1] rec_dist,
    int64_t[::1] cursor,
    double[::1] stats,
):
    cdef int algo = <int> ints[0]
    cdef int game_kind = <int> ints[1]
    cdef int P = <int> ints[2]
    cdef int oracle_kind = <int> ints[3]
    cdef int sched_kind = <int> ints[4]
    cdef int norm_kind = <int> ints[5]
    cdef long window_start = <long> ints[6]
    cdef int dim = <int> ints[7]
    cdef int has_ref = <int> ints[8]
    cdef double game_c = flts[0]
    cdef double sigma = flts[1]
    cdef double delta0 = flts[2]
    cdef double rho = flts[3]
    cdef double gamma0 = flts[4]
    cdef double sched_p = flts[5]

    cdef double *ys = <double *> malloc(dim * sizeof(double))
    cdef double *xs = <double *> malloc(dim * sizeof(double))
    cdef double *v = <double *> malloc(dim * sizeof(double))
    cdef double *xq = <double *> malloc(dim * sizeof(double))
    cdef double *srt = <double *> malloc(dim * sizeof(double))
    if ys == NULL or xs == NULL or v == NULL or xq == NULL or srt == NULL:
        free(ys); free(xs); free(v); free(xq); free(srt)
        raise MemoryError()

    cdef long n_rec = rec_ns.shape[0]
    cdef long pos = cursor[0]
    cdef double window_max = stats[0]
    cdef double saturated = stats[1]

    cdef long t, n
    cdef int i, j, k, m, off, row, s0, d0
    cdef double d, delta, sgn, scale, coef, u, gamma, yj, qj, w, lj

    for j in range(dim):
        ys[j] = y[j]
        xs[j] = x[j]

    with nogil:
        for t in range(chunk):
            n = n_start + t

            if algo == 0:
                _mirror_all(ys, xs, P, &block_start[0], &block_dim[0],
                            &dom_kind[0], &reg_kind[0], &lo[0], &hi[0], &thr[0], srt)
            else:
                for j in range(dim):
                    ys[j] = xs[j]

            if has_ref:
                d = _dist(xs, &x_ref[0], dim, norm_kind)
                if n >= window_start and d > window_max:
                    window_max = d
            if pos < n_rec and rec_ns[pos] == n:
                for j in range(dim):
                    rec_x[pos, j] = xs[j]
                    rec_y[pos, j] = ys[j]
                if has_ref:
                    rec_dist[pos] = _dist(xs, &x_ref[0], dim, norm_kind)
                else:
                    rec_dist[pos] = NAN
                pos += 1

            # ------- feedback signal -------
            if oracle_kind == 3:
                delta = delta0 / pow(<double> n, rho)
                for i in range(P):
                    s0 = block_start[i]
                    d0 = block_dim[i]
                    k = <int> idraws[t, i]
                    m = basis_m[i]
                    off = basis_off[i]
                    sgn = 1.0
                    row = k
                    if k >= m:
                        sgn = -1.0
                        row = k - m
                    off = off + row * d0
                    scale = delta / radius[i]
                    for j in range(d0):
                        xq[s0 + j] = xs[s0 + j] + scale * (pivot[s0 + j] - xs[s0 + j]) \
                            + delta * sgn * basis_data[off + j]
                for i in range(P):
                    s0 = block_start[i]
                    d0 = block_dim[i]
                    u = _payoff(game_kind, game_c, A1, A2, xq,
                                &block_start[0], &block_dim[0], i)
                    k = <int> idraws[t, i]
                    m = basis_m[i]
                    off = basis_off[i]
                    sgn = 1.0
                    row = k
                    if k >= m:
                        sgn = -1.0
                        row = k - m
                    off = off + row * d0
                    coef = (m / delta) * u * sgn
                    for j in range(d0):
                        v[s0 + j] = coef * basis_data[off + j]
            else:
                _grad(game_kind, game_c, A1, A2, xs,
                      &block_start[0], &block_dim[0], P, v)
                if oracle_kind == 1:
                    for j in range(dim):
                        v[j] = v[j] + sigma * gauss[t, j]
                elif oracle_kind == 2:
                    for j in range(dim):
                        v[j] = v[j] + sigma * (2.0 * <double> idraws[t, j] - 1.0)

            if sched_kind == 0:
                gamma = gamma0
            else:
                gamma = gamma0 / pow(<double> n, sched_p)

            if algo == 0:
                for j in range(dim):
                    yj = ys[j] + gamma * v[j]
                    if yj > CLAMP:
                        yj = CLAMP
                        saturated = 1.0
                    elif yj < -CLAMP:
                        yj = -CLAMP
                        saturated = 1.0
                    ys[j] = yj
            else:
                for j in range(dim):
                    qj = xs[j] + gamma * v[j]
                    if qj > CLAMP:
                        qj = CLAMP
                        saturated = 1.0
                    elif qj < -CLAMP:
                        qj = -CLAMP
                        saturated = 1.0
                    xq[j] = qj
                _mirror_all(xq, xs, P, &block_start[0], &block_dim[0],
                            &dom_kind[0], &reg_kind[0], &lo[0], &hi[0], &thr[0], srt)

    for j in range(dim):
        y[j] = ys[j]
        x[j] = xs[j]
    cursor[0] = pos
    stats[0] = window_max
    stats[1] = saturated
    free(ys); free(xs); free(v); free(xq); free(srt)


cdef void _mirror_all(double *ys, double *xs, int P, const int32_t *block_start,
                      const int32_t *block_dim, const int32_t *dom_kind,
                      const int32_t *reg_kind, const double *lo, const double *hi,
                      const double *thr, double *srt) noexcept nogil:
    cdef int i, j, s0, d0, reg
    cdef double yj, w, lj
    for i in range(P):
        s0 = block_start[i]
        d0 = block_dim[i]
        reg = reg_kind[i]
        if dom_kind[i] == 0:
            for j in range(s0, s0 + d0):
                yj = ys[j]
                if yj >= thr[j]:
                    xs[j] = hi[j]
                else:
                    if reg == 0:
                        w = yj
                    elif reg == 1:
                        w = exp(yj - 1.0)
                    else:
                        w = 1.0 / (yj * yj)
                    lj = lo[j]
                    xs[j] = lj if w < lj else w
        elif reg == 0:
            _project_simplex(ys, xs, s0, d0, srt)
        else:
            _logit(ys, xs, s0, d0)


cdef void _project_simplex(double *ys, double *xs, int s0, int d0, double *srt) noexcept nogil:
    cdef int j, k
    cdef double key, acc, tau, tcur, w
    for j in range(d0):
        srt[j] = ys[s0 + j]
    # insertion sort, descending
    for j in range(1, d0):
        key = srt[j]
        k = j - 1
        while k >= 0 and srt[k] < key:
            srt[k + 1] = srt[k]
            k -= 1
        srt[k + 1] = key
    acc = 0.0
    tau = 0.0
    for k in range(d0):
        acc += srt[k]
        tcur = (acc - 1.0) / (k + 1.0)
        if k + 1 < d0 and srt[k + 1] >= tcur:
            continue
        tau = tcur
        break
    for j in range(s0, s0 + d0):
        w = ys[j] - tau
        xs[j] = w if w > 0.0 else 0.0


cdef void _logit(double *ys, double *xs, int s0, int d0) noexcept nogil:
    cdef int j
    cdef double m = ys[s0]
    cdef double s = 0.0
    cdef double e
    for j in range(s0 + 1, s0 + d0):
        if ys[j] > m:
            m = ys[j]
    for j in range(s0, s0 + d0):
        e = exp(ys[j] - m)
        xs[j] = e
        s += e
    for j in range(s0, s0 + d0):
        xs[j] = xs[j] / s


cdef void _grad(int game_kind, double c, double[:, ::1] A1, double[:, ::1] A2,
                double *xs, const int32_t *block_start, const int32_t *block_dim,
                int P, double *v) noexcept nogil:
    cdef int i, j, a, b, s0, d0, n1, n2, s1
    cdef double acc
    if game_kind == 0:
        for i in range(P):
            s0 = block_start[i]
            d0 = block_dim[i]
            for j in range(s0, s0 + d0):
                v[j] = 0.0
    elif game_kind == 1:
        v[0] = 1.0
    elif game_kind == 2:
        v[0] = -pow(xs[0], 1.0 / 3.0)
    elif game_kind == 3:
        v[0] = -2.0 * (xs[0] - c)
    else:
        n1 = block_dim[0]
        n2 = block_dim[1]
        s1 = block_start[1]
        for a in range(n1):
            acc = 0.0
            for b in range(n2):
                acc += A1[a, b] * xs[s1 + b]
            v[a] = acc
        for b in range(n2):
            acc = 0.0
            for a in range(n1):
                acc += A2[a, b] * xs[a]
            v[s1 + b] = acc


cdef double _payoff(int game_kind, double c, double[:, ::1] A1, double[:, ::1] A2,
                    double *xq, const int32_t *block_start, const int32_t *block_dim,
                    int i) noexcept nogil:
    cdef int a, b, n1, n2, s1
    cdef double u, acc, d
    if game_kind == 0:
        return 0.0
    if game_kind == 1:
        return xq[0]
    if game_kind == 2:
        return -0.75 * pow(xq[0], 4.0 / 3.0)
    if game_kind == 3:
        d = xq[0] - c
        return -(d * d)
    n1 = block_dim[0]
    n2 = block_dim[1]
    s1 = block_start[1]
    u = 0.0
    if i == 0:
        for a in range(n1):
            acc = 0.0
            for b in range(n2):
                acc += A1[a, b] * xq[s1 + b]
            u += xq[a] * acc
    else:
        for a in range(n1):
            acc = 0.0
            for b in range(n2):
                acc += A2[a, b] * xq[s1 + b]
            u += xq[a] * acc
    return u


cdef double _dist(double *xs, const double *x_ref, int dim, int norm_kind) noexcept nogil:
    cdef int j
    cdef double acc, d, best
    if norm_kind == 0:
        acc = 0.0
        for j in range(dim):
            d = xs[j] - x_ref[j]
            acc += d * d
        return sqrt(acc)
    if norm_kind == 1:
        acc = 0.0
        for j in range(dim):
            d = xs[j] - x_ref[j]
            acc += d if d >= 0.0 else -d
        return acc
    best = 0.0
    for j in range(dim):
        d = xs[j] - x_ref[j]
        if d < 0.0:
            d = -d
        if d > best:
            best = d
    return best
