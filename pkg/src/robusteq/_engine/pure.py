"""Pure-Python twin of the compiled iteration kernel.

This module is the semantic reference: `_core.pyx` transcribes these loops
statement for statement, and both call the same libm routines on the same
pregenerated draw blocks, so the two backends produce bit-identical
trajectories.  Keep any change here mirrored in the .pyx file.

Enums shared with the compiled core (kept as plain ints on purpose):

    algo        0 ftrl, 1 md
    game_kind   0 zero, 1 linear, 2 boundary_quartic, 3 interior_quadratic,
                4 bimatrix
    dom_kind    0 interval coordinates, 1 simplex block
    reg_kind    0 quadratic, 1 entropic, 2 sqrt
    oracle_kind 0 perfect, 1 gaussian sfo, 2 rademacher sfo, 3 spsa
    sched_kind  0 constant, 1 power
    norm_kind   0 l2, 1 l1, 2 linf

ints layout: [algo, game_kind, P, oracle_kind, sched_kind, norm_kind,
              window_start, dim, has_ref]
flts layout: [game_c, sigma, delta0, rho, gamma0, sched_p]
"""

from math import exp, sqrt

CLAMP = 1e300


def advance_chunk(
    ints,
    flts,
    block_start,
    block_dim,
    dom_kind,
    reg_kind,
    lo,
    hi,
    thr,
    A1,
    A2,
    pivot,
    radius,
    basis_data,
    basis_off,
    basis_m,
    x_ref,
    y,
    x,
    n_start,
    chunk,
    gauss,
    idraws,
    rec_ns,
    rec_x,
    rec_y,
    rec_dist,
    cursor,
    stats,
):
    algo, game_kind, P, oracle_kind, sched_kind, norm_kind, window_start, dim, has_ref = (
        int(ints[0]), int(ints[1]), int(ints[2]), int(ints[3]), int(ints[4]),
        int(ints[5]), int(ints[6]), int(ints[7]), int(ints[8]),
    )
    game_c, sigma, delta0, rho, gamma0, sched_p = (
        float(flts[0]), float(flts[1]), float(flts[2]),
        float(flts[3]), float(flts[4]), float(flts[5]),
    )
    ys = [float(v) for v in y]
    xs = [float(v) for v in x]
    v = [0.0] * dim
    xq = [0.0] * dim
    n_rec = rec_ns.shape[0]
    pos = int(cursor[0])
    window_max = float(stats[0])
    saturated = float(stats[1])

    for t in range(int(chunk)):
        n = int(n_start) + t

        if algo == 0:
            _mirror_all(ys, xs, P, block_start, block_dim, dom_kind, reg_kind, lo, hi, thr)
        else:
            for j in range(dim):
                ys[j] = xs[j]

        if has_ref:
            d = _dist(xs, x_ref, dim, norm_kind)
            if n >= window_start and d > window_max:
                window_max = d
        if pos < n_rec and int(rec_ns[pos]) == n:
            for j in range(dim):
                rec_x[pos, j] = xs[j]
                rec_y[pos, j] = ys[j]
            rec_dist[pos] = _dist(xs, x_ref, dim, norm_kind) if has_ref else float("nan")
            pos += 1

        # ------- feedback signal -------
        if oracle_kind == 3:
            delta = delta0 / float(n) ** rho
            for i in range(P):
                s0, d0 = int(block_start[i]), int(block_dim[i])
                k = int(idraws[t, i])
                m = int(basis_m[i])
                off = int(basis_off[i])
                sgn = 1.0
                row = k
                if k >= m:
                    sgn = -1.0
                    row = k - m
                base = off + row * d0
                scale = delta / float(radius[i])
                for j in range(d0):
                    xq[s0 + j] = xs[s0 + j] + scale * (float(pivot[s0 + j]) - xs[s0 + j]) \
                        + delta * sgn * float(basis_data[base + j])
            for i in range(P):
                s0, d0 = int(block_start[i]), int(block_dim[i])
                u = _payoff(game_kind, game_c, A1, A2, xq, block_start, block_dim, i)
                k = int(idraws[t, i])
                m = int(basis_m[i])
                off = int(basis_off[i])
                sgn = 1.0
                row = k
                if k >= m:
                    sgn = -1.0
                    row = k - m
                base = off + row * d0
                coef = (m / delta) * u * sgn
                for j in range(d0):
                    v[s0 + j] = coef * float(basis_data[base + j])
        else:
            _grad(game_kind, game_c, A1, A2, xs, block_start, block_dim, P, v)
            if oracle_kind == 1:
                for j in range(dim):
                    v[j] = v[j] + sigma * float(gauss[t, j])
            elif oracle_kind == 2:
                for j in range(dim):
                    v[j] = v[j] + sigma * (2.0 * float(idraws[t, j]) - 1.0)

        gamma = gamma0 if sched_kind == 0 else gamma0 / float(n) ** sched_p

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
            _mirror_all(xq, xs, P, block_start, block_dim, dom_kind, reg_kind, lo, hi, thr)

    for j in range(dim):
        y[j] = ys[j]
        x[j] = xs[j]
    cursor[0] = pos
    stats[0] = window_max
    stats[1] = saturated


def _mirror_all(ys, xs, P, block_start, block_dim, dom_kind, reg_kind, lo, hi, thr):
    for i in range(P):
        s0, d0 = int(block_start[i]), int(block_dim[i])
        reg = int(reg_kind[i])
        if int(dom_kind[i]) == 0:
            for j in range(s0, s0 + d0):
                yj = ys[j]
                if yj >= float(thr[j]):
                    xs[j] = float(hi[j])
                else:
                    if reg == 0:
                        w = yj
                    elif reg == 1:
                        w = exp(yj - 1.0)
                    else:
                        w = 1.0 / (yj * yj)
                    lj = float(lo[j])
                    xs[j] = lj if w < lj else w
        elif reg == 0:
            _project_simplex(ys, xs, s0, d0)
        else:
            _logit(ys, xs, s0, d0)


def _project_simplex(ys, xs, s0, d0):
    srt = sorted(ys[s0 : s0 + d0], reverse=True)
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


def _logit(ys, xs, s0, d0):
    m = ys[s0]
    for j in range(s0 + 1, s0 + d0):
        if ys[j] > m:
            m = ys[j]
    s = 0.0
    for j in range(s0, s0 + d0):
        e = exp(ys[j] - m)
        xs[j] = e
        s += e
    for j in range(s0, s0 + d0):
        xs[j] = xs[j] / s


def _grad(game_kind, c, A1, A2, xs, block_start, block_dim, P, v):
    if game_kind == 0:
        for i in range(P):
            s0, d0 = int(block_start[i]), int(block_dim[i])
            for j in range(s0, s0 + d0):
                v[j] = 0.0
    elif game_kind == 1:
        v[0] = 1.0
    elif game_kind == 2:
        v[0] = -(xs[0] ** (1.0 / 3.0))
    elif game_kind == 3:
        v[0] = -2.0 * (xs[0] - c)
    else:
        n1, n2 = int(block_dim[0]), int(block_dim[1])
        s1 = int(block_start[1])
        for a in range(n1):
            acc = 0.0
            for b in range(n2):
                acc += float(A1[a, b]) * xs[s1 + b]
            v[a] = acc
        for b in range(n2):
            acc = 0.0
            for a in range(n1):
                acc += float(A2[a, b]) * xs[a]
            v[s1 + b] = acc


def _payoff(game_kind, c, A1, A2, xq, block_start, block_dim, i):
    if game_kind == 0:
        return 0.0
    if game_kind == 1:
        return xq[0]
    if game_kind == 2:
        return -0.75 * (xq[0] ** (4.0 / 3.0))
    if game_kind == 3:
        d = xq[0] - c
        return -(d * d)
    n1, n2 = int(block_dim[0]), int(block_dim[1])
    s1 = int(block_start[1])
    u = 0.0
    if i == 0:
        for a in range(n1):
            acc = 0.0
            for b in range(n2):
                acc += float(A1[a, b]) * xq[s1 + b]
            u += xq[a] * acc
    else:
        for a in range(n1):
            acc = 0.0
            for b in range(n2):
                acc += float(A2[a, b]) * xq[s1 + b]
            u += xq[a] * acc
    return u


def _dist(xs, x_ref, dim, norm_kind):
    if norm_kind == 0:
        acc = 0.0
        for j in range(dim):
            d = xs[j] - float(x_ref[j])
            acc += d * d
        return sqrt(acc)
    if norm_kind == 1:
        acc = 0.0
        for j in range(dim):
            d = xs[j] - float(x_ref[j])
            acc += d if d >= 0.0 else -d
        return acc
    best = 0.0
    for j in range(dim):
        d = xs[j] - float(x_ref[j])
        if d < 0.0:
            d = -d
        if d > best:
            best = d
    return best
