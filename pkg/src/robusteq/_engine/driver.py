"""Plan recognition and chunked execution for the iteration kernels.

``compile_plan`` inspects a (game, regularizer, domain, oracle, algorithm)
combination and produces the flat array description the kernels consume, or
``None`` when the combination is outside the compiled repertoire (custom
payoff callables, general polytopes, full-covariance noise, ...); callers
then fall back to the generic object-stepping loop.

``execute`` owns everything stateful: the per-player draw streams, the
pregenerated draw blocks (identical to what ``sample_feedback`` would
consume step by step), record buffers, and the chunk loop.
"""

import math
from dataclasses import dataclass

import numpy as np

from ..domains import INTERVAL, SIMPLEX
from . import get_kernels

CHUNK = 65536

ALGO = {"ftrl": 0, "md": 1}
GAME = {"zero": 0, "linear_interval": 1, "boundary_quartic": 2,
        "interior_quadratic": 3, "bimatrix": 4}
ORACLE = {"perfect": 0, "gaussian": 1, "rademacher": 2, "spsa": 3}
SCHED = {"constant": 0, "power": 1}
NORM = {"l2": 0, "l1": 1, "linf": 2}
REG = {"quadratic": 0, "entropic": 1, "sqrt": 2}


@dataclass
class EnginePlan:
    ints: np.ndarray
    flts: np.ndarray
    block_start: np.ndarray
    block_dim: np.ndarray
    dom_kind: np.ndarray
    reg_kind: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    thr: np.ndarray
    A1: np.ndarray
    A2: np.ndarray
    pivot: np.ndarray
    radius: np.ndarray
    basis_data: np.ndarray
    basis_off: np.ndarray
    basis_m: np.ndarray
    dim: int
    nplayers: int
    block_dims: tuple
    oracle_kind: int


def compile_plan(game, reg, domain, oracle, algorithm, norm="l2"):
    tag = game.meta.get("engine_game")
    if tag is None:
        return None
    name = tag[0]
    if name not in GAME:
        return None
    P = domain.nplayers
    dim = domain.total_dim
    dom_kind = np.zeros(P, dtype=np.int32)
    reg_kind = np.zeros(P, dtype=np.int32)
    block_start = np.zeros(P, dtype=np.int32)
    block_dim = np.zeros(P, dtype=np.int32)
    lo = np.zeros(dim)
    hi = np.ones(dim)
    thr = np.zeros(dim)
    start = 0
    for i, p in enumerate(domain.players):
        k = reg.kernel(i)
        if k.name not in REG:
            return None
        reg_kind[i] = REG[k.name]
        block_start[i] = start
        block_dim[i] = p.dim
        if p.kind == INTERVAL or p.kind == "box":
            dom_kind[i] = 0
            lo[start : start + p.dim] = p.lo
            hi[start : start + p.dim] = p.hi
            for j in range(p.dim):
                thr[start + j] = k.theta_prime(p.hi[j])
        elif p.kind == SIMPLEX:
            if k.name == "sqrt":
                return None
            dom_kind[i] = 1
        else:
            return None
        start += p.dim
    if algorithm == "md" and any(reg.kernel(i).steep for i in range(P)):
        return None  # the dynamics layer delegates steep MD to FTRL first

    game_c = 0.0
    A1 = np.zeros((1, 1))
    A2 = np.zeros((1, 1))
    if name == "interior_quadratic":
        game_c = float(tag[1])
    elif name == "bimatrix":
        A1 = np.ascontiguousarray(tag[1], dtype=float)
        A2 = np.ascontiguousarray(tag[2], dtype=float)

    pivot = np.zeros(dim)
    radius = np.ones(P)
    basis_data = np.zeros(1)
    basis_off = np.zeros(P + 1, dtype=np.int32)
    basis_m = np.zeros(P, dtype=np.int32)
    sigma = 0.0
    delta0 = 0.0
    rho = 0.0
    if oracle.kind == "perfect":
        okind = ORACLE["perfect"]
    elif oracle.kind == "sfo":
        if not np.isscalar(oracle.noise.sigma):
            return None
        okind = ORACLE[oracle.noise.kind]
        sigma = float(oracle.noise.sigma)
    elif oracle.kind == "spsa":
        okind = ORACLE["spsa"]
        delta0, rho = oracle.delta0, oracle.rho
        chunks = []
        off = 0
        for i in range(P):
            b = np.ascontiguousarray(oracle.bases[i], dtype=float)
            basis_m[i] = b.shape[0]
            basis_off[i] = off
            chunks.append(b.ravel())
            off += b.size
            pivot[block_start[i] : block_start[i] + block_dim[i]] = oracle.pivots[i]
            radius[i] = oracle.radii[i]
        basis_off[P] = off
        basis_data = np.concatenate(chunks) if chunks else np.zeros(1)
    else:
        return None

    ints = np.array(
        [ALGO[algorithm], GAME[name], P, okind, 0, NORM[norm], 0, dim, 0],
        dtype=np.int64,
    )
    flts = np.array([game_c, sigma, delta0, rho, 0.0, 0.0])
    return EnginePlan(
        ints=ints,
        flts=flts,
        block_start=block_start,
        block_dim=block_dim,
        dom_kind=dom_kind,
        reg_kind=reg_kind,
        lo=lo,
        hi=hi,
        thr=thr,
        A1=A1,
        A2=A2,
        pivot=pivot,
        radius=radius,
        basis_data=basis_data,
        basis_off=basis_off,
        basis_m=basis_m,
        dim=dim,
        nplayers=P,
        block_dims=tuple(int(d) for d in block_dim),
        oracle_kind=okind,
    )


def record_steps(N, thinning):
    """Step indices recorded in a run: every thinning-th plus the final one."""
    if thinning is None or thinning <= 0:
        return np.array([N], dtype=np.int64)
    ns = list(range(1, N + 1, thinning))
    if ns[-1] != N:
        ns.append(N)
    return np.array(ns, dtype=np.int64)


def _draw_block(plan, streams, t0, count):
    """Pregenerate the draws for steps [t0, t0+count); identical values to
    stepwise sampling because each player owns an independent stream."""
    ok = plan.oracle_kind
    if ok == 0:
        return np.zeros((1, 1)), np.zeros((1, 1), dtype=np.int64)
    if ok == 1:
        cols = [
            streams.player(i).standard_normal((count, d))
            for i, d in enumerate(plan.block_dims)
        ]
        return np.ascontiguousarray(np.concatenate(cols, axis=1)), np.zeros((1, 1), dtype=np.int64)
    if ok == 2:
        cols = [
            streams.player(i).integers(0, 2, (count, d))
            for i, d in enumerate(plan.block_dims)
        ]
        return np.zeros((1, 1)), np.ascontiguousarray(np.concatenate(cols, axis=1), dtype=np.int64)
    cols = [
        streams.player(i).integers(0, 2 * int(plan.basis_m[i]), (count, 1))
        for i in range(plan.nplayers)
    ]
    return np.zeros((1, 1)), np.ascontiguousarray(np.concatenate(cols, axis=1), dtype=np.int64)


def execute(
    plan: EnginePlan,
    algorithm,
    schedule_kind,
    gamma0,
    sched_p,
    N,
    thinning,
    y0,
    x0,
    streams,
    x_ref=None,
    norm="l2",
    window_frac=0.5,
    backend=None,
):
    kern = get_kernels(backend)
    ints = plan.ints.copy()
    flts = plan.flts.copy()
    ints[0] = ALGO[algorithm]
    ints[4] = SCHED[schedule_kind]
    ints[5] = NORM[norm]
    flts[4] = gamma0
    flts[5] = sched_p
    window_start = min(N, N - int(math.floor(window_frac * N)) + 1)
    ints[6] = window_start
    if x_ref is not None:
        ints[8] = 1
        ref = np.ascontiguousarray(x_ref, dtype=float)
    else:
        ints[8] = 0
        ref = np.zeros(plan.dim)

    y = np.array(y0, dtype=float).copy()
    x = np.array(x0, dtype=float).copy()
    rec_ns = record_steps(N, thinning)
    R = rec_ns.shape[0]
    rec_x = np.zeros((R, plan.dim))
    rec_y = np.zeros((R, plan.dim))
    rec_dist = np.zeros(R)
    cursor = np.zeros(1, dtype=np.int64)
    stats = np.zeros(2)

    n = 1
    while n <= N:
        count = min(CHUNK, N - n + 1)
        gauss, idraws = _draw_block(plan, streams, n, count)
        kern.advance_chunk(
            ints, flts,
            plan.block_start, plan.block_dim, plan.dom_kind, plan.reg_kind,
            plan.lo, plan.hi, plan.thr, plan.A1, plan.A2,
            plan.pivot, plan.radius, plan.basis_data, plan.basis_off, plan.basis_m,
            ref, y, x, n, count, gauss, idraws,
            rec_ns, rec_x, rec_y, rec_dist, cursor, stats,
        )
        n += count

    return {
        "ns": rec_ns,
        "xs": rec_x,
        "ys": rec_y,
        "dists": rec_dist if x_ref is not None else None,
        "final_x": rec_x[-1].copy(),
        "final_y": rec_y[-1].copy(),
        "window_max_dist": float(stats[0]) if x_ref is not None else None,
        "window_start": window_start,
        "saturated": bool(stats[1] > 0.0),
    }
