"""Feedback oracles: perfect gradients, stochastic first-order noise, and
the single-point payoff-based estimator with pivot feasibility adjustment.

Randomness contract
-------------------
Every run owns a :class:`RunStreams`: one counter-based Philox generator per
player, spawned from a single seed.  A sample at step n consumes, in player
order,

* gaussian SFO:   d_i standard normals from player i's stream,
* rademacher SFO: d_i integers in {0,1} from player i's stream,
* payoff-based:   one integer in [0, 2 m_i) from player i's stream
                  (m_i = affine dimension; k < m_i means +basis row k,
                  otherwise -basis row k - m_i).

The iteration engines pregenerate the same draws in blocks; because the
per-player streams are independent, blockwise and stepwise consumption give
identical values, so single-sample calls reproduce engine runs exactly.

Feasibility of payoff-based queries: with delta_n <= r_i the queried point
x + (delta_n/r_i)(p_i - x) + delta_n w is a convex combination of x and
p_i + r_i w, both feasible, hence always inside the action set.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .domains import BOX, INTERVAL, ProductDomain
from .errors import ConfigError, ScheduleError

GAUSSIAN = "gaussian"
RADEMACHER = "rademacher"


@dataclass(frozen=True)
class NoiseSpec:
    kind: str
    sigma: float = 1.0

    def __post_init__(self):
        if self.kind not in (GAUSSIAN, RADEMACHER):
            # sub-Gaussian families only; heavy tails rejected here
            raise ConfigError(f"unsupported noise family '{self.kind}'", key="oracle.noise")
        if not self.sigma > 0:
            raise ConfigError("noise scale must be positive", key="oracle.noise")


@dataclass(frozen=True)
class OracleSpec:
    kind: str                      # "perfect" | "sfo" | "spsa"
    noise: NoiseSpec = None
    pivots: tuple = None           # per-player interior points
    radii: tuple = None            # per-player pivot radii
    delta0: float = None
    rho: float = None
    bases: tuple = field(default=None, repr=False)  # per-player direction rows

    def delta_at(self, n):
        return self.delta0 / float(n) ** self.rho


def perfect():
    return OracleSpec(kind="perfect")


def sfo_gaussian(sigma=1.0):
    return OracleSpec(kind="sfo", noise=NoiseSpec(kind=GAUSSIAN, sigma=float(sigma)))


def sfo_rademacher(sigma=1.0):
    return OracleSpec(kind="sfo", noise=NoiseSpec(kind=RADEMACHER, sigma=float(sigma)))


def _default_pivot(p):
    if p.kind in (INTERVAL, BOX):
        return (p.lo + p.hi) / 2.0
    verts = p.vertices()
    return sum(verts) / len(verts)


def _max_radius(p, pivot):
    """Largest t with pivot + t*w feasible for every signed basis direction."""
    best = math.inf
    for w in p.affine_basis:
        for s in (1.0, -1.0):
            t_lo, t_hi = 0.0, None
            step = 1.0
            while p.contains(pivot + s * (t_lo + step) * w, 1e-12):
                t_lo += step
            t_hi = t_lo + step
            for _ in range(60):
                mid = 0.5 * (t_lo + t_hi)
                if p.contains(pivot + s * mid * w, 1e-12):
                    t_lo = mid
                else:
                    t_hi = mid
            best = min(best, t_lo)
    return best


def spsa(domain: ProductDomain, delta0=0.1, rho=0.25, pivots=None, radii=None):
    """Payoff-based oracle with sampling radius delta_n = delta0 / n^rho.

    Default pivot: barycenter (simplex) or midpoint (interval/box).  Default
    radius: half the feasible reach from the pivot, enlarged up to the full
    reach when delta0 needs it so that delta_n <= r_i holds from step one.
    """
    delta0, rho = float(delta0), float(rho)
    if not 0.0 < rho < 0.5:
        raise ConfigError("spsa exponent must lie in (0, 1/2)", key="oracle.rho")
    if not delta0 > 0:
        raise ConfigError("spsa delta0 must be positive", key="oracle.delta0")
    pv, rr, bases = [], [], []
    for i, p in enumerate(domain.players):
        pivot = np.asarray(pivots[i], dtype=float) if pivots is not None else _default_pivot(p)
        if not p.contains(pivot, 1e-12):
            raise ConfigError(f"pivot of player {i} is infeasible", key="oracle.pivots")
        reach = _max_radius(p, pivot)
        if reach <= 0:
            raise ConfigError(f"pivot of player {i} is not interior", key="oracle.pivots")
        if radii is not None:
            r = float(radii[i])
            if not 0 < r <= reach + 1e-12:
                raise ConfigError(
                    f"radius of player {i} leaves the domain (max {reach:.6g})",
                    key="oracle.radii",
                )
        else:
            r = min(reach, max(reach / 2.0, delta0))
        pv.append(pivot)
        rr.append(r)
        bases.append(p.affine_basis.copy())
    return OracleSpec(
        kind="spsa",
        pivots=tuple(pv),
        radii=tuple(rr),
        delta0=delta0,
        rho=rho,
        bases=tuple(bases),
    )


@dataclass(frozen=True)
class FeedbackSample:
    signal: np.ndarray
    queried_point: np.ndarray
    delta: float = None
    directions: tuple = None

    def to_dict(self):
        return {
            "signal": [float(v) for v in self.signal],
            "queried_point": [float(v) for v in self.queried_point],
            "delta": self.delta,
            "directions": None
            if self.directions is None
            else [[float(v) for v in w] for w in self.directions],
        }


class RunStreams:
    """One independent Philox stream per player, spawned from one seed."""

    def __init__(self, seed, nplayers):
        if isinstance(seed, np.random.SeedSequence):
            root = seed
        else:
            root = np.random.SeedSequence(seed)
        self.seed = seed
        self.children = root.spawn(nplayers)
        self.generators = [np.random.Generator(np.random.Philox(c)) for c in self.children]

    def player(self, i):
        return self.generators[i]


def _sfo_noise(noise: NoiseSpec, gen, d):
    if noise.kind == GAUSSIAN:
        return noise.sigma * gen.standard_normal(d)
    return noise.sigma * (2.0 * gen.integers(0, 2, d) - 1.0)


def spsa_directions(oracle, streams_draws):
    out = []
    for i, k in enumerate(streams_draws):
        basis = oracle.bases[i]
        m = basis.shape[0]
        w = basis[k] if k < m else -basis[k - m]
        out.append(w)
    return out


def spsa_query(oracle, domain, x, delta, draws):
    """Joint perturbed query point for given direction draws at radius delta."""
    x = np.asarray(x, dtype=float)
    xq = np.empty_like(x)
    ws = spsa_directions(oracle, draws)
    for i in range(domain.nplayers):
        blk = domain.block(i)
        xi = x[blk]
        xd = xi + (delta / oracle.radii[i]) * (oracle.pivots[i] - xi)
        xq[blk] = xd + delta * ws[i]
    return xq, ws


def spsa_sample_at(oracle, game, x, delta, streams: RunStreams):
    """One payoff-based sample at a pinned radius (bias/magnitude studies)."""
    domain = game.domain
    if delta > min(oracle.radii) + 1e-12:
        raise ScheduleError(
            f"sampling radius {delta} exceeds the pivot radius {min(oracle.radii)}"
        )
    draws = [int(streams.player(i).integers(0, 2 * oracle.bases[i].shape[0]))
             for i in range(domain.nplayers)]
    xq, ws = spsa_query(oracle, domain, x, delta, draws)
    signal = np.empty(domain.total_dim)
    for i in range(domain.nplayers):
        m = oracle.bases[i].shape[0]
        u = game.payoff(i, xq)
        signal[domain.block(i)] = (m / delta) * u * ws[i]
    return FeedbackSample(signal=signal, queried_point=xq, delta=delta, directions=tuple(ws))


def spsa_min_step(oracle):
    """First step index at which delta_n fits inside every pivot radius."""
    r = min(oracle.radii)
    if oracle.delta0 <= r:
        return 1
    return int(math.ceil((oracle.delta0 / r) ** (1.0 / oracle.rho)))


def sample_feedback(oracle: OracleSpec, game, x, n, streams: RunStreams):
    """Draw one feedback sample at play ``x`` and step index ``n >= 1``."""
    domain = game.domain
    x = np.asarray(x, dtype=float)
    if oracle.kind == "perfect":
        return FeedbackSample(signal=game.gradient_field(x, check=False), queried_point=x.copy())
    if oracle.kind == "sfo":
        v = game.gradient_field(x, check=False)
        for i in range(domain.nplayers):
            blk = domain.block(i)
            v[blk] = v[blk] + _sfo_noise(oracle.noise, streams.player(i), domain.players[i].dim)
        return FeedbackSample(signal=v, queried_point=x.copy())
    if oracle.kind == "spsa":
        delta = oracle.delta_at(n)
        if delta > min(oracle.radii) + 1e-12:
            raise ScheduleError(
                f"delta_{n} = {delta:.6g} exceeds the pivot radius; "
                f"schedule usable from n = {spsa_min_step(oracle)}"
            )
        return spsa_sample_at(oracle, game, x, delta, streams)
    raise ConfigError(f"unknown oracle kind '{oracle.kind}'", key="oracle.kind")


def empirical_bias(oracle: OracleSpec, game, x, delta, M, streams: RunStreams):
    """Monte Carlo mean of (signal - V(x)) at a pinned sampling radius."""
    if oracle.kind != "spsa":
        raise ConfigError("bias estimation applies to payoff-based oracles", key="oracle.kind")
    x = np.asarray(x, dtype=float)
    V = game.gradient_field(x, check=False)
    acc = np.zeros_like(V)
    for _ in range(int(M)):
        acc += spsa_sample_at(oracle, game, x, delta, streams).signal
    return acc / M - V


def empirical_magnitude(oracle: OracleSpec, game, x, delta, M, streams: RunStreams, norm="linf"):
    """Largest signal norm over M draws at a pinned sampling radius."""
    x = np.asarray(x, dtype=float)
    best = 0.0
    for _ in range(int(M)):
        s = spsa_sample_at(oracle, game, x, delta, streams).signal
        v = float(np.max(np.abs(s))) if norm == "linf" else float(np.linalg.norm(s))
        best = max(best, v)
    return best
