"""Convergence classification, Monte Carlo sweeps, rate fits and
recurrence/transience diagnostics.

Almost-sure statements are sampled, never proved: a finite-horizon run is
declared converged when the distance to the reference stays below eps over
the final window, and ensembles of seeded runs turn limit statements into
fractions compared against pre-registered thresholds.  Wilson intervals
quantify the Monte Carlo error of those fractions.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace

import numpy as np

from .dynamics import RunConfig, Trajectory, run, window_start_index
from .errors import MissingReferenceError

_WILSON_Z = 1.959963984540054


@dataclass(frozen=True)
class ConvergenceCriterion:
    x_ref: np.ndarray
    eps: float
    window_frac: float = 0.5


def classify_convergence(traj: Trajectory, crit: ConvergenceCriterion):
    """True iff the distance to the reference is <= eps at every step of the
    final window.  Uses the engine's online window maximum when the run was
    configured with the matching reference, else the recorded distances."""
    ref = np.asarray(crit.x_ref, dtype=float)
    if (
        traj.window_max_dist is not None
        and traj.x_ref is not None
        and traj.config.window_frac == crit.window_frac
        and np.array_equal(traj.x_ref, ref)
    ):
        return bool(traj.window_max_dist <= crit.eps)
    if traj.dists is None or traj.ns.size == 0:
        raise MissingReferenceError("trajectory carries no distance stream for this reference")
    wstart = window_start_index(int(traj.config.horizon), crit.window_frac)
    mask = traj.ns >= wstart
    if not np.any(mask):
        raise MissingReferenceError("no recorded step falls inside the final window")
    return bool(np.max(traj.dists[mask]) <= crit.eps)


@dataclass(frozen=True)
class MonteCarloSummary:
    runs: int
    converged: int
    aborted: int
    estimate: float
    wilson_low: float
    wilson_high: float

    def to_dict(self):
        return {
            "runs": self.runs,
            "converged": self.converged,
            "aborted": self.aborted,
            "estimate": self.estimate,
            "wilson95": [self.wilson_low, self.wilson_high],
        }


def wilson_interval(k, n, z=_WILSON_Z):
    if n == 0:
        return 0.0, 1.0
    p = k / n
    denom = 1.0 + z * z / n
    center = (p + z * z / (2 * n)) / denom
    half = z * math.sqrt(p * (1 - p) / n + z * z / (4 * n * n)) / denom
    # widened to contain the point estimate (matters at k = 0 and k = n)
    return max(0.0, min(p, center - half)), min(1.0, max(p, center + half))


@dataclass(frozen=True)
class Experiment:
    """Everything needed to repeat one seeded run: specs plus a config
    template whose seed is replaced per run."""

    game: object
    reg: object
    domain: object
    oracle: object
    run_template: RunConfig

    def run_with_seed(self, seed, backend=None):
        cfg = replace(self.run_template, seed=seed)
        return run(self.game, self.reg, self.domain, self.oracle, cfg, backend=backend)


def derive_seeds(base_seed, M):
    """Deterministic per-run integer seeds from one base seed."""
    return [int(s) for s in np.random.SeedSequence(base_seed).generate_state(M, np.uint64)]


def sweep_map(experiment: Experiment, M, fn, jobs=1, base_seed=0, backend=None):
    """Run M seeded simulations and map ``fn`` over the trajectories.

    Results are keyed by run index, so the outcome is independent of the
    execution order of the worker threads.
    """
    seeds = derive_seeds(base_seed, M)

    def one(i):
        return fn(experiment.run_with_seed(seeds[i], backend=backend))

    if jobs <= 1:
        return [one(i) for i in range(M)]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(one, range(M)))


def convergence_probability(
    experiment: Experiment, M, crit: ConvergenceCriterion, jobs=1, base_seed=0, backend=None
):
    """Fraction of seeded runs meeting the criterion, with a Wilson 95%
    interval.  Saturated/diverged runs count as non-converged and are
    tallied separately."""

    def outcome(traj):
        if traj.saturated:
            return "aborted"
        return "converged" if classify_convergence(traj, crit) else "diverged"

    tmpl = experiment.run_template
    if tmpl.x_ref is None or not np.array_equal(
        np.asarray(tmpl.x_ref, float), np.asarray(crit.x_ref, float)
    ) or tmpl.window_frac != crit.window_frac:
        experiment = replace(
            experiment,
            run_template=replace(
                tmpl, x_ref=np.asarray(crit.x_ref, float), window_frac=crit.window_frac
            ),
        )
    outcomes = sweep_map(experiment, M, outcome, jobs=jobs, base_seed=base_seed, backend=backend)
    k = sum(1 for o in outcomes if o == "converged")
    aborted = sum(1 for o in outcomes if o == "aborted")
    lo, hi = wilson_interval(k, M)
    return MonteCarloSummary(
        runs=M, converged=k, aborted=aborted, estimate=k / M, wilson_low=lo, wilson_high=hi
    )


# ---------------------------------------------------------------------------
# rate fits
# ---------------------------------------------------------------------------

GEOMETRIC_LOG = "GeometricLog"
POWER_LOG = "PowerLog"


@dataclass(frozen=True)
class RateFit:
    model: str
    slope: float
    intercept: float
    r_squared: float
    burn_in: int
    n_points: int
    finite_time_hit: int = None

    def to_dict(self):
        return {
            "model": self.model,
            "slope": self.slope,
            "intercept": self.intercept,
            "r_squared": self.r_squared,
            "burn_in": self.burn_in,
            "n_points": self.n_points,
            "finite_time_hit": self.finite_time_hit,
        }


def _distances(traj, x_ref):
    if traj.xs.size == 0:
        raise MissingReferenceError("trajectory has no recorded states")
    ref = np.asarray(x_ref, dtype=float)
    return np.linalg.norm(traj.xs - ref[None, :], axis=1)


def fit_rate(traj: Trajectory, x_ref, model=GEOMETRIC_LOG, burn_in_frac=0.2):
    """Least squares in log coordinates: log dist against n (geometric) or
    against log n (power).  An exactly-zero tail is reported as a
    finite-time hit instead of a slope."""
    d = _distances(traj, x_ref)
    ns = traj.ns.astype(float)
    burn = int(math.floor(burn_in_frac * traj.config.horizon))
    keep = traj.ns > burn
    d_keep, n_keep = d[keep], ns[keep]

    zero = d_keep == 0.0
    if np.all(zero) and zero.size:
        hit = int(traj.ns[np.nonzero(d == 0.0)[0][0]])
        return RateFit(
            model=model, slope=float("-inf"), intercept=float("-inf"),
            r_squared=1.0, burn_in=burn, n_points=int(zero.size), finite_time_hit=hit,
        )
    pos = d_keep > 0.0
    if np.count_nonzero(pos) < 20:
        raise MissingReferenceError("need at least 20 positive post-burn-in distances")
    yv = np.log(d_keep[pos])
    xv = n_keep[pos] if model == GEOMETRIC_LOG else np.log(n_keep[pos])
    A = np.stack([xv, np.ones_like(xv)], axis=1)
    coef, *_ = np.linalg.lstsq(A, yv, rcond=None)
    fitted = A @ coef
    ss_res = float(np.sum((yv - fitted) ** 2))
    ss_tot = float(np.sum((yv - np.mean(yv)) ** 2))
    r2 = 1.0 if ss_tot == 0.0 and ss_res == 0.0 else max(0.0, 1.0 - ss_res / ss_tot)
    return RateFit(
        model=model, slope=float(coef[0]), intercept=float(coef[1]),
        r_squared=min(1.0, r2), burn_in=burn, n_points=int(np.count_nonzero(pos)),
    )


# ---------------------------------------------------------------------------
# recurrence/transience diagnostics
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class RecurrenceStats:
    returns: int
    last_return_index: int
    max_excursion: float

    def to_dict(self):
        return {
            "returns": self.returns,
            "last_return_index": self.last_return_index,
            "max_excursion": self.max_excursion,
        }


def recurrence_stats(traj: Trajectory, level):
    """Return statistics of the negated scalar dual state against a level.

    ``returns`` counts down-crossings (recorded steps where z = -y drops
    below the level after sitting at or above it); ``last_return_index`` is
    the last recorded step spent below the level, i.e. the end of the last
    return visit (0 when the process never visits).  A recurrent-looking
    run keeps visiting through the end of the horizon; a transient one
    leaves early and never comes back.
    """
    if traj.ys.shape[1] != 1:
        raise MissingReferenceError("recurrence stats need a scalar dual state (1-player runs)")
    z = -traj.ys[:, 0]
    below = z < level
    cross = below[1:] & ~below[:-1]
    returns = int(np.count_nonzero(cross))
    visits = np.nonzero(below)[0]
    last = int(traj.ns[visits[-1]]) if visits.size else 0
    return RecurrenceStats(
        returns=returns,
        last_return_index=last,
        max_excursion=float(np.max(z) - level),
    )
