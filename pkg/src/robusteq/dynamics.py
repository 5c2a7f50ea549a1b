"""Iteration engines: dual-averaging updates and their eager mirror variant.

Both engines share the step semantics

    play   x_n   (mirror of the dual state, or the primal state itself),
    sample v_n   from the feedback oracle at x_n and step index n,
    update       dual-averaging: y_{n+1} = y_n + gamma_n v_n
                 mirror step:    x_{n+1} = Q(grad_h(x_n) + gamma_n v_n).

For steep kernels the two coincide and the mirror-step engine delegates to
the dual-averaging one (a primal initial point is lifted through grad_h).

Dispatch: recognized (catalog game, builtin kernel, interval/simplex,
perfect/sfo/spsa) combinations run on the chunked kernel backend selected at
import in ``_engine``; anything else runs on the generic object-stepping
loop below, which consumes the identical per-player draw streams.

Dual components are clamped at +-1e300 with a saturation flag instead of
erroring: a diverging dual state is the *convergent* regime in primal terms,
and rate fits downstream still need the trajectory.
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from ._engine import driver
from .errors import ConfigError, ScheduleError
from .feedback import OracleSpec, RunStreams, sample_feedback, spsa_min_step
from .regularizers import RegularizerSpec, grad_h, mirror

CLAMP = 1e300

_NORMS = {
    "l2": lambda d: float(np.linalg.norm(d)),
    "l1": lambda d: float(np.sum(np.abs(d))),
    "linf": lambda d: float(np.max(np.abs(d), initial=0.0)),
}


@dataclass(frozen=True)
class StepSchedule:
    kind: str          # "constant" | "power"
    gamma0: float
    p: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "power"):
            raise ConfigError(f"unknown step schedule '{self.kind}'", key="run.step")
        if not self.gamma0 > 0:
            raise ConfigError("step size must be positive", key="run.step")
        if self.kind == "power" and not 0.0 <= self.p <= 1.0:
            raise ConfigError("power-schedule exponent must lie in [0, 1]", key="run.step")


def constant_step(gamma):
    return StepSchedule(kind="constant", gamma0=float(gamma))


def power_step(gamma0, p):
    return StepSchedule(kind="power", gamma0=float(gamma0), p=float(p))


def step_value(schedule: StepSchedule, n):
    if n < 1:
        raise ValueError("step index starts at 1")
    if schedule.kind == "constant":
        return schedule.gamma0
    return schedule.gamma0 / float(n) ** schedule.p


@dataclass(frozen=True)
class RunConfig:
    algorithm: str                      # "ftrl" | "md"
    step: StepSchedule
    horizon: int
    init: tuple                         # ("dual", vec) | ("primal", vec)
    seed: object = 0
    thinning: int = 1                   # 0/None: record only the final state
    norm: str = "l2"
    window_frac: float = 0.5
    x_ref: object = None

    def __post_init__(self):
        if self.algorithm not in ("ftrl", "md"):
            raise ConfigError(f"unknown algorithm '{self.algorithm}'", key="run.algorithm")
        if self.horizon < 1:
            raise ConfigError("horizon must be >= 1", key="run.horizon")
        if self.init[0] not in ("dual", "primal"):
            raise ConfigError("init must be dual or primal", key="run.init")
        if self.norm not in _NORMS:
            raise ConfigError(f"unknown norm '{self.norm}'", key="run.norm")


@dataclass
class Trajectory:
    ns: np.ndarray
    xs: np.ndarray
    ys: np.ndarray
    dists: np.ndarray            # None when no reference configured
    final_x: np.ndarray
    final_y: np.ndarray
    saturated: bool
    window_max_dist: float       # None when no reference
    window_start: int
    config: RunConfig
    game_label: str
    oracle_kind: str
    engine: str
    x_ref: np.ndarray = None

    def gamma_at(self, n):
        return step_value(self.config.step, int(n))

    def summary_dict(self):
        return {
            "final_dist": None
            if self.x_ref is None
            else _NORMS[self.config.norm](self.final_x - self.x_ref),
            "saturation": self.saturated,
            "seed": self.config.seed,
            "horizon": self.config.horizon,
            "engine": self.engine,
        }


def window_start_index(N, window_frac):
    """First step of the final observation window: n >= N - floor(f*N) + 1,
    clamped so that the window is never empty."""
    return min(N, N - int(math.floor(window_frac * N)) + 1)


def _initial_dual(reg, domain, cfg):
    kind, vec = cfg.init
    vec = np.asarray(vec, dtype=float)
    if vec.shape != (domain.total_dim,):
        raise ConfigError("init vector has wrong dimension", key="run.init")
    if kind == "dual":
        return vec.copy()
    return grad_h(reg, domain, vec)


def run_ftrl(game, reg: RegularizerSpec, domain, oracle: OracleSpec, cfg: RunConfig,
             backend=None):
    """Dual-averaging run: deterministic given (config, specs, seed)."""
    y0 = _initial_dual(reg, domain, cfg)
    mirror(reg, domain, y0)  # validates every (kernel, domain) pair upfront
    return _run(game, reg, domain, oracle, replace(cfg, algorithm="ftrl"), y0, None, backend)


def run_md(game, reg: RegularizerSpec, domain, oracle: OracleSpec, cfg: RunConfig,
           backend=None):
    """Eager mirror-step run; steep kernels delegate to the dual-averaging
    engine (the two recursions coincide when the mirror map is injective)."""
    if any(k.steep for k in reg.kernels):
        if cfg.init[0] == "primal":
            y0 = grad_h(reg, domain, np.asarray(cfg.init[1], dtype=float))
            cfg = replace(cfg, init=("dual", y0))
        return run_ftrl(game, reg, domain, oracle, cfg, backend=backend)
    if cfg.init[0] != "primal":
        raise ConfigError("the mirror-step engine needs a primal initial point", key="run.init")
    x0 = np.asarray(cfg.init[1], dtype=float)
    lifted = mirror(reg, domain, grad_h(reg, domain, x0))
    if not np.allclose(lifted, x0, atol=1e-9):
        raise ConfigError("primal init is outside the mirror image", key="run.init")
    return _run(game, reg, domain, oracle, replace(cfg, algorithm="md"), None, x0, backend)


def _run(game, reg, domain, oracle, cfg, y0, x0, backend):
    if oracle.kind == "spsa":
        n_min = spsa_min_step(oracle)
        if n_min > 1:
            raise ScheduleError(
                f"sampling radius exceeds the pivot radius until step {n_min}; "
                "shrink delta0 or enlarge the radii"
            )
    plan = driver.compile_plan(game, reg, domain, oracle, cfg.algorithm, cfg.norm)
    use_generic = backend == "generic" or plan is None
    streams = RunStreams(cfg.seed, domain.nplayers)
    if use_generic:
        out = _generic_loop(game, reg, domain, oracle, cfg, y0, x0, streams)
        engine = "generic"
    else:
        out = driver.execute(
            plan,
            cfg.algorithm,
            cfg.step.kind,
            cfg.step.gamma0,
            cfg.step.p,
            cfg.horizon,
            cfg.thinning,
            y0 if y0 is not None else np.zeros(domain.total_dim),
            x0 if x0 is not None else np.zeros(domain.total_dim),
            streams,
            x_ref=cfg.x_ref,
            norm=cfg.norm,
            window_frac=cfg.window_frac,
            backend=backend,
        )
        mod = driver.get_kernels(backend).__name__
        engine = "compiled" if mod.endswith("_core") else "pure"
    return Trajectory(
        ns=out["ns"],
        xs=out["xs"],
        ys=out["ys"],
        dists=out["dists"],
        final_x=out["final_x"],
        final_y=out["final_y"],
        saturated=out["saturated"],
        window_max_dist=out["window_max_dist"],
        window_start=out["window_start"],
        config=cfg,
        game_label=game.label,
        oracle_kind=oracle.kind,
        engine=engine,
        x_ref=None if cfg.x_ref is None else np.asarray(cfg.x_ref, dtype=float),
    )


def _generic_loop(game, reg, domain, oracle, cfg, y0, x0, streams):
    """Object-stepping reference loop; handles every registered pair."""
    N = cfg.horizon
    dim = domain.total_dim
    rec_ns = driver.record_steps(N, cfg.thinning)
    R = rec_ns.shape[0]
    rec_x = np.zeros((R, dim))
    rec_y = np.zeros((R, dim))
    rec_dist = np.full(R, np.nan)
    has_ref = cfg.x_ref is not None
    ref = None if not has_ref else np.asarray(cfg.x_ref, dtype=float)
    norm = _NORMS[cfg.norm]
    wstart = window_start_index(N, cfg.window_frac)
    window_max = 0.0
    saturated = False
    pos = 0
    md = cfg.algorithm == "md"
    y = None if md else y0.copy()
    x = x0.copy() if md else None
    for n in range(1, N + 1):
        if md:
            y = grad_h(reg, domain, x)
        else:
            x = mirror(reg, domain, y)
        if has_ref:
            d = norm(x - ref)
            if n >= wstart and d > window_max:
                window_max = d
        if pos < R and rec_ns[pos] == n:
            rec_x[pos] = x
            rec_y[pos] = y
            if has_ref:
                rec_dist[pos] = norm(x - ref)
            pos += 1
        v = sample_feedback(oracle, game, x, n, streams).signal
        gamma = step_value(cfg.step, n)
        target = y + gamma * v
        clipped = np.clip(target, -CLAMP, CLAMP)
        if not np.array_equal(clipped, target):
            saturated = True
        if md:
            x = mirror(reg, domain, clipped)
        else:
            y = clipped
    return {
        "ns": rec_ns,
        "xs": rec_x,
        "ys": rec_y,
        "dists": rec_dist if has_ref else None,
        "final_x": rec_x[-1].copy(),
        "final_y": rec_y[-1].copy(),
        "window_max_dist": window_max if has_ref else None,
        "window_start": wstart,
        "saturated": saturated,
    }


def run(game, reg, domain, oracle, cfg: RunConfig, backend=None):
    if cfg.algorithm == "md":
        return run_md(game, reg, domain, oracle, cfg, backend=backend)
    return run_ftrl(game, reg, domain, oracle, cfg, backend=backend)


# ---------------------------------------------------------------------------
# CSV serialization (shortest round-trip float formatting for golden files)
# ---------------------------------------------------------------------------


def _fmt(v):
    if v is None or (isinstance(v, float) and math.isnan(v)):
        return ""
    return repr(float(v))


def trajectory_csv_rows(traj: Trajectory, oracle: OracleSpec = None):
    dim = traj.xs.shape[1] if traj.xs.size else traj.final_x.shape[0]
    spsa = oracle is not None and oracle.kind == "spsa"
    header = (
        ["n"]
        + [f"x{j}" for j in range(dim)]
        + [f"y{j}" for j in range(dim)]
        + ["dist_ref"]
        + (["delta_n"] if spsa else [])
        + ["gamma_n"]
    )
    yield ",".join(header)
    for k in range(traj.ns.shape[0]):
        n = int(traj.ns[k])
        row = [str(n)]
        row += [_fmt(traj.xs[k, j]) for j in range(dim)]
        row += [_fmt(traj.ys[k, j]) for j in range(dim)]
        row.append(_fmt(traj.dists[k]) if traj.dists is not None else "")
        if spsa:
            row.append(_fmt(oracle.delta_at(n)))
        row.append(_fmt(traj.gamma_at(n)))
        yield ",".join(row)


def write_trajectory_csv(path, traj: Trajectory, oracle: OracleSpec = None):
    with open(path, "w") as fh:
        for line in trajectory_csv_rows(traj, oracle):
            fh.write(line + "\n")
