"""Robustness certification and regularized-learning dynamics for continuous
games on polyhedral action spaces.

Public surface: domain builders and the equilibrium certifier, regularizer
kernels with closed-form choice maps, the game catalog with metric and
perturbation utilities, feedback oracles, the iteration engines (compiled
core with a pure-Python fallback), and the Monte Carlo analysis layer.
"""

from . import analysis, domains, dynamics, feedback, games, lp, regularizers
from ._engine import backend_name as engine_backend
from .analysis import (
    ConvergenceCriterion,
    Experiment,
    MonteCarloSummary,
    RateFit,
    RecurrenceStats,
    classify_convergence,
    convergence_probability,
    fit_rate,
    recurrence_stats,
    sweep_map,
)
from .domains import (
    PlayerDomain,
    ProductDomain,
    RobustnessCertificate,
    TangentConeRep,
    Tolerances,
    active_set,
    box,
    classify_equilibrium,
    cone_generators,
    interval,
    lineality_dim,
    polytope,
    product,
    robustness_margin,
    simplex,
    tangent_cone,
)
from .dynamics import (
    RunConfig,
    StepSchedule,
    Trajectory,
    constant_step,
    power_step,
    run,
    run_ftrl,
    run_md,
    step_value,
    write_trajectory_csv,
)
from .feedback import (
    FeedbackSample,
    OracleSpec,
    RunStreams,
    empirical_bias,
    empirical_magnitude,
    perfect,
    sample_feedback,
    sfo_gaussian,
    sfo_rademacher,
    spsa,
    spsa_sample_at,
)
from .games import (
    Game,
    GameSpec,
    game_distance,
    gradient_field,
    make_bimatrix,
    make_boundary_quartic,
    make_game,
    make_interior_quadratic,
    make_linear_interval,
    make_zero,
    perturb_collapse1,
    perturb_collapse2,
    shift_gradient,
    uniform_payoff_distance,
)
from .lp import lp_solve
from .regularizers import (
    Kernel,
    RegularizerSpec,
    get_kernel,
    grad_h,
    mirror,
    mirror_bruteforce,
    rate_function,
    register_kernel,
)

__version__ = "0.1.0"
