import numpy as np
import pytest

import robusteq as rq
from robusteq.dynamics import RunConfig, constant_step, power_step, trajectory_csv_rows
from robusteq.errors import ConfigError


def cfg(horizon=20, gamma=0.1, init=("dual", [0.0]), seed=0, **kw):
    base = dict(
        algorithm="ftrl",
        step=constant_step(gamma),
        horizon=horizon,
        init=init,
        seed=seed,
        thinning=1,
    )
    base.update(kw)
    return RunConfig(**base)


def test_step_value_examples():
    assert rq.step_value(constant_step(0.1), 7) == 0.1
    assert rq.step_value(power_step(1.0, 1.0), 4) == 0.25
    assert rq.step_value(power_step(0.5, 0.6), 32) == 0.5 / 32**0.6


def test_ftrl_linear_entropic_closed_form():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("entropic", 1)
    traj = rq.run_ftrl(g, reg, g.domain, rq.perfect(), cfg(horizon=30, x_ref=[1.0]))
    # y_n = 0.1 (n-1), x_n = min(exp(y_n - 1), 1): saturates at n = 11
    for k, n in enumerate(traj.ns[:15]):
        y_expect = sum([0.1] * (int(n) - 1))
        assert traj.ys[k, 0] == y_expect
        assert traj.xs[k, 0] == pytest.approx(min(np.exp(y_expect - 1.0), 1.0), abs=1e-15)
    assert traj.xs[10, 0] == pytest.approx(1.0, abs=1e-12)  # n = 11
    assert np.all(traj.xs[11:, 0] == 1.0)


def test_ftrl_boundary_quartic_monotone_to_zero():
    g = rq.make_boundary_quartic()
    reg = rq.RegularizerSpec.uniform("entropic", 1)
    traj = rq.run_ftrl(g, reg, g.domain, rq.perfect(), cfg(horizon=3000))
    ys = traj.ys[:, 0]
    assert np.all(np.diff(ys) < 0)  # monotone dual descent
    assert traj.xs[-1, 0] < 1e-3 and np.all(np.diff(traj.xs[:, 0]) <= 0)


def test_zero_game_constant_play():
    dom = rq.product(rq.simplex(3))
    z = rq.make_zero(dom)
    reg = rq.RegularizerSpec.uniform("entropic", 1)
    traj = rq.run_ftrl(z, reg, dom, rq.perfect(), cfg(horizon=50, init=("dual", [0.3, -1.0, 0.2])))
    assert np.all(traj.xs == traj.xs[0])


def test_ftrl_state_identity_exact():
    g = rq.make_bimatrix(np.eye(2), np.eye(2))
    reg = rq.RegularizerSpec.uniform("entropic", 2)
    c = cfg(horizon=500, init=("dual", [0.5, 0.0, -0.2, 0.1]), seed=5, thinning=13)
    for backend in (None, "generic"):
        traj = rq.run_ftrl(g, reg, g.domain, rq.sfo_gaussian(1.0), c, backend=backend)
        for k in range(traj.ns.shape[0]):
            re_mirrored = rq.mirror(reg, g.domain, traj.ys[k])
            assert np.array_equal(re_mirrored, traj.xs[k])


def test_seed_determinism():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    c = cfg(horizon=400, seed=21)
    a = rq.run_ftrl(g, reg, g.domain, rq.sfo_gaussian(1.0), c)
    b = rq.run_ftrl(g, reg, g.domain, rq.sfo_gaussian(1.0), c)
    assert np.array_equal(a.xs, b.xs) and np.array_equal(a.ys, b.ys)
    c2 = cfg(horizon=400, seed=22)
    d = rq.run_ftrl(g, reg, g.domain, rq.sfo_gaussian(1.0), c2)
    assert not np.array_equal(a.ys, d.ys)


def test_primal_init_lift():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("entropic", 1)
    traj = rq.run_ftrl(g, reg, g.domain, rq.perfect(), cfg(init=("primal", [np.exp(-1.0)])))
    assert traj.ys[0, 0] == pytest.approx(0.0, abs=1e-14)
    assert traj.xs[0, 0] == pytest.approx(np.exp(-1.0), abs=1e-14)


def test_md_quadratic_matches_ftrl_while_interior():
    g = rq.make_interior_quadratic(0.5)
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    c_md = cfg(horizon=60, gamma=0.05, init=("primal", [0.1]), algorithm="md")
    c_fl = cfg(horizon=60, gamma=0.05, init=("dual", [0.1]))
    md = rq.run_md(g, reg, g.domain, rq.perfect(), c_md)
    fl = rq.run_ftrl(g, reg, g.domain, rq.perfect(), c_fl)
    assert np.allclose(md.xs, fl.xs, atol=1e-12)


def test_md_steep_delegates_to_ftrl_identically():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("entropic", 1)
    x0 = float(np.exp(-0.5))
    c_md = cfg(horizon=300, seed=9, init=("primal", [x0]), algorithm="md")
    y0 = rq.grad_h(reg, g.domain, [x0])
    c_fl = cfg(horizon=300, seed=9, init=("dual", y0))
    md = rq.run_md(g, reg, g.domain, rq.sfo_gaussian(1.0), c_md)
    fl = rq.run_ftrl(g, reg, g.domain, rq.sfo_gaussian(1.0), c_fl)
    assert np.array_equal(md.xs, fl.xs) and np.array_equal(md.ys, fl.ys)


def test_md_requires_primal_init_in_mirror_image():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    with pytest.raises(ConfigError):
        rq.run_md(g, reg, g.domain, rq.perfect(), cfg(algorithm="md", init=("dual", [0.5])))


def test_mirror_step_escape_event_at_boundary():
    """Eager mirror steps leave a boundary optimum under signed noise.

    With play pinned at the right endpoint and signal 1 + U, a realized
    signal of -1 (U = -2) moves the next play to 1 - gamma; the stated
    escape event needs that sign convention, and it fires with frequency
    about one half.  The dual-averaging update started deep in the dual
    cone absorbs the same draws without moving.
    """
    g = rq.make_linear_interval()
    dom = g.domain
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    gamma = 0.1
    rng = np.random.default_rng(0)
    x = np.array([1.0])
    escapes = 0
    trials = 2000
    y_dual = np.array([3.0])
    dual_moves = 0
    for _ in range(trials):
        u = -2.0 if rng.integers(0, 2) == 0 else 0.0
        v = 1.0 + u
        nxt = rq.mirror(reg, dom, rq.grad_h(reg, dom, x) + gamma * v)
        if v < 0:
            assert nxt[0] == pytest.approx(1.0 - gamma, abs=1e-15)
            escapes += 1
        else:
            assert nxt[0] == 1.0
        y_dual = y_dual + gamma * v
        if rq.mirror(reg, dom, y_dual)[0] != 1.0:
            dual_moves += 1
    assert escapes / trials == pytest.approx(0.5, abs=0.05)
    assert dual_moves == 0


def test_saturation_flag_instead_of_error():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    traj = rq.run_ftrl(g, reg, g.domain, rq.perfect(), cfg(horizon=30, gamma=1e299))
    assert traj.saturated
    assert np.max(traj.ys) <= 1e300


def test_dual_drift_at_robust_points():
    # along every certifier generator the dual pairing eventually decreases
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("entropic", 1)
    traj = rq.run_ftrl(g, reg, g.domain, rq.perfect(), cfg(horizon=100, init=("dual", [3.0])))
    gens = rq.cone_generators(rq.tangent_cone(g.domain, np.array([1.0])))
    for z in gens:
        pair = traj.ys @ z
        assert np.all(np.diff(pair) < 0)
    bi = rq.make_bimatrix(np.eye(2), np.eye(2))
    rege = rq.RegularizerSpec.uniform("entropic", 2)
    traj = rq.run_ftrl(
        bi, rege, bi.domain, rq.perfect(),
        cfg(horizon=200, init=("dual", [3.0, 0.0, 3.0, 0.0])),
    )
    ref = np.array([1.0, 0.0, 1.0, 0.0])
    gens = rq.cone_generators(rq.tangent_cone(bi.domain, ref))
    for z in gens:
        pair = traj.ys[20:] @ z
        assert np.all(np.diff(pair) < 0)


def test_every_recorded_play_feasible():
    combos = [
        (rq.make_linear_interval(), "entropic", rq.sfo_gaussian(1.0)),
        (rq.make_boundary_quartic(), "sqrt", rq.sfo_gaussian(1.0)),
        (rq.make_bimatrix(np.eye(2), np.eye(2)), "quadratic", None),
    ]
    for game, reg_name, oracle in combos:
        nP = game.nplayers
        reg = rq.RegularizerSpec.uniform(reg_name, nP)
        oracle = oracle or rq.spsa(game.domain, 0.5, 0.25)
        init = ("dual", np.zeros(game.domain.total_dim))
        traj = rq.run_ftrl(game, reg, game.domain, oracle, cfg(horizon=800, seed=2, init=init))
        for x in traj.xs:
            assert game.domain.contains(x, 1e-10)


def test_converged_runs_end_at_stationary_points():
    # perfect-feedback runs that settle settle only on stationary points
    setups = [
        (rq.make_linear_interval(), "entropic", [0.0]),
        (rq.make_linear_interval(), "quadratic", [0.3]),
        (rq.make_boundary_quartic(), "entropic", [0.5]),
        (rq.make_interior_quadratic(0.5), "quadratic", [0.9]),
        (rq.make_bimatrix(np.eye(2), np.eye(2)), "entropic", [1.0, 0.0, 1.0, 0.0]),
    ]
    for game, reg_name, y0 in setups:
        reg = rq.RegularizerSpec.uniform(reg_name, game.nplayers)
        traj = rq.run_ftrl(game, reg, game.domain, rq.perfect(),
                           cfg(horizon=4000, gamma=0.05, init=("dual", y0)))
        tail = traj.xs[-50:]
        if np.max(np.abs(tail - tail[-1])) <= 1e-7:  # settled
            cert = rq.classify_equilibrium(game, tail[-1], rq.Tolerances(stat_tol=1e-5))
            assert cert.verdict != "NotStationary"


def test_csv_round_trip_and_stability():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("entropic", 1)
    oracle = rq.spsa(g.domain, 0.5, 0.25)
    c = cfg(horizon=100, seed=13, x_ref=[1.0], thinning=7)
    rows1 = list(trajectory_csv_rows(rq.run_ftrl(g, reg, g.domain, oracle, c), oracle))
    rows2 = list(trajectory_csv_rows(rq.run_ftrl(g, reg, g.domain, oracle, c), oracle))
    assert rows1 == rows2
    assert rows1[0] == "n,x0,y0,dist_ref,delta_n,gamma_n"
    # shortest round-trip float formatting: parsing a cell reproduces the value
    val = rows1[3].split(",")[2]
    assert repr(float(val)) == val


def test_thinning_zero_records_only_final():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    traj = rq.run_ftrl(g, reg, g.domain, rq.perfect(), cfg(horizon=57, thinning=0))
    assert list(traj.ns) == [57]


def test_single_step_horizon_window_consistent():
    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    traj = rq.run_ftrl(g, reg, g.domain, rq.perfect(),
                       cfg(horizon=1, init=("dual", [0.4]), x_ref=[1.0]))
    assert traj.window_start == 1
    assert traj.window_max_dist == pytest.approx(0.6)


def test_engine_rejects_unusable_spsa_schedule_upfront():
    # the generic loop would raise at the first sample; the kernel path must
    # refuse identically instead of producing infeasible queries
    from robusteq.errors import ScheduleError

    g = rq.make_linear_interval()
    reg = rq.RegularizerSpec.uniform("quadratic", 1)
    oracle = rq.spsa(g.domain, delta0=0.4, rho=0.25, pivots=[[0.5]], radii=[0.2])
    for backend in (None, "generic"):
        with pytest.raises(ScheduleError):
            rq.run_ftrl(g, reg, g.domain, oracle, cfg(horizon=10), backend=backend)
