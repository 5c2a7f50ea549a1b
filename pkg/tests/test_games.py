import numpy as np
import pytest

import robusteq as rq
from robusteq.domains import VERDICT_NOT_STATIONARY, VERDICT_ROBUST, quasirandom_points
from robusteq.errors import ConstructionError, InfeasiblePointError
from robusteq.games import GameSpec, finite_difference_grad


def catalog_games():
    return [
        rq.make_linear_interval(),
        rq.make_boundary_quartic(),
        rq.make_interior_quadratic(0.5),
        rq.make_interior_quadratic(-0.25),
        rq.make_bimatrix([[1.0, 0.0], [0.0, 1.0]], [[1.0, 0.0], [0.0, 1.0]]),
    ]


def test_catalog_gradients():
    lin = rq.make_linear_interval()
    assert lin.gradient_field(np.array([0.3]))[0] == 1.0
    bq = rq.make_boundary_quartic()
    assert bq.gradient_field(np.array([0.0]))[0] == 0.0
    assert bq.gradient_field(np.array([0.729]))[0] == pytest.approx(-0.9)
    bi = rq.make_bimatrix(np.eye(2), np.eye(2))
    V = bi.gradient_field(np.array([1.0, 0.0, 1.0, 0.0]))
    assert np.allclose(V, [1.0, 0.0, 1.0, 0.0])


def test_make_game_from_spec():
    g = rq.make_game(GameSpec(name="interior_quadratic", params={"c": 0.25}))
    assert g.gradient_field(np.array([0.25]))[0] == 0.0
    with pytest.raises(ConstructionError):
        rq.make_game(GameSpec(name="nope"))


def test_gradient_field_checks_membership():
    lin = rq.make_linear_interval()
    with pytest.raises(InfeasiblePointError):
        lin.gradient_field(np.array([1.5]))


@pytest.mark.parametrize("game", catalog_games(), ids=lambda g: g.label)
def test_analytic_matches_finite_differences(game):
    rng = np.random.default_rng(0)
    pts = [p for p in quasirandom_points(game.domain, 140)
           if game.domain.contains(p, 1e-9)][:100]
    assert len(pts) == 100
    for x in pts:
        # keep strictly inside so central differences stay feasible
        x = 0.98 * x + 0.02 * np.concatenate(
            [np.full(p.dim, 1.0 / p.dim) if p.kind == "simplex" else (p.lo + p.hi) / 2
             for p in game.domain.players]
        )
        for i in range(game.nplayers):
            a = game.grad(i, x)
            f = finite_difference_grad(lambda z, i=i: game.payoff(i, z), game.domain, i, x)
            if game.domain.players[i].kind == "simplex":
                # payoffs only matter on the hull; compare tangential parts
                a = a - a.mean()
                f = f - f.mean()
            scale = max(1.0, float(np.max(np.abs(a))))
            assert np.max(np.abs(a - f)) / scale <= 1e-5


def test_bimatrix_gradients_bilinear():
    A1 = np.array([[1.0, -2.0], [0.5, 3.0]])
    A2 = np.array([[0.0, 1.0], [2.0, -1.0]])
    g = rq.make_bimatrix(A1, A2)
    rng = np.random.default_rng(4)
    for _ in range(20):
        x2 = rng.dirichlet([1, 1])
        p, q = rng.dirichlet([1, 1]), rng.dirichlet([1, 1])
        al = rng.uniform()
        mix = np.concatenate([al * p + (1 - al) * q, x2])
        a = game_grad_block(g, 0, np.concatenate([p, x2]))
        b = game_grad_block(g, 0, np.concatenate([q, x2]))
        # player 1's gradient depends only on the opponent: constant in x1
        assert np.allclose(game_grad_block(g, 0, mix), a) and np.allclose(a, b)
        # player 2's gradient interpolates linearly in x1
        ga = game_grad_block(g, 1, np.concatenate([p, x2]))
        gb = game_grad_block(g, 1, np.concatenate([q, x2]))
        gm = game_grad_block(g, 1, mix)
        assert np.allclose(gm, al * ga + (1 - al) * gb)


def game_grad_block(g, i, x):
    return g.grad(i, x)


def test_distance_of_identical_games_is_zero():
    g = rq.make_linear_interval()
    g2 = rq.make_linear_interval()
    assert rq.game_distance(g, g2, samples=64) == 0.0
    assert rq.uniform_payoff_distance(g, g2, samples=64) == 0.0


def test_distance_rejects_domain_mismatch():
    with pytest.raises(ConstructionError):
        rq.game_distance(rq.make_linear_interval(), rq.make_bimatrix(np.eye(2), np.eye(2)))


def test_constant_tilt_distances():
    # constant gradient shift: both metrics are exact on any sample set
    g = rq.make_interior_quadratic(0.5)
    x_star = np.array([0.5])
    tilted = rq.perturb_collapse2(g, 0, x_star, 0.2, np.array([1.0]))
    assert rq.game_distance(g, tilted, samples=64) == pytest.approx(0.2, abs=1e-12)
    assert rq.uniform_payoff_distance(g, tilted, samples=64) <= 0.2 + 1e-12
    v = tilted.gradient_field(x_star)
    assert v[0] == pytest.approx(0.2, abs=1e-12)  # eps/(diam*|y|) * y with unit factors
    assert float(v @ (np.array([1.0]) - x_star)) == pytest.approx(0.1, abs=1e-12)


def test_collapse1_effects():
    g = rq.make_linear_interval()
    x_star = np.array([1.0])
    for eps in (1.0, 0.1, 0.01):
        pert = rq.perturb_collapse1(g, 0, x_star, eps)
        # gradient reverses at the reference
        assert pert.gradient_field(x_star)[0] == pytest.approx(-1.0, abs=1e-12)
        # uniform distance attains eps exactly at the reference
        assert abs(g.payoff(0, x_star) - pert.payoff(0, x_star)) == pytest.approx(eps)
        assert rq.uniform_payoff_distance(g, pert) == pytest.approx(eps, abs=1e-12)
        # gradient-field gap at the reference is 2 |V|
        assert rq.game_distance(g, pert) >= 2.0 - 1e-12
        # the reference stops being stationary
        assert rq.classify_equilibrium(pert, x_star).verdict == VERDICT_NOT_STATIONARY
    assert rq.classify_equilibrium(g, x_star).verdict == VERDICT_ROBUST


def test_collapse1_preconditions():
    bq = rq.make_boundary_quartic()
    with pytest.raises(ConstructionError):
        rq.perturb_collapse1(bq, 0, np.array([0.0]), 0.1)  # V(x*) = 0
    lin = rq.make_linear_interval()
    with pytest.raises(ConstructionError):
        rq.perturb_collapse1(lin, 0, np.array([0.0]), 0.1)  # not stationary


def test_collapse2_effects():
    g = rq.make_interior_quadratic(0.5)
    x_star = np.array([0.5])
    for eps in (1.0, 0.1, 0.01):
        pert = rq.perturb_collapse2(g, 0, x_star, eps, np.array([1.0]))
        assert pert.gradient_field(x_star)[0] == pytest.approx(eps, abs=1e-12)
        assert rq.uniform_payoff_distance(g, pert) <= eps + 1e-12
        assert rq.classify_equilibrium(pert, x_star).verdict == VERDICT_NOT_STATIONARY


def test_collapse2_preconditions():
    lin = rq.make_linear_interval()
    with pytest.raises(ConstructionError):
        rq.perturb_collapse2(lin, 0, np.array([1.0]), 0.1, np.array([1.0]))  # not interior-type
    g = rq.make_interior_quadratic(0.5)
    with pytest.raises(ConstructionError):
        rq.perturb_collapse2(g, 0, np.array([0.5]), 0.1, np.array([0.0]))  # degenerate tilt


def test_robust_certificate_survives_small_shifts():
    lin = rq.make_linear_interval()
    x_star = np.array([1.0])
    margin = rq.classify_equilibrium(lin, x_star).margin
    rng = np.random.default_rng(9)
    for _ in range(100):
        e = rng.uniform(-1, 1, 1)
        e = 0.9 * margin * e / max(np.max(np.abs(e)), 1e-12)
        shifted = rq.shift_gradient(lin, e)
        assert rq.classify_equilibrium(shifted, x_star).verdict == VERDICT_ROBUST
    flipped = rq.shift_gradient(lin, np.array([-2.0 * margin]))
    assert rq.classify_equilibrium(flipped, x_star).verdict == VERDICT_NOT_STATIONARY


def test_zero_game_every_point_stationary():
    dom = rq.product(rq.simplex(3))
    z = rq.make_zero(dom)
    for x in ([1.0, 0, 0], [0.2, 0.5, 0.3]):
        cert = rq.classify_equilibrium(z, np.array(x))
        assert cert.verdict != VERDICT_NOT_STATIONARY
