"""Game model, catalog games, game metrics and the payoff-perturbation
constructions that collapse the uniform metric.

Distances between games are functional suprema and cannot be computed
exactly in general; ``game_distance`` and ``uniform_payoff_distance`` report
sampled lower bounds over a deterministic point set (domain anchors plus an
unscrambled Halton sequence) and are documented as such.  Anchors include
every vertex of the catalog domains, so the constructions whose gap peaks at
a vertex or at the reference point are measured exactly.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from . import domains as dom
from .domains import ProductDomain, tangent_cone, robustness_margin
from .errors import ConstructionError, InfeasiblePointError
from .lp import lp_solve

_DUAL_NORMS = {
    "linf": lambda v: float(np.max(np.abs(v), initial=0.0)),
    "l2": lambda v: float(np.linalg.norm(v)),
    "l1": lambda v: float(np.sum(np.abs(v))),
}


@dataclass(frozen=True)
class Game:
    domain: ProductDomain
    payoffs: tuple        # u_i(x_joint) -> float
    grads: tuple          # V_i(x_joint) -> ndarray of the player's block dim
    label: str = "custom"
    meta: dict = field(default_factory=dict)

    @property
    def nplayers(self):
        return self.domain.nplayers

    def payoff(self, i, x):
        return float(self.payoffs[i](np.asarray(x, dtype=float)))

    def grad(self, i, x):
        return np.asarray(self.grads[i](np.asarray(x, dtype=float)), dtype=float)

    def gradient_field(self, x, check=True, tol=1e-9):
        x = np.asarray(x, dtype=float)
        if check and not self.domain.contains(x, tol):
            raise InfeasiblePointError(f"point {x} outside the domain")
        return np.concatenate([self.grad(i, x) for i in range(self.nplayers)])


def gradient_field(game, x):
    return game.gradient_field(x)


def finite_difference_grad(payoff, domain, i, x, h=1e-5):
    """Central differences of u_i in player i's block, one-sided at bounds.

    Players with equality constraints are differenced along their affine
    basis, so the result is the hull-tangential part of the gradient (all a
    payoff restricted to the hull can determine).
    """
    x = np.asarray(x, dtype=float)
    p = domain.players[i]
    blk = domain.block(i)
    if p.Aeq is None:
        g = np.zeros(p.dim)
        for j in range(p.dim):
            k = blk.start + j
            step = h * max(1.0, abs(x[k]))
            up, dn = x.copy(), x.copy()
            up[k] += step
            dn[k] -= step
            if not domain.contains(up, 1e-12):
                up = x
            if not domain.contains(dn, 1e-12):
                dn = x
            denom = up[k] - dn[k]
            g[j] = 0.0 if denom == 0.0 else (payoff(up) - payoff(dn)) / denom
        return g
    g = np.zeros(p.dim)
    for w in p.affine_basis:
        up, dn = x.copy(), x.copy()
        up[blk] = up[blk] + h * w
        dn[blk] = dn[blk] - h * w
        if not domain.contains(up, 1e-10):
            up = x
        if not domain.contains(dn, 1e-10):
            dn = x
        denom = 2.0 * h if (up is not x and dn is not x) else h
        if up is x and dn is x:
            continue
        g += ((payoff(up) - payoff(dn)) / denom) * w
    return g


# ---------------------------------------------------------------------------
# catalog
# ---------------------------------------------------------------------------


def make_linear_interval():
    """u(x) = x on [0,1]; the right endpoint is the unique (robust) optimum."""
    domain = ProductDomain(players=(dom.interval(0.0, 1.0),))
    return Game(
        domain=domain,
        payoffs=(lambda x: float(x[0]),),
        grads=(lambda x: np.array([1.0]),),
        label="linear_interval",
        meta={"engine_game": ("linear_interval",)},
    )


def make_boundary_quartic():
    """u(x) = -(3/4) x^(4/3) on [0,1]; V(x) = -x^(1/3) vanishes at the
    extreme optimum x = 0, the margin-zero configuration."""
    domain = ProductDomain(players=(dom.interval(0.0, 1.0),))
    return Game(
        domain=domain,
        payoffs=(lambda x: -0.75 * float(x[0]) ** (4.0 / 3.0),),
        grads=(lambda x: np.array([-(float(x[0]) ** (1.0 / 3.0))]),),
        label="boundary_quartic",
        meta={"engine_game": ("boundary_quartic",)},
    )


def make_interior_quadratic(c=0.5):
    """u(x) = -(x-c)^2 on [0,1]. For c inside the interval the optimum is the
    interior point c; for c outside it sits at the nearest endpoint with a
    strictly nonzero gradient (a robust configuration)."""
    c = float(c)
    domain = ProductDomain(players=(dom.interval(0.0, 1.0),))
    return Game(
        domain=domain,
        payoffs=(lambda x: -((float(x[0]) - c) ** 2),),
        grads=(lambda x: np.array([-2.0 * (float(x[0]) - c)]),),
        label=f"interior_quadratic({c})",
        meta={"engine_game": ("interior_quadratic", c)},
    )


def make_zero(domain: ProductDomain):
    """u identically 0 for every player; every feasible point is stationary."""
    zero_pay = tuple((lambda x: 0.0) for _ in range(domain.nplayers))
    grads = tuple(
        (lambda d: (lambda x: np.zeros(d)))(p.dim) for p in domain.players
    )
    return Game(domain=domain, payoffs=zero_pay, grads=grads, label="zero",
                meta={"engine_game": ("zero",)})


def make_bimatrix(A1, A2):
    """Mixed extension of a two-player finite game on simplex products:
    u1 = x1' A1 x2, u2 = x1' A2 x2."""
    A1 = np.asarray(A1, dtype=float)
    A2 = np.asarray(A2, dtype=float)
    if A1.ndim != 2 or A1.shape != A2.shape:
        raise ValueError("bimatrix payoffs need two equal-shape matrices")
    n, m = A1.shape
    domain = ProductDomain(players=(dom.simplex(n), dom.simplex(m)))
    return Game(
        domain=domain,
        payoffs=(
            lambda x: float(x[:n] @ A1 @ x[n:]),
            lambda x: float(x[:n] @ A2 @ x[n:]),
        ),
        grads=(
            lambda x: A1 @ x[n:],
            lambda x: A2.T @ x[:n],
        ),
        label="bimatrix",
        meta={"engine_game": ("bimatrix", A1.copy(), A2.copy())},
    )


@dataclass(frozen=True)
class GameSpec:
    name: str
    params: dict = field(default_factory=dict)


def make_game(spec):
    if isinstance(spec, Game):
        return spec
    name, params = spec.name, dict(spec.params)
    if name == "linear_interval":
        return make_linear_interval()
    if name == "boundary_quartic":
        return make_boundary_quartic()
    if name == "interior_quadratic":
        return make_interior_quadratic(params.get("c", 0.5))
    if name == "bimatrix":
        return make_bimatrix(params["A1"], params["A2"])
    if name == "zero":
        return make_zero(params["domain"])
    raise ConstructionError(f"unknown catalog game '{name}'", code="games/unknown-catalog")


# ---------------------------------------------------------------------------
# distances
# ---------------------------------------------------------------------------


def _random_point(domain, rng):
    parts = []
    for p in domain.players:
        if p.kind in (dom.INTERVAL, dom.BOX):
            parts.append(rng.uniform(p.lo, p.hi))
        elif p.kind == dom.SIMPLEX:
            parts.append(rng.dirichlet(np.ones(p.dim)))
        else:
            verts = p.vertices()
            w = rng.dirichlet(np.ones(len(verts)))
            parts.append(sum(wi * vi for wi, vi in zip(w, verts)))
    return np.concatenate([np.atleast_1d(q) for q in parts])


def _sample_set(domain, samples, rng=None):
    # quasirandom base grid plus anchors; an rng, when supplied, adds the
    # same budget of uniform draws on top
    pts = dom.anchor_points(domain) + dom.quasirandom_points(domain, samples)
    if rng is not None:
        pts += [_random_point(domain, rng) for _ in range(samples)]
    return pts


def game_distance(g: Game, g2: Game, samples=512, rng=None, norm="linf"):
    """Sampled lower bound on sup_x ||V(x) - V'(x)|| in the dual norm."""
    if g.domain.total_dim != g2.domain.total_dim:
        raise ConstructionError("games live on different domains", code="games/domain-mismatch")
    dn = _DUAL_NORMS[norm]
    best = 0.0
    for x in _sample_set(g.domain, samples, rng):
        gap = dn(g.gradient_field(x, check=False) - g2.gradient_field(x, check=False))
        if gap > best:
            best = gap
    return best


def uniform_payoff_distance(g: Game, g2: Game, samples=512, rng=None):
    """Sampled lower bound on max_i sup_x |u_i(x) - u'_i(x)|."""
    if g.domain.total_dim != g2.domain.total_dim:
        raise ConstructionError("games live on different domains", code="games/domain-mismatch")
    best = 0.0
    for x in _sample_set(g.domain, samples, rng):
        for i in range(g.nplayers):
            gap = abs(g.payoff(i, x) - g2.payoff(i, x))
            if gap > best:
                best = gap
    return best


def _l1_diameter(p):
    verts = p.vertices()
    best = 0.0
    for a in verts:
        for b in verts:
            d = float(np.sum(np.abs(a - b)))
            if d > best:
                best = d
    return best


def _replace_player(game, i, new_pay, new_grad, label_suffix):
    payoffs = list(game.payoffs)
    grads = list(game.grads)
    payoffs[i] = new_pay
    grads[i] = new_grad
    return Game(
        domain=game.domain,
        payoffs=tuple(payoffs),
        grads=tuple(grads),
        label=game.label + label_suffix,
        meta={},
    )


def _check_stationary(game, x_star, tol=1e-8):
    cone = tangent_cone(game.domain, x_star, 1e-9)
    margin, _ = robustness_margin(game.gradient_field(x_star), cone)
    gap = 0.0 if not math.isfinite(margin) else max(0.0, -margin)
    if gap > tol:
        raise ConstructionError(
            f"reference point is not stationary (gap {gap:.3g})"
        )


def perturb_collapse1(game: Game, i, x_star, eps):
    """Exponential payoff dent that reverses the gradient at the reference.

    Requires a nonzero block gradient and a feasible strict descent
    deviation; the perturbed payoff stays within eps of the original
    uniformly while the reference stops being stationary.
    """
    x_star = np.asarray(x_star, dtype=float)
    game.domain.check_membership(x_star)
    _check_stationary(game, x_star)
    Vi = game.grad(i, x_star)
    if float(np.max(np.abs(Vi), initial=0.0)) <= 1e-12:
        raise ConstructionError(
            "block gradient vanishes at the reference; the exponential dent needs a direction"
        )
    blk = game.domain.block(i)
    p_dom = game.domain.players[i]
    lb = np.full(p_dom.dim, -1e9)
    if p_dom.kind in (dom.INTERVAL, dom.BOX):
        best = float(np.minimum(Vi * p_dom.lo, Vi * p_dom.hi).sum())
    else:
        mask = p_dom.nonneg
        lb[mask] = 0.0
        val, _ = lp_solve(-Vi, p_dom.Aeq, p_dom.beq, lb=lb)
        best = -val
    if best >= float(Vi @ x_star[blk]) - 1e-12:
        raise ConstructionError("no feasible strict descent deviation exists")
    eps = float(eps)
    base_pay, base_grad = game.payoffs[i], game.grads[i]

    def pay(x, _u=base_pay, _V=Vi, _b=blk, _xs=x_star[blk].copy(), _e=eps):
        t = float(_V @ (x[_b] - _xs))
        return float(_u(x)) - _e * math.exp(2.0 * t / _e)

    def grad(x, _g=base_grad, _V=Vi, _b=blk, _xs=x_star[blk].copy(), _e=eps):
        t = float(_V @ (x[_b] - _xs))
        return np.asarray(_g(x), dtype=float) - 2.0 * _V * math.exp(2.0 * t / _e)

    return _replace_player(game, i, pay, grad, f"+collapse1(eps={eps})")


def perturb_collapse2(game: Game, i, x_star, eps, y):
    """Linear payoff tilt for interior-type references.

    Requires <V(x*), x - x*> = 0 on sampled points (checked) and a dual
    direction y with feasible ascent; shifts the block gradient by the
    constant eps * y / (diam * ||y||_linf).
    """
    x_star = np.asarray(x_star, dtype=float)
    game.domain.check_membership(x_star)
    y = np.asarray(y, dtype=float).ravel()
    blk = game.domain.block(i)
    if y.shape[0] != game.domain.players[i].dim:
        raise ConstructionError("tilt direction must match the player's block dimension")
    V_star = game.gradient_field(x_star)
    for x in dom.anchor_points(game.domain) + dom.quasirandom_points(game.domain, 128):
        if abs(float(V_star @ (x - x_star))) > 1e-8:
            raise ConstructionError(
                "reference is not interior-type: <V(x*), x - x*> != 0 at a sampled point"
            )
    p_dom = game.domain.players[i]
    sup_y = max(float(y @ (v - x_star[blk])) for v in p_dom.vertices())
    if sup_y <= 1e-12:
        raise ConstructionError("tilt direction admits no feasible ascent deviation")
    ynorm = float(np.max(np.abs(y)))
    diam = _l1_diameter(p_dom)
    scale = float(eps) / (diam * ynorm)
    base_pay, base_grad = game.payoffs[i], game.grads[i]

    def pay(x, _u=base_pay, _y=y, _b=blk, _xs=x_star[blk].copy(), _s=scale):
        return float(_u(x)) + _s * float(_y @ (x[_b] - _xs))

    def grad(x, _g=base_grad, _y=y, _s=scale):
        return np.asarray(_g(x), dtype=float) + _s * _y

    return _replace_player(game, i, pay, grad, f"+collapse2(eps={eps})")


def shift_gradient(game: Game, e):
    """Constant shift of the joint gradient field (payoffs tilted linearly);
    the basic probe for margin-sized robustness checks."""
    e = np.asarray(e, dtype=float).ravel()
    if e.shape[0] != game.domain.total_dim:
        raise ValueError("shift must match the ambient dimension")
    payoffs, grads = [], []
    for i in range(game.nplayers):
        blk = game.domain.block(i)

        def pay(x, _u=game.payoffs[i], _e=e[blk].copy(), _b=blk):
            return float(_u(x)) + float(_e @ x[_b])

        def grad(x, _g=game.grads[i], _e=e[blk].copy()):
            return np.asarray(_g(x), dtype=float) + _e

        payoffs.append(pay)
        grads.append(grad)
    return Game(
        domain=game.domain,
        payoffs=tuple(payoffs),
        grads=tuple(grads),
        label=game.label + "+shift",
        meta={},
    )
