"""Decomposable regularizer kernels and their closed-form mirror maps.

A kernel is a strictly convex scalar function ``theta`` on z >= 0; the
player-level regularizer is the coordinate sum of theta, and the induced
choice map is

    Q(y) = argmax_{x in X} { <y, x> - h(x) } .

Only closed forms are registered (a table keyed by kernel x domain kind);
anything else raises ``UnsupportedPairError``.  The grid-search oracle
``mirror_bruteforce`` exists so tests never have to trust the closed forms.

Steepness: theta'(0+) = -inf means subgradients blow up at zero, so the
mirror map never hands back a coordinate that is exactly 0.  A non-steep
kernel (finite theta'(0+)) can return boundary points, which is what makes
finite-time convergence possible for it.

The interval/box forms below are written to match the compiled iteration
core expression-for-expression (same libm calls in the same order), so a
recorded dual state replayed through :func:`mirror` reproduces the recorded
play bit-for-bit.
"""

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import xlogy

from .domains import BOX, INTERVAL, SIMPLEX, PlayerDomain, ProductDomain
from .errors import SteepnessError, UnsupportedPairError


@dataclass(frozen=True)
class Kernel:
    name: str
    theta: callable
    theta_prime: callable
    theta_prime_inv: callable
    theta_prime_at_zero: float

    @property
    def steep(self):
        return self.theta_prime_at_zero == -math.inf


def _ent_inv(w):
    # guard: exp overflows above ~709.8; the inverse is only ever used below
    # theta'(hi) by the interval mirror, but keep it total for rate_function
    if w - 1.0 > 709.0:
        return math.inf
    return math.exp(w - 1.0)


def _sqrt_inv(w):
    if w >= 0.0:
        return math.inf
    return 1.0 / (w * w)


KERNELS = {
    "quadratic": Kernel(
        name="quadratic",
        theta=lambda z: 0.5 * z * z,
        theta_prime=lambda z: z,
        theta_prime_inv=lambda w: w,
        theta_prime_at_zero=0.0,
    ),
    "entropic": Kernel(
        name="entropic",
        theta=lambda z: xlogy(z, z),
        theta_prime=lambda z: math.log(z) + 1.0,
        theta_prime_inv=_ent_inv,
        theta_prime_at_zero=-math.inf,
    ),
    "sqrt": Kernel(
        name="sqrt",
        theta=lambda z: -2.0 * np.sqrt(z),
        theta_prime=lambda z: -1.0 / math.sqrt(z),
        theta_prime_inv=_sqrt_inv,
        theta_prime_at_zero=-math.inf,
    ),
}

_NAME_ALIASES = {"euclidean": "quadratic", "quadratic": "quadratic",
                 "entropic": "entropic", "sqrt": "sqrt"}


def register_kernel(kernel: Kernel):
    """Code-level registration hook for custom kernels."""
    KERNELS[kernel.name] = kernel


def get_kernel(name):
    key = _NAME_ALIASES.get(name, name)
    if key not in KERNELS:
        raise UnsupportedPairError(f"unknown kernel '{name}'")
    return KERNELS[key]


@dataclass(frozen=True)
class RegularizerSpec:
    kernels: tuple  # one Kernel per player

    @classmethod
    def uniform(cls, kernel, nplayers):
        if isinstance(kernel, str):
            kernel = get_kernel(kernel)
        return cls(kernels=tuple([kernel] * nplayers))

    @classmethod
    def of(cls, names_or_kernels):
        ks = tuple(get_kernel(k) if isinstance(k, str) else k for k in names_or_kernels)
        return cls(kernels=ks)

    def kernel(self, i):
        return self.kernels[i]


# ---------------------------------------------------------------------------
# per-player mirror maps (registered pairs)
# ---------------------------------------------------------------------------


def _mirror_interval_coord(kernel, y, lo, hi):
    # argmax over [lo,hi] of y*z - theta(z) = clamp of the theta' inverse;
    # the upper branch is tested first so the inverse never overflows
    if y >= kernel.theta_prime(hi):
        return hi
    v = kernel.theta_prime_inv(y)
    if v < lo:
        return lo
    return v


def _mirror_box(kernel, dom, y):
    return np.array(
        [_mirror_interval_coord(kernel, float(y[j]), dom.lo[j], dom.hi[j]) for j in range(dom.dim)]
    )


def _mirror_simplex_quadratic(y):
    d = len(y)
    s = sorted((float(v) for v in y), reverse=True)
    acc = 0.0
    tau = 0.0
    for k in range(d):
        acc += s[k]
        t = (acc - 1.0) / (k + 1.0)
        if k + 1 < d and s[k + 1] >= t:
            continue
        tau = t
        break
    out = np.empty(d)
    for j in range(d):
        v = float(y[j]) - tau
        out[j] = v if v > 0.0 else 0.0
    return out


def _mirror_simplex_entropic(y):
    d = len(y)
    m = float(y[0])
    for j in range(1, d):
        if float(y[j]) > m:
            m = float(y[j])
    s = 0.0
    e = np.empty(d)
    for j in range(d):
        e[j] = math.exp(float(y[j]) - m)
        s += e[j]
    return e / s


def supports_pair(kernel: Kernel, dom: PlayerDomain):
    if dom.kind in (INTERVAL, BOX):
        return True
    if dom.kind == SIMPLEX:
        return kernel.name in ("quadratic", "entropic")
    return False


def mirror_player(kernel: Kernel, dom: PlayerDomain, y):
    y = np.asarray(y, dtype=float)
    if dom.kind in (INTERVAL, BOX):
        return _mirror_box(kernel, dom, y)
    if dom.kind == SIMPLEX:
        if kernel.name == "quadratic":
            return _mirror_simplex_quadratic(y)
        if kernel.name == "entropic":
            return _mirror_simplex_entropic(y)
    raise UnsupportedPairError(f"no mirror map registered for ({kernel.name}, {dom.kind})")


def mirror(reg: RegularizerSpec, domain: ProductDomain, y):
    """Joint mirror map: per-player closed forms on the dual vector ``y``."""
    y = np.asarray(y, dtype=float)
    out = np.empty(domain.total_dim)
    for i, p in enumerate(domain.players):
        out[domain.block(i)] = mirror_player(reg.kernel(i), p, y[domain.block(i)])
    return out


def grad_h(reg: RegularizerSpec, domain: ProductDomain, x):
    """Coordinatewise theta' of the play; the dual lift of a primal point.

    Steep kernels have no subgradient at a zero coordinate; asking for one
    raises :class:`SteepnessError`.
    """
    x = np.asarray(x, dtype=float)
    out = np.empty(domain.total_dim)
    for i, p in enumerate(domain.players):
        k = reg.kernel(i)
        xs = x[domain.block(i)]
        vals = np.empty(p.dim)
        for j in range(p.dim):
            z = float(xs[j])
            if z <= 0.0 and k.steep:
                raise SteepnessError(
                    f"subgradient of steep kernel '{k.name}' undefined at coordinate {j} = {z}"
                )
            vals[j] = k.theta_prime(z) if z > 0.0 else k.theta_prime_at_zero
        out[domain.block(i)] = vals
    return out


def rate_function(kernel: Kernel, z):
    """Converts dual drift into a primal distance scale.

    Inverse of theta' above theta'(0+), identically zero below it: the zero
    branch is what produces exact finite-time arrival for non-steep kernels.
    """
    if z <= kernel.theta_prime_at_zero:
        return 0.0
    return float(kernel.theta_prime_inv(z))


# ---------------------------------------------------------------------------
# grid-search oracle
# ---------------------------------------------------------------------------


def _player_grid(dom: PlayerDomain, step):
    if dom.kind in (INTERVAL, BOX):
        axes = [np.arange(dom.lo[j], dom.hi[j] + step / 2, step) for j in range(dom.dim)]
        mesh = np.meshgrid(*axes, indexing="ij")
        return np.stack([m.ravel() for m in mesh], axis=1)
    if dom.kind == SIMPLEX:
        n = int(round(1.0 / step))
        if dom.dim == 2:
            a = np.arange(n + 1) / n
            return np.stack([a, np.maximum(1.0 - a, 0.0)], axis=1)
        if dom.dim == 3:
            i, j = np.meshgrid(np.arange(n + 1), np.arange(n + 1), indexing="ij")
            keep = i + j <= n
            a, b = i[keep] / n, j[keep] / n
            return np.stack([a, b, np.maximum(1.0 - a - b, 0.0)], axis=1)
    raise UnsupportedPairError(f"brute-force grid not available for {dom.kind} of dim {dom.dim}")


def mirror_bruteforce(reg: RegularizerSpec, domain: ProductDomain, y, grid_step):
    """Feasibility-filtered lattice argmax of <y, x> - h(x); test oracle only."""
    if domain.total_dim > 3:
        raise UnsupportedPairError("brute-force mirror limited to ambient dimension <= 3")
    y = np.asarray(y, dtype=float)
    lattice = None
    for p in domain.players:
        g = _player_grid(p, grid_step)
        if lattice is None:
            lattice = g
        else:
            lattice = np.hstack(
                [np.repeat(lattice, g.shape[0], axis=0), np.tile(g, (lattice.shape[0], 1))]
            )
    vals = lattice @ y
    for i in range(domain.nplayers):
        vals -= np.sum(reg.kernel(i).theta(lattice[:, domain.block(i)]), axis=1)
    return lattice[int(np.argmax(vals))].copy()
