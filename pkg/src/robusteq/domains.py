"""Polyhedral action sets, tangent/polar cone geometry and the robustness
certifier.

A per-player set is one of

* ``interval(lo, hi)``           -- a segment of the line,
* ``box(lo, hi)``                -- a product of intervals,
* ``simplex(d)``                 -- the probability simplex on d actions,
* ``polytope(Aeq, beq, nonneg)`` -- { x : Aeq x = beq, x_j >= 0 for flagged j },
                                    required to be bounded.

The tangent cone at a feasible point is kept in constraint form (equality
rows plus sign restrictions on the coordinates that sit at a bound).  The
certifier measures stationarity and the robustness margin as linear programs
over the l1-normalized cone:

    margin = -max { <V(x), z> : z in TC(x), ||z||_1 = 1 } .

A positive margin certifies that the gradient lies in the topological
interior of the polar cone, i.e. the point survives every sufficiently small
perturbation of the gradient field.  The margin is an l1 margin; statements
in other norms transfer up to the usual norm-equivalence constants.

The maximization over the l1 *sphere* (not ball) needs care: a single
split-variable LP is exact only when the objective is nonnegative somewhere
on the cone.  When every cone direction has a strictly negative pairing
(exactly the robust case) the split LP collapses to the cancellation vertex
z = 0.  ``robustness_margin`` therefore resolves the sign of each free
coordinate first (two small LPs per coordinate) and then solves the sphere
problem exactly in the sign-corrected variables, where the l1 norm is linear.
"""

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import null_space
from scipy.stats import qmc

from .errors import (
    InfeasiblePointError,
    LPInfeasibleError,
    LPUnboundedError,
    UnboundedDomainError,
    UnsupportedDomainError,
)
from .lp import lp_solve

INTERVAL = "interval"
BOX = "box"
SIMPLEX = "simplex"
POLYTOPE = "polytope"

_SIGN_TOL = 1e-11
_MAX_AMBIGUOUS = 12
_RANK_TOL = 1e-10


@dataclass(frozen=True)
class Tolerances:
    """Default numerical tolerances; all CLI-overridable."""

    stat_tol: float = 1e-8
    robust_tol: float = 1e-6
    membership_tol: float = 1e-9


# ---------------------------------------------------------------------------
# player domains
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class PlayerDomain:
    kind: str
    dim: int
    lo: np.ndarray = None          # box/interval lower bounds (len dim)
    hi: np.ndarray = None          # box/interval upper bounds
    Aeq: np.ndarray = None         # equality rows (m x dim) for simplex/polytope
    beq: np.ndarray = None
    nonneg: np.ndarray = None      # bool mask of sign-constrained coordinates
    affine_basis: np.ndarray = None  # rows: orthonormal basis of the hull directions

    @property
    def affine_dim(self):
        return self.affine_basis.shape[0]

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.dim,):
            return False
        if self.kind in (INTERVAL, BOX):
            return bool(np.all(x >= self.lo - tol) and np.all(x <= self.hi + tol))
        if np.any(x[self.nonneg] < -tol):
            return False
        return bool(np.max(np.abs(self.Aeq @ x - self.beq), initial=0.0) <= tol)

    def vertices(self, cap=64):
        """A deterministic list of vertices (corners capped for large boxes)."""
        if self.kind in (INTERVAL, BOX):
            if 2**self.dim <= cap:
                corners = itertools.product(*[(self.lo[j], self.hi[j]) for j in range(self.dim)])
                return [np.array(c, dtype=float) for c in corners]
            out = []
            for j in range(self.dim):
                for val, arr in ((self.hi[j], self.lo), (self.lo[j], self.hi)):
                    v = arr.astype(float).copy()
                    v[j] = val
                    out.append(v)
            return out[:cap]
        if self.kind == SIMPLEX:
            return [np.eye(self.dim)[j] for j in range(self.dim)]
        out = []
        for j in range(self.dim):
            for sgn in (1.0, -1.0):
                c = np.zeros(self.dim)
                c[j] = sgn
                _, v = lp_solve(c, self.Aeq, self.beq, lb=self._poly_lb())
                out.append(v)
            if len(out) >= cap:
                break
        return out

    def _poly_lb(self):
        lb = np.full(self.dim, -1e9)
        lb[self.nonneg] = 0.0
        return lb


def interval(lo, hi):
    lo_f, hi_f = float(lo), float(hi)
    if not lo_f < hi_f:
        raise ValueError("interval requires lo < hi")
    return PlayerDomain(
        kind=INTERVAL,
        dim=1,
        lo=np.array([lo_f]),
        hi=np.array([hi_f]),
        affine_basis=np.array([[1.0]]),
    )


def box(lo, hi):
    lo = np.asarray(lo, dtype=float).ravel()
    hi = np.asarray(hi, dtype=float).ravel()
    if lo.shape != hi.shape or lo.size == 0:
        raise ValueError("box bounds must be equal-length vectors")
    if not np.all(lo < hi):
        raise ValueError("box requires lo < hi coordinatewise")
    return PlayerDomain(kind=BOX, dim=lo.size, lo=lo, hi=hi, affine_basis=np.eye(lo.size))


def _helmert_basis(d):
    """Orthonormal basis of {z : sum z = 0}, fixed analytic construction."""
    rows = np.zeros((d - 1, d))
    for k in range(1, d):
        rows[k - 1, :k] = 1.0
        rows[k - 1, k] = -k
        rows[k - 1] /= math.sqrt(k * (k + 1))
    return rows


def simplex(d):
    if d < 2:
        raise ValueError("simplex needs at least 2 coordinates")
    return PlayerDomain(
        kind=SIMPLEX,
        dim=d,
        Aeq=np.ones((1, d)),
        beq=np.array([1.0]),
        nonneg=np.ones(d, dtype=bool),
        affine_basis=_helmert_basis(d),
    )


def polytope(Aeq, beq, nonneg=None):
    """General bounded polytope { Aeq x = beq, x_j >= 0 for flagged j }.

    Boundedness is certified at construction by maximizing +-x_j with the LP
    solver; an unbounded direction raises :class:`UnboundedDomainError`.
    """
    Aeq = np.atleast_2d(np.asarray(Aeq, dtype=float))
    beq = np.asarray(beq, dtype=float).ravel()
    m, d = Aeq.shape
    if beq.shape[0] != m:
        raise ValueError("beq length must match Aeq rows")
    if nonneg is None:
        nonneg = np.ones(d, dtype=bool)
    else:
        nonneg = np.asarray(nonneg, dtype=bool).ravel()
        if nonneg.shape[0] != d:
            raise ValueError("nonneg mask length must match Aeq columns")
    lb = np.full(d, -1e9)
    lb[nonneg] = 0.0
    for j in range(d):
        for sgn in (1.0, -1.0):
            c = np.zeros(d)
            c[j] = sgn
            try:
                val, _ = lp_solve(c, Aeq, beq, lb=lb)
            except LPInfeasibleError:
                raise LPInfeasibleError("polytope is empty") from None
            except LPUnboundedError:
                raise UnboundedDomainError(
                    f"polytope unbounded in coordinate {j}"
                ) from None
            if abs(val) >= 1e8:
                raise UnboundedDomainError(f"polytope unbounded in coordinate {j}")
    basis = null_space(Aeq, rcond=_RANK_TOL)
    return PlayerDomain(
        kind=POLYTOPE,
        dim=d,
        Aeq=Aeq,
        beq=beq,
        nonneg=nonneg,
        affine_basis=basis.T if basis.size else np.zeros((0, d)),
    )


@dataclass(frozen=True)
class ProductDomain:
    players: tuple

    def __post_init__(self):
        object.__setattr__(self, "players", tuple(self.players))

    @property
    def total_dim(self):
        return sum(p.dim for p in self.players)

    @property
    def nplayers(self):
        return len(self.players)

    def block(self, i):
        start = sum(p.dim for p in self.players[:i])
        return slice(start, start + self.players[i].dim)

    def split(self, x):
        x = np.asarray(x, dtype=float)
        return [x[self.block(i)] for i in range(self.nplayers)]

    def contains(self, x, tol=1e-9):
        x = np.asarray(x, dtype=float)
        if x.shape != (self.total_dim,):
            return False
        return all(p.contains(x[self.block(i)], tol) for i, p in enumerate(self.players))

    def check_membership(self, x, tol=1e-9):
        if not self.contains(x, tol):
            raise InfeasiblePointError(f"point {np.asarray(x)} is not in the domain (tol={tol})")


def product(*players):
    return ProductDomain(players=tuple(players))


# ---------------------------------------------------------------------------
# active sets and tangent cones
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ActiveSet:
    lower: tuple
    upper: tuple

    def __iter__(self):
        return iter(sorted(self.lower + self.upper))

    @property
    def empty(self):
        return not self.lower and not self.upper


def active_set(dom: PlayerDomain, x, tol=1e-9):
    """Coordinates of ``x`` sitting at a bound of ``dom``.

    For interval/box domains the result distinguishes the bound side; for
    simplex/polytope domains only the lower (nonnegativity) side exists.
    """
    x = np.asarray(x, dtype=float)
    if not dom.contains(x, tol):
        raise InfeasiblePointError(f"point {x} not in domain (tol={tol})")
    if dom.kind in (INTERVAL, BOX):
        lower = tuple(np.nonzero(x <= dom.lo + tol)[0].tolist())
        upper = tuple(np.nonzero(x >= dom.hi - tol)[0].tolist())
        return ActiveSet(lower=lower, upper=upper)
    mask = dom.nonneg & (x <= tol)
    return ActiveSet(lower=tuple(np.nonzero(mask)[0].tolist()), upper=())


@dataclass(frozen=True)
class TangentConeRep:
    """Constraint form of the tangent cone of a product domain at a point.

    ``{ z : Aeq z = 0,  z_j >= 0 (j in active),  z_j <= 0 (j in active_upper) }``
    with every index global (ambient coordinates of the joint point).
    """

    Aeq: np.ndarray
    active: tuple          # coordinates pinned at a lower bound
    active_upper: tuple    # coordinates pinned at an upper bound (box only)
    owner_point: np.ndarray
    dim: int
    blocks: tuple = field(default=())   # (start, dim) per player

    @property
    def free(self):
        pinned = set(self.active) | set(self.active_upper)
        return tuple(j for j in range(self.dim) if j not in pinned)


def tangent_cone(domain: ProductDomain, x, tol=1e-9):
    x = np.asarray(x, dtype=float)
    domain.check_membership(x, tol)
    rows = []
    lower, upper, blocks = [], [], []
    start = 0
    for i, p in enumerate(domain.players):
        xs = x[start : start + p.dim]
        act = active_set(p, xs, tol)
        lower.extend(start + j for j in act.lower)
        upper.extend(start + j for j in act.upper)
        if p.Aeq is not None:
            block_rows = np.zeros((p.Aeq.shape[0], domain.total_dim))
            block_rows[:, start : start + p.dim] = p.Aeq
            rows.append(block_rows)
        blocks.append((start, p.dim))
        start += p.dim
    Aeq = np.vstack(rows) if rows else np.zeros((0, domain.total_dim))
    return TangentConeRep(
        Aeq=Aeq,
        active=tuple(lower),
        active_upper=tuple(upper),
        owner_point=x.copy(),
        dim=domain.total_dim,
        blocks=tuple(blocks),
    )


def lineality_dim(cone: TangentConeRep):
    """Dimension of the largest subspace inside the cone.

    The owner point is an extreme point of the domain iff this is zero.
    """
    return _lineality_space(cone).shape[1]


def _lineality_space(cone):
    pinned = sorted(set(cone.active) | set(cone.active_upper))
    rows = [cone.Aeq] if cone.Aeq.size else []
    if pinned:
        sel = np.zeros((len(pinned), cone.dim))
        for r, j in enumerate(pinned):
            sel[r, j] = 1.0
        rows.append(sel)
    if not rows:
        return np.eye(cone.dim)
    stacked = np.vstack(rows)
    ns = null_space(stacked, rcond=_RANK_TOL)
    return ns if ns.size else np.zeros((cone.dim, 0))


# ---------------------------------------------------------------------------
# generators
# ---------------------------------------------------------------------------


def cone_generators(cone: TangentConeRep):
    """A finite set of unit vectors whose nonnegative hull is the cone.

    Closed forms cover interval/box/simplex blocks; general polytope blocks
    are enumerated by double description in the nullspace coordinates and are
    rejected beyond a small budget (callers needing only the margin can use
    ``robustness_margin``, which is generator-free).
    """
    gens = []
    for start, d in cone.blocks:
        idx = slice(start, start + d)
        sub_lower = tuple(j - start for j in cone.active if start <= j < start + d)
        sub_upper = tuple(j - start for j in cone.active_upper if start <= j < start + d)
        has_eq = cone.Aeq.size and np.any(cone.Aeq[:, idx])
        if not has_eq:
            block = _box_block_generators(d, sub_lower, sub_upper)
        else:
            blockA = cone.Aeq[np.any(cone.Aeq[:, idx] != 0.0, axis=1)][:, idx]
            if blockA.shape[0] == 1 and np.allclose(blockA[0], blockA[0, 0]) and not sub_upper:
                block = _simplex_block_generators(d, sub_lower)
            else:
                block = _polytope_block_generators(blockA, d, sub_lower, sub_upper)
        for g in block:
            full = np.zeros(cone.dim)
            full[idx] = g
            gens.append(full)
    out = np.array(gens) if gens else np.zeros((0, cone.dim))
    norms = np.linalg.norm(out, axis=1)
    return out[norms > 0] / norms[norms > 0, None]


def _box_block_generators(d, lower, upper):
    gens = []
    for j in range(d):
        e = np.zeros(d)
        e[j] = 1.0
        if j in lower:
            gens.append(e)
        elif j in upper:
            gens.append(-e)
        else:
            gens.append(e)
            gens.append(-e)
    return gens


def _simplex_block_generators(d, lower):
    free = [j for j in range(d) if j not in lower]
    if not free:
        raise InfeasiblePointError("no simplex coordinate carries mass")
    pivot = free[0]
    gens = []
    for a in lower:
        g = np.zeros(d)
        g[a], g[pivot] = 1.0, -1.0
        gens.append(g / math.sqrt(2.0))
    for i in free[1:]:
        g = np.zeros(d)
        g[i], g[pivot] = 1.0, -1.0
        gens.append(g / math.sqrt(2.0))
        gens.append(-g / math.sqrt(2.0))
    return gens


def _polytope_block_generators(Aeq, d, lower, upper):
    free = [j for j in range(d) if j not in lower and j not in upper]
    if len(free) > _MAX_AMBIGUOUS:
        raise UnsupportedDomainError(
            f"generator enumeration over budget ({len(free)} free coordinates)"
        )
    N = null_space(Aeq, rcond=_RANK_TOL)
    if N.size == 0:
        return []
    k = N.shape[1]
    # sign rows: +row for lower-active coords, -row for upper-active coords
    G = np.vstack([N[j] for j in lower] + [-N[j] for j in upper]) if (lower or upper) else np.zeros((0, k))
    gens_c = _rays_of_inequality_cone(G, k)
    return [N @ c for c in gens_c]


def _rays_of_inequality_cone(G, k):
    """Generators of { c in R^k : G c >= 0 }: lineality basis (both signs)
    plus extreme rays found by facet enumeration. Assumes small k."""
    out = []
    L = null_space(G, rcond=_RANK_TOL) if G.size else np.eye(k)
    for col in range(L.shape[1] if L.size else 0):
        out.append(L[:, col])
        out.append(-L[:, col])
    if G.size == 0:
        return out
    lin_dim = L.shape[1] if L.size else 0
    # Extreme rays lie where k - lin_dim - 1 independent inequalities are tight.
    need = k - lin_dim - 1
    if need < 0:
        return out
    m = G.shape[0]
    for subset in itertools.combinations(range(m), need):
        rows = [G[list(subset)]] if subset else []
        if L.size:
            rows.append(L.T)  # quotient out the lineality
        stacked = np.vstack(rows) if rows else np.zeros((0, k))
        ns = null_space(stacked, rcond=_RANK_TOL) if stacked.size else np.eye(k)
        if ns.shape[1] != 1:
            continue
        for r in (ns[:, 0], -ns[:, 0]):
            if np.all(G @ r >= -_SIGN_TOL):
                out.append(r)
    return out


# ---------------------------------------------------------------------------
# margins and classification
# ---------------------------------------------------------------------------


def _ball_lp(V, cone, objective=None):
    """max <obj, z> over { z in cone : ||z||_1 <= 1 } by coordinate splitting.

    Exact for any linear objective over the ball (the split representation
    maps onto the ball); only the sphere-restricted problem needs the
    sign-resolution pass in :func:`robustness_margin`.
    """
    obj = V if objective is None else objective
    d = cone.dim
    lowset, upset = set(cone.active), set(cone.active_upper)
    pos_cols = list(range(d))                       # z+
    neg_cols = [j for j in range(d) if j not in lowset]   # z-
    for j in upset:
        pos_cols.remove(j)
    npos, nneg = len(pos_cols), len(neg_cols)
    nvar = npos + nneg + 1                          # + slack
    meq = cone.Aeq.shape[0]
    A = np.zeros((meq + 1, nvar))
    bvec = np.zeros(meq + 1)
    c = np.zeros(nvar)
    for k, j in enumerate(pos_cols):
        if meq:
            A[:meq, k] = cone.Aeq[:, j]
        A[meq, k] = 1.0
        c[k] = obj[j]
    for k, j in enumerate(neg_cols):
        if meq:
            A[:meq, npos + k] = -cone.Aeq[:, j]
        A[meq, npos + k] = 1.0
        c[npos + k] = -obj[j]
    A[meq, -1] = 1.0
    bvec[meq] = 1.0
    val, sol = lp_solve(c, A, bvec)
    z = np.zeros(d)
    for k, j in enumerate(pos_cols):
        z[j] += sol[k]
    for k, j in enumerate(neg_cols):
        z[j] -= sol[npos + k]
    return val, z


def _sphere_lp_signed(V, cone, signs, zero_mask):
    """max <V, z> over { z in cone, ||z||_1 = 1 } within a fixed sign orthant.

    With signs resolved, z = s * t with t >= 0 makes the l1 norm linear
    (sum t = 1), so the sphere problem is an exact LP. Returns None when the
    orthant meets the cone only at the origin.
    """
    d = cone.dim
    cols = [j for j in range(d) if not zero_mask[j]]
    if not cols:
        return None
    meq = cone.Aeq.shape[0]
    A = np.zeros((meq + 1, len(cols)))
    c = np.zeros(len(cols))
    for k, j in enumerate(cols):
        if meq:
            A[:meq, k] = cone.Aeq[:, j] * signs[j]
        A[meq, k] = 1.0
        c[k] = V[j] * signs[j]
    b = np.zeros(meq + 1)
    b[meq] = 1.0
    try:
        val, t = lp_solve(c, A, b)
    except LPInfeasibleError:
        return None
    z = np.zeros(d)
    for k, j in enumerate(cols):
        z[j] = signs[j] * t[k]
    return val, z


def robustness_margin(gradient, cone: TangentConeRep):
    """l1-normalized worst-case pairing of the gradient with the cone.

    Returns ``(margin, witness)`` with
    ``margin = -max{ <gradient, z> : z in cone, ||z||_1 = 1 }`` and the
    witness attaining the maximum.  The degenerate cone ``{0}`` returns
    ``(inf, None)`` by convention.
    """
    V = np.asarray(gradient, dtype=float).ravel()
    if V.shape[0] != cone.dim:
        raise ValueError("gradient dimension does not match the cone")
    val0, z0 = _ball_lp(V, cone)
    if val0 > _SIGN_TOL:
        n1 = np.sum(np.abs(z0))
        return -val0, z0 / n1
    if lineality_dim(cone) > 0:
        L = _lineality_space(cone)
        v = L[:, 0]
        nz = np.nonzero(np.abs(v) > _SIGN_TOL)[0]
        if v[nz[0]] < 0:
            v = -v
        return 0.0, v / np.sum(np.abs(v))

    # Pointed cone with a nonpositive pairing everywhere: resolve coordinate
    # signs on the cone, then maximize exactly on the sphere per orthant.
    signs = np.zeros(cone.dim)
    zero_mask = np.zeros(cone.dim, dtype=bool)
    ambiguous = []
    lowset, upset = set(cone.active), set(cone.active_upper)
    for j in range(cone.dim):
        if j in lowset and j in upset:
            zero_mask[j] = True
            continue
        if j in lowset:
            signs[j] = 1.0
            continue
        if j in upset:
            signs[j] = -1.0
            continue
        e = np.zeros(cone.dim)
        e[j] = 1.0
        mx, _ = _ball_lp(V, cone, objective=e)
        mn, _ = _ball_lp(V, cone, objective=-e)
        can_pos, can_neg = mx > _SIGN_TOL, mn > _SIGN_TOL
        if can_pos and can_neg:
            ambiguous.append(j)
        elif can_pos:
            signs[j] = 1.0
        elif can_neg:
            signs[j] = -1.0
        else:
            zero_mask[j] = True
    if len(ambiguous) > _MAX_AMBIGUOUS:
        raise UnsupportedDomainError(
            f"sign enumeration over budget ({len(ambiguous)} ambiguous coordinates)"
        )
    best = None
    for pattern in itertools.product((1.0, -1.0), repeat=len(ambiguous)):
        s = signs.copy()
        for j, sj in zip(ambiguous, pattern):
            s[j] = sj
        res = _sphere_lp_signed(V, cone, s, zero_mask)
        if res is not None and (best is None or res[0] > best[0]):
            best = res
    if best is None:
        return math.inf, None
    return -best[0], best[1]


VERDICT_NOT_STATIONARY = "NotStationary"
VERDICT_INTERIOR = "Interior"
VERDICT_BOUNDARY = "BoundaryNonExtreme"
VERDICT_EXTREME_NON_ROBUST = "ExtremeNonRobust"
VERDICT_ROBUST = "Robust"


@dataclass(frozen=True)
class RobustnessCertificate:
    verdict: str
    margin: float
    witness: np.ndarray
    stationarity_gap: float
    active_sets: tuple       # per player: (lower tuple, upper tuple)
    point: np.ndarray

    def to_dict(self):
        return {
            "verdict": self.verdict,
            "margin": self.margin if math.isfinite(self.margin) else "inf",
            "witness": None if self.witness is None else [float(v) for v in self.witness],
            "active_sets": [[list(a), list(b)] for a, b in self.active_sets],
            "stationarity_gap": self.stationarity_gap,
        }


def classify_equilibrium(game, x, tols: Tolerances = Tolerances()):
    """Certify a candidate point per the four-panel classification.

    Order of tests: stationarity (l1-normalized gap), interiority (no active
    bound anywhere), extremeness (cone lineality), then the sign of the
    margin against ``robust_tol``.
    """
    domain = game.domain
    x = np.asarray(x, dtype=float)
    cone = tangent_cone(domain, x, tols.membership_tol)
    V = game.gradient_field(x)
    margin, witness = robustness_margin(V, cone)
    gap = 0.0 if not math.isfinite(margin) else max(0.0, -margin)
    actives = []
    for i, p in enumerate(domain.players):
        act = active_set(p, x[domain.block(i)], tols.membership_tol)
        actives.append((act.lower, act.upper))
    common = dict(
        stationarity_gap=gap,
        active_sets=tuple(actives),
        point=x.copy(),
        margin=margin,
        witness=witness,
    )
    if gap > tols.stat_tol:
        return RobustnessCertificate(verdict=VERDICT_NOT_STATIONARY, **common)
    if all(a == () and b == () for a, b in actives):
        return RobustnessCertificate(verdict=VERDICT_INTERIOR, **common)
    if lineality_dim(cone) > 0:
        return RobustnessCertificate(verdict=VERDICT_BOUNDARY, **common)
    if margin > tols.robust_tol:
        return RobustnessCertificate(verdict=VERDICT_ROBUST, **common)
    return RobustnessCertificate(verdict=VERDICT_EXTREME_NON_ROBUST, **common)


# ---------------------------------------------------------------------------
# deterministic feasible samples (anchors + Halton)
# ---------------------------------------------------------------------------


def _player_anchor_points(p: PlayerDomain):
    pts = p.vertices()
    pts.append(sum(pts) / len(pts))
    if p.kind in (INTERVAL, BOX):
        pts.append((p.lo + p.hi) / 2.0)
    return pts


def anchor_points(domain: ProductDomain, cap=256):
    """Deterministic feasible points including every low-dimensional vertex;
    used so sampled suprema hit the corners where the constructions peak."""
    per_player = [_player_anchor_points(p) for p in domain.players]
    out = []
    for combo in itertools.product(*per_player):
        out.append(np.concatenate([np.atleast_1d(c) for c in combo]))
        if len(out) >= cap:
            break
    return out


def _player_from_unit(p: PlayerDomain, u):
    if p.kind in (INTERVAL, BOX):
        return p.lo + u * (p.hi - p.lo)
    if p.kind == SIMPLEX:
        cuts = np.sort(u[: p.dim - 1])
        full = np.concatenate([[0.0], cuts, [1.0]])
        return np.diff(full)
    verts = p.vertices(cap=2 * p.dim)
    w = u[: len(verts)] + 1e-12
    w = w / w.sum()
    return sum(wi * vi for wi, vi in zip(w, verts))


def _unit_dims(p: PlayerDomain):
    if p.kind in (INTERVAL, BOX):
        return p.dim
    if p.kind == SIMPLEX:
        return p.dim - 1
    return 2 * p.dim


def quasirandom_points(domain: ProductDomain, count):
    """Halton-sequence feasible points (unscrambled, hence reproducible)."""
    dims = [_unit_dims(p) for p in domain.players]
    sampler = qmc.Halton(d=sum(dims), scramble=False)
    U = sampler.random(count)
    pts = []
    for row in U:
        parts, k = [], 0
        for p, d in zip(domain.players, dims):
            parts.append(_player_from_unit(p, row[k : k + d]))
            k += d
        pts.append(np.concatenate([np.atleast_1d(q) for q in parts]))
    return pts
