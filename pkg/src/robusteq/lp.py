"""Dense two-phase simplex solver.

Solves   max <c, x>   s.t.   A x = b,  x >= lb   (lb finite, default 0)

with Bland's pivoting rule throughout, which makes the solver immune to
cycling and, more importantly here, makes the returned vertex deterministic.
Certificates downstream quote the argmax as a witness, so reproducibility of
the vertex matters as much as the optimal value.

Intended for the small, dense programs produced by the cone geometry
(dimensions up to ~10^3); no sparsity, no presolve.
"""

import numpy as np

from .errors import LPInfeasibleError, LPUnboundedError

_PIVOT_TOL = 1e-10
_FEAS_TOL = 1e-9


def lp_solve(c, A, b, lb=None):
    """Maximize ``c @ x`` subject to ``A x = b`` and ``x >= lb``.

    Returns ``(value, x)``. Raises :class:`LPInfeasibleError` or
    :class:`LPUnboundedError`; the norm-constrained programs built by the
    cone routines can trigger neither, so either exception reaching a caller
    indicates a bug in the encoding.
    """
    c = np.asarray(c, dtype=float).ravel()
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    m, n = A.shape
    if c.shape[0] != n or b.shape[0] != m:
        raise ValueError("inconsistent LP dimensions")
    if lb is None:
        shift = np.zeros(n)
    else:
        shift = np.asarray(lb, dtype=float).ravel()
        if shift.shape[0] != n or not np.all(np.isfinite(shift)):
            raise ValueError("lower bounds must be finite and match c")
    b_sh = b - A @ shift

    value, x = _simplex_standard(c, A, b_sh)
    return value + float(c @ shift), x + shift


def _simplex_standard(c, A, b):
    """max c@x, Ax = b, x >= 0 via two phases on a dense tableau."""
    m, n = A.shape
    A = A.copy()
    b = b.copy()
    neg = b < 0
    A[neg] *= -1.0
    b[neg] *= -1.0

    # Phase 1: artificial basis, minimize sum of artificials.
    T = np.zeros((m + 1, n + m + 1))
    T[:m, :n] = A
    T[:m, n : n + m] = np.eye(m)
    T[:m, -1] = b
    basis = list(range(n, n + m))
    # objective row: maximize -(sum of artificials)
    T[m, n : n + m] = 1.0
    for i in range(m):
        T[m, :] -= T[i, :]
    _pivot_until_optimal(T, basis, n + m)
    if -T[m, -1] > _FEAS_TOL:
        raise LPInfeasibleError("phase-1 optimum positive: no feasible point")
    _drive_out_artificials(T, basis, n)

    # Phase 2 on the original objective, artificial columns frozen.
    T[m, :] = 0.0
    T[m, :n] = -c
    for i, bi in enumerate(basis):
        if T[m, bi] != 0.0:
            T[m, :] -= T[m, bi] * T[i, :]
    _pivot_until_optimal(T, basis, n)

    x = np.zeros(n)
    for i, bi in enumerate(basis):
        if bi < n:
            x[bi] = T[i, -1]
    return float(T[m, -1]), x


def _pivot_until_optimal(T, basis, ncols):
    m = T.shape[0] - 1
    while True:
        # Bland: entering = lowest-index column with negative reduced cost.
        enter = -1
        for j in range(ncols):
            if T[m, j] < -_PIVOT_TOL:
                enter = j
                break
        if enter < 0:
            return
        # Ratio test; ties broken by smallest basis index (Bland).
        leave = -1
        best = np.inf
        for i in range(m):
            a = T[i, enter]
            if a > _PIVOT_TOL:
                ratio = T[i, -1] / a
                if ratio < best - _PIVOT_TOL or (
                    ratio < best + _PIVOT_TOL and (leave < 0 or basis[i] < basis[leave])
                ):
                    if ratio < best:
                        best = ratio
                    leave = i
        if leave < 0:
            raise LPUnboundedError("objective unbounded along entering column")
        _pivot(T, basis, leave, enter)


def _drive_out_artificials(T, basis, n):
    m = T.shape[0] - 1
    for i in range(m):
        if basis[i] >= n:
            # Degenerate artificial still basic at zero; swap in any real
            # column with a nonzero entry, else the row is redundant.
            for j in range(n):
                if abs(T[i, j]) > _PIVOT_TOL:
                    _pivot(T, basis, i, j)
                    break


def _pivot(T, basis, row, col):
    T[row, :] /= T[row, col]
    for i in range(T.shape[0]):
        if i != row and T[i, col] != 0.0:
            T[i, :] -= T[i, col] * T[row, :]
    basis[row] = col
