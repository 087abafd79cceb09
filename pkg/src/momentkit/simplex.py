"""Phase-one simplex for ``A x = b, x >= 0`` feasibility.

Revised simplex with Bland's rule (smallest eligible index enters, smallest
basic index leaves among ratio ties), so the pivot sequence is deterministic
and cannot cycle.  The basis system is re-solved from the original data at
every iteration instead of updating a tableau; bases here are small (one row
per monomial) and this keeps rounding from accumulating over long degenerate
runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError


@dataclass(frozen=True)
class FeasibilityResult:
    feasible: bool
    x: np.ndarray | None
    basis: tuple[int, ...]
    objective: float  # sum of artificials at the phase-one optimum
    iterations: int


def phase_one(A: np.ndarray, b: np.ndarray, *, tol: float = 1e-9,
              max_iter: int | None = None) -> FeasibilityResult:
    A = np.array(A, dtype=float)
    b = np.array(b, dtype=float).ravel()
    m, n = A.shape
    if b.shape[0] != m:
        raise ValueError(f"A has {m} rows, b has {b.shape[0]} entries")
    neg = b < 0
    A[neg] *= -1
    b[neg] *= -1
    # unit column scaling; undone on the way out
    colscale = np.abs(A).max(axis=0)
    colscale[colscale == 0] = 1.0
    As = A / colscale
    bscale = max(1.0, float(np.abs(b).max(initial=0.0)))
    bs = b / bscale
    if max_iter is None:
        max_iter = 50 * (m + n) + 1000

    full = np.hstack([As, np.eye(m)])
    cost = np.concatenate([np.zeros(n), np.ones(m)])
    basis = list(range(n, n + m))

    it = 0
    while True:
        B = full[:, basis]
        xb = np.linalg.solve(B, bs)
        xb[xb < 0] = 0.0
        y = np.linalg.solve(B.T, cost[basis])
        reduced = cost - full.T @ y
        reduced[basis] = 0.0
        eligible = np.flatnonzero(reduced < -tol)
        if eligible.size == 0:
            break
        if it >= max_iter:
            raise SolverError(f"phase-one simplex hit the iteration cap ({max_iter})")
        col = int(eligible[0])
        d = np.linalg.solve(B, full[:, col])
        rows = np.flatnonzero(d > tol)
        if rows.size == 0:
            raise SolverError("unbounded phase-one direction")
        ratios = xb[rows] / d[rows]
        best = ratios.min()
        ties = rows[ratios <= best + tol]
        row = int(min(ties, key=lambda r: basis[r]))
        basis[row] = col
        it += 1

    objective = float(cost[basis] @ xb) * bscale
    if objective > tol * bscale * max(1, m):
        return FeasibilityResult(False, None, tuple(basis), objective, it)
    x = np.zeros(n)
    for row, var in enumerate(basis):
        if var < n:
            x[var] = xb[row] * bscale / colscale[var]
    return FeasibilityResult(True, x, tuple(basis), objective, it)
