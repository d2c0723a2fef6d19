"""Dense two-phase simplex with Bland's rule, for small LPs over free variables.

Solves min cost.x subject to A x <= b with x unrestricted in sign. The LPs in
this package are small and dense (region feasibility, support values, piece
containment), so a tableau method with anti-cycling pivoting is simpler and
more predictable here than sparse machinery or interior-point codes.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import LpSolverError

FEAS_TOL = 1e-9
PIVOT_TOL = 1e-10
_MAX_PIVOTS = 100000


@dataclass
class LpResult:
    status: str  # "optimal" | "infeasible" | "unbounded"
    x: np.ndarray | None
    value: float


def _pivot(T: np.ndarray, row: int, col: int) -> None:
    T[row] /= T[row, col]
    factors = T[:, col].copy()
    factors[row] = 0.0
    T -= np.outer(factors, T[row])
    T[:, col] = 0.0
    T[row, col] = 1.0


def _run_simplex(T, basis, allowed, budget):
    """Pivot until optimal or unbounded. Returns (status, pivots_used)."""
    used = 0
    ncols = T.shape[1] - 1
    while True:
        red = T[-1, :ncols]
        entering = -1
        for j in range(ncols):
            # Bland: smallest eligible index enters
            if allowed[j] and red[j] < -PIVOT_TOL:
                entering = j
                break
        if entering < 0:
            return "optimal", used
        col = T[:-1, entering]
        rhs = T[:-1, -1]
        leave = -1
        best = np.inf
        for i in range(len(basis)):
            if col[i] > PIVOT_TOL:
                ratio = rhs[i] / col[i]
                if ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best = ratio
                    leave = i
        if leave < 0:
            return "unbounded", used
        _pivot(T, leave, entering)
        basis[leave] = entering
        used += 1
        if used > budget:
            raise LpSolverError(
                f"simplex exceeded {budget} pivots", phase="pivot-budget"
            )


def _build_tableau(A, b):
    """Standard-form tableau for A x <= b with x free (split x = u - v).

    Rows with negative right-hand side are negated and receive an artificial
    variable; the rest start with their slack basic.
    """
    m, d = A.shape
    neg = b < 0
    A2 = np.hstack([A, -A])
    b2 = b.copy()
    A2[neg] *= -1.0
    b2[neg] *= -1.0
    S = np.eye(m)
    S[neg, neg] = -1.0
    art_rows = np.nonzero(neg)[0]
    n_art = art_rows.size
    Art = np.zeros((m, n_art))
    Art[art_rows, np.arange(n_art)] = 1.0
    body = np.hstack([A2, S, Art, b2[:, None]])
    T = np.vstack([body, np.zeros(body.shape[1])])
    n_struct = 2 * d
    basis = []
    for i in range(m):
        if neg[i]:
            basis.append(n_struct + m + int(np.nonzero(art_rows == i)[0][0]))
        else:
            basis.append(n_struct + i)
    art_cols = np.arange(n_struct + m, n_struct + m + n_art)
    return T, basis, n_struct, m, art_cols


def _set_objective(T, basis, cost_row):
    """Install a reduced-cost row for the given full cost vector."""
    obj = np.zeros(T.shape[1])
    obj[: len(cost_row)] = cost_row
    for r, bv in enumerate(basis):
        if obj[bv] != 0.0:
            obj -= obj[bv] * T[r]
    T[-1] = obj


def _phase1(T, basis, art_cols, budget):
    ncols = T.shape[1] - 1
    cost = np.zeros(ncols)
    cost[art_cols] = 1.0
    _set_objective(T, basis, cost)
    allowed = np.ones(ncols, dtype=bool)
    status, used = _run_simplex(T, basis, allowed, budget)
    if status != "optimal":
        raise LpSolverError("phase-1 simplex did not terminate", phase="phase1")
    value = -T[-1, -1]
    return value, used


def _drive_out_artificials(T, basis, art_cols):
    art_set = set(int(c) for c in art_cols)
    if not art_set:
        return
    first_art = min(art_set)
    for r, bv in enumerate(basis):
        if bv not in art_set:
            continue
        piv = -1
        for j in range(first_art):
            if abs(T[r, j]) > PIVOT_TOL:
                piv = j
                break
        if piv >= 0:
            _pivot(T, r, piv)
            basis[r] = piv
        else:
            # redundant constraint row; neutralize it
            T[r, :] = 0.0


def solve_lp(A, b, cost) -> LpResult:
    """min cost.x subject to A x <= b, x free."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    cost = np.asarray(cost, dtype=float).reshape(-1)
    if A.ndim != 2 or A.shape[0] != b.shape[0]:
        raise ValueError("constraint shapes are inconsistent")
    d = A.shape[1]
    if cost.shape[0] != d:
        raise ValueError("cost length does not match the variable count")
    T, basis, n_struct, m, art_cols = _build_tableau(A, b)
    budget = _MAX_PIVOTS
    p1, used = _phase1(T, basis, art_cols, budget)
    if p1 > FEAS_TOL:
        return LpResult("infeasible", None, float("inf"))
    _drive_out_artificials(T, basis, art_cols)
    ncols = T.shape[1] - 1
    cost_row = np.zeros(ncols)
    cost_row[:d] = cost
    cost_row[d : 2 * d] = -cost
    _set_objective(T, basis, cost_row)
    allowed = np.ones(ncols, dtype=bool)
    allowed[art_cols] = False
    status, _ = _run_simplex(T, basis, allowed, budget - used)
    vals = np.zeros(ncols)
    for r, bv in enumerate(basis):
        vals[bv] = T[r, -1]
    x = vals[:d] - vals[d : 2 * d]
    if status == "unbounded":
        return LpResult("unbounded", x, float("-inf"))
    value = float(-T[-1, -1])
    return LpResult("optimal", x, value)


def feasible_point(A, b) -> np.ndarray | None:
    """A point satisfying A x <= b (within FEAS_TOL), or None."""
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).reshape(-1)
    if A.shape[0] == 0:
        return np.zeros(A.shape[1])
    T, basis, n_struct, m, art_cols = _build_tableau(A, b)
    p1, _ = _phase1(T, basis, art_cols, _MAX_PIVOTS)
    if p1 > FEAS_TOL:
        return None
    d = A.shape[1]
    ncols = T.shape[1] - 1
    vals = np.zeros(ncols)
    for r, bv in enumerate(basis):
        vals[bv] = T[r, -1]
    return vals[:d] - vals[d : 2 * d]
