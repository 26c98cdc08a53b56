"""Dense two-phase tableau simplex with Bland's anti-cycling rule.

Solves ``min c.x  s.t.  A x = b, x >= 0``. Sized for the few-hundred-column
problems that arise from enumerating deterministic channels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

OPTIMAL, INFEASIBLE, UNBOUNDED = "optimal", "infeasible", "unbounded"


@dataclass(frozen=True)
class LPResult:
    status: str
    x: Optional[np.ndarray]
    value: float
    duals: Optional[np.ndarray]  # y with A^T y <= c at optimum, one entry per row
    phase1_residual: float
    iterations: int


class _Tableau:
    def __init__(self, t: np.ndarray, basis: list, tol: float):
        self.t = t
        self.basis = basis
        self.tol = tol
        self.iterations = 0

    def pivot(self, row: int, col: int) -> None:
        t = self.t
        t[row] /= t[row, col]
        col_vals = t[:, col].copy()
        col_vals[row] = 0.0
        t -= np.outer(col_vals, t[row])
        t[:, col] = 0.0
        t[row, col] = 1.0
        self.basis[row] = col
        self.iterations += 1

    def run(self, cost_row: np.ndarray, allowed: np.ndarray, max_iter: int) -> str:
        """Minimize against the reduced-cost row ``cost_row`` (updated in place)."""
        t, tol = self.t, self.tol
        m = t.shape[0]
        for _ in range(max_iter):
            candidates = np.nonzero((cost_row[:-1] < -tol) & allowed)[0]
            if candidates.size == 0:
                return OPTIMAL
            col = int(candidates[0])
            column = t[:, col]
            positive = column > tol
            if not np.any(positive):
                return UNBOUNDED
            ratios = np.full(m, np.inf)
            ratios[positive] = t[positive, -1] / column[positive]
            best = ratios.min()
            ties = np.nonzero(ratios <= best + tol * max(1.0, abs(best)))[0]
            row = int(min(ties, key=lambda r: self.basis[r]))
            reduced = cost_row[col]
            self.pivot(row, col)
            cost_row -= reduced * t[row]
            cost_row[col] = 0.0
        raise RuntimeError("simplex iteration limit reached")


def simplex(c: Sequence[float], a_eq, b_eq, tol: float = 1e-9, feas_tol: float = 1e-9,
            basis: Optional[Sequence[int]] = None, max_iter: int = 50_000) -> LPResult:
    """Two-phase simplex; pass ``basis`` (columns forming an identity, b >= 0) to skip phase one."""
    a = np.array(a_eq, dtype=float)
    b = np.array(b_eq, dtype=float)
    c = np.array(c, dtype=float)
    m, n = a.shape
    sign = np.where(b < 0, -1.0, 1.0)
    a *= sign[:, None]
    b *= sign

    if basis is not None:
        t = np.hstack([a, b[:, None]])
        tab = _Tableau(t, list(basis), tol)
        n_art = 0
        residual = 0.0
    else:
        # columns n..n+m-1 are artificials; they stay in the tableau to read off B^-1
        t = np.hstack([a, np.eye(m), b[:, None]])
        tab = _Tableau(t, list(range(n, n + m)), tol)
        n_art = m
        cost1 = np.zeros(n + m + 1)
        cost1[n:n + m] = 1.0
        cost1 -= t.sum(axis=0)
        cost1[n:n + m] = 0.0
        tab.run(cost1, np.ones(n + m, dtype=bool), max_iter)
        residual = max(0.0, -float(cost1[-1]))
        if residual > feas_tol:
            return LPResult(INFEASIBLE, None, np.nan, None, residual, tab.iterations)
        # drive artificials out of the basis where possible
        for r in range(m):
            if tab.basis[r] >= n:
                nz = np.nonzero(np.abs(t[r, :n]) > tol)[0]
                if nz.size:
                    tab.pivot(r, int(nz[0]))

    width = t.shape[1]
    cost = np.zeros(width)
    cost[:n] = c
    for r, j in enumerate(tab.basis):
        if j < n and cost[j] != 0.0:
            cost -= cost[j] * t[r]
            cost[j] = 0.0
    allowed = np.zeros(width - 1, dtype=bool)
    allowed[:n] = True
    status = tab.run(cost, allowed, max_iter)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, None, -np.inf, None, residual, tab.iterations)
    x = np.zeros(n)
    for r, j in enumerate(tab.basis):
        if j < n:
            x[j] = t[r, -1]
    x = np.clip(x, 0.0, None)
    duals = None
    if n_art:
        # reduced cost of artificial i is 0 - y_i
        duals = -cost[n:n + m] * sign
    return LPResult(OPTIMAL, x, float(c @ x), duals, residual, tab.iterations)
