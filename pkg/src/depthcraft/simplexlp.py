"""Dense two-phase primal simplex with upper-bounded variables.

Solves ``maximize c'x subject to A x = b, 0 <= x <= u`` with Bland's
anti-cycling rule throughout. The tableau is kept dense, which is the right
trade-off here: the equality system has as many rows as the data dimension,
so pivots are cheap even for a few thousand variables.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SolverError

__all__ = ["LPResult", "solve_bounded_lp"]

_TOL = 1e-10


@dataclass
class LPResult:
    status: str                 # optimal | unbounded | early | maxiter
    x: np.ndarray | None
    objective: float
    iterations: int


class _Tableau:
    """Simplex state: reduced columns, basic values, and bound statuses."""

    def __init__(self, A: np.ndarray, b: np.ndarray, upper: np.ndarray):
        m, n = A.shape
        self.m, self.n = m, n
        sign = np.where(b < 0, -1.0, 1.0)
        self.tab = np.hstack([A * sign[:, None], np.eye(m)])
        self.xB = np.abs(b).astype(float)
        self.basis = np.arange(n, n + m)
        self.upper = np.concatenate([upper.astype(float), np.full(m, np.inf)])
        self.at_upper = np.zeros(n + m, dtype=bool)
        self.iterations = 0

    # -- bookkeeping ------------------------------------------------------

    def is_basic(self) -> np.ndarray:
        mask = np.zeros(self.n + self.m, dtype=bool)
        mask[self.basis] = True
        return mask

    def full_x(self) -> np.ndarray:
        x = np.where(self.at_upper, np.where(np.isfinite(self.upper), self.upper, 0.0), 0.0)
        x[self.basis] = self.xB
        return x

    def pivot(self, row: int, col: int, leave_at_upper: bool) -> None:
        self.at_upper[self.basis[row]] = leave_at_upper
        self.basis[row] = col
        piv = self.tab[row, col]
        self.tab[row] /= piv
        other = np.arange(self.m) != row
        factor = self.tab[other, col][:, None]
        self.tab[other] -= factor * self.tab[row][None, :]
        # Clean tiny residues in the pivot column for numerical hygiene.
        self.tab[other, col] = 0.0
        self.tab[row, col] = 1.0

    # -- the simplex loop -------------------------------------------------

    def run(self, cost: np.ndarray, eligible: np.ndarray, tol: float,
            stop_objective: float | None, max_iter: int) -> str:
        """Maximize ``cost' x`` from the current basis. Mutates the state."""
        while True:
            if self.iterations >= max_iter:
                return "maxiter"
            basic_mask = self.is_basic()
            # Reduced costs of every column w.r.t. the current basis.
            zbar = cost - cost[self.basis] @ self.tab
            improving = (~basic_mask) & eligible & (
                ((~self.at_upper) & (zbar > tol)) | (self.at_upper & (zbar < -tol))
            )
            if not improving.any():
                return "optimal"
            j = int(np.flatnonzero(improving)[0])  # Bland: lowest index enters
            direction = -1.0 if self.at_upper[j] else 1.0
            eff = direction * self.tab[:, j]

            # Ratio test: entering variable moves by t away from its bound.
            t_best = self.upper[j]
            leave_row = -1
            leave_at_upper = False
            for i in range(self.m):
                if eff[i] > tol:
                    lim = self.xB[i] / eff[i]
                    hits_upper = False
                elif eff[i] < -tol:
                    ub = self.upper[self.basis[i]]
                    if not np.isfinite(ub):
                        continue
                    lim = (ub - self.xB[i]) / (-eff[i])
                    hits_upper = True
                else:
                    continue
                better = lim < t_best - 1e-15
                tied = abs(lim - t_best) <= 1e-15 and leave_row >= 0 \
                    and self.basis[i] < self.basis[leave_row]
                if better or tied:
                    t_best = lim
                    leave_row = i
                    leave_at_upper = hits_upper
            if not np.isfinite(t_best):
                return "unbounded"

            t_best = max(t_best, 0.0)
            self.xB -= t_best * eff
            np.clip(self.xB, 0.0, None, out=self.xB)
            if leave_row < 0:
                # Bound flip: the entering variable jumps to its other bound.
                self.at_upper[j] = ~self.at_upper[j]
            else:
                new_val = t_best if direction > 0 else self.upper[j] - t_best
                self.pivot(leave_row, j, leave_at_upper)
                self.xB[leave_row] = new_val
            self.iterations += 1

            if stop_objective is not None:
                x = self.full_x()
                if float(cost @ x) >= stop_objective:
                    return "early"


def solve_bounded_lp(A, b, c, upper, tol: float = _TOL,
                     stop_objective: float | None = None,
                     max_iter: int | None = None) -> LPResult:
    """Maximize ``c'x`` subject to ``A x = b`` and ``0 <= x <= upper``.

    Parameters
    ----------
    A, b, c, upper : array_like
        Equality system ``(m, n)``/``(m,)``, objective ``(n,)``, and upper
        bounds ``(n,)`` (``inf`` allowed).
    tol : float
        Feasibility/pricing tolerance.
    stop_objective : float, optional
        Early exit: stop as soon as the phase-2 objective reaches this value
        (status ``'early'``). Useful as a membership oracle.
    max_iter : int, optional
        Safety cap per phase; defaults to ``200 + 40 * (n + m)``.

    Returns
    -------
    LPResult
        ``status`` is ``'optimal'``, ``'early'``, ``'unbounded'``,
        ``'infeasible'``, or ``'maxiter'``.
    """
    A = np.asarray(A, dtype=float)
    b = np.asarray(b, dtype=float).ravel()
    c = np.asarray(c, dtype=float).ravel()
    upper = np.asarray(upper, dtype=float).ravel()
    m, n = A.shape
    if b.shape != (m,) or c.shape != (n,) or upper.shape != (n,):
        raise SolverError("inconsistent LP dimensions")
    if max_iter is None:
        max_iter = 200 + 40 * (n + m)

    state = _Tableau(A, b, upper)
    cols = n + m
    eligible = np.ones(cols, dtype=bool)

    # Phase 1: drive the artificial variables to zero. With b = 0 the initial
    # all-artificial basis is already feasible at zero, so skip the churn.
    if float(np.abs(b).sum()) > tol:
        c1 = np.zeros(cols)
        c1[n:] = -1.0
        status = state.run(c1, eligible, tol, None, max_iter)
        if status == "maxiter":
            return LPResult("maxiter", None, np.nan, state.iterations)
        infeas = float(state.xB[state.basis >= n].sum())
        if infeas > 1e-8 * max(1.0, float(np.abs(b).max())):
            return LPResult("infeasible", None, np.nan, state.iterations)

    # Pivot leftover artificials out of the basis where possible; redundant
    # rows keep theirs, locked at zero by a zero upper bound.
    for row in range(m):
        if state.basis[row] >= n:
            candidates = np.flatnonzero(np.abs(state.tab[row, :n]) > tol)
            candidates = [j for j in candidates if j not in set(state.basis)]
            if candidates:
                state.pivot(row, int(candidates[0]), False)
                state.xB[row] = 0.0
    state.upper[n:] = 0.0
    eligible[n:] = False

    # Phase 2: the real objective.
    c2 = np.zeros(cols)
    c2[:n] = c
    status = state.run(c2, eligible, tol, stop_objective, max_iter + state.iterations)
    x = state.full_x()[:n]
    obj = float(c @ x)
    if status == "maxiter":
        return LPResult("maxiter", x, obj, state.iterations)
    if status == "unbounded":
        return LPResult("unbounded", None, np.inf, state.iterations)
    return LPResult(status, x, obj, state.iterations)
