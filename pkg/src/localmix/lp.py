"""Dense two-phase primal simplex with Bland's anti-cycling rule.

The tableau is kept in condensed (dictionary) form: one row per basic
variable and one column per non-basic variable, so slack columns are never
materialised. That keeps LPs with tens of thousands of inequality rows and a
few hundred variables cheap enough to pivot in memory.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from localmix.errors import InvalidInputError

OPT_TOL = 1e-7
PIVOT_TOL = 1e-9
FEAS_TOL = 1e-9


@dataclass
class LinearProgram:
    """Maximise ``c @ x`` subject to ``A_ub x <= b_ub``, ``A_eq x = b_eq`` and bounds.

    ``bounds`` holds one ``(lo, hi)`` pair per variable, ``None`` meaning
    unbounded on that side; the default is ``(0, None)`` for every variable.
    """

    c: np.ndarray
    A_ub: np.ndarray | None = None
    b_ub: np.ndarray | None = None
    A_eq: np.ndarray | None = None
    b_eq: np.ndarray | None = None
    bounds: list[tuple[float | None, float | None]] | None = None

    def __post_init__(self) -> None:
        self.c = np.asarray(self.c, dtype=float).ravel()
        nv = self.c.size
        self.A_ub, self.b_ub = _rows(self.A_ub, self.b_ub, nv, "inequality")
        self.A_eq, self.b_eq = _rows(self.A_eq, self.b_eq, nv, "equality")
        if self.bounds is None:
            self.bounds = [(0.0, None)] * nv
        if len(self.bounds) != nv:
            raise InvalidInputError(f"{len(self.bounds)} bounds for {nv} variables")

    @property
    def num_vars(self) -> int:
        return self.c.size

    @property
    def num_constraints(self) -> int:
        return self.A_ub.shape[0] + self.A_eq.shape[0]


def _rows(A, b, nv: int, kind: str) -> tuple[np.ndarray, np.ndarray]:
    if A is None:
        return np.zeros((0, nv)), np.zeros(0)
    A = np.atleast_2d(np.asarray(A, dtype=float))
    b = np.asarray(b, dtype=float).ravel()
    if A.shape != (b.size, nv):
        raise InvalidInputError(f"{kind} block has shape {A.shape}, expected ({b.size}, {nv})")
    return A, b


@dataclass
class LPResult:
    status: str  # optimal | infeasible | unbounded | iteration-capped
    x: np.ndarray | None
    objective: float
    iterations: int
    redundant_rows: int = 0


def _standardise(lp: LinearProgram):
    """Rewrite bounds so every variable is non-negative.

    Returns ``(c, A_ub, b_ub, A_eq, b_eq, T, offset)`` with ``x = offset + T @ y``.
    """
    cols, offset, extra_rows = [], np.zeros(lp.num_vars), []
    for k, (lo, hi) in enumerate(lp.bounds):
        lo = -np.inf if lo is None else float(lo)
        hi = np.inf if hi is None else float(hi)
        if lo > hi:
            raise InvalidInputError(f"variable {k} has empty bounds [{lo}, {hi}]")
        unit = np.zeros(lp.num_vars)
        unit[k] = 1.0
        if np.isfinite(lo):
            offset[k] = lo
            cols.append(unit)
            if np.isfinite(hi):
                extra_rows.append((len(cols) - 1, hi - lo))
        elif np.isfinite(hi):
            offset[k] = hi
            cols.append(-unit)
        else:
            cols.append(unit)
            cols.append(-unit)
    T = np.array(cols).T.reshape(lp.num_vars, len(cols))
    A_ub = lp.A_ub @ T
    b_ub = lp.b_ub - lp.A_ub @ offset
    if extra_rows:
        bound_rows = np.zeros((len(extra_rows), T.shape[1]))
        for r, (col, width) in enumerate(extra_rows):
            bound_rows[r, col] = 1.0
        A_ub = np.vstack([A_ub, bound_rows])
        b_ub = np.concatenate([b_ub, [w for _, w in extra_rows]])
    A_eq = lp.A_eq @ T
    b_eq = lp.b_eq - lp.A_eq @ offset
    return T.T @ lp.c, A_ub, b_ub, A_eq, b_eq, T, offset


class _Tableau:
    """Condensed tableau: ``x_B + D[:m, :k] x_N = D[:m, k]`` plus objective rows."""

    def __init__(self, c, A_ub, b_ub, A_eq, b_eq):
        nv = c.size
        m_ub, m_eq = A_ub.shape[0], A_eq.shape[0]
        m = m_ub + m_eq
        flip_ub = b_ub < 0
        flip_eq = b_eq < 0
        # slacks of flipped inequality rows start non-basic with coefficient -1
        flipped = np.flatnonzero(flip_ub)
        k = nv + flipped.size
        D = np.zeros((m + 2, k + 1))
        D[:m_ub, :nv] = np.where(flip_ub[:, None], -A_ub, A_ub)
        D[:m_ub, k] = np.abs(b_ub)
        for col, row in enumerate(flipped):
            D[row, nv + col] = -1.0
        D[m_ub:m, :nv] = np.where(flip_eq[:, None], -A_eq, A_eq)
        D[m_ub:m, k] = np.abs(b_eq)

        self.n_struct = nv
        first_art = nv + m_ub
        basic = np.empty(m, dtype=np.int64)
        artificial_rows = np.concatenate([flipped, np.arange(m_ub, m)])
        basic[:m_ub] = nv + np.arange(m_ub)
        basic[artificial_rows] = first_art + np.arange(artificial_rows.size)
        self.first_art = first_art
        self.basic = basic
        self.nonbasic = np.concatenate([np.arange(nv), nv + flipped]).astype(np.int64)
        self.m = m
        # phase-2 objective row: z - c.x = 0
        D[m, :nv] = -c
        # phase-1 objective: maximise -sum(artificials)
        if artificial_rows.size:
            D[m + 1, :] = -D[artificial_rows].sum(axis=0)
        self.D = D
        self.iterations = 0

    @property
    def rhs(self) -> np.ndarray:
        return self.D[: self.m, -1]

    def pivot(self, r: int, c: int) -> None:
        D = self.D
        p = D[r, c]
        row = D[r] / p
        col = D[:, c].copy()
        D -= np.multiply.outer(col, row)
        D[r] = row
        D[:, c] = -col / p
        D[r, c] = 1.0 / p
        rhs = D[: self.m, -1]
        rhs[(rhs < 0) & (rhs > -FEAS_TOL)] = 0.0
        self.basic[r], self.nonbasic[c] = self.nonbasic[c], self.basic[r]
        self.iterations += 1

    def entering(self, obj_row: int, allowed: np.ndarray) -> int | None:
        reduced = self.D[obj_row, :-1]
        candidates = np.flatnonzero((reduced < -OPT_TOL) & allowed)
        if candidates.size == 0:
            return None
        return int(candidates[np.argmin(self.nonbasic[candidates])])

    def leaving(self, c: int) -> int | None:
        colv = self.D[: self.m, c]
        rows = np.flatnonzero(colv > PIVOT_TOL)
        if rows.size == 0:
            return None
        ratios = self.rhs[rows] / colv[rows]
        best = ratios.min()
        tied = rows[ratios <= best + 1e-12 * max(1.0, abs(best))]
        return int(tied[np.argmin(self.basic[tied])])

    def run(self, obj_row: int, allowed: np.ndarray, cap: int) -> str:
        while True:
            if self.iterations >= cap:
                return "iteration-capped"
            c = self.entering(obj_row, allowed)
            if c is None:
                return "optimal"
            r = self.leaving(c)
            if r is None:
                return "unbounded"
            self.pivot(r, c)

    def drop_rows(self, rows: np.ndarray) -> None:
        keep = np.ones(self.D.shape[0], dtype=bool)
        keep[rows] = False
        self.D = self.D[keep]
        self.basic = self.basic[keep[: self.m]]
        self.m -= rows.size


def lp_solve(lp: LinearProgram, max_iter: int | None = None) -> LPResult:
    """Solve ``lp`` to an optimal basic feasible solution.

    The iteration cap defaults to ``10 * (vars + constraints) ** 2``; hitting it
    yields status ``"iteration-capped"`` together with the current vertex.
    """
    c, A_ub, b_ub, A_eq, b_eq, T, offset = _standardise(lp)
    if max_iter is None:
        max_iter = 10 * (c.size + A_ub.shape[0] + A_eq.shape[0]) ** 2
    tab = _Tableau(c, A_ub, b_ub, A_eq, b_eq)
    nv = tab.n_struct

    def not_artificial() -> np.ndarray:
        return tab.nonbasic < tab.first_art

    def result(status: str, redundant: int = 0) -> LPResult:
        y = np.zeros(nv)
        mask = tab.basic < nv
        y[tab.basic[mask]] = tab.rhs[mask]
        x = offset + T @ y
        return LPResult(status, x, float(lp.c @ x), tab.iterations, redundant)

    has_art = bool((tab.basic >= tab.first_art).any())
    redundant = 0
    if has_art:
        status = tab.run(tab.m + 1, not_artificial(), max_iter)
        if status == "iteration-capped":
            return LPResult(status, None, float("nan"), tab.iterations)
        if tab.D[tab.m + 1, -1] < -1e-7:
            return LPResult("infeasible", None, float("nan"), tab.iterations)
        # drive zero-level artificials out of the basis, or drop their rows
        dead = []
        for r in np.flatnonzero(tab.basic >= tab.first_art):
            row = np.abs(tab.D[r, :-1]) * not_artificial()
            j = int(np.argmax(row))
            if row[j] > PIVOT_TOL:
                tab.pivot(r, j)
            else:
                dead.append(r)
        if dead:
            redundant = len(dead)
            tab.drop_rows(np.array(dead))
    allowed = not_artificial()
    status = tab.run(tab.m, allowed, max_iter)
    if status == "unbounded":
        return LPResult(status, None, float("inf"), tab.iterations, redundant)
    return result(status, redundant)
