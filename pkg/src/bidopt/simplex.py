"""Bounded-variable primal simplex exposing duals and reduced costs.

The engine works on the augmented system ``A x + w = rhs`` where one
logical variable w is appended per row: ``[0, inf)`` for a <= row and
``[0, 0]`` for an equality row.  Any basis therefore always exists (the
all-logical one), and phase 1 is the composite kind: while any basic
variable violates its bounds, pricing runs against the gradient of the
total bound violation instead of the true objective.  No big-M terms,
no artificial columns.

Pivot rule: largest reduced cost (Dantzig), with Bland's smallest-index
rule engaged after 50 consecutive degenerate steps and released on the
first real step.  Rows are equilibrated by power-of-two factors, exact
in floating point; duals are mapped back through the factors.  The
basis is factorized with a dense LU for small row counts and SuperLU
for large ones, updated between refactorizations with product-form eta
vectors.  A stall is only accepted as a final status right after a
fresh factorization, which keeps terminal numerics honest.

Maximization models are negated internally; reported objective, duals
and reduced costs are all in the model's own (maximization) sense, so
at optimality a column sitting at its lower bound has reduced cost
<= +opt_tol and one at its upper bound has reduced cost >= -opt_tol.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse
import scipy.sparse.linalg

from .model import LpModel

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
ITERATION_LIMIT = "iteration-limit"

BASIC, AT_LOWER, AT_UPPER = 0, 1, 2

FEAS_TOL = 1e-7
OPT_TOL = 1e-7
BLAND_AFTER = 50

_PIVOT_TOL = 1e-9
_TIE_TOL = 1e-10
_REFACTOR_EVERY = 64
_DENSE_LIMIT = 150

# Per-column (lower, upper) overrides applied on top of the model bounds;
# keys are column positions or names.  Fixing a column means lower == upper.
Bounds = dict


@dataclass(frozen=True)
class LpSolution:
    """Result of one solve.

    ``basis`` is the per-variable status vector (structural columns then
    one logical per row); it is the warm-start token accepted by
    ``resolve`` and carries no other meaning for callers.
    """

    status: str
    objective: float
    primal: tuple[float, ...]
    reduced_costs: tuple[float, ...]
    duals: tuple[float, ...]
    iterations: int
    basis: tuple[int, ...] | None = None


class _Factor:
    """LU factorization of the basis plus product-form eta updates."""

    def __init__(self, bmat: scipy.sparse.csc_matrix, dense: bool):
        self.dense = dense
        if dense:
            lu, piv = scipy.linalg.lu_factor(bmat.toarray(), check_finite=False)
            diag = np.abs(np.diag(lu))
            if diag.size and diag.min() <= 1e-12 * max(1.0, diag.max()):
                raise RuntimeError("singular basis")
            self._lu = (lu, piv)
        else:
            self._lu = scipy.sparse.linalg.splu(bmat.tocsc())
        self.etas: list[tuple[int, np.ndarray]] = []

    def ftran(self, b: np.ndarray) -> np.ndarray:
        if self.dense:
            x = scipy.linalg.lu_solve(self._lu, b)
        else:
            x = self._lu.solve(b)
        for p, d in self.etas:
            xp = x[p] / d[p]
            x = x - d * xp
            x[p] = xp
        return x

    def btran(self, c: np.ndarray) -> np.ndarray:
        c = c.copy()
        for p, d in reversed(self.etas):
            c[p] = (c[p] - (d @ c - d[p] * c[p])) / d[p]
        if self.dense:
            return scipy.linalg.lu_solve(self._lu, c, trans=1)
        return self._lu.solve(c, trans="T")

    def update(self, pos: int, w: np.ndarray) -> None:
        self.etas.append((pos, w.copy()))


class SimplexEngine:
    """Reusable solver context for one LpModel.

    Construction does the sparse setup once; ``solve`` may then be
    called many times with different bound overrides and warm starts
    (the branch-and-bound driver does exactly that).  A context must
    not be shared between threads during a solve.
    """

    def __init__(
        self,
        model: LpModel,
        feas_tol: float = FEAS_TOL,
        opt_tol: float = OPT_TOL,
        bland_after: int = BLAND_AFTER,
    ):
        self.model = model
        self.feas_tol = feas_tol
        self.opt_tol = opt_tol
        self.bland_after = bland_after

        n = len(model.columns)
        m = len(model.rows)
        self.n = n
        self.m = m

        scale = np.ones(m)
        for i, row in enumerate(model.rows):
            biggest = max((abs(v) for _, v in row.coeffs), default=0.0)
            if biggest > 0.0:
                scale[i] = 2.0 ** (-round(math.log2(biggest)))
        self.row_scale = scale

        rows_idx: list[int] = []
        cols_idx: list[int] = []
        data: list[float] = []
        for i, row in enumerate(model.rows):
            for j, v in row.coeffs:
                rows_idx.append(i)
                cols_idx.append(j)
                data.append(v * scale[i])
        amat = scipy.sparse.coo_matrix(
            (data, (rows_idx, cols_idx)), shape=(m, n)
        ).tocsc()
        self._aug = scipy.sparse.hstack(
            [amat, scipy.sparse.identity(m, format="csc")], format="csc"
        )
        self._aug_t = self._aug.T.tocsr()
        self.rhs = np.array([r.rhs for r in model.rows]) * scale

        sense_max = 1.0 if model.maximize else -1.0
        self.cost = np.zeros(n + m)
        self.cost[:n] = [-sense_max * c.objective for c in model.columns]
        self._obj = np.array([c.objective for c in model.columns])

        self.base_lower = np.empty(n + m)
        self.base_upper = np.empty(n + m)
        for j, c in enumerate(model.columns):
            self.base_lower[j] = c.lower
            self.base_upper[j] = c.upper
        for i, r in enumerate(model.rows):
            self.base_lower[n + i] = 0.0
            self.base_upper[n + i] = math.inf if r.sense == "L" else 0.0

        # Structural columns whose only nonzero sits in one equality row:
        # natural crash candidates for that row's basis slot.
        nnz = np.diff(amat.indptr)
        self._crash: dict[int, list[int]] = {}
        for j in range(n):
            if nnz[j] == 1:
                i = int(amat.indices[amat.indptr[j]])
                if model.rows[i].sense == "E":
                    self._crash.setdefault(i, []).append(j)

    # -- helpers -------------------------------------------------------

    def _column(self, j: int) -> np.ndarray:
        col = np.zeros(self.m)
        lo, hi = self._aug.indptr[j], self._aug.indptr[j + 1]
        col[self._aug.indices[lo:hi]] = self._aug.data[lo:hi]
        return col

    def _nonbasic_values(self, vstat, lower, upper) -> np.ndarray:
        x = np.zeros(self.n + self.m)
        at_lo = vstat == AT_LOWER
        at_up = vstat == AT_UPPER
        lo_vals = np.where(np.isfinite(lower), lower, 0.0)
        up_vals = np.where(np.isfinite(upper), upper, 0.0)
        x[at_lo] = lo_vals[at_lo]
        x[at_up] = up_vals[at_up]
        return x

    def _cold_vstat(self, lower, upper) -> np.ndarray:
        vstat = np.full(self.n + self.m, AT_LOWER, dtype=np.int8)
        no_lo = ~np.isfinite(lower)
        vstat[no_lo & np.isfinite(upper)] = AT_UPPER
        for i in range(self.m):
            pick = self.n + i
            for cand in self._crash.get(i, ()):
                if lower[cand] < upper[cand]:
                    pick = cand
                    break
            vstat[pick] = BASIC
        return vstat

    def _factorize(self, basis: np.ndarray) -> _Factor:
        bmat = self._aug[:, basis]
        return _Factor(bmat, dense=self.m <= _DENSE_LIMIT)

    def _recompute_basics(self, factor, basis, vstat, lower, upper) -> np.ndarray:
        xn = self._nonbasic_values(vstat, lower, upper)
        xn[basis] = 0.0
        return factor.ftran(self.rhs - self._aug @ xn)

    # -- main ----------------------------------------------------------

    def solve(
        self,
        bounds: dict | None = None,
        warm: tuple[int, ...] | None = None,
        max_iterations: int | None = None,
    ) -> LpSolution:
        n, m = self.n, self.m
        lower = self.base_lower.copy()
        upper = self.base_upper.copy()
        if bounds:
            for key, (lo, hi) in bounds.items():
                j = self.model.column_index[key] if isinstance(key, str) else key
                if lo > hi:
                    raise ValueError(f"bounds for column {key}: lower > upper")
                lower[j] = lo
                upper[j] = hi

        vstat: np.ndarray | None = None
        if warm is not None and len(warm) == n + m:
            cand = np.array(warm, dtype=np.int8)
            if int(np.count_nonzero(cand == BASIC)) == m:
                vstat = cand
        if vstat is None:
            vstat = self._cold_vstat(lower, upper)
        # Nonbasic statuses must still make sense under the new bounds.
        nb = vstat != BASIC
        snap_lo = nb & (vstat == AT_UPPER) & ~np.isfinite(upper)
        vstat[snap_lo] = AT_LOWER
        snap_up = nb & (vstat == AT_LOWER) & ~np.isfinite(lower) & np.isfinite(upper)
        vstat[snap_up] = AT_UPPER

        if max_iterations is None:
            max_iterations = 100 * (n + m) + 10_000

        basis = np.flatnonzero(vstat == BASIC)
        try:
            factor = self._factorize(basis)
        except RuntimeError:
            vstat = self._cold_vstat(lower, upper)
            basis = np.flatnonzero(vstat == BASIC)
            factor = self._factorize(basis)
        basic_val = self._recompute_basics(factor, basis, vstat, lower, upper)

        free_var = ~np.isfinite(lower) & ~np.isfinite(upper)
        iterations = 0
        degen_streak = 0
        bland = False
        status = None

        while True:
            if iterations >= max_iterations:
                status = ITERATION_LIMIT
                break

            lb_b = lower[basis]
            ub_b = upper[basis]
            viol_low = basic_val < lb_b - self.feas_tol
            viol_high = basic_val > ub_b + self.feas_tol
            in_phase1 = bool(viol_low.any() or viol_high.any())

            if in_phase1:
                grad = np.zeros(m)
                grad[viol_low] = -1.0
                grad[viol_high] = 1.0
                y = factor.btran(grad)
                d = -(self._aug_t @ y)
            else:
                y = factor.btran(self.cost[basis])
                d = self.cost - self._aug_t @ y

            movable = (vstat != BASIC) & (upper > lower)
            elig = movable & (
                ((vstat == AT_LOWER) & ~free_var & (d < -self.opt_tol))
                | ((vstat == AT_UPPER) & (d > self.opt_tol))
                | (free_var & (np.abs(d) > self.opt_tol))
            )
            if not elig.any():
                stall = INFEASIBLE if in_phase1 else OPTIMAL
                if factor.etas:
                    # Re-verify the stall against a fresh factorization.
                    factor = self._factorize(basis)
                    basic_val = self._recompute_basics(factor, basis, vstat, lower, upper)
                    continue
                status = stall
                break

            if bland:
                j = int(np.flatnonzero(elig)[0])
            else:
                score = np.where(elig, np.abs(d), -1.0)
                j = int(np.argmax(score))

            if free_var[j]:
                sigma = 1.0 if d[j] < 0 else -1.0
            else:
                sigma = 1.0 if vstat[j] == AT_LOWER else -1.0
            w = factor.ftran(self._column(j))
            rate = sigma * w

            with np.errstate(divide="ignore", invalid="ignore"):
                down = rate > _PIVOT_TOL
                up = rate < -_PIVOT_TOL
                target_down = np.where(
                    viol_high, ub_b, np.where(viol_low, -math.inf, lb_b)
                )
                target_up = np.where(
                    viol_low, lb_b, np.where(viol_high, math.inf, ub_b)
                )
                ratios = np.full(m, math.inf)
                ratios[down] = (basic_val[down] - target_down[down]) / rate[down]
                ratios[up] = (target_up[up] - basic_val[up]) / (-rate[up])
            np.maximum(ratios, 0.0, out=ratios)

            flip_range = upper[j] - lower[j]
            t_pivot = float(ratios.min()) if m else math.inf
            if flip_range <= t_pivot:
                if not np.isfinite(flip_range):
                    if in_phase1:
                        raise RuntimeError("phase-1 direction unblocked; numerical failure")
                    status = UNBOUNDED
                    break
                basic_val -= flip_range * rate
                vstat[j] = AT_UPPER if vstat[j] == AT_LOWER else AT_LOWER
                step = flip_range
            else:
                if not np.isfinite(t_pivot):
                    if in_phase1:
                        raise RuntimeError("phase-1 direction unblocked; numerical failure")
                    status = UNBOUNDED
                    break
                cand = np.flatnonzero(ratios <= t_pivot + _TIE_TOL)
                if bland:
                    pos = int(cand[np.argmin(basis[cand])])
                else:
                    stab = np.abs(rate[cand])
                    best = cand[stab >= stab.max() - _TIE_TOL]
                    pos = int(best[np.argmin(basis[best])])
                step = float(max(ratios[pos], 0.0))

                leaving = int(basis[pos])
                if rate[pos] > 0:
                    side = AT_UPPER if viol_high[pos] else AT_LOWER
                else:
                    side = AT_LOWER if viol_low[pos] else AT_UPPER

                if free_var[j]:
                    enter_from = 0.0
                elif vstat[j] == AT_LOWER:
                    enter_from = lower[j] if np.isfinite(lower[j]) else 0.0
                else:
                    enter_from = upper[j]

                basic_val -= step * rate
                basic_val[pos] = enter_from + sigma * step
                vstat[leaving] = side
                vstat[j] = BASIC
                basis[pos] = j
                factor.update(pos, w)

            if step <= _TIE_TOL:
                degen_streak += 1
                if degen_streak >= self.bland_after:
                    bland = True
            else:
                degen_streak = 0
                bland = False

            iterations += 1
            if len(factor.etas) >= _REFACTOR_EVERY:
                factor = self._factorize(basis)
                basic_val = self._recompute_basics(factor, basis, vstat, lower, upper)

        return self._package(status, factor, basis, vstat, basic_val, lower, upper, iterations)

    def _package(
        self, status, factor, basis, vstat, basic_val, lower, upper, iterations
    ) -> LpSolution:
        n, m = self.n, self.m
        x = self._nonbasic_values(vstat, lower, upper)
        x[basis] = basic_val
        primal = x[:n]
        sense_max = 1.0 if self.model.maximize else -1.0

        y = factor.btran(self.cost[basis])
        rc_int = self.cost - self._aug_t @ y
        duals = -sense_max * (self.row_scale * y)
        reduced = -sense_max * rc_int[:n]

        objective = float(self._obj @ primal) if status != INFEASIBLE else math.nan
        return LpSolution(
            status=status,
            objective=objective,
            primal=tuple(float(v) for v in primal),
            reduced_costs=tuple(float(v) for v in reduced),
            duals=tuple(float(v) for v in duals),
            iterations=iterations,
            basis=tuple(int(s) for s in vstat),
        )


def solve_lp(
    model: LpModel,
    bounds: dict | None = None,
    max_iterations: int | None = None,
    feas_tol: float = FEAS_TOL,
    opt_tol: float = OPT_TOL,
) -> LpSolution:
    """Solve the LP relaxation (SOS sets ignored) from a cold start."""
    engine = SimplexEngine(model, feas_tol=feas_tol, opt_tol=opt_tol)
    return engine.solve(bounds=bounds, max_iterations=max_iterations)


def resolve(
    model: LpModel,
    previous: LpSolution,
    new_bounds: dict | None = None,
    max_iterations: int | None = None,
    feas_tol: float = FEAS_TOL,
    opt_tol: float = OPT_TOL,
) -> LpSolution:
    """Re-solve after a bound change, warm-starting from ``previous``.

    The result must agree with a cold solve on status and objective;
    the warm start only saves iterations.
    """
    engine = SimplexEngine(model, feas_tol=feas_tol, opt_tol=opt_tol)
    return engine.solve(
        bounds=new_bounds, warm=previous.basis, max_iterations=max_iterations
    )
