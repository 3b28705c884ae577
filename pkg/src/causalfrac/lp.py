"""Dense linear programming.

``solve_lp`` maximises ``c @ x`` subject to row constraints ``A x (<=|=|>=) b``
and ``x >= 0``. The default method is a two-phase revised simplex with an
explicit basis inverse, Dantzig pricing, a Harris ratio test and a switch to
Bland's rule while the objective stalls.

The LPs built here are heavily degenerate (many equal table entries), so the
inequality rows are relaxed by tiny random amounts while pivoting. Once the
perturbed problem is optimal the true right-hand side is restored and a few
dual simplex pivots recover primal feasibility; the returned basis is optimal
for the unperturbed problem. ``method="highs"`` delegates to SciPy's HiGHS
and is kept for cross-checking.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy import sparse
from scipy.linalg.blas import dger
from scipy.sparse.linalg import splu

logger = logging.getLogger(__name__)

LE, EQ, GE = "<=", "=", ">="

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"
NUMERICAL_FAILURE = "numerical_failure"

PRICING_CHUNK = 8192
FEAS_TOL = 1e-9
PERTURB_SCALE = 1e-7


@dataclass(frozen=True, eq=False)
class LinearProgram:
    """maximise c @ x  s.t.  A[r] @ x  senses[r]  b[r],  x >= 0."""

    c: np.ndarray
    A: np.ndarray = field(repr=False)
    senses: tuple[str, ...]
    b: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.c, dtype=float)
        A = np.asarray(self.A, dtype=float)
        b = np.asarray(self.b, dtype=float)
        senses = tuple(self.senses)
        if A.ndim != 2 or A.shape != (len(b), len(c)):
            raise ValueError(f"constraint matrix {A.shape} inconsistent with {len(b)} rows, {len(c)} variables")
        if len(senses) != len(b) or any(s not in (LE, EQ, GE) for s in senses):
            raise ValueError("one relation in {'<=', '=', '>='} per constraint row")
        if not (np.all(np.isfinite(A)) and np.all(np.isfinite(b)) and np.all(np.isfinite(c))):
            raise ValueError("linear program has non-finite entries")
        object.__setattr__(self, "c", c)
        object.__setattr__(self, "A", A)
        object.__setattr__(self, "b", b)
        object.__setattr__(self, "senses", senses)

    @property
    def shape(self) -> tuple[int, int]:
        return self.A.shape

    def residual(self, x: np.ndarray) -> float:
        """Largest constraint violation of ``x`` (bounds included)."""
        ax = self.A @ x - self.b
        s = np.array(self.senses)
        viol = np.where(s == LE, np.maximum(ax, 0), np.where(s == GE, np.maximum(-ax, 0), np.abs(ax)))
        worst = float(viol.max()) if len(viol) else 0.0
        return max(worst, float(np.maximum(-x, 0).max()) if len(x) else 0.0)


@dataclass
class LPResult:
    status: str
    value: float
    x: np.ndarray | None
    iterations: int = 0
    message: str = ""

    @property
    def ok(self) -> bool:
        return self.status == OPTIMAL


class _Revised:
    """Revised simplex on M z = rhs, z >= 0, starting from an identity basis."""

    def __init__(self, M, rhs, basis, opt_tol, piv_tol, refactor_every, stall_limit, max_iter):
        self.set_matrix(M)
        self.rhs = rhs
        self.basis = np.array(basis, dtype=np.int64)
        self.m = M.shape[0]
        self.Binv = np.asfortranarray(np.eye(self.m))
        self.xB = rhs.copy()
        self.opt_tol = opt_tol
        self.piv_tol = piv_tol
        self.refactor_every = refactor_every
        self.stall_limit = stall_limit
        self.max_iter = max_iter
        self.iterations = 0

    def set_matrix(self, M):
        self.M = M
        # pricing only touches nonzeros; LP matrices here are mostly 0/1 incidence columns
        self.MT = sparse.csr_matrix(M.T) if np.count_nonzero(M) < 0.2 * M.size else np.ascontiguousarray(M.T)
        N = M.shape[1]
        self.chunks = [(a, min(a + PRICING_CHUNK, N)) for a in range(0, N, PRICING_CHUNK)]
        self.MT_chunks = [self.MT[a:b] for a, b in self.chunks]
        self.next_chunk = 0

    def _price(self, cost, y, allowed, basic):
        """Partial Dantzig pricing: best column of the first chunk (cyclically) that has one."""
        for step in range(len(self.chunks)):
            c = (self.next_chunk + step) % len(self.chunks)
            a, b = self.chunks[c]
            rc = cost[a:b] - self.MT_chunks[c] @ y
            rc[basic[a:b] | ~allowed[a:b]] = 0.0
            j = int(np.argmax(rc))
            if rc[j] > self.opt_tol:
                self.next_chunk = c
                return a + j
        return None

    def refactor(self):
        B = self.M[:, self.basis]
        if sparse.issparse(self.MT):
            try:
                self.Binv = np.asfortranarray(splu(sparse.csc_matrix(B)).solve(np.eye(self.m)))
            except RuntimeError as exc:
                raise np.linalg.LinAlgError(str(exc)) from exc
        else:
            self.Binv = np.asfortranarray(np.linalg.inv(B))
        self.xB = self.Binv @ self.rhs
        self.xB[np.abs(self.xB) < 1e-13] = 0.0

    def run(self, cost, allowed):
        """Maximise ``cost @ z`` over columns in ``allowed``; returns a status string."""
        since_refactor = 0
        best = -np.inf
        stalled = 0
        bland = False
        while True:
            if self.iterations >= self.max_iter:
                return NUMERICAL_FAILURE
            y = cost[self.basis] @ self.Binv
            if bland:
                rc = cost - self.MT @ y
                rc[self.basis] = 0.0
                rc[~allowed] = 0.0
                cand = np.flatnonzero(rc > self.opt_tol)
                if len(cand) == 0:
                    return OPTIMAL
                j = int(cand[0])
            else:
                basic = np.zeros(len(cost), dtype=bool)
                basic[self.basis] = True
                j = self._price(cost, y, allowed, basic)
                if j is None:
                    return OPTIMAL
            u = self.Binv @ self.M[:, j]
            pos = u > self.piv_tol
            if not pos.any():
                return UNBOUNDED
            r = self._ratio_test(u, pos, bland)
            self._pivot(r, j, u)
            self.iterations += 1
            since_refactor += 1
            if since_refactor >= self.refactor_every:
                self.refactor()
                since_refactor = 0
            obj = float(cost[self.basis] @ self.xB)
            if obj > best + 1e-12:
                best = obj
                stalled = 0
                bland = False
            else:
                stalled += 1
                if stalled >= self.stall_limit:
                    bland = True

    def _ratio_test(self, u, pos, bland):
        """Harris two-pass test: among rows blocking within the feasibility
        tolerance, take the largest pivot (lowest basic index under Bland)."""
        xb = np.maximum(self.xB, 0.0)
        up = u[pos]
        theta_max = ((xb[pos] + FEAS_TOL) / up).min()
        rows = np.flatnonzero(pos)
        cand = rows[xb[pos] / up <= theta_max]
        if bland:
            return int(cand[np.argmin(self.basis[cand])])
        return int(cand[np.argmax(u[cand])])

    def dual_cleanup(self, cost, allowed):
        """Dual simplex pivots from a dual-feasible basis until xB >= 0."""
        while True:
            r = int(np.argmin(self.xB))
            if self.xB[r] >= -FEAS_TOL:
                self.xB[self.xB < 0] = 0.0
                return OPTIMAL
            if self.iterations >= self.max_iter:
                return NUMERICAL_FAILURE
            y = cost[self.basis] @ self.Binv
            rc = cost - self.MT @ y
            alpha = self.MT @ self.Binv[r]
            ok = allowed & (alpha < -self.piv_tol)
            ok[self.basis] = False
            if not ok.any():
                return INFEASIBLE
            cand = np.flatnonzero(ok)
            ratios = np.maximum(-rc[cand], 0.0) / -alpha[cand]
            near = cand[ratios <= ratios.min() + self.opt_tol]
            j = int(near[np.argmax(-alpha[near])])
            self._pivot(r, j, self.Binv @ self.M[:, j])
            self.iterations += 1
            if self.iterations % self.refactor_every == 0:
                self.refactor()

    def _pivot(self, r, j, u):
        piv = u[r]
        row = self.Binv[r] / piv
        xr = self.xB[r] / piv
        self.Binv = dger(-1.0, u, row, a=self.Binv, overwrite_a=1)
        self.Binv[r] = row
        self.xB -= u * xr
        self.xB[r] = xr
        self.basis[r] = j


def _simplex(
    p: LinearProgram,
    *,
    opt_tol=1e-9,
    piv_tol=1e-7,
    refactor_every=100,
    stall_limit=40,
    max_iter=200_000,
    perturb=PERTURB_SCALE,
    seed=0,
):
    m, n = p.shape
    A = p.A.copy()
    b = p.b.copy()
    senses = list(p.senses)
    flip = b < 0
    A[flip] *= -1
    b[flip] *= -1
    for r in np.flatnonzero(flip):
        senses[r] = {LE: GE, GE: LE, EQ: EQ}[senses[r]]

    le = [r for r in range(m) if senses[r] == LE]
    ge = [r for r in range(m) if senses[r] == GE]
    art_rows = [r for r in range(m) if senses[r] != LE]
    n_slack = len(le) + len(ge)
    n_art = len(art_rows)
    M = np.zeros((m, n + n_slack + n_art))
    M[:, :n] = A
    basis = np.empty(m, dtype=np.int64)
    col = n
    for r in le:
        M[r, col] = 1.0
        basis[r] = col
        col += 1
    for r in ge:
        M[r, col] = -1.0
        col += 1
    art_start = col
    for r in art_rows:
        M[r, col] = 1.0
        basis[r] = col
        col += 1

    # relax inequality rows only: equality systems may be redundant and must stay consistent
    rng = np.random.default_rng(seed)
    relax = np.zeros(m)
    relax[le] = 1.0
    relax[ge] = -1.0
    b_work = b + perturb * relax * (1.0 + np.abs(b)) * rng.uniform(0.5, 1.0, m)
    solver = _Revised(M, b_work, basis, opt_tol, piv_tol, refactor_every, stall_limit, max_iter)
    is_art = np.zeros(M.shape[1], dtype=bool)
    is_art[art_start:] = True

    if n_art:
        phase1 = np.where(is_art, -1.0, 0.0)
        status = solver.run(phase1, np.ones(M.shape[1], dtype=bool))
        if status != OPTIMAL:
            return LPResult(status, np.nan, None, solver.iterations, "phase I")
        solver.refactor()
        infeas = float(solver.xB[is_art[solver.basis]].sum())
        if infeas > 1e-7 * max(1.0, float(np.abs(b).max())):
            return LPResult(INFEASIBLE, np.nan, None, solver.iterations, f"phase I residual {infeas:.3g}")
        # pivot zero-level artificials out of the basis where a structural column allows it
        redundant = []
        structural = np.flatnonzero(~is_art)
        MT_struct = solver.MT[structural]
        for r in np.flatnonzero(is_art[solver.basis]):
            row = MT_struct @ solver.Binv[r]
            k = int(np.argmax(np.abs(row)))
            if abs(row[k]) > 1e-7:
                j = int(structural[k])
                solver._pivot(r, j, solver.Binv @ M[:, j])
            else:
                redundant.append(r)
        if redundant:
            # the constraint owning each stranded artificial is a combination of the others
            drop = [int(np.flatnonzero(M[:, solver.basis[r]])[0]) for r in redundant]
            keep = np.setdiff1d(np.arange(m), drop)
            M = M[keep]
            solver.set_matrix(M)
            solver.rhs = solver.rhs[keep]
            b = b[keep]
            solver.basis = np.delete(solver.basis, redundant)
            solver.m = len(keep)
        solver.refactor()

    cost = np.zeros(M.shape[1])
    cost[:n] = p.c
    status = solver.run(cost, ~is_art)
    if status != OPTIMAL:
        return LPResult(status, np.nan, None, solver.iterations)
    solver.rhs = b
    solver.refactor()
    status = solver.dual_cleanup(cost, ~is_art)
    if status != OPTIMAL:
        return LPResult(status, np.nan, None, solver.iterations, "restoring right-hand side")
    solver.refactor()
    z = np.zeros(M.shape[1])
    z[solver.basis] = solver.xB
    x = np.maximum(z[:n], 0.0)
    return LPResult(OPTIMAL, float(p.c @ x), x, solver.iterations)


def _highs(p: LinearProgram) -> LPResult:
    from scipy.optimize import linprog

    s = np.array(p.senses)
    ub = (s == LE) | (s == GE)
    sign = np.where(s == GE, -1.0, 1.0)
    A_ub = (p.A * sign[:, None])[ub]
    b_ub = (p.b * sign)[ub]
    eq = s == EQ
    res = linprog(
        -p.c,
        A_ub=A_ub if ub.any() else None,
        b_ub=b_ub if ub.any() else None,
        A_eq=p.A[eq] if eq.any() else None,
        b_eq=p.b[eq] if eq.any() else None,
        bounds=(0, None),
        method="highs",
    )
    status = {0: OPTIMAL, 2: INFEASIBLE, 3: UNBOUNDED}.get(res.status, NUMERICAL_FAILURE)
    if status != OPTIMAL:
        return LPResult(status, np.nan, None, int(getattr(res, "nit", 0)), res.message)
    return LPResult(OPTIMAL, float(-res.fun), np.asarray(res.x), int(res.nit))


METHODS = ("simplex", "highs")


def solve_lp(p: LinearProgram, method: str = "simplex", **options) -> LPResult:
    """Solve ``p``; the result's ``status`` is one of optimal, infeasible, unbounded, numerical_failure."""
    if method == "simplex":
        try:
            res = _simplex(p, **options)
        except np.linalg.LinAlgError as exc:
            res = LPResult(NUMERICAL_FAILURE, np.nan, None, 0, f"singular basis: {exc}")
    elif method == "highs":
        res = _highs(p)
    else:
        raise ValueError(f"unknown LP method {method!r}; choose from {METHODS}")
    if res.ok:
        logger.debug("LP %s: value %.12g after %d iterations", p.shape, res.value, res.iterations)
    return res


def lp_from_rows(c: Sequence[float], rows: Sequence[tuple[Sequence[float], str, float]]) -> LinearProgram:
    """Convenience constructor from (coefficients, relation, rhs) triples."""
    A = np.array([r[0] for r in rows], dtype=float).reshape(len(rows), len(c))
    return LinearProgram(np.asarray(c, dtype=float), A, tuple(r[1] for r in rows), np.array([r[2] for r in rows]))
