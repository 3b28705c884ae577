"""Local fraction, no-signalling local fraction and no-signalling fraction.

The local fraction of ``d`` for an order is the optimum of

    maximise sum_f x_f   s.t.  x_f >= 0,  sum_f x_f delta^f <= d  (cellwise)

with one column per causal function of the order and one row per
(joint input, joint output) cell. The no-signalling fraction is the largest
mass of a no-signalling sub-distribution lying cellwise below ``d``; the
literature this quantity comes from is not reproduced here, and the LP in
:func:`ns_fraction_lp` is our reading of "largest no-signalling part".
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .distributions import ConditionalDistribution
from .errors import InfeasibleError, SolverError
from .functions import DEFAULT_BUDGET, check_budget, output_table
from .joint import SpaceSpec, digit_table, restriction_map
from .lp import EQ, LE, LinearProgram, solve_lp
from .order import StaticCausalOrder, discrete_like

WITNESS_CUTOFF = 1e-12
# cells at or below this are treated as zero; the optimum moves by at most their total mass
ZERO_CELL = 1e-12


@lru_cache(maxsize=8)
def _cached_outputs(order: StaticCausalOrder, spec: SpaceSpec, budget: int | None) -> np.ndarray:
    out = output_table(order, spec, budget)
    out.setflags(write=False)
    return out


def function_cells(order: StaticCausalOrder, spec: SpaceSpec, budget: int | None = DEFAULT_BUDGET) -> np.ndarray:
    """Flat cell index ``i * |O| + f(i)`` for each causal function f (rows) and joint input i (columns).

    Cached per (order, spec); treat the result as read-only.
    """
    check_budget(order, spec, budget)
    out = _cached_outputs(order, spec, budget)
    return out + (np.arange(spec.n_inputs, dtype=np.int64) * spec.n_outputs)[None, :]


def local_fraction_lp(d: ConditionalDistribution, cells: np.ndarray) -> tuple[LinearProgram, np.ndarray]:
    """Local-fraction LP over the given function columns.

    Cells where ``d`` is zero force every function through them to weight
    zero, so those columns and rows are dropped up front. Cells below
    ``ZERO_CELL`` (rounding residue such as sin(pi)^2) count as zero: each
    such row caps the mass of the functions through it, so dropping it
    changes the optimum by at most its entry. Returns the LP and the indices
    of the surviving function columns.
    """
    flat = d.table.ravel()
    zero = flat <= ZERO_CELL
    keep_cols = np.flatnonzero(~zero[cells].any(axis=1))
    keep_rows = np.flatnonzero(~zero)
    row_pos = np.full(len(flat), -1, dtype=np.int64)
    row_pos[keep_rows] = np.arange(len(keep_rows))
    A = np.zeros((len(keep_rows), len(keep_cols)))
    sub = row_pos[cells[keep_cols]]
    A[sub.ravel(), np.repeat(np.arange(len(keep_cols)), cells.shape[1])] = 1.0
    lp = LinearProgram(np.ones(len(keep_cols)), A, (LE,) * len(keep_rows), flat[keep_rows])
    return lp, keep_cols


@dataclass
class FractionResult:
    """Optimum of a fraction LP: ``value`` clamped to [0, 1], ``raw`` as solved."""

    value: float
    raw: float
    witness: dict[int, float] = field(default_factory=dict)
    iterations: int = 0
    seconds: float = 0.0
    presolve_error: float = 0.0


def _solve(lp: LinearProgram, method: str):
    res = solve_lp(lp, method=method)
    if res.status == "infeasible":
        raise InfeasibleError("the zero vector is feasible, so this indicates a solver failure")
    if not res.ok:
        raise SolverError(res.status, res.message)
    return res


def local_fraction(
    d: ConditionalDistribution,
    order: StaticCausalOrder | None = None,
    *,
    budget: int | None = DEFAULT_BUDGET,
    method: str = "simplex",
) -> FractionResult:
    """Largest mass of ``d`` explained by a mixture of causal functions of ``order``.

    ``witness`` maps enumeration indices of causal functions (see
    :func:`causalfrac.functions.function_at`) to weights summing to one.
    """
    order = order or d.order
    t0 = time.perf_counter()
    cells = function_cells(order, d.spec, budget)
    lp, cols = local_fraction_lp(d, cells)
    dropped = float(d.table[d.table <= ZERO_CELL].sum())
    if lp.shape[1] == 0:
        return FractionResult(0.0, 0.0, {}, 0, time.perf_counter() - t0, dropped)
    res = _solve(lp, method)
    mu = float(res.x.sum())
    witness = {}
    if mu > WITNESS_CUTOFF:
        nz = np.flatnonzero(res.x > WITNESS_CUTOFF)
        witness = {int(cols[j]): float(res.x[j] / mu) for j in nz}
    return FractionResult(min(max(mu, 0.0), 1.0), mu, witness, res.iterations, time.perf_counter() - t0, dropped)


def ns_local_fraction(
    d: ConditionalDistribution,
    order: StaticCausalOrder | None = None,
    *,
    budget: int | None = DEFAULT_BUDGET,
    method: str = "simplex",
) -> FractionResult:
    """Local fraction against the discrete order on the same events."""
    return local_fraction(d, discrete_like(order or d.order), budget=budget, method=method)


def ns_fraction_lp(d: ConditionalDistribution) -> LinearProgram:
    """LP for the no-signalling fraction.

    Variables are y(i, o) >= 0 (flattened as ``i * |O| + o``) followed by mu.
    Rows: every input row of y carries mass mu; for each event k, the
    marginal of y(i, .) on the other events does not change when only i_k
    varies (compared with i_k = 0); y <= d cellwise.
    """
    spec = d.spec
    nI, nO = spec.n_inputs, spec.n_outputs
    nv = nI * nO + 1
    rows, senses, rhs = [], [], []

    for i in range(nI):
        row = np.zeros(nv)
        row[i * nO : (i + 1) * nO] = 1.0
        row[-1] = -1.0
        rows.append(row)
        senses.append(EQ)
        rhs.append(0.0)

    in_digits = digit_table(spec.inputs)
    for k in range(spec.n):
        others = [j for j in range(spec.n) if j != k]
        omap = restriction_map(spec.outputs, others)
        n_marg = int(omap.max()) + 1
        in_stride = int(np.prod(spec.inputs[:k]))
        for i in range(nI):
            if in_digits[i, k] == 0:
                continue
            base = i - in_digits[i, k] * in_stride
            for m in range(n_marg):
                row = np.zeros(nv)
                outs = np.flatnonzero(omap == m)
                row[i * nO + outs] += 1.0
                row[base * nO + outs] -= 1.0
                rows.append(row)
                senses.append(EQ)
                rhs.append(0.0)

    cap = np.zeros((nI * nO, nv))
    cap[np.arange(nI * nO), np.arange(nI * nO)] = 1.0
    A = np.vstack([np.array(rows), cap])
    senses += [LE] * (nI * nO)
    rhs = np.concatenate([rhs, d.table.ravel()])
    c = np.zeros(nv)
    c[-1] = 1.0
    return LinearProgram(c, A, tuple(senses), rhs)


def ns_fraction(d: ConditionalDistribution, *, method: str = "simplex") -> FractionResult:
    """Largest mass of a no-signalling sub-distribution below ``d``."""
    t0 = time.perf_counter()
    res = _solve(ns_fraction_lp(d), method)
    mu = float(res.x[-1])
    return FractionResult(min(max(mu, 0.0), 1.0), mu, {}, res.iterations, time.perf_counter() - t0)


def signalling_lower_bound(lf: float, nsf: float, nslf: float) -> tuple[float, float]:
    """Lower bound on the signalling that has no classical explanation.

    Returns ``(raw, clipped)`` with raw = 1 - lf - nsf + nslf. It is only a
    bound: the sub-distribution maximising locality need not be the one
    maximising no-signalling.
    """
    raw = 1.0 - lf - nsf + nslf
    return raw, min(max(raw, 0.0), 1.0)


@dataclass
class FractionReport:
    local_fraction: float
    ns_local_fraction: float
    ns_fraction: float
    signalling_lb_raw: float
    signalling_lb: float
    witness: dict[int, float] = field(default_factory=dict)
    diagnostics: dict[str, float] = field(default_factory=dict)

    def as_record(self) -> dict[str, float]:
        return {
            "lf": self.local_fraction,
            "nslf": self.ns_local_fraction,
            "nsf": self.ns_fraction,
            "bound_raw": self.signalling_lb_raw,
            "bound": self.signalling_lb,
        }


def fraction_report(
    d: ConditionalDistribution,
    order: StaticCausalOrder | None = None,
    *,
    budget: int | None = DEFAULT_BUDGET,
    method: str = "simplex",
) -> FractionReport:
    """All four quantities for ``d`` against ``order`` (default: the distribution's own order)."""
    lf = local_fraction(d, order, budget=budget, method=method)
    nslf = ns_local_fraction(d, order, budget=budget, method=method)
    nsf = ns_fraction(d, method=method)
    raw, clipped = signalling_lower_bound(lf.value, nsf.value, nslf.value)
    diag = {
        "lf_raw": lf.raw,
        "nslf_raw": nslf.raw,
        "nsf_raw": nsf.raw,
        "lf_seconds": lf.seconds,
        "nslf_seconds": nslf.seconds,
        "nsf_seconds": nsf.seconds,
        "lf_iterations": lf.iterations,
        "nslf_iterations": nslf.iterations,
        "nsf_iterations": nsf.iterations,
        "lf_presolve_error_bound": lf.presolve_error,
        "nslf_presolve_error_bound": nslf.presolve_error,
    }
    return FractionReport(lf.value, nslf.value, nsf.value, raw, clipped, lf.witness, diag)
