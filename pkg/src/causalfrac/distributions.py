"""Conditional distributions over joint outputs given joint inputs.

The table has one row per joint input index and one column per joint output
index, both in the mixed-radix convention of :mod:`causalfrac.joint`.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import NotLowersetError, ValidationError
from .joint import SpaceSpec, digit_table, restriction_map, scope_size, strides
from .order import Lowerset, StaticCausalOrder, is_lowerset, lowersets

TOL_GENERATED = 1e-9
TOL_INGESTED = 1e-6


@dataclass(frozen=True, eq=False)
class ConditionalDistribution:
    """Probability table ``table[i, o] = P(o | i)``.

    Entries down to ``-tol`` are clamped to zero; rows must sum to one within
    ``tol`` unless the instance is built with ``renormalize=True``.
    """

    order: StaticCausalOrder
    spec: SpaceSpec
    table: np.ndarray = field(repr=False)
    tol: float = TOL_GENERATED
    renormalize: bool = field(default=False, repr=False)

    def __post_init__(self):
        if self.spec.n != self.order.n:
            raise ValidationError(f"space has {self.spec.n} events, order has {self.order.n}")
        table = np.array(self.table, dtype=float)
        shape = (self.spec.n_inputs, self.spec.n_outputs)
        if table.shape != shape:
            raise ValidationError(f"table shape {table.shape}, expected {shape}")
        if not np.all(np.isfinite(table)):
            raise ValidationError("table contains non-finite entries")
        if table.min() < -self.tol:
            i, o = np.unravel_index(np.argmin(table), shape)
            raise ValidationError(f"negative probability {table[i, o]:.3g} at input {i}, output {o}")
        table = np.clip(table, 0.0, None)
        sums = table.sum(axis=1)
        if self.renormalize:
            if np.any(sums <= 0):
                raise ValidationError(f"row {int(np.argmin(sums))} has zero total mass")
            table /= sums[:, None]
        else:
            bad = np.flatnonzero(np.abs(sums - 1.0) > self.tol)
            if len(bad):
                raise ValidationError(f"row {bad[0]} sums to {sums[bad[0]]:.12g}, not 1 (tol {self.tol:g})")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def with_order(self, order: StaticCausalOrder) -> "ConditionalDistribution":
        """Same table, judged against another order on the same events."""
        if order.labels != self.order.labels:
            raise ValueError(f"order events {list(order.labels)} != {list(self.order.labels)}")
        return ConditionalDistribution(order, self.spec, self.table, self.tol)

    def prob(self, outputs: Sequence[int], inputs: Sequence[int]) -> float:
        o = sum(v * s for v, s in zip(outputs, strides(self.spec.outputs, range(self.spec.n)).values()))
        i = sum(v * s for v, s in zip(inputs, strides(self.spec.inputs, range(self.spec.n)).values()))
        return float(self.table[i, o])


def marginalize_row(row: np.ndarray, spec: SpaceSpec, subset: Lowerset | Iterable[int]) -> np.ndarray:
    """Marginal of a distribution over joint outputs onto the events of ``subset``."""
    omap = restriction_map(spec.outputs, subset)
    return np.bincount(omap, weights=np.asarray(row, dtype=float), minlength=scope_size(spec.outputs, subset))


def marginalize(table: np.ndarray, spec: SpaceSpec, subset: Lowerset | Iterable[int]) -> np.ndarray:
    """Row-wise :func:`marginalize_row` for a whole table."""
    omap = restriction_map(spec.outputs, subset)
    size = scope_size(spec.outputs, subset)
    proj = np.zeros((len(omap), size))
    proj[np.arange(len(omap)), omap] = 1.0
    return np.asarray(table, dtype=float) @ proj


@dataclass(frozen=True)
class Restriction:
    """Outcome of restricting a distribution to a lowerset.

    ``table`` is the restricted conditional table (inputs and outputs over
    the lowerset) when well defined, else None; ``pair`` then holds the
    lexicographically first pair of full joint inputs whose marginals differ.
    """

    lowerset: Lowerset
    well_defined: bool
    deviation: float
    table: np.ndarray | None = field(default=None, repr=False)
    pair: tuple[int, int] | None = None


def restrict_distribution(d: ConditionalDistribution, subset: Lowerset, tol: float | None = None) -> Restriction:
    if not is_lowerset(d.order, subset):
        raise NotLowersetError(f"{subset.members} is not a lowerset of {d.order!r}")
    tol = d.tol if tol is None else tol
    imap = restriction_map(d.spec.inputs, subset)
    marg = marginalize(d.table, d.spec, subset)
    n_groups = scope_size(d.spec.inputs, subset)
    restricted = np.zeros((n_groups, marg.shape[1]))
    deviation = 0.0
    pair = None
    for g in range(n_groups):
        members = np.flatnonzero(imap == g)
        rows = marg[members]
        restricted[g] = rows.mean(axis=0)
        dev = float(np.max(rows.max(axis=0) - rows.min(axis=0))) if len(rows) else 0.0
        deviation = max(deviation, dev)
        if dev > tol:
            diff = np.abs(rows[:, None, :] - rows[None, :, :]).max(axis=2)
            a, b = np.argwhere(np.triu(diff > tol, k=1))[0]
            cand = (int(members[a]), int(members[b]))
            if pair is None or cand < pair:
                pair = cand
    if pair is not None:
        return Restriction(subset, False, deviation, None, pair)
    return Restriction(subset, True, deviation, restricted)


@dataclass(frozen=True)
class CausalityReport:
    causal: bool
    deviation: float
    violation: Restriction | None = None

    def __bool__(self) -> bool:
        return self.causal


def is_causal_distribution(
    d: ConditionalDistribution, order: StaticCausalOrder | None = None, tol: float | None = None
) -> CausalityReport:
    """Check that every lowerset restriction is well defined.

    The reported violation is the first failing lowerset in mask order.
    """
    if order is not None:
        d = d.with_order(order)
    worst, first_bad = 0.0, None
    for U in lowersets(d.order):
        r = restrict_distribution(d, U, tol)
        worst = max(worst, r.deviation)
        if not r.well_defined and first_bad is None:
            first_bad = r
    return CausalityReport(first_bad is None, worst, first_bad)


def uniform(order: StaticCausalOrder, spec: SpaceSpec) -> ConditionalDistribution:
    table = np.full((spec.n_inputs, spec.n_outputs), 1.0 / spec.n_outputs)
    return ConditionalDistribution(order, spec, table)


def mix(dists: Sequence[ConditionalDistribution], weights: Sequence[float]) -> ConditionalDistribution:
    weights = np.asarray(weights, dtype=float)
    if np.any(weights < 0) or not np.isclose(weights.sum(), 1.0):
        raise ValueError("mixture weights must be a probability vector")
    table = sum(w * d.table for w, d in zip(weights, dists))
    return ConditionalDistribution(dists[0].order, dists[0].spec, table, max(d.tol for d in dists))


def relabel_inputs(d: ConditionalDistribution, perms: Sequence[Sequence[int]]) -> ConditionalDistribution:
    """Distribution seen after renaming input symbol x at event k to ``perms[k][x]``.

    The new distribution satisfies ``new(o | perm(i)) = d(o | i)``.
    """
    digits = digit_table(d.spec.inputs)
    istr = strides(d.spec.inputs, range(d.spec.n))
    new_index = np.zeros(len(digits), dtype=np.int64)
    for k, s in istr.items():
        new_index += np.asarray(perms[k])[digits[:, k]] * s
    table = np.empty_like(d.table)
    table[new_index] = d.table
    return ConditionalDistribution(d.order, d.spec, table, d.tol)


def pr_box(order: StaticCausalOrder | None = None) -> ConditionalDistribution:
    """Two-party PR box: P(ab|xy) = 1/2 iff a xor b = x and y."""
    from .order import discrete_order

    order = order or discrete_order(["A", "B"])
    spec = SpaceSpec.uniform(2)
    table = np.zeros((4, 4))
    for x in range(2):
        for y in range(2):
            for a in range(2):
                for b in range(2):
                    if a ^ b == x & y:
                        table[x + 2 * y, a + 2 * b] = 0.5
    return ConditionalDistribution(order, spec, table)
