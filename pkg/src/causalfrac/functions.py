"""Causal functions in their free parametrisation.

A causal function is stored as one lookup table per event, mapping the
input history over the event's downset to an output symbol. The full map
on joint inputs is rebuilt from these tables by evaluating each event on
the inputs of its own past.

Enumeration order is lexicographic in the tuple of tables
``(table_0, ..., table_{n-1})``: the last history entry of the last event
varies fastest. Function number ``k`` in that stream is what
:func:`function_at` returns and what LP witnesses refer to.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from math import prod
from typing import Iterator

import numpy as np

from .errors import BudgetExceededError, NotCausalError, ScopeError
from .joint import (
    JointAssignment,
    SpaceSpec,
    digit_table,
    restrict_assignment,
    restriction_map,
    scope_size,
    strides,
    joint_index,
)
from .order import StaticCausalOrder, downset, lowersets

DEFAULT_BUDGET = 1 << 24


@dataclass(frozen=True)
class LocalBehaviour:
    event: int
    table: tuple[int, ...]


@dataclass(frozen=True, eq=False)
class CausalFunction:
    order: StaticCausalOrder
    spec: SpaceSpec
    behaviours: tuple[LocalBehaviour, ...]

    def __post_init__(self):
        _check_space(self.order, self.spec)
        if [b.event for b in self.behaviours] != list(range(self.order.n)):
            raise ValueError("one behaviour per event, in canonical order")
        for b, h in zip(self.behaviours, history_counts(self.order, self.spec)):
            if len(b.table) != h:
                raise ValueError(f"event {b.event}: table has {len(b.table)} entries, expected {h}")
            if any(not 0 <= o < self.spec.outputs[b.event] for o in b.table):
                raise ValueError(f"event {b.event}: output symbol out of range")

    @property
    def tables(self) -> tuple[tuple[int, ...], ...]:
        return tuple(b.table for b in self.behaviours)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CausalFunction):
            return NotImplemented
        return self.order == other.order and self.spec == other.spec and self.tables == other.tables

    def __hash__(self) -> int:
        return hash(self.tables)


@dataclass(frozen=True, eq=False)
class RawFunction:
    """Arbitrary map from full joint-input index to full joint-output index."""

    spec: SpaceSpec
    table: np.ndarray

    def __post_init__(self):
        table = np.asarray(self.table, dtype=np.int64)
        if table.shape != (self.spec.n_inputs,):
            raise ValueError(f"raw table must have {self.spec.n_inputs} entries")
        if table.min() < 0 or table.max() >= self.spec.n_outputs:
            raise ValueError("raw table output index out of range")
        table.setflags(write=False)
        object.__setattr__(self, "table", table)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, RawFunction):
            return NotImplemented
        return self.spec == other.spec and np.array_equal(self.table, other.table)

    def __hash__(self) -> int:
        return hash(self.table.tobytes())


def _check_space(order: StaticCausalOrder, spec: SpaceSpec) -> None:
    if spec.n != order.n:
        raise ValueError(f"space has {spec.n} events, order has {order.n}")


def history_counts(order: StaticCausalOrder, spec: SpaceSpec) -> list[int]:
    """Number of input histories over the downset of each event."""
    return [scope_size(spec.inputs, downset(order, k)) for k in range(order.n)]


def count_causal(order: StaticCausalOrder, spec: SpaceSpec) -> int:
    """Closed-form number of causal functions: prod over events of |O|^(#histories)."""
    _check_space(order, spec)
    return prod(spec.outputs[k] ** h for k, h in enumerate(history_counts(order, spec)))


def check_budget(order: StaticCausalOrder, spec: SpaceSpec, budget: int | None = DEFAULT_BUDGET) -> int:
    count = count_causal(order, spec)
    if budget is not None and count > budget:
        raise BudgetExceededError(count, budget)
    return count


def evaluate(f: CausalFunction, inputs: JointAssignment) -> JointAssignment:
    """Joint output of ``f``: each event's table applied to the inputs in its past."""
    n = f.order.n
    if inputs.scope.mask != (1 << n) - 1:
        raise ScopeError("evaluation needs inputs at every event")
    outs = []
    for k, beh in enumerate(f.behaviours):
        past = downset(f.order, k)
        h = joint_index(f.spec.inputs, past, restrict_assignment(inputs, past))
        outs.append(beh.table[h])
    return JointAssignment.full(outs)


def _history_maps(order: StaticCausalOrder, spec: SpaceSpec) -> list[np.ndarray]:
    return [restriction_map(spec.inputs, downset(order, k)) for k in range(order.n)]


def to_raw(f: CausalFunction) -> RawFunction:
    out = np.zeros(f.spec.n_inputs, dtype=np.int64)
    ostr = strides(f.spec.outputs, range(f.order.n))
    for k, hmap in enumerate(_history_maps(f.order, f.spec)):
        out += np.asarray(f.behaviours[k].table, dtype=np.int64)[hmap] * ostr[k]
    return RawFunction(f.spec, out)


def function_at(order: StaticCausalOrder, spec: SpaceSpec, k: int) -> CausalFunction:
    """The k-th causal function of the enumeration stream."""
    total = count_causal(order, spec)
    if not 0 <= k < total:
        raise IndexError(f"function index {k} outside [0, {total})")
    tables = []
    for ev in reversed(range(order.n)):
        h = history_counts(order, spec)[ev]
        m = spec.outputs[ev]
        entries = []
        for _ in range(h):
            entries.append(k % m)
            k //= m
        tables.append(tuple(reversed(entries)))
    tables.reverse()
    return CausalFunction(order, spec, tuple(LocalBehaviour(e, t) for e, t in enumerate(tables)))


def enumerate_causal(
    order: StaticCausalOrder,
    spec: SpaceSpec,
    budget: int | None = DEFAULT_BUDGET,
    start: int = 0,
    stop: int | None = None,
) -> Iterator[CausalFunction]:
    """Yield every causal function once, lexicographically by behaviour tables.

    ``start``/``stop`` select a contiguous slice of the stream so that
    partitions can be consumed independently.
    """
    total = check_budget(order, spec, budget)
    stop = total if stop is None else min(stop, total)
    if start >= stop:
        return
    per_event = [
        itertools.product(range(spec.outputs[ev]), repeat=h) for ev, h in enumerate(history_counts(order, spec))
    ]
    stream = itertools.product(*per_event)
    for tables in itertools.islice(stream, start, stop):
        yield CausalFunction(order, spec, tuple(LocalBehaviour(e, t) for e, t in enumerate(tables)))


def output_table(
    order: StaticCausalOrder,
    spec: SpaceSpec,
    budget: int | None = DEFAULT_BUDGET,
    start: int = 0,
    stop: int | None = None,
) -> np.ndarray:
    """Raw forms of causal functions ``start..stop`` as an (N, |I|) array of joint-output indices.

    Row j is ``to_raw(function_at(order, spec, start + j)).table``.
    """
    total = check_budget(order, spec, budget)
    stop = total if stop is None else min(stop, total)
    ks = np.arange(start, max(start, stop), dtype=np.int64)
    hcounts = history_counts(order, spec)
    ostr = strides(spec.outputs, range(order.n))
    out = np.zeros((len(ks), spec.n_inputs), dtype=np.int64)
    suffix = 1
    for ev in reversed(range(order.n)):
        m, h = spec.outputs[ev], hcounts[ev]
        beta = (ks // suffix) % (m**h)
        suffix *= m**h
        # entry for history j is digit h-1-j of beta in base m
        powers = m ** (h - 1 - np.arange(h, dtype=np.int64))
        entries = (beta[:, None] // powers[None, :]) % m
        hmap = restriction_map(spec.inputs, downset(order, ev))
        out += entries[:, hmap] * ostr[ev]
    return out


def is_causal_batch(tables: np.ndarray, order: StaticCausalOrder, spec: SpaceSpec) -> np.ndarray:
    """Vectorised no-signalling test for many raw tables, shape (N, |I|) -> (N,) bool.

    For every lowerset U and every pair of joint inputs agreeing on U, the
    outputs restricted to U must agree.
    """
    _check_space(order, spec)
    tables = np.atleast_2d(np.asarray(tables, dtype=np.int64))
    ok = np.ones(len(tables), dtype=bool)
    for U in lowersets(order):
        if U.mask == 0:
            continue
        in_map = restriction_map(spec.inputs, U)
        out_map = restriction_map(spec.outputs, U)
        restricted = out_map[tables]
        for cls in range(scope_size(spec.inputs, U)):
            members = np.flatnonzero(in_map == cls)
            first = restricted[:, members[0]]
            for j in members[1:]:
                ok &= restricted[:, j] == first
    return ok


def is_causal(f: RawFunction, order: StaticCausalOrder, spec: SpaceSpec) -> bool:
    if f.spec != spec:
        raise ValueError("raw function defined on a different space")
    return bool(is_causal_batch(f.table[None, :], order, spec)[0])


def from_raw(f: RawFunction, order: StaticCausalOrder, spec: SpaceSpec) -> CausalFunction:
    """Extract the per-event tables of a causal raw function."""
    if not is_causal(f, order, spec):
        raise NotCausalError("raw function violates the no-signalling constraints of the order")
    out_digits = digit_table(spec.outputs)[f.table]
    behaviours = []
    for ev, hmap in enumerate(_history_maps(order, spec)):
        table = np.zeros(hmap.max() + 1, dtype=np.int64)
        table[hmap] = out_digits[:, ev]
        behaviours.append(LocalBehaviour(ev, tuple(int(x) for x in table)))
    return CausalFunction(order, spec, tuple(behaviours))


def delta(f: CausalFunction | RawFunction, order: StaticCausalOrder | None = None):
    """Point-mass conditional distribution of a function.

    For a :class:`RawFunction` the order must be supplied.
    """
    from .distributions import ConditionalDistribution

    if isinstance(f, CausalFunction):
        raw, order = to_raw(f), f.order
    elif order is None:
        raise ValueError("delta of a raw function needs an order")
    else:
        raw = f
    spec = raw.spec
    table = np.zeros((spec.n_inputs, spec.n_outputs))
    table[np.arange(spec.n_inputs), raw.table] = 1.0
    return ConditionalDistribution(order, spec, table, tol=1e-9)
