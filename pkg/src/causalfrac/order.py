"""Finite static causal orders, their lowersets and downsets.

Events are identified by their position in the declaration list (the
canonical index). Every mixed-radix index computed downstream uses this
order, with the lowest index as the least significant digit.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Iterator, Sequence

import numpy as np

from .errors import CycleError, DuplicateLabelError, EventMismatchError, UnknownEventError

MAX_LOWERSET_EVENTS = 20


@dataclass(frozen=True)
class EventId:
    index: int
    label: str


@dataclass(frozen=True)
class Lowerset:
    """A set of events stored as a bit mask (bit k is event k)."""

    mask: int

    @classmethod
    def of(cls, indices: Iterable[int]) -> "Lowerset":
        mask = 0
        for k in indices:
            mask |= 1 << int(k)
        return cls(mask)

    @property
    def members(self) -> tuple[int, ...]:
        return tuple(k for k in range(self.mask.bit_length()) if self.mask >> k & 1)

    def __contains__(self, k: object) -> bool:
        return isinstance(k, (int, np.integer)) and k >= 0 and bool(self.mask >> int(k) & 1)

    def __iter__(self) -> Iterator[int]:
        return iter(self.members)

    def __len__(self) -> int:
        return bin(self.mask).count("1")

    def issubset(self, other: "Lowerset") -> bool:
        return self.mask & ~other.mask == 0

    def __or__(self, other: "Lowerset") -> "Lowerset":
        return Lowerset(self.mask | other.mask)

    def __and__(self, other: "Lowerset") -> "Lowerset":
        return Lowerset(self.mask & other.mask)


@dataclass(frozen=True, eq=False)
class StaticCausalOrder:
    """Events with a partial order; ``leq[a, b]`` means event a causally precedes or equals b.

    Build instances with :func:`make_order` or :func:`discrete_order`; the
    constructor trusts that ``leq`` is already a partial order.
    """

    labels: tuple[str, ...]
    leq: np.ndarray = field(repr=False)

    def __post_init__(self):
        self.leq.setflags(write=False)

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def events(self) -> tuple[EventId, ...]:
        return tuple(EventId(k, lab) for k, lab in enumerate(self.labels))

    def event(self, which: int | str | EventId) -> EventId:
        """Resolve an index, label or EventId to this order's EventId."""
        if isinstance(which, EventId):
            if which.index < self.n and self.labels[which.index] == which.label:
                return which
            raise UnknownEventError(which)
        if isinstance(which, str):
            try:
                return EventId(self.labels.index(which), which)
            except ValueError:
                raise UnknownEventError(which) from None
        k = int(which)
        if not 0 <= k < self.n:
            raise UnknownEventError(which)
        return EventId(k, self.labels[k])

    def covers(self) -> list[tuple[str, str]]:
        """Covering pairs (a, b): a < b with nothing strictly in between."""
        strict = self.leq & ~np.eye(self.n, dtype=bool)
        out = []
        for a in range(self.n):
            for b in range(self.n):
                if strict[a, b] and not np.any(strict[a, :] & strict[:, b]):
                    out.append((self.labels[a], self.labels[b]))
        return out

    def downset_mask(self, k: int) -> int:
        return sum(1 << j for j in range(self.n) if self.leq[j, k])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, StaticCausalOrder):
            return NotImplemented
        return self.labels == other.labels and np.array_equal(self.leq, other.leq)

    def __hash__(self) -> int:
        return hash((self.labels, self.leq.tobytes()))

    def __repr__(self) -> str:
        return f"StaticCausalOrder(labels={list(self.labels)}, covers={self.covers()})"


def _closure(rel: np.ndarray) -> np.ndarray:
    leq = rel | np.eye(len(rel), dtype=bool)
    while True:
        nxt = leq | ((leq.astype(np.int64) @ leq.astype(np.int64)) > 0)
        if np.array_equal(nxt, leq):
            return leq
        leq = nxt


def make_order(labels: Sequence[str], covers: Iterable[tuple[str, str]] = ()) -> StaticCausalOrder:
    """Partial order generated by ``covers``; a pair (a, b) means a < b."""
    labels = tuple(str(x) for x in labels)
    if not labels:
        raise ValueError("an order needs at least one event")
    if len(set(labels)) != len(labels):
        dup = sorted({x for x in labels if labels.count(x) > 1})
        raise DuplicateLabelError(f"duplicate event labels: {dup}")
    pos = {lab: k for k, lab in enumerate(labels)}
    rel = np.zeros((len(labels), len(labels)), dtype=bool)
    for a, b in covers:
        if a not in pos:
            raise UnknownEventError(a)
        if b not in pos:
            raise UnknownEventError(b)
        rel[pos[a], pos[b]] = True
    leq = _closure(rel)
    both = leq & leq.T & ~np.eye(len(labels), dtype=bool)
    if both.any():
        a, b = map(int, np.argwhere(both)[0])
        raise CycleError(f"{labels[a]} <= {labels[b]} <= {labels[a]}")
    return StaticCausalOrder(labels, leq)


def discrete_order(labels: Sequence[str]) -> StaticCausalOrder:
    return make_order(labels, ())


def discrete_like(order: StaticCausalOrder) -> StaticCausalOrder:
    """The discrete order on the same events."""
    return discrete_order(order.labels)


def downset(order: StaticCausalOrder, event: int | str | EventId) -> Lowerset:
    """Causal past of an event, the event itself included."""
    k = order.event(event).index
    return Lowerset(order.downset_mask(k))


def is_lowerset(order: StaticCausalOrder, subset: Lowerset | Iterable[int]) -> bool:
    mask = subset.mask if isinstance(subset, Lowerset) else Lowerset.of(subset).mask
    if mask >> order.n:
        return False
    return all(order.downset_mask(k) & ~mask == 0 for k in range(order.n) if mask >> k & 1)


def lowersets(order: StaticCausalOrder) -> list[Lowerset]:
    """All past-closed subsets, in increasing mask order (empty set first)."""
    n = order.n
    if n > MAX_LOWERSET_EVENTS:
        raise ValueError(f"lowerset enumeration limited to {MAX_LOWERSET_EVENTS} events, got {n}")
    masks = np.arange(1 << n, dtype=np.int64)
    ok = np.ones(len(masks), dtype=bool)
    for k in range(n):
        down = order.downset_mask(k)
        has_k = (masks >> k) & 1 == 1
        ok &= ~has_k | ((masks & down) == down)
    return [Lowerset(int(m)) for m in masks[ok]]


def is_suborder(coarse: StaticCausalOrder, fine: StaticCausalOrder) -> bool:
    """True iff every relation of ``coarse`` also holds in ``fine``."""
    if coarse.labels != fine.labels:
        raise EventMismatchError(f"{list(coarse.labels)} vs {list(fine.labels)}")
    return bool(np.all(~coarse.leq | fine.leq))
