"""Mixed-radix addressing of joint input/output assignments.

Convention (fixed, also used by scenario files and CSV output): the event
with the lowest canonical index is the least significant digit. For binary
events A, B the assignment (A=1, B=0) has index 1 and (A=0, B=1) index 2.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import prod
from typing import Iterable, Sequence

import numpy as np

from .errors import OutOfRangeError, ScopeError
from .order import Lowerset


@dataclass(frozen=True)
class SpaceSpec:
    """Per-event input and output cardinalities, aligned with an order's events."""

    inputs: tuple[int, ...]
    outputs: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(int(x) for x in self.inputs))
        object.__setattr__(self, "outputs", tuple(int(x) for x in self.outputs))
        if len(self.inputs) != len(self.outputs):
            raise ValueError("input and output cardinality lists differ in length")
        if any(c < 1 for c in self.inputs + self.outputs):
            raise ValueError("cardinalities must be positive")

    @classmethod
    def uniform(cls, n: int, inputs: int = 2, outputs: int = 2) -> "SpaceSpec":
        return cls((inputs,) * n, (outputs,) * n)

    @property
    def n(self) -> int:
        return len(self.inputs)

    @property
    def n_inputs(self) -> int:
        return prod(self.inputs)

    @property
    def n_outputs(self) -> int:
        return prod(self.outputs)


def _as_scope(scope: Lowerset | Iterable[int]) -> Lowerset:
    return scope if isinstance(scope, Lowerset) else Lowerset.of(scope)


@dataclass(frozen=True)
class JointAssignment:
    """Symbol indices for the events in ``scope`` (``values`` follows scope member order)."""

    scope: Lowerset
    values: tuple[int, ...]

    def __post_init__(self):
        if len(self.values) != len(self.scope):
            raise ScopeError(f"{len(self.values)} values for a scope of {len(self.scope)} events")

    @classmethod
    def full(cls, values: Sequence[int]) -> "JointAssignment":
        return cls(Lowerset((1 << len(values)) - 1), tuple(int(v) for v in values))

    @classmethod
    def from_dict(cls, values: dict[int, int]) -> "JointAssignment":
        scope = Lowerset.of(values)
        return cls(scope, tuple(int(values[k]) for k in scope.members))

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.scope.members, self.values))

    def __getitem__(self, k: int) -> int:
        try:
            return self.values[self.scope.members.index(k)]
        except ValueError:
            raise ScopeError(f"event {k} is not in scope") from None


def strides(cards: Sequence[int], scope: Lowerset | Iterable[int]) -> dict[int, int]:
    """Place value of each scope event in the mixed-radix index over ``scope``."""
    out, s = {}, 1
    for k in _as_scope(scope).members:
        out[k] = s
        s *= cards[k]
    return out


def scope_size(cards: Sequence[int], scope: Lowerset | Iterable[int]) -> int:
    return prod(cards[k] for k in _as_scope(scope).members)


def joint_index(cards: Sequence[int], scope: Lowerset | Iterable[int], assignment: JointAssignment) -> int:
    """Mixed-radix index of ``assignment`` among all assignments on ``scope``.

    ``cards`` is the per-event cardinality list (``spec.inputs`` or
    ``spec.outputs``).
    """
    scope = _as_scope(scope)
    if assignment.scope != scope:
        raise ScopeError(f"assignment scope {assignment.scope.members} != {scope.members}")
    if scope.mask >> len(cards):
        raise OutOfRangeError(f"scope {scope.members} references unknown events")
    idx = 0
    for (k, s), v in zip(strides(cards, scope).items(), assignment.values):
        if not 0 <= v < cards[k]:
            raise OutOfRangeError(f"value {v} at event {k} outside [0, {cards[k]})")
        idx += v * s
    return idx


def joint_unindex(cards: Sequence[int], scope: Lowerset | Iterable[int], index: int) -> JointAssignment:
    scope = _as_scope(scope)
    size = scope_size(cards, scope)
    if not 0 <= index < size:
        raise OutOfRangeError(f"index {index} outside [0, {size})")
    values = []
    for k in scope.members:
        values.append(index % cards[k])
        index //= cards[k]
    return JointAssignment(scope, tuple(values))


def restrict_assignment(v: JointAssignment, subset: Lowerset | Iterable[int]) -> JointAssignment:
    subset = _as_scope(subset)
    if not subset.issubset(v.scope):
        raise ScopeError(f"{subset.members} is not a subset of {v.scope.members}")
    d = v.as_dict()
    return JointAssignment(subset, tuple(d[k] for k in subset.members))


def digit_table(cards: Sequence[int]) -> np.ndarray:
    """All full assignments as rows: shape (prod(cards), n), row r = digits of index r."""
    n = len(cards)
    total = prod(cards)
    idx = np.arange(total, dtype=np.int64)
    out = np.empty((total, n), dtype=np.int64)
    for k in range(n):
        out[:, k] = idx % cards[k]
        idx //= cards[k]
    return out


def restriction_map(cards: Sequence[int], subset: Lowerset | Iterable[int]) -> np.ndarray:
    """Array sending each full joint index to its restricted index over ``subset``."""
    digits = digit_table(cards)
    out = np.zeros(len(digits), dtype=np.int64)
    for k, s in strides(cards, subset).items():
        out += digits[:, k] * s
    return out
