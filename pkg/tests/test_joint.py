import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalfrac.errors import OutOfRangeError, ScopeError
from causalfrac.joint import (
    JointAssignment,
    SpaceSpec,
    digit_table,
    joint_index,
    joint_unindex,
    restrict_assignment,
    restriction_map,
)
from causalfrac.order import Lowerset


def test_index_examples():
    cards = (2, 2, 2, 2)
    ab = Lowerset.of([0, 1])
    assert joint_index(cards, ab, JointAssignment(ab, (1, 0))) == 1
    assert joint_index(cards, ab, JointAssignment(ab, (0, 1))) == 2
    assert joint_index(cards, Lowerset(0), JointAssignment(Lowerset(0), ())) == 0
    assert joint_index(cards, range(4), JointAssignment.full([1, 1, 1, 1])) == 15


def test_index_errors():
    ab = Lowerset.of([0, 1])
    with pytest.raises(OutOfRangeError):
        joint_index((2, 2), ab, JointAssignment(ab, (2, 0)))
    with pytest.raises(ScopeError):
        joint_index((2, 2), ab, JointAssignment.full([0]))
    with pytest.raises(OutOfRangeError):
        joint_unindex((2, 2), ab, 4)


def test_restrict_examples():
    v = JointAssignment.full([1, 0, 1, 1])
    r = restrict_assignment(v, {0, 2})
    assert r.as_dict() == {0: 1, 2: 1}
    assert restrict_assignment(v, v.scope) == v
    with pytest.raises(ScopeError):
        restrict_assignment(JointAssignment.full([0, 1]), {0, 1, 2})


def test_space_spec():
    spec = SpaceSpec((2, 3), (4, 2))
    assert spec.n_inputs == 6 and spec.n_outputs == 8
    with pytest.raises(ValueError):
        SpaceSpec((2,), (2, 2))
    with pytest.raises(ValueError):
        SpaceSpec((0, 2), (2, 2))


cards_st = st.lists(st.integers(1, 4), min_size=1, max_size=4)


@settings(max_examples=80, deadline=None)
@given(cards_st, st.data())
def test_index_roundtrip(cards, data):
    mask = data.draw(st.integers(0, (1 << len(cards)) - 1))
    scope = Lowerset(mask)
    size = 1
    for k in scope:
        size *= cards[k]
    for idx in range(size):
        a = joint_unindex(cards, scope, idx)
        assert joint_index(cards, scope, a) == idx
    values = tuple(data.draw(st.integers(0, cards[k] - 1)) for k in scope)
    a = JointAssignment(scope, values)
    assert joint_unindex(cards, scope, joint_index(cards, scope, a)) == a


@settings(max_examples=80, deadline=None)
@given(cards_st, st.data())
def test_nested_restriction(cards, data):
    n = len(cards)
    v = JointAssignment.full([data.draw(st.integers(0, c - 1)) for c in cards])
    U = Lowerset(data.draw(st.integers(0, (1 << n) - 1)))
    V = Lowerset(data.draw(st.integers(0, U.mask)) & U.mask)
    assert restrict_assignment(restrict_assignment(v, U), V) == restrict_assignment(v, V)


def test_restriction_map_matches_scalar_path():
    cards = (2, 3, 2)
    digits = digit_table(cards)
    U = Lowerset.of([0, 2])
    rmap = restriction_map(cards, U)
    for i, row in enumerate(digits):
        full = JointAssignment.full(row)
        assert joint_index(cards, range(3), full) == i
        assert rmap[i] == joint_index(cards, U, restrict_assignment(full, U))
