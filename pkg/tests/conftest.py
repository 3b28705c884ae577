import itertools

import pytest
from hypothesis import strategies as st

from causalfrac.order import discrete_order, make_order
from causalfrac.quantum import interleaved_order


@pytest.fixture(scope="session")
def base_order():
    return interleaved_order("base")


@pytest.fixture(scope="session")
def extended_order():
    return interleaved_order("extended")


def three_event_orders():
    """The five partial orders on three events, up to isomorphism."""
    ev = ["A", "B", "C"]
    return {
        "antichain": discrete_order(ev),
        "one-pair": make_order(ev, [("A", "B")]),
        "chain": make_order(ev, [("A", "B"), ("B", "C")]),
        "fork": make_order(ev, [("A", "B"), ("A", "C")]),
        "join": make_order(ev, [("A", "C"), ("B", "C")]),
    }


@st.composite
def random_orders(draw, min_events=1, max_events=5):
    """Orders generated by a random DAG on a random event count (edges go low -> high index)."""
    n = draw(st.integers(min_events, max_events))
    labels = [f"e{k}" for k in range(n)]
    pairs = [(a, b) for a, b in itertools.combinations(range(n), 2)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    perm = draw(st.permutations(range(n)))
    return make_order([labels[perm[k]] for k in range(n)], [(labels[perm[a]], labels[perm[b]]) for a, b in chosen])


_ACCEPTANCE_LINES: dict[int, str] = {}


@pytest.fixture(scope="session")
def acceptance():
    """Record one PASS/FAIL line for a numbered acceptance criterion."""

    def record(number: int, ok: bool, detail: str) -> bool:
        _ACCEPTANCE_LINES[number] = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        return ok

    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for k in sorted(_ACCEPTANCE_LINES):
            terminalreporter.write_line(_ACCEPTANCE_LINES[k])
