import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalfrac.distributions import (
    ConditionalDistribution,
    is_causal_distribution,
    mix,
    pr_box,
    relabel_inputs,
    uniform,
)
from causalfrac.errors import BudgetExceededError
from causalfrac.fractions import (
    fraction_report,
    local_fraction,
    ns_fraction,
    ns_fraction_lp,
    ns_local_fraction,
    signalling_lower_bound,
)
from causalfrac.functions import count_causal, delta, function_at, is_causal, RawFunction, to_raw
from causalfrac.joint import SpaceSpec
from causalfrac.lp import LinearProgram, LE, solve_lp
from causalfrac.order import discrete_order, make_order
from causalfrac.quantum import TSIRELSON_ANGLES, bipartite_bell_distribution, interleaved_distribution

SPEC2 = SpaceSpec.uniform(2)
DISC2 = discrete_order(["A", "B"])
CHAIN2 = make_order(["A", "B"], [("A", "B")])


def two_party_ns_vertices():
    """16 local deterministic boxes and 8 PR boxes, as 4 x 4 tables (row x + 2y, col a + 2b)."""
    verts = []
    for fa in itertools.product(range(2), repeat=2):
        for fb in itertools.product(range(2), repeat=2):
            t = np.zeros((4, 4))
            for x, y in itertools.product(range(2), repeat=2):
                t[x + 2 * y, fa[x] + 2 * fb[y]] = 1.0
            verts.append(t)
    for al, be, ga in itertools.product(range(2), repeat=3):
        t = np.zeros((4, 4))
        for x, y, a, b in itertools.product(range(2), repeat=4):
            if a ^ b == (x & y) ^ (al & x) ^ (be & y) ^ ga:
                t[x + 2 * y, a + 2 * b] = 0.5
        verts.append(t)
    return verts


def vertex_ns_fraction(table):
    """Largest total weight of NS-polytope vertices fitting cellwise under ``table`` (HiGHS)."""
    V = np.array([v.ravel() for v in two_party_ns_vertices()]).T
    lp = LinearProgram(np.ones(V.shape[1]), V, (LE,) * V.shape[0], table.ravel())
    return solve_lp(lp, method="highs").value


def chsh_value(d):
    """Largest of the four CHSH expressions (one correlator negated)."""
    corr = {}
    for x, y in itertools.product(range(2), repeat=2):
        row = d.table[x + 2 * y]
        corr[x, y] = row[0] - row[1] - row[2] + row[3]
    return max(abs(sum(corr.values()) - 2 * corr[neg]) for neg in corr)


def test_delta_of_causal_function_is_fully_local(base_order):
    spec = SpaceSpec.uniform(4)
    for k in (0, 17, 2048, 4095):
        res = local_fraction(delta(function_at(base_order, spec, k)))
        assert res.value == pytest.approx(1.0, abs=1e-9)
        assert res.witness == {k: pytest.approx(1.0)}


def test_pr_box():
    # exhaustive argument: every local deterministic box puts mass on a cell the PR box forbids
    pr = pr_box().table
    for v in two_party_ns_vertices()[:16]:
        assert np.any((v > 0) & (pr == 0))
    assert local_fraction(pr_box()).value == pytest.approx(0.0, abs=1e-9)
    assert ns_fraction(pr_box()).value == pytest.approx(1.0, abs=1e-9)
    rep = fraction_report(pr_box())
    assert rep.signalling_lb == pytest.approx(0.0, abs=1e-9)


def test_chsh_benchmark():
    d = bipartite_bell_distribution(*TSIRELSON_ANGLES)
    s = chsh_value(d)
    assert s == pytest.approx(2 * math.sqrt(2), abs=1e-12)
    # mu * 2 + (1 - mu) * 4 >= S  gives  mu <= (4 - S) / 2
    bound = (4 - s) / 2
    lf = local_fraction(d).value
    assert lf == pytest.approx(2 - math.sqrt(2), abs=1e-9)
    assert lf <= bound + 1e-9
    assert lf == pytest.approx(local_fraction(d, method="highs").value, abs=1e-9)


def test_ns_fraction_signalling_function():
    copy = RawFunction(SPEC2, np.array([0, 2, 0, 2]))  # o_A = 0, o_B = i_A
    assert is_causal(copy, CHAIN2, SPEC2)
    d = delta(copy, CHAIN2)
    nsf = ns_fraction(d).value
    assert nsf < 1
    assert nsf == pytest.approx(vertex_ns_fraction(d.table), abs=1e-9)
    assert nsf == pytest.approx(0.0, abs=1e-9)
    assert ns_fraction(uniform(DISC2, SPEC2)).value == pytest.approx(1.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_ns_fraction_matches_vertex_oracle(seed):
    rng = np.random.default_rng(seed)
    ks = rng.integers(0, count_causal(CHAIN2, SPEC2), size=3)
    parts = [delta(function_at(CHAIN2, SPEC2, int(k))) for k in ks]
    parts.append(pr_box(CHAIN2))
    d = mix(parts, rng.dirichlet(np.ones(len(parts))))
    assert ns_fraction(d).value == pytest.approx(vertex_ns_fraction(d.table), abs=1e-8)


def test_single_event_ns_implies_subset_ns():
    for g in [(0.5, 2.5), (1.0, 2.0), (2.8, 0.9)]:
        d = interleaved_distribution(gamma0=g[0], gamma1=g[1])
        res = solve_lp(ns_fraction_lp(d))
        mu = res.x[-1]
        y = res.x[:-1].reshape(d.table.shape) / mu
        sub = ConditionalDistribution(discrete_order(d.order.labels), d.spec, y, tol=1e-8)
        assert is_causal_distribution(sub, tol=1e-8).causal
        assert np.all(mu * y <= d.table + 1e-9)


def test_equal_angles_fully_local():
    d = interleaved_distribution(gamma0=1.1, gamma1=1.1)
    assert local_fraction(d).value == pytest.approx(1.0, abs=1e-9)
    assert ns_local_fraction(d).value == pytest.approx(1.0, abs=1e-9)


def test_signalling_lower_bound_examples():
    raw, clipped = signalling_lower_bound(1.0, 0.7, 0.6)
    assert raw <= 0 and clipped == 0.0
    assert signalling_lower_bound(0.0, 1.0, 0.0) == (0.0, 0.0)
    raw, clipped = signalling_lower_bound(0.5, 0.4, 0.3)
    assert raw == pytest.approx(0.4) and clipped == pytest.approx(0.4)


def test_witness_reconstruction(base_order):
    d = interleaved_distribution(gamma0=0.5, gamma1=2.5)
    res = local_fraction(d)
    assert sum(res.witness.values()) == pytest.approx(1.0, abs=1e-9)
    spec = d.spec
    recon = np.zeros_like(d.table)
    for k, w in res.witness.items():
        f = function_at(base_order, spec, k)
        assert is_causal(to_raw(f), base_order, spec)
        recon += res.value * w * delta(f).table
    assert np.all(recon <= d.table + 1e-7)
    assert recon.sum() / spec.n_inputs == pytest.approx(res.value, abs=1e-9)


@pytest.mark.parametrize("g", [(0.5, 2.5), (1.0, 2.0), (2.2, 0.3)])
def test_agrees_with_highs(g):
    d = interleaved_distribution(gamma0=g[0], gamma1=g[1])
    ours = fraction_report(d)
    ref = fraction_report(d, method="highs")
    for k, v in ours.as_record().items():
        assert v == pytest.approx(ref.as_record()[k], abs=1e-7)


def test_order_monotonicity_and_budget(base_order, extended_order):
    d = interleaved_distribution(gamma0=0.5, gamma1=2.5)
    base = local_fraction(d, base_order).value
    ext = local_fraction(d, extended_order).value
    assert ext >= base - 1e-9
    assert ns_local_fraction(d, base_order).value == pytest.approx(ns_local_fraction(d, extended_order).value)
    with pytest.raises(BudgetExceededError):
        local_fraction(d, extended_order, budget=4096)


def random_causal_chain_box(rng):
    ks = rng.integers(0, count_causal(CHAIN2, SPEC2), size=4)
    parts = [delta(function_at(CHAIN2, SPEC2, int(k))) for k in ks] + [pr_box(CHAIN2)]
    return mix(parts, rng.dirichlet(np.ones(len(parts)) * 0.5))


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_ordering_chain(seed):
    d = random_causal_chain_box(np.random.default_rng(seed))
    r = fraction_report(d)
    assert -1e-6 <= r.ns_local_fraction <= r.local_fraction + 1e-6
    assert r.ns_local_fraction <= r.ns_fraction + 1e-6
    assert r.local_fraction <= 1 + 1e-6 and r.ns_fraction <= 1 + 1e-6
    assert r.signalling_lb == max(0.0, r.signalling_lb_raw)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.floats(0, 1))
def test_convexity(seed, t):
    rng = np.random.default_rng(seed)
    d1, d2 = random_causal_chain_box(rng), random_causal_chain_box(rng)
    d = mix([d1, d2], [t, 1 - t])
    assert local_fraction(d).value >= t * local_fraction(d1).value + (1 - t) * local_fraction(d2).value - 1e-7


@settings(max_examples=10, deadline=None)
@given(st.floats(0, math.pi), st.floats(0, math.pi), st.lists(st.permutations([0, 1]), min_size=4, max_size=4))
def test_relabelling_invariance(g0, g1, perms):
    d = interleaved_distribution(gamma0=g0, gamma1=g1)
    moved = relabel_inputs(d, perms)
    assert is_causal_distribution(moved).causal
    a, b = fraction_report(d).as_record(), fraction_report(moved).as_record()
    for k in a:
        assert a[k] == pytest.approx(b[k], abs=1e-6)


@pytest.mark.parametrize("k0,k1", [(4, 4), (3, 6), (2, 7), (4, 5), (3, 9), (6, 9), (9, 9)])
def test_degenerate_grid_angles(k0, k1):
    # exact multiples of pi/9 give many tied and vanishing cells
    g0, g1 = k0 * math.pi / 9, k1 * math.pi / 9
    d = interleaved_distribution(gamma0=g0, gamma1=g1)
    ours, ref = fraction_report(d), fraction_report(d, method="highs")
    for key, v in ours.as_record().items():
        assert v == pytest.approx(ref.as_record()[key], abs=1e-9), key


def test_presolve_threshold_error_bound():
    base = pr_box()
    eps = 1e-13
    table = base.table * (1 - 2 * eps) + eps * (base.table == 0)
    d = ConditionalDistribution(base.order, base.spec, table)
    res = local_fraction(d)
    assert res.presolve_error == pytest.approx(8 * eps)
    assert abs(res.value - local_fraction(d, method="highs").value) <= res.presolve_error + 1e-12
