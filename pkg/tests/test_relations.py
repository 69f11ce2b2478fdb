import itertools

import networkx as nx
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from garpnet.data import Dataset, InputError, PrecisionAssignment
from garpnet.fixtures import money_pump_dataset, unit_bundle_dataset
from garpnet.relations import (
    ViolationCycle,
    build_relations,
    direct_relations,
    enumerate_violating_cycles,
    garp_check,
    transitive_closure,
)

from .strategies import panels


@pytest.fixture
def crossing_pair():
    # p1.q1 = 7, p1.q2 = 5, p2.q2 = 7, p2.q1 = 5
    return Dataset.from_arrays(["a", "b"], [[1, 2], [2, 1]], [[1, 3], [3, 1]])


def test_single_observation_only_reflexive():
    ds = Dataset.from_arrays(["a"], [[1, 2]], [[1, 3]])
    rel = build_relations(ds, 1.0)
    assert rel.weak.tolist() == [[True]]
    assert rel.strict.tolist() == [[False]]
    assert garp_check(ds, 1.0).satisfied


def test_crossing_pair_strict_both_ways(crossing_pair):
    rel = build_relations(crossing_pair, 1.0)
    assert rel.strict[0, 1] and rel.strict[1, 0]
    assert rel.weak.all()


def test_crossing_pair_half_precision_has_no_edges(crossing_pair):
    rel = build_relations(crossing_pair, 0.5)
    assert not rel.weak[0, 1] and not rel.weak[1, 0]
    assert garp_check(crossing_pair, 0.5).satisfied


def test_crossing_pair_violated_with_two_cycle(crossing_pair):
    res = garp_check(crossing_pair, 1.0)
    assert not res.satisfied and not res
    assert set(res.witness.observations) == {("a", "1"), ("b", "1")}
    assert res.witness.agents == frozenset({"a", "b"})


def test_boundary_tie_is_weak_not_strict():
    # p1.q2 equals p1.q1 exactly: weak edge, no strict edge
    ds = Dataset.from_arrays(["a", "b"], [[1, 1], [1, 1]], [[2, 0], [0, 2]])
    rel = build_relations(ds, 1.0)
    assert rel.weak[0, 1] and rel.weak[1, 0]
    assert not rel.strict.any()
    assert garp_check(ds, 1.0).satisfied


def test_equal_bundles_are_weak_even_when_unaffordable():
    # at e = 0.5 neither budget covers the other, yet equal bundles stay weakly related
    ds = Dataset.from_arrays(["a", "b"], [[1, 1], [3, 1]], [[1, 1], [1, 1]])
    rel = build_relations(ds, 0.5)
    assert rel.weak[0, 1] and rel.weak[1, 0]
    assert not rel.strict.any()


def test_unaffordable_budgets_satisfy():
    ds = unit_bundle_dataset(["a", "b", "c"])
    assert garp_check(ds, 1.0).satisfied
    cycles = enumerate_violating_cycles(ds, 1.0)
    assert cycles.cycles == [] and cycles.complete


def test_money_pump_single_three_cycle():
    ds = money_pump_dataset()
    res = garp_check(ds, 1.0)
    assert not res.satisfied
    assert len(res.witness) == 3
    assert res.witness.strict_edge_index == 2
    enum = enumerate_violating_cycles(ds, 1.0)
    assert enum.complete and len(enum.cycles) == 1
    cyc = enum.cycles[0]
    assert cyc.observations == (("a", "1"), ("b", "1"), ("c", "1"))
    assert cyc.strict_edge_index == 2


def test_money_pump_disappears_when_strict_edge_relaxed():
    # dropping e for c below 0.5 cuts the only strict edge c -> a
    ds = money_pump_dataset()
    e = PrecisionAssignment({("c", "1"): 0.4}, default=1.0)
    assert garp_check(ds, e).satisfied


def test_subset_filters_observations(crossing_pair):
    assert garp_check(crossing_pair, 1.0, subset=[("a", "1")]).satisfied
    assert garp_check(crossing_pair, 1.0, subset=[0]).satisfied
    with pytest.raises(InputError):
        garp_check(crossing_pair, 1.0, subset=[("zz", "1")])


def test_enumeration_truncates_and_flags():
    # complete digraph on four mutually strict observations has many cycles
    ds = unit_bundle_dataset(list("abcd"), mutual=itertools.combinations(range(4), 2))
    full = enumerate_violating_cycles(ds, 1.0)
    assert full.complete and len(full.cycles) == 20
    cut = enumerate_violating_cycles(ds, 1.0, max_cycles=5)
    assert not cut.complete and len(cut.cycles) == 5
    exact = enumerate_violating_cycles(ds, 1.0, max_cycles=20)
    assert exact.complete and len(exact.cycles) == 20


def test_violation_cycle_rejects_repeats():
    with pytest.raises(ValueError):
        ViolationCycle((("a", "1"), ("a", "1")), 0)


def _is_valid_cycle(ds, rel_weak, rel_strict, cyc):
    rows = [ds.row(*o) for o in cyc.observations]
    M = len(rows)
    weak_ok = all(rel_weak[rows[i], rows[(i + 1) % M]] for i in range(M))
    j = cyc.strict_edge_index
    return weak_ok and rel_strict[rows[j], rows[(j + 1) % M]]


@settings(max_examples=150, deadline=None)
@given(panels(max_agents=4, max_obs=3), st.floats(0.3, 1.0))
def test_witness_is_a_genuine_violation(ds, e):
    weak, strict = direct_relations(ds, e)
    res = garp_check(ds, e)
    closure = transitive_closure(weak)
    assert res.satisfied == (not np.any(closure & strict.T))
    if not res.satisfied:
        assert _is_valid_cycle(ds, weak, strict, res.witness)


@settings(max_examples=200, deadline=None)
@given(panels(max_agents=4, max_obs=3), st.floats(0.0, 1.0), st.floats(0.0, 1.0))
def test_e_monotonicity(ds, e, frac):
    v = e * frac
    if garp_check(ds, e).satisfied:
        assert garp_check(ds, v).satisfied


@settings(max_examples=100, deadline=None)
@given(panels(max_agents=4, max_obs=3), st.data())
def test_hereditary_feasibility(ds, data):
    if not garp_check(ds, 1.0).satisfied:
        return
    rows = data.draw(st.sets(st.integers(0, len(ds) - 1), min_size=1))
    assert garp_check(ds, 1.0, subset=sorted(rows)).satisfied


@settings(max_examples=100, deadline=None)
@given(panels(max_agents=4, max_obs=3))
def test_closure_idempotent_and_contains_weak(ds):
    rel = build_relations(ds, 1.0)
    assert (rel.closure >= rel.weak).all()
    assert (transitive_closure(rel.closure) == rel.closure).all()
    assert not (rel.strict & ~rel.weak).any()
    assert rel.weak.diagonal().all() and not rel.strict.diagonal().any()


@settings(max_examples=100, deadline=None)
@given(panels(max_agents=3, max_obs=3), st.floats(0.5, 1.0))
def test_garp_iff_cycles(ds, e):
    enum = enumerate_violating_cycles(ds, e)
    assert enum.complete
    assert garp_check(ds, e).satisfied == (len(enum.cycles) == 0)


@settings(max_examples=60, deadline=None)
@given(panels(max_agents=3, max_obs=2), st.floats(0.5, 1.0))
def test_cycles_match_networkx(ds, e):
    weak, strict = direct_relations(ds, e)
    G = nx.DiGraph()
    G.add_nodes_from(range(len(ds)))
    G.add_edges_from((i, j) for i, j in zip(*np.nonzero(weak)) if i != j)
    expected = set()
    for cyc in nx.simple_cycles(G):
        M = len(cyc)
        if M >= 2 and any(strict[cyc[i], cyc[(i + 1) % M]] for i in range(M)):
            k = cyc.index(min(cyc))
            expected.add(tuple(cyc[k:] + cyc[:k]))
    got = set()
    for c in enumerate_violating_cycles(ds, e).cycles:
        assert _is_valid_cycle(ds, weak, strict, c)
        rows = [ds.row(*o) for o in c.observations]
        k = rows.index(min(rows))
        got.add(tuple(rows[k:] + rows[:k]))
    assert got == expected
