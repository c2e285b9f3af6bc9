import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from zebra.capacity import independence_number
from zebra.errors import AlphabetMismatch, BudgetExceeded, SizeLimitExceeded
from zebra.graph import (
    ConfusionGraph,
    clique_partition,
    complete_graph,
    cycle_graph,
    distinguishable,
    empty_graph,
    remove_edge,
    strong_power,
    symmetric_dense_graphs,
)
from zebra.oracle import (
    EncodingScheme,
    MessageVector,
    TypeClass,
    compositions,
    concatenate,
    counting_outer_bound,
    frontier,
    is_feasible,
    type_count_bounds,
    type_count_check,
    letter_histogram,
    simultaneous_automorphisms,
    type_class_count,
)

from conftest import CROSSED, brute_alpha


def brute_feasible(graphs, counts, n):
    """Try every assignment of words to message tuples."""
    k = graphs[0].k
    words = list(itertools.product(range(1, k + 1), repeat=n))
    tuples = list(itertools.product(*(range(1, m + 1) for m in counts)))
    clash = [
        (i, j, [u for u, (a, b) in enumerate(zip(x, y)) if a != b])
        for (i, x), (j, y) in itertools.combinations(enumerate(tuples), 2)
    ]
    for assign in itertools.product(range(len(words)), repeat=len(tuples)):
        if all(
            distinguishable(graphs[u], words[assign[i]], words[assign[j]])
            for i, j, users in clash
            for u in users
        ):
            return True
    return False


@st.composite
def graph_lists(draw, k=3, r=2):
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    out = []
    for _ in range(r):
        mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
        out.append(ConfusionGraph(k, [e for e, keep in zip(pairs, mask) if keep]))
    return out


# -- ground truths -------------------------------------------------------------------


def test_crossed_edges_ground_truths():
    assert not is_feasible(CROSSED, MessageVector((2, 2), 1)).feasible
    res = is_feasible(CROSSED, MessageVector((2, 2), 2))
    assert res.feasible and res.scheme.is_valid(CROSSED)
    assert not is_feasible(CROSSED, MessageVector((4, 2), 2)).feasible


def test_listed_witness_is_valid():
    table = {(1, 1): (1, 1), (1, 2): (1, 2), (2, 1): (3, 1), (2, 2): (3, 2)}
    scheme = EncodingScheme(MessageVector((2, 2), 2), table)
    assert scheme.is_valid(CROSSED)
    # swapping in a confusable word breaks it
    bad = EncodingScheme(MessageVector((2, 2), 2), {**table, (2, 2): (2, 2)})
    assert not bad.is_valid(CROSSED)


def test_all_ones_always_feasible():
    for n in (1, 2, 3):
        res = is_feasible([complete_graph(3)] * 2, MessageVector((1, 1), n))
        assert res.feasible and res.scheme.is_valid([complete_graph(3)] * 2)


def test_counting_refutation():
    res = is_feasible([empty_graph(2)] * 2, MessageVector((3, 2), 2))
    assert not res.feasible and res.reason.startswith("counting")


@settings(max_examples=60, deadline=None)
@given(graph_lists(), st.integers(1, 3), st.integers(1, 3))
def test_matches_brute_force_n1(graphs, m1, m2):
    res = is_feasible(graphs, MessageVector((m1, m2), 1))
    assert res.feasible == brute_feasible(graphs, (m1, m2), 1)
    if res.feasible:
        assert res.scheme.is_valid(graphs)


@settings(max_examples=30, deadline=None)
@given(graph_lists(), st.integers(1, 4), st.integers(1, 4))
def test_matches_brute_force_n2(graphs, m1, m2):
    if m1 * m2 > 4:
        m2 = max(1, 4 // m1)
    res = is_feasible(graphs, MessageVector((m1, m2), 2))
    assert res.feasible == brute_feasible(graphs, (m1, m2), 2)


@settings(max_examples=30, deadline=None)
@given(graph_lists(k=3, r=3), st.integers(1, 2), st.integers(1, 2), st.integers(1, 2))
def test_matches_brute_force_three_users(graphs, a, b, c):
    res = is_feasible(graphs, MessageVector((a, b, c), 1))
    assert res.feasible == brute_feasible(graphs, (a, b, c), 1)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("g", [cycle_graph(5), ConfusionGraph(3, [(1, 2)]), cycle_graph(4)])
def test_single_user_is_independence_number(g, n):
    alpha = independence_number(strong_power(g, n))
    assert is_feasible([g], MessageVector((alpha,), n)).feasible
    assert not is_feasible([g], MessageVector((alpha + 1,), n)).feasible


# -- invariants ---------------------------------------------------------------------


@settings(max_examples=30, deadline=None)
@given(graph_lists(), st.data())
def test_time_sharing_concatenation(graphs, data):
    m = data.draw(st.tuples(st.integers(1, 3), st.integers(1, 3)))
    m2 = data.draw(st.tuples(st.integers(1, 2), st.integers(1, 2)))
    r1 = is_feasible(graphs, MessageVector(m, 1))
    r2 = is_feasible(graphs, MessageVector(m2, 2))
    if r1.feasible and r2.feasible:
        both = concatenate(r1.scheme, r2.scheme)
        assert both.shape == MessageVector((m[0] * m2[0], m[1] * m2[1]), 3)
        assert both.is_valid(graphs)


@settings(max_examples=40, deadline=None)
@given(graph_lists(), st.integers(1, 3), st.integers(1, 3), st.data())
def test_edge_removal_and_count_monotone(graphs, m1, m2, data):
    res = is_feasible(graphs, MessageVector((m1, m2), 1))
    edges = [(i, e) for i, g in enumerate(graphs) for e in sorted(g.edges)]
    if res.feasible:
        if edges:
            i, e = data.draw(st.sampled_from(edges))
            lighter = list(graphs)
            lighter[i] = remove_edge(graphs[i], e)
            assert is_feasible(lighter, MessageVector((m1, m2), 1)).feasible
        smaller = (max(1, m1 - 1), m2)
        assert is_feasible(graphs, MessageVector(smaller, 1)).feasible


def test_automorphisms():
    autos = simultaneous_automorphisms(CROSSED)
    assert autos == [(1, 2, 3)]
    assert len(simultaneous_automorphisms([empty_graph(3)])) == 6


def test_budget_and_limits():
    dense = symmetric_dense_graphs(3)
    with pytest.raises(BudgetExceeded):
        is_feasible(dense, MessageVector((2, 2, 2), 3), max_nodes=5)
    with pytest.raises(BudgetExceeded):
        is_feasible(CROSSED, MessageVector((9, 9), 4))
    with pytest.raises(AlphabetMismatch):
        is_feasible([complete_graph(3), complete_graph(4)], MessageVector((1, 1), 1))
    with pytest.raises(ValueError):
        MessageVector((0,), 1)


# -- frontier -----------------------------------------------------------------------


def test_frontier_examples():
    assert [mv.counts for mv in frontier(CROSSED, 1)] == [(1, 2), (2, 1)]
    assert [mv.counts for mv in frontier([empty_graph(3)] * 2, 1)] == [(1, 3), (3, 1)]
    assert [mv.counts for mv in frontier([complete_graph(3)] * 2, 1)] == [(1, 1)]
    assert [mv.counts for mv in frontier(CROSSED, 2)] == [(1, 4), (2, 3), (3, 2), (4, 1)]


def test_frontier_is_pareto_antichain():
    pts = [mv.counts for mv in frontier(CROSSED, 2)]
    for a, b in itertools.permutations(pts, 2):
        assert not (a[0] >= b[0] and a[1] >= b[1])
    # nothing strictly above a frontier point is feasible
    for m1, m2 in pts:
        assert not is_feasible(CROSSED, MessageVector((m1, m2 + 1), 2)).feasible


# -- type classes ------------------------------------------------------------------


def test_type_class_basics():
    tc = TypeClass((1, 1, 1))
    words = list(tc.words())
    assert len(words) == tc.size == 6
    assert words == sorted(words)
    assert all(letter_histogram(w, 3) == (1, 1, 1) for w in words)
    assert list(TypeClass((2, 0, 0)).words()) == [(1, 1)]


def test_type_class_count_examples():
    single = [clique_partition(ConfusionGraph(3, [(1, 2)]))]
    assert type_class_count(single, (1, 1, 1), [1]) == 3
    parts = [clique_partition(g) for g in CROSSED]
    # joint cells are singletons, so every word is seen differently
    assert type_class_count(parts, (2, 1, 1), [1, 2]) == 12
    assert type_class_count(parts, (4, 0, 0), [1]) == 1


@pytest.mark.parametrize("comp", [(1, 1, 1), (2, 1, 0), (2, 2, 2), (3, 1, 2)])
def test_type_class_count_closed_form(comp):
    # one user seeing cells {1,2},{3}: the count is the multinomial of the cell totals
    single = [clique_partition(ConfusionGraph(3, [(1, 2)]))]
    n = sum(comp)
    cells = (comp[0] + comp[1], comp[2])
    expected = math.factorial(n) // (math.factorial(cells[0]) * math.factorial(cells[1]))
    assert type_class_count(single, comp, [1]) == expected


def test_type_count_examples():
    parts = [clique_partition(g) for g in CROSSED]
    assert type_count_check(parts, (2, 2, 2), [1, 2])
    lo, count, hi = type_count_bounds(parts, (3, 0, 0), [1])
    assert count == 1 and hi == 0.0 and lo == pytest.approx(-3 * math.log2(3))
    dense = [clique_partition(g) for g in symmetric_dense_graphs(3)]
    assert type_count_check(dense, (2, 2, 2), [1])


def test_type_class_size_guard():
    parts = [clique_partition(empty_graph(3))]
    with pytest.raises(SizeLimitExceeded):
        type_class_count(parts, (10, 10, 10), [1])


def test_compositions():
    comps = list(compositions(3, 3))
    assert len(comps) == math.comb(5, 2)
    assert all(sum(c) == 3 for c in comps)


@pytest.mark.parametrize("n", [1, 2])
def test_counting_outer_bound_holds(n):
    parts = [clique_partition(g) for g in CROSSED]
    bound = counting_outer_bound(parts, n)
    for mv in frontier(CROSSED, n):
        assert sum(math.log2(m) for m in mv.counts) <= bound + 1e-9


def test_counting_outer_bound_single_letter_words():
    # at n = 1 every codeword is its own type, so the type count is the slack
    parts = [clique_partition(g) for g in CROSSED]
    assert counting_outer_bound(parts, 1) == pytest.approx(math.log2(3))
