import itertools
import math

import pytest
from hypothesis import given, settings, strategies as st

from zebra.capacity import (
    capacity_lower_bound,
    independence_number,
    independent_set_check,
    known_capacity,
)
from zebra.errors import BudgetExceeded, SizeLimitExceeded
from zebra.graph import (
    ConfusionGraph,
    clique_minus_clique,
    complement,
    complete_graph,
    cycle_graph,
    empty_graph,
    graph_from_classes,
    strong_power,
)

from conftest import all_graphs, brute_alpha


@st.composite
def random_graphs(draw, max_k=9):
    k = draw(st.integers(1, max_k))
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    mask = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return ConfusionGraph(k, [e for e, keep in zip(pairs, mask) if keep])


@settings(max_examples=150)
@given(random_graphs())
def test_alpha_matches_brute_force(g):
    assert independence_number(g) == brute_alpha(g)


def test_three_letter_graphs():
    # every graph on three letters that is neither empty nor complete has alpha 2
    for g in all_graphs(3):
        if g.edges and len(g.edges) < 3:
            assert independence_number(g) == 2
            assert known_capacity(g) == (2, "three-letter")


def test_c5_squared():
    assert independence_number(strong_power(cycle_graph(5), 2)) == 5
    cb = capacity_lower_bound(cycle_graph(5), 2)
    assert cb.alpha_n == 5
    assert cb.lower_bound == pytest.approx(math.sqrt(5))
    assert not cb.exact


@pytest.mark.parametrize("k,d", [(3, 2), (4, 2), (4, 3), (5, 3), (6, 4), (7, 2)])
def test_clique_minus_clique_capacities(k, d):
    g = clique_minus_clique(k, d)
    value, family = known_capacity(g)
    assert value == d
    assert family in ("clique-minus-clique", "three-letter")
    # the complement is a clique on 1..d plus k-d isolated letters
    value, family = known_capacity(complement(g))
    assert value == k - d + 1
    assert family in ("complement-of-clique-minus-clique", "three-letter")
    # powers never beat the claimed capacity
    for n in (1, 2):
        if k**n <= 64:
            assert independence_number(strong_power(g, n)) == d**n


def test_clique_union_capacity():
    g = graph_from_classes(5, [(1, 2), (3, 4), (5,)])
    assert known_capacity(g) == (3, "clique-union")
    assert capacity_lower_bound(g, 2).alpha_n == 9


def test_trivial_graphs():
    assert capacity_lower_bound(empty_graph(4), 2).alpha_n == 16
    assert capacity_lower_bound(complete_graph(4), 2).alpha_n == 1


def test_independent_set_check():
    g = cycle_graph(5)
    assert independent_set_check(g, [1, 3])
    assert not independent_set_check(g, [1, 2])


def test_limits():
    with pytest.raises(SizeLimitExceeded):
        capacity_lower_bound(cycle_graph(5), 6)
    with pytest.raises(BudgetExceeded):
        independence_number(strong_power(cycle_graph(5), 2), max_nodes=2)
    with pytest.raises(ValueError):
        capacity_lower_bound(cycle_graph(5), 0)


def test_budget_env(monkeypatch):
    monkeypatch.setenv("BR_BUDGET", "2")
    with pytest.raises(BudgetExceeded):
        independence_number(strong_power(cycle_graph(5), 2))
