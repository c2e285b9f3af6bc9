import itertools

import pytest
from hypothesis import given, settings, strategies as st

from zebra.errors import AlphabetMismatch, NotCliquePartition
from zebra.graph import (
    ConfusionGraph,
    clique_minus_clique,
    clique_partition,
    complement,
    complete_graph,
    cycle_graph,
    distinguishable,
    empty_graph,
    graph_from_classes,
    index_word,
    intersect,
    is_clique_union,
    relabel,
    remove_edge,
    strong_power,
    strong_product,
    symmetric_dense_graphs,
    word_index,
)

from conftest import all_graphs


@st.composite
def graphs(draw, max_k=5):
    k = draw(st.integers(1, max_k))
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    return ConfusionGraph(k, chosen)


def test_edges_are_normalized():
    g = ConfusionGraph(3, [(2, 1), (1, 2)])
    assert g.edges == frozenset({(1, 2)})
    assert g.adjacent(2, 1) and not g.adjacent(1, 3)
    assert g.confusable_letters(3, 3)


@pytest.mark.parametrize("edges", [[(1, 1)], [(0, 1)], [(1, 4)]])
def test_bad_edges_rejected(edges):
    with pytest.raises(ValueError):
        ConfusionGraph(3, edges)


def test_constructors():
    assert len(complete_graph(4).edges) == 6
    assert not empty_graph(4).edges
    assert cycle_graph(5).degree(1) == 2
    g = clique_minus_clique(4, 2)
    # letters 1 and 2 are the only non-adjacent pair
    assert set(itertools.combinations(range(1, 5), 2)) - g.edges == {(1, 2)}
    dense = symmetric_dense_graphs(3)
    assert [sorted(g.edges) for g in dense] == [[(2, 3)], [(1, 3)], [(1, 2)]]


@given(graphs())
def test_complement_involution(g):
    assert complement(complement(g)) == g
    assert not (g.edges & complement(g).edges)


def test_intersect_and_mismatch():
    g = intersect([complete_graph(3), ConfusionGraph(3, [(1, 2)])])
    assert g.edges == {(1, 2)}
    with pytest.raises(AlphabetMismatch):
        intersect([complete_graph(3), complete_graph(4)])


def test_remove_edge_and_relabel():
    g = remove_edge(complete_graph(3), (2, 1))
    assert g.edges == {(1, 3), (2, 3)}
    assert relabel(ConfusionGraph(3, [(1, 2)]), (3, 2, 1)).edges == {(2, 3)}


@given(st.integers(1, 4), st.integers(1, 4), st.data())
def test_word_index_roundtrip(k, n, data):
    idx = data.draw(st.integers(0, k**n - 1))
    w = index_word(idx, k, n)
    assert word_index(w, k) == idx
    assert len(w) == n and all(1 <= x <= k for x in w)


@settings(max_examples=40)
@given(graphs(max_k=3), st.integers(1, 2))
def test_strong_power_matches_distinguishability(g, n):
    # two words are adjacent in the power exactly when they are confusable
    p = strong_power(g, n)
    words = list(itertools.product(range(1, g.k + 1), repeat=n))
    for u, v in itertools.combinations(words, 2):
        adj = p.adjacent(word_index(u, g.k) + 1, word_index(v, g.k) + 1)
        assert adj == (not distinguishable(g, u, v))


def test_strong_product_sizes():
    c5 = cycle_graph(5)
    p = strong_product(c5, c5)
    assert p.k == 25
    # each vertex of C5 x C5 has (2+1)^2 - 1 neighbours
    assert all(p.degree(a) == 8 for a in p.letters)


def test_distinguishable_examples():
    g = ConfusionGraph(3, [(1, 2)])
    assert not distinguishable(g, (1, 1), (2, 1))
    assert distinguishable(g, (1, 1), (3, 1))
    with pytest.raises(ValueError):
        distinguishable(g, (1,), (1, 1))
    with pytest.raises(AlphabetMismatch):
        distinguishable(g, (4,), (1,))


def test_clique_partition_classes():
    cp = clique_partition(ConfusionGraph(4, [(2, 4)]))
    assert cp.classes == ((1,), (2, 4), (3,))
    assert cp.observe((4, 1, 3)) == (2, 1, 3)
    assert cp.to_graph() == cp.graph


def test_path_is_not_clique_union():
    with pytest.raises(NotCliquePartition):
        clique_partition(ConfusionGraph(3, [(1, 2), (2, 3)]))


@pytest.mark.parametrize("k", [3, 4])
def test_clique_union_recognition(k):
    # a graph is a clique union iff adjacency is transitive
    for g in all_graphs(k):
        transitive = all(
            g.adjacent(a, c)
            for a, b, c in itertools.permutations(g.letters, 3)
            if g.adjacent(a, b) and g.adjacent(b, c)
        )
        assert is_clique_union(g) == transitive
        if transitive:
            cp = clique_partition(g)
            assert graph_from_classes(k, cp.classes) == g
