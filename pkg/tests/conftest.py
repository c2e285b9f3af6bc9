import itertools

import pytest

from zebra.graph import ConfusionGraph, clique_partition, symmetric_dense_graphs

# s0, s1, s2 are letters 1, 2, 3
CROSSED = (ConfusionGraph(3, [(1, 2)]), ConfusionGraph(3, [(1, 3)]))
EDGE_EMPTY = (ConfusionGraph(3, [(1, 2)]), ConfusionGraph(3))


def all_graphs(k):
    pairs = list(itertools.combinations(range(1, k + 1), 2))
    for mask in range(1 << len(pairs)):
        yield ConfusionGraph(k, [e for i, e in enumerate(pairs) if mask >> i & 1])


def brute_alpha(g):
    """Largest independent set by trying every subset, biggest first."""
    for size in range(g.k, 0, -1):
        for s in itertools.combinations(range(1, g.k + 1), size):
            if all(not g.adjacent(a, b) for a, b in itertools.combinations(s, 2)):
                return size
    return 0


@pytest.fixture
def crossed():
    return CROSSED


@pytest.fixture
def edge_empty():
    return EDGE_EMPTY


@pytest.fixture
def crossed_parts():
    return [clique_partition(g) for g in CROSSED]


@pytest.fixture
def dense3():
    return symmetric_dense_graphs(3)
