"""Confusion graphs over a finite alphabet.

Letters are the integers ``1..k``. An edge ``{a, b}`` means the receiver
cannot tell ``a`` from ``b``. Words are tuples of letters, and two words of
equal length are confusable when every coordinate holds equal or adjacent
letters.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .errors import AlphabetMismatch, NotCliquePartition

Word = tuple[int, ...]
Edge = tuple[int, int]


def _normalize_edges(k: int, edges: Iterable[Sequence[int]]) -> frozenset[Edge]:
    out = set()
    for e in edges:
        a, b = (int(x) for x in e)
        if a == b:
            raise ValueError(f"self-loop on letter {a}")
        if not (1 <= a <= k and 1 <= b <= k):
            raise ValueError(f"edge ({a}, {b}) outside alphabet 1..{k}")
        out.add((a, b) if a < b else (b, a))
    return frozenset(out)


@dataclass(frozen=True)
class ConfusionGraph:
    """Undirected, irreflexive graph on the letters ``1..k``."""

    k: int
    edges: frozenset[Edge] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.k < 1:
            raise ValueError("alphabet must have at least one letter")
        object.__setattr__(self, "edges", _normalize_edges(self.k, self.edges))

    @cached_property
    def adjacency(self) -> tuple[int, ...]:
        """Neighbour bitsets; bit ``b-1`` of entry ``a-1`` is set iff a~b."""
        adj = [0] * self.k
        for a, b in self.edges:
            adj[a - 1] |= 1 << (b - 1)
            adj[b - 1] |= 1 << (a - 1)
        return tuple(adj)

    @cached_property
    def closed_adjacency(self) -> tuple[int, ...]:
        return tuple(m | (1 << i) for i, m in enumerate(self.adjacency))

    @property
    def letters(self) -> range:
        return range(1, self.k + 1)

    def adjacent(self, a: int, b: int) -> bool:
        return bool(self.adjacency[a - 1] >> (b - 1) & 1)

    def confusable_letters(self, a: int, b: int) -> bool:
        """Equal or adjacent."""
        return a == b or self.adjacent(a, b)

    def degree(self, a: int) -> int:
        return bin(self.adjacency[a - 1]).count("1")

    def neighbors(self, a: int) -> list[int]:
        return [b for b in self.letters if self.adjacent(a, b)]

    def __repr__(self) -> str:
        return f"ConfusionGraph(k={self.k}, edges={sorted(self.edges)})"


# -- constructors ------------------------------------------------------------


def empty_graph(k: int) -> ConfusionGraph:
    return ConfusionGraph(k)


def complete_graph(k: int) -> ConfusionGraph:
    return ConfusionGraph(k, itertools.combinations(range(1, k + 1), 2))


def clique_graph(k: int, letters: Iterable[int]) -> ConfusionGraph:
    """A clique on ``letters``; the remaining letters are isolated."""
    return ConfusionGraph(k, itertools.combinations(sorted(set(letters)), 2))


def graph_from_classes(k: int, classes: Iterable[Iterable[int]]) -> ConfusionGraph:
    edges: list[Edge] = []
    for cls in classes:
        edges.extend(itertools.combinations(sorted(cls), 2))
    return ConfusionGraph(k, edges)


def clique_minus_clique(k: int, d: int) -> ConfusionGraph:
    """Complete graph on ``1..k`` with the clique on ``1..d`` removed."""
    if not 2 <= d <= k:
        raise ValueError(f"need 2 <= d <= k, got d={d}, k={k}")
    return ConfusionGraph(
        k, ((a, b) for a in range(1, k + 1) for b in range(d + 1, k + 1) if a != b)
    )


def cycle_graph(k: int) -> ConfusionGraph:
    return ConfusionGraph(k, ((i, i % k + 1) for i in range(1, k + 1)))


def symmetric_dense_graphs(k: int) -> list[ConfusionGraph]:
    """User ``i`` confuses everything except letter ``i``."""
    return [clique_graph(k, (a for a in range(1, k + 1) if a != i)) for i in range(1, k + 1)]


# -- algebra -----------------------------------------------------------------


def complement(g: ConfusionGraph) -> ConfusionGraph:
    return ConfusionGraph(
        g.k, (e for e in itertools.combinations(g.letters, 2) if e not in g.edges)
    )


def intersect(gs: Sequence[ConfusionGraph]) -> ConfusionGraph:
    if not gs:
        raise ValueError("intersect needs at least one graph")
    k = gs[0].k
    if any(g.k != k for g in gs):
        raise AlphabetMismatch("all graphs must share the same alphabet size")
    edges = frozenset.intersection(*(g.edges for g in gs))
    return ConfusionGraph(k, edges)


def remove_edge(g: ConfusionGraph, edge: Edge) -> ConfusionGraph:
    a, b = sorted(edge)
    return ConfusionGraph(g.k, g.edges - {(a, b)})


def relabel(g: ConfusionGraph, perm: Sequence[int]) -> ConfusionGraph:
    """Image of ``g`` under ``a -> perm[a-1]``."""
    return ConfusionGraph(g.k, ((perm[a - 1], perm[b - 1]) for a, b in g.edges))


def strong_product(g: ConfusionGraph, h: ConfusionGraph) -> ConfusionGraph:
    """Strong product; the pair ``(a, b)`` becomes letter ``(a-1)*h.k + b``."""

    def label(a: int, b: int) -> int:
        return (a - 1) * h.k + b

    edges = []
    for a1, a2 in itertools.product(g.letters, repeat=2):
        if not g.confusable_letters(a1, a2):
            continue
        for b1, b2 in itertools.product(h.letters, repeat=2):
            if (a1, b1) < (a2, b2) and h.confusable_letters(b1, b2):
                edges.append((label(a1, b1), label(a2, b2)))
    return ConfusionGraph(g.k * h.k, edges)


def strong_power(g: ConfusionGraph, n: int) -> ConfusionGraph:
    """n-fold strong power; word ``w`` is vertex ``word_index(w, k) + 1``."""
    if n < 1:
        raise ValueError("power must be >= 1")
    out = g
    for _ in range(n - 1):
        out = strong_product(out, g)
    return out


# -- words -------------------------------------------------------------------


def check_word(word: Sequence[int], k: int) -> Word:
    w = tuple(int(x) for x in word)
    if not w:
        raise ValueError("words must be non-empty")
    if any(not 1 <= x <= k for x in w):
        raise AlphabetMismatch(f"word {w} has letters outside 1..{k}")
    return w


def word_index(word: Sequence[int], k: int) -> int:
    """Lexicographic rank of ``word`` among all words of its length."""
    idx = 0
    for x in word:
        idx = idx * k + (x - 1)
    return idx


def index_word(idx: int, k: int, n: int) -> Word:
    out = []
    for _ in range(n):
        idx, r = divmod(idx, k)
        out.append(r + 1)
    return tuple(reversed(out))


def distinguishable(g: ConfusionGraph, u: Sequence[int], v: Sequence[int]) -> bool:
    """True iff some coordinate holds distinct, non-adjacent letters."""
    u = check_word(u, g.k)
    v = check_word(v, g.k)
    if len(u) != len(v):
        raise ValueError("words must have equal length")
    return any(not g.confusable_letters(a, b) for a, b in zip(u, v))


# -- clique partitions ---------------------------------------------------------


@dataclass(frozen=True)
class CliquePartition:
    """Letter -> clique index map of a disjoint-union-of-cliques graph.

    ``class_of[a-1]`` is the (1-based) clique holding letter ``a``. Cliques
    are numbered by their smallest letter.
    """

    graph: ConfusionGraph
    class_of: tuple[int, ...]
    ell: int

    @property
    def classes(self) -> tuple[tuple[int, ...], ...]:
        out: list[list[int]] = [[] for _ in range(self.ell)]
        for a, c in enumerate(self.class_of, start=1):
            out[c - 1].append(a)
        return tuple(tuple(c) for c in out)

    def observe(self, word: Sequence[int]) -> tuple[int, ...]:
        """What the user receives when ``word`` is sent."""
        return tuple(self.class_of[x - 1] for x in word)

    def to_graph(self) -> ConfusionGraph:
        return graph_from_classes(self.graph.k, self.classes)


def clique_partition(g: ConfusionGraph) -> CliquePartition:
    class_of = [0] * g.k
    ell = 0
    for a in g.letters:
        if class_of[a - 1]:
            continue
        ell += 1
        members = g.closed_adjacency[a - 1]
        # every member must see exactly the same closed neighbourhood
        for b in g.letters:
            if members >> (b - 1) & 1:
                if g.closed_adjacency[b - 1] != members:
                    raise NotCliquePartition(
                        f"component of letter {a} is not a clique"
                    )
                class_of[b - 1] = ell
    return CliquePartition(g, tuple(class_of), ell)


def is_clique_union(g: ConfusionGraph) -> bool:
    try:
        clique_partition(g)
    except NotCliquePartition:
        return False
    return True
