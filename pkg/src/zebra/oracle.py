"""Exact feasibility of message vectors at a fixed block length.

A scheme assigns a word of length ``n`` to every message tuple
``(a_1, ..., a_r)`` with ``a_i`` in ``1..m_i``. It is valid when any two
tuples that differ for user ``i`` get words user ``i`` can distinguish.
"""
from __future__ import annotations

import itertools
import math
import os
from collections import Counter
from dataclasses import dataclass
from typing import Iterator, Optional, Sequence

import numpy as np

from .entropy_region import entropy_bits, joint_partition
from .errors import AlphabetMismatch, BudgetExceeded, SizeLimitExceeded
from .graph import (
    CliquePartition,
    ConfusionGraph,
    Word,
    clique_partition,
    distinguishable,
    index_word,
    is_clique_union,
    relabel,
)

MAX_TUPLES = 64
MAX_WORDS = 1 << 20
MAX_NODES = 2_000_000
MAX_TYPE_CLASS = 10**7
MAX_AUTOMORPHISM_LETTERS = 8
MAX_HALL_PATTERNS = 256


def _default_nodes() -> int:
    env = os.environ.get("BR_BUDGET")
    return int(env) if env else MAX_NODES


@dataclass(frozen=True)
class MessageVector:
    counts: tuple[int, ...]
    n: int

    def __post_init__(self):
        object.__setattr__(self, "counts", tuple(int(m) for m in self.counts))
        if not self.counts or any(m < 1 for m in self.counts):
            raise ValueError("message counts must be positive")
        if self.n < 1:
            raise ValueError("block length must be positive")

    @property
    def r(self) -> int:
        return len(self.counts)

    def tuples(self) -> list[tuple[int, ...]]:
        return list(itertools.product(*(range(1, m + 1) for m in self.counts)))

    def rates(self) -> tuple[float, ...]:
        return tuple(math.log2(m) / self.n for m in self.counts)


@dataclass(frozen=True)
class EncodingScheme:
    shape: MessageVector
    table: dict

    def __hash__(self):
        return hash((self.shape, tuple(sorted(self.table.items()))))

    def encode(self, message: Sequence[int]) -> Word:
        return self.table[tuple(message)]

    def violations(self, graphs: Sequence[ConfusionGraph]) -> list[tuple]:
        """All ``(t, u, user)`` triples breaking validity; empty when valid."""
        bad = []
        tuples = self.shape.tuples()
        for x, y in itertools.combinations(tuples, 2):
            for i, (a, b) in enumerate(zip(x, y)):
                if a != b and not distinguishable(graphs[i], self.table[x], self.table[y]):
                    bad.append((x, y, i + 1))
        return bad

    def is_valid(self, graphs: Sequence[ConfusionGraph]) -> bool:
        if set(self.table) != set(self.shape.tuples()):
            return False
        if any(len(w) != self.shape.n for w in self.table.values()):
            return False
        return not self.violations(graphs)

    def to_dict(self, zero_based: bool = False) -> dict:
        off = 1 if zero_based else 0
        return {
            "counts": list(self.shape.counts),
            "n": self.shape.n,
            "table": {
                ",".join(map(str, t)): [x - off for x in w] for t, w in sorted(self.table.items())
            },
        }


@dataclass(frozen=True)
class SearchResult:
    """``feasible`` with a witness, or an exhaustive refutation.

    ``nodes`` counts codeword assignments tried; a refutation is always
    complete, budget exhaustion raises instead.
    """

    feasible: bool
    shape: MessageVector
    scheme: Optional[EncodingScheme]
    nodes: int
    reason: str

    def to_dict(self, zero_based: bool = False) -> dict:
        return {
            "feasible": self.feasible,
            "counts": list(self.shape.counts),
            "n": self.shape.n,
            "nodes": self.nodes,
            "reason": self.reason,
            "scheme": None if self.scheme is None else self.scheme.to_dict(zero_based)["table"],
        }


def simultaneous_automorphisms(graphs: Sequence[ConfusionGraph]) -> list[tuple[int, ...]]:
    """Letter permutations fixing every graph; identity only when k > 8."""
    k = graphs[0].k
    ident = tuple(range(1, k + 1))
    if k > MAX_AUTOMORPHISM_LETTERS:
        return [ident]
    out = []
    for perm in itertools.permutations(ident):
        if all(relabel(g, perm).edges == g.edges for g in graphs):
            out.append(perm)
    return out


class _Backtracker:
    def __init__(self, graphs: Sequence[ConfusionGraph], mv: MessageVector, max_nodes: int):
        self.graphs = graphs
        self.mv = mv
        self.k = graphs[0].k
        self.n = mv.n
        self.size = self.k**self.n
        self.max_nodes = max_nodes
        self.nodes = 0
        # letters (0-based) at each position of every word index
        idx = np.arange(self.size)
        self.letters = [(idx // self.k ** (self.n - 1 - j)) % self.k for j in range(self.n)]
        self.closed = []
        for g in graphs:
            a = np.zeros((self.k, self.k), dtype=bool)
            for x in range(self.k):
                for y in range(self.k):
                    a[x, y] = g.confusable_letters(x + 1, y + 1)
            self.closed.append(a)
        self._conf: dict[tuple[int, int], int] = {}
        self._forbid: dict[tuple[int, int], int] = {}
        self.tuples = mv.tuples()
        self.diff = [
            [sum(1 << i for i, (a, b) in enumerate(zip(s, t)) if a != b) for t in self.tuples]
            for s in self.tuples
        ]
        autos = simultaneous_automorphisms(graphs)
        self.autos = np.array(autos, dtype=int) - 1 if len(autos) > 1 else None
        self.powers = self.k ** np.arange(self.n - 1, -1, -1)
        self.patterns = [self._pattern_masks(g) for g in graphs]
        self.lines = self._lines()

    def _pattern_masks(self, g: ConfusionGraph) -> Optional[list[int]]:
        """Word bitsets per observation string, for clique-union users."""
        if not is_clique_union(g):
            return None
        cp = clique_partition(g)
        if cp.ell**self.n > MAX_HALL_PATTERNS:
            return None
        cls = np.array(cp.class_of) - 1
        obs = np.zeros(self.size, dtype=np.int64)
        for j in range(self.n):
            obs = obs * cp.ell + cls[self.letters[j]]
        masks = []
        for val in np.unique(obs):
            bits = np.packbits(obs == val, bitorder="little").tobytes()
            masks.append(int.from_bytes(bits, "little"))
        return masks

    def _lines(self) -> list[tuple[int, list[int]]]:
        """``(user, positions)`` for every set of tuples varying one user only."""
        out = []
        for i, m in enumerate(self.mv.counts):
            if m < 2 or self.patterns[i] is None:
                continue
            groups: dict[tuple, list[int]] = {}
            for pos, t in enumerate(self.tuples):
                groups.setdefault(t[:i] + t[i + 1 :], []).append(pos)
            out.extend((i, g) for g in groups.values())
        return out

    def _hall_ok(self, pos: int, domains: list[int]) -> bool:
        """Unassigned tuples of each line need distinct observation strings."""
        for user, line in self.lines:
            todo = [q for q in line if q > pos]
            if len(todo) < 2:
                continue
            masks = self.patterns[user]
            options = [[c for c, m in enumerate(masks) if domains[q] & m] for q in todo]
            if not _perfect_matching(options):
                return False
        return True

    def _confusable_bits(self, user: int, w: int) -> int:
        key = (user, w)
        bits = self._conf.get(key)
        if bits is None:
            a = self.closed[user]
            mask = np.ones(self.size, dtype=bool)
            for j in range(self.n):
                mask &= a[self.letters[j][w]][self.letters[j]]
            bits = int.from_bytes(np.packbits(mask, bitorder="little").tobytes(), "little")
            self._conf[key] = bits
        return bits

    def forbidden(self, users: int, w: int) -> int:
        key = (users, w)
        bits = self._forbid.get(key)
        if bits is None:
            bits = 0
            for i in range(len(self.graphs)):
                if users >> i & 1:
                    bits |= self._confusable_bits(i, w)
            self._forbid[key] = bits
        return bits

    def canonical(self, w: int) -> bool:
        if self.autos is None:
            return True
        word = np.array([self.letters[j][w] for j in range(self.n)])
        images = self.autos[:, word] @ self.powers
        return bool(images.min() >= w)

    def _axis_links(self) -> list[Optional[int]]:
        """Position of the previous axis tuple for every axis tuple.

        Message labels of each user are interchangeable, and so are letters
        under a simultaneous automorphism. The lexicographic leader of the
        combined symmetry class has a canonical first codeword and, for each
        user, strictly increasing codewords along ``(1,..,v,..,1)``.
        """
        counts = self.mv.counts
        strides = [math.prod(counts[i + 1 :]) for i in range(len(counts))]
        links: list[Optional[int]] = []
        for pos, t in enumerate(self.tuples):
            moved = [i for i, a in enumerate(t) if a != 1]
            if len(moved) == 1 and t[moved[0]] >= 2:
                links.append(pos - strides[moved[0]])
            else:
                links.append(None)
        return links

    def run(self) -> Optional[list[int]]:
        self.links = self._axis_links()
        full = (1 << self.size) - 1
        return self._search(0, [full] * len(self.tuples), [])

    def _search(self, pos: int, domains: list[int], assigned: list[int]) -> Optional[list[int]]:
        if pos == len(self.tuples):
            return assigned
        dom = domains[pos]
        prev = self.links[pos]
        if prev is not None:
            dom &= ~((1 << (assigned[prev] + 1)) - 1)
        while dom:
            low = dom & -dom
            dom ^= low
            w = low.bit_length() - 1
            if pos == 0 and not self.canonical(w):
                continue
            self.nodes += 1
            if self.nodes > self.max_nodes:
                raise BudgetExceeded(f"scheme search exceeded {self.max_nodes} nodes", self.nodes)
            nxt = domains[: pos + 1]
            row = self.diff[pos]
            ok = True
            for j in range(pos + 1, len(self.tuples)):
                d = domains[j] & ~self.forbidden(row[j], w)
                if not d:
                    ok = False
                    break
                nxt.append(d)
            if not ok or (self.lines and not self._hall_ok(pos, nxt)):
                continue
            found = self._search(pos + 1, nxt, assigned + [w])
            if found is not None:
                return found
        return None


def _perfect_matching(options: list[list[int]]) -> bool:
    """Whether every row can take a distinct column from its options."""
    owner: dict[int, int] = {}

    def augment(row: int, seen: set) -> bool:
        for c in options[row]:
            if c in seen:
                continue
            seen.add(c)
            if c not in owner or augment(owner[c], seen):
                owner[c] = row
                return True
        return False

    return all(augment(row, set()) for row in range(len(options)))


def _check_graphs(graphs: Sequence[ConfusionGraph], mv: MessageVector) -> None:
    if len(graphs) != mv.r:
        raise ValueError(f"{len(graphs)} graphs but {mv.r} message counts")
    if any(g.k != graphs[0].k for g in graphs):
        raise AlphabetMismatch("all graphs must share one alphabet")


def is_feasible(
    graphs: Sequence[ConfusionGraph],
    mv: MessageVector,
    max_tuples: int = MAX_TUPLES,
    max_words: int = MAX_WORDS,
    max_nodes: Optional[int] = None,
) -> SearchResult:
    """Exhaustive backtracking over message tuples in lexicographic order."""
    _check_graphs(graphs, mv)
    k = graphs[0].k
    n_tuples = math.prod(mv.counts)
    if n_tuples > max_tuples:
        raise BudgetExceeded(f"{n_tuples} message tuples exceeds {max_tuples}")
    if k**mv.n > max_words:
        raise BudgetExceeded(f"{k ** mv.n} candidate words exceeds {max_words}")
    if n_tuples > k**mv.n:
        # distinct tuples always need distinct codewords
        return SearchResult(False, mv, None, 0, "counting: more tuples than words")
    bt = _Backtracker(graphs, mv, max_nodes if max_nodes is not None else _default_nodes())
    found = bt.run()
    if found is None:
        return SearchResult(False, mv, None, bt.nodes, "exhaustive search")
    table = {t: index_word(w, k, mv.n) for t, w in zip(bt.tuples, found)}
    return SearchResult(True, mv, EncodingScheme(mv, table), bt.nodes, "witness")


def concatenate(s1: EncodingScheme, s2: EncodingScheme) -> EncodingScheme:
    """Time sharing: the first block carries ``s1``, the second ``s2``."""
    if s1.shape.r != s2.shape.r:
        raise ValueError("schemes must serve the same users")
    m1, m2 = s1.shape.counts, s2.shape.counts
    shape = MessageVector(tuple(a * b for a, b in zip(m1, m2)), s1.shape.n + s2.shape.n)
    table = {}
    for x in s1.shape.tuples():
        for y in s2.shape.tuples():
            t = tuple((a - 1) * mb + b for a, b, mb in zip(x, y, m2))
            table[t] = s1.table[x] + s2.table[y]
    return EncodingScheme(shape, table)


def frontier(
    graphs: Sequence[ConfusionGraph],
    n: int,
    max_tuples: int = MAX_TUPLES,
    max_words: int = MAX_WORDS,
    max_nodes: Optional[int] = None,
) -> list[MessageVector]:
    """Pareto-maximal feasible ``(m1, m2)`` at block length ``n``."""
    if len(graphs) != 2:
        raise ValueError("frontier is defined for two users")
    words = graphs[0].k ** n

    def feasible(m1: int, m2: int) -> bool:
        mv = MessageVector((m1, m2), n)
        return is_feasible(graphs, mv, max_tuples, max_words, max_nodes).feasible

    def best_m2(m1: int) -> int:
        cap = max_tuples // m1
        hi = min(words // m1, cap)
        lo = 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if feasible(m1, mid):
                lo = mid
            else:
                hi = mid - 1
        if lo == cap and cap < words // m1:
            raise BudgetExceeded(f"frontier at m1={m1} reaches the tuple budget {max_tuples}")
        return lo

    points = []
    m1 = 1
    while m1 <= min(words, max_tuples) and feasible(m1, 1):
        points.append((m1, best_m2(m1)))
        m1 += 1
    if m1 == max_tuples + 1 and m1 <= words:
        raise BudgetExceeded(f"user 1 alone reaches the tuple budget {max_tuples}")
    maximal = [
        MessageVector(p, n)
        for i, p in enumerate(points)
        if i + 1 == len(points) or points[i + 1][1] < p[1]
    ]
    return maximal


# -- type classes ----------------------------------------------------------------


@dataclass(frozen=True)
class TypeClass:
    """Words of length ``n`` with letter ``a`` occurring ``composition[a-1]`` times."""

    composition: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "composition", tuple(int(c) for c in self.composition))
        if any(c < 0 for c in self.composition) or self.n < 1:
            raise ValueError("composition needs nonnegative counts with positive sum")

    @property
    def n(self) -> int:
        return sum(self.composition)

    @property
    def k(self) -> int:
        return len(self.composition)

    @property
    def size(self) -> int:
        out = math.factorial(self.n)
        for c in self.composition:
            out //= math.factorial(c)
        return out

    @property
    def distribution(self) -> np.ndarray:
        return np.asarray(self.composition, dtype=float) / self.n

    def words(self) -> Iterator[Word]:
        """All words of the class in lexicographic order."""
        counts = list(self.composition)
        prefix: list[int] = []

        def rec(left: int):
            if left == 0:
                yield tuple(prefix)
                return
            for a in range(self.k):
                if counts[a]:
                    counts[a] -= 1
                    prefix.append(a + 1)
                    yield from rec(left - 1)
                    prefix.pop()
                    counts[a] += 1

        yield from rec(self.n)


def _type_class(partitions: Sequence[CliquePartition], composition) -> TypeClass:
    tc = TypeClass(tuple(composition))
    if tc.k != partitions[0].graph.k:
        raise AlphabetMismatch("composition length must equal the alphabet size")
    if tc.size > MAX_TYPE_CLASS:
        raise SizeLimitExceeded(f"type class has {tc.size} words > {MAX_TYPE_CLASS}")
    return tc


def type_class_count(
    partitions: Sequence[CliquePartition], composition: Sequence[int], subset: Sequence[int]
) -> int:
    """Number of distinct joint observations of the users in ``subset``
    over the type class, by enumeration."""
    tc = _type_class(partitions, composition)
    users = sorted(set(subset))
    seen = set()
    for w in tc.words():
        seen.add(tuple(partitions[i - 1].observe(w) for i in users))
    return len(seen)


def type_count_bounds(
    partitions: Sequence[CliquePartition], composition: Sequence[int], subset: Sequence[int]
) -> tuple[float, int, float]:
    """``(log2 lower, N, log2 upper)`` of the type-counting sandwich."""
    tc = _type_class(partitions, composition)
    jp = joint_partition(partitions, subset)
    p = tc.distribution
    h = entropy_bits([p[[a - 1 for a in cell]].sum() for cell in jp.cells])
    count = type_class_count(partitions, composition, subset)
    return h * tc.n - tc.k * math.log2(tc.n), count, h * tc.n


def type_count_check(
    partitions: Sequence[CliquePartition],
    composition: Sequence[int],
    subset: Sequence[int],
    tol: float = 1e-9,
) -> bool:
    lo, count, hi = type_count_bounds(partitions, composition, subset)
    logn = math.log2(count)
    return lo <= logn + tol and logn <= hi + tol


def compositions(n: int, k: int) -> Iterator[tuple[int, ...]]:
    for bars in itertools.combinations(range(n + k - 1), k - 1):
        edges = (-1,) + bars + (n + k - 1,)
        yield tuple(edges[i + 1] - edges[i] - 1 for i in range(k))


def counting_outer_bound(partitions: Sequence[CliquePartition], n: int) -> float:
    """Upper bound on ``sum(log2 m_i)`` for any scheme of length ``n``.

    Splitting a scheme by letter composition leaves, in some type class, at
    least ``prod(m_i) / C(n+k-1, k-1)`` codewords whose joint observations
    are all distinct, and a type class has at most ``2^(nH)`` of those.
    """
    k = partitions[0].graph.k
    jp = joint_partition(partitions, range(1, len(partitions) + 1))
    best = 0.0
    for comp in compositions(n, k):
        p = np.asarray(comp, dtype=float) / n
        h = entropy_bits([p[[a - 1 for a in cell]].sum() for cell in jp.cells])
        best = max(best, h)
    return best * n + math.log2(math.comb(n + k - 1, k - 1))


def letter_histogram(word: Sequence[int], k: int) -> tuple[int, ...]:
    c = Counter(word)
    return tuple(c.get(a, 0) for a in range(1, k + 1))
