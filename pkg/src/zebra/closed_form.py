"""Closed-form rate-region boundaries and the counting inequalities behind them.

Covers the clique-minus-clique trade-offs, the complete two-user,
three-letter catalogue, and checkers for the inequalities on closed word
sets used to prove the clique-minus-clique bounds.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

from scipy.optimize import bisect

from .capacity import independence_number
from .entropy_region import entropy_bits
from .graph import (
    ConfusionGraph,
    Word,
    clique_minus_clique,
    complement,
    complete_graph,
    relabel,
)

TOL = 1e-9
LOG2_3 = math.log2(3)


# -- entropy ---------------------------------------------------------------------


def binary_entropy(x: float) -> float:
    if not 0.0 <= x <= 1.0:
        raise ValueError(f"binary entropy needs x in [0, 1], got {x}")
    return entropy_bits([x, 1.0 - x])


def entropy_of(*probs: float) -> float:
    """Entropy of ``probs`` plus the leftover mass ``1 - sum(probs)``."""
    if any(p < 0 for p in probs) or sum(probs) > 1.0 + 1e-12:
        raise ValueError("probabilities must be nonnegative with sum <= 1")
    rest = max(0.0, 1.0 - sum(probs))
    return entropy_bits(list(probs) + [rest])


H_TWO_THIRDS = binary_entropy(2 / 3)


def entropy_inverse_upper(y: float) -> float:
    """The ``x`` in ``[1/2, 2/3]`` with ``binary_entropy(x) == y``.

    Defined for ``y`` in ``[H(2/3), 1]``; ``H`` decreases strictly there.
    """
    if not H_TWO_THIRDS - TOL <= y <= 1.0 + TOL:
        raise ValueError(f"y={y} outside [H(2/3), 1]")
    if y >= 1.0:
        return 0.5
    if y <= H_TWO_THIRDS:
        return 2 / 3
    return bisect(lambda x: binary_entropy(x) - y, 0.5, 2 / 3, xtol=1e-12)


# -- clique minus clique ---------------------------------------------------------


def _check_kd(d: int, k: int) -> None:
    if not 2 <= d <= k:
        raise ValueError(f"need 2 <= d <= k, got d={d}, k={k}")


def perfect_receiver_boundary(alpha: float, d: int, k: int) -> tuple[float, float]:
    """Optimal pair when the second receiver sees every letter."""
    _check_kd(d, k)
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * math.log2(d), (1 - alpha) * math.log2(k)


def complement_receiver_boundary(alpha: float, d: int, k: int) -> tuple[float, float]:
    """Optimal pair when the second receiver has the complement graph.

    Only proven for ``d <= (k + 1) / 2``; larger ``d`` is rejected.
    """
    _check_kd(d, k)
    if 2 * d > k + 1:
        raise ValueError(f"d={d} > (k+1)/2 for k={k}: boundary not established")
    if not 0.0 <= alpha <= 1.0:
        raise ValueError("alpha must lie in [0, 1]")
    return alpha * math.log2(d), (1 - alpha) * math.log2(k - d + 1)


def time_sharing_bound(r1: float, cap1: int, cap2: int) -> float:
    """Largest R2 on the segment between ``(log2 cap1, 0)`` and ``(0, log2 cap2)``."""
    if cap1 <= 1:
        return math.log2(cap2) if r1 <= TOL else -math.inf
    frac = r1 / math.log2(cap1)
    if frac > 1.0 + TOL:
        return -math.inf
    return max(0.0, 1.0 - frac) * math.log2(cap2) if cap2 > 1 else 0.0


# -- two users, three letters ----------------------------------------------------

CASES = ("two-edge", "crossed-edges", "edge-vs-empty")


def crossed_edges_max_r2(r1: float) -> float:
    """G1 = {s0 s1}, G2 = {s0 s2}: largest R2 for a given R1 (-inf if none)."""
    if r1 < -TOL or r1 > 1.0 + TOL:
        return -math.inf
    if r1 <= 0.5:
        return 1.0
    if r1 <= 2 / 3:
        return binary_entropy(r1)
    if r1 <= LOG2_3 - 2 / 3:
        return LOG2_3 - r1
    return entropy_inverse_upper(min(r1, 1.0))


def edge_vs_empty_max_r2(r1: float) -> float:
    """G1 = {s0 s1}, G2 empty: largest R2 for a given R1 (-inf if none)."""
    if r1 < -TOL or r1 > 1.0 + TOL:
        return -math.inf
    if r1 <= LOG2_3 - 2 / 3:
        return LOG2_3 - max(r1, 0.0)
    return entropy_inverse_upper(min(r1, 1.0))


# With letters s0, s1, s2 stored as 1, 2, 3.
TWO_EDGE_G1 = ConfusionGraph(3, [(1, 2), (1, 3)])
CROSSED_EDGES = (ConfusionGraph(3, [(1, 2)]), ConfusionGraph(3, [(1, 3)]))
EDGE_AND_EMPTY = (ConfusionGraph(3, [(1, 2)]), ConfusionGraph(3))


def two_edge_max_r2(r1: float, g2: ConfusionGraph) -> float:
    """G1 = {s0 s1, s0 s2} against any G2 on the same three letters.

    The two proof branches: G2 shares an edge with G1, so the total rate is
    at most 1; or G2 avoids G1, so G2 is empty or {s1 s2} and the
    clique-minus-clique bounds apply. Either way the boundary is the
    time-sharing segment to ``log2 c(G2)``.
    """
    if g2.k != 3:
        raise ValueError("the two-edge case needs a three-letter G2")
    cap2 = independence_number(g2)
    return time_sharing_bound(r1, 2, cap2)


def region_2user_3letter(
    case: str, rates: Sequence[float], g2: Optional[ConfusionGraph] = None
) -> bool:
    """Exact membership for one of the named two-user, three-letter cases."""
    r1, r2 = (float(x) for x in rates)
    if r1 < -TOL or r2 < -TOL:
        return False
    if case == "two-edge":
        if g2 is None:
            raise ValueError("the two-edge case needs the second graph")
        best = two_edge_max_r2(r1, g2)
    elif case == "crossed-edges":
        best = crossed_edges_max_r2(r1)
    elif case == "edge-vs-empty":
        best = edge_vs_empty_max_r2(r1)
    else:
        raise ValueError(f"unknown case {case!r}; expected one of {CASES}")
    return r2 <= best + TOL


@dataclass(frozen=True)
class PairClassification:
    """How a pair of three-letter graphs maps onto a catalogued case.

    ``swap`` means the users trade places before applying ``case``.
    ``case`` is one of ``two-edge``/``crossed-edges``/``edge-vs-empty`` or a degenerate
    label (``single-user``, ``shared-edge``, ``both-empty``).
    """

    case: str
    swap: bool
    g2: Optional[ConfusionGraph] = None


def _maps_to(g1: ConfusionGraph, g2: ConfusionGraph, t1, t2) -> bool:
    return any(
        relabel(g1, p).edges == t1.edges and relabel(g2, p).edges == t2.edges
        for p in itertools.permutations((1, 2, 3))
    )


def _canonical_two_edge(g1: ConfusionGraph, g2: ConfusionGraph) -> ConfusionGraph:
    for p in itertools.permutations((1, 2, 3)):
        if relabel(g1, p).edges == TWO_EDGE_G1.edges:
            return relabel(g2, p)
    raise AssertionError("not a two-edge graph")


def classify_pair(g1: ConfusionGraph, g2: ConfusionGraph) -> PairClassification:
    if g1.k != 3 or g2.k != 3:
        raise ValueError("catalogue covers three-letter alphabets only")
    full = complete_graph(3).edges
    if g1.edges == full or g2.edges == full:
        return PairClassification("single-user", False)
    if len(g1.edges) == 2:
        return PairClassification("two-edge", False, _canonical_two_edge(g1, g2))
    if len(g2.edges) == 2:
        return PairClassification("two-edge", True, _canonical_two_edge(g2, g1))
    if not g1.edges and not g2.edges:
        return PairClassification("both-empty", False)
    if g1.edges == g2.edges:
        return PairClassification("shared-edge", False)
    if _maps_to(g1, g2, *CROSSED_EDGES):
        return PairClassification("crossed-edges", False)
    if _maps_to(g1, g2, *EDGE_AND_EMPTY):
        return PairClassification("edge-vs-empty", False)
    if _maps_to(g2, g1, *EDGE_AND_EMPTY):
        return PairClassification("edge-vs-empty", True)
    raise AssertionError("unreachable: every three-letter pair is catalogued")


def max_r2_3letter(g1: ConfusionGraph, g2: ConfusionGraph, r1: float) -> float:
    """Largest R2 given R1 for any pair of three-letter confusion graphs."""
    c = classify_pair(g1, g2)
    if c.swap:
        # boundary of the swapped pair, read the other way round
        return _max_other(g2, g1, r1)
    if c.case == "two-edge":
        return two_edge_max_r2(r1, c.g2)
    if c.case == "crossed-edges":
        return crossed_edges_max_r2(r1)
    if c.case == "edge-vs-empty":
        return edge_vs_empty_max_r2(r1)
    if c.case == "single-user":
        return time_sharing_bound(r1, independence_number(g1), independence_number(g2))
    if c.case == "shared-edge":
        return time_sharing_bound(r1, 2, 2)
    return time_sharing_bound(r1, 3, 3)


def _max_other(g_first: ConfusionGraph, g_second: ConfusionGraph, r: float) -> float:
    """Largest rate of the *first* user of ``(g_first, g_second)`` when the
    second one runs at ``r``, found by scanning the second user's boundary."""

    def boundary(x: float) -> float:
        return max_r2_3letter(g_first, g_second, x)

    cap = math.log2(independence_number(g_first))
    if boundary(0.0) < r - TOL:
        return -math.inf
    lo, hi = 0.0, cap
    if boundary(hi) >= r - TOL:
        return hi
    # boundary is nonincreasing; find the last x still reaching r
    while hi - lo > 1e-13:
        mid = 0.5 * (lo + hi)
        if boundary(mid) >= r - TOL:
            lo = mid
        else:
            hi = mid
    return lo


def region_3letter(g1: ConfusionGraph, g2: ConfusionGraph, rates: Sequence[float]) -> bool:
    r1, r2 = (float(x) for x in rates)
    if r1 < -TOL or r2 < -TOL:
        return False
    return r2 <= max_r2_3letter(g1, g2, r1) + TOL


# -- inequalities on closed word sets ----------------------------------------------------


def _pow_log(a: float, b: float, x: float) -> float:
    """``a ** log_b(x)`` with the convention that it is 0 at ``x = 0``."""
    return 0.0 if x == 0 else a ** (math.log(x) / math.log(b))


def power_sum_sides(a: int, b: int, xs: Sequence[float]) -> tuple[float, float]:
    if not 2 <= b <= a:
        raise ValueError("need 2 <= b <= a")
    xs = list(xs)
    if len(xs) != b or any(x < 0 for x in xs) or any(u < v for u, v in zip(xs, xs[1:])):
        raise ValueError("need b nonincreasing nonnegative values")
    lhs = (a - b + 1) * _pow_log(a, b, xs[-1]) + sum(_pow_log(a, b, x) for x in xs[:-1])
    return lhs, _pow_log(a, b, sum(xs))


def power_sum_check(a: int, b: int, xs: Sequence[float], tol: float = TOL) -> bool:
    lhs, rhs = power_sum_sides(a, b, xs)
    return lhs <= rhs + tol * max(1.0, rhs)


@dataclass(frozen=True)
class ClosedWordSet:
    """Equal-length words over ``1..k`` closed under replacing any letter
    above ``d`` by any letter. Closure is verified on construction."""

    k: int
    d: int
    words: frozenset[Word]

    def __post_init__(self):
        _check_kd(self.d, self.k)
        lengths = {len(w) for w in self.words}
        if len(lengths) > 1:
            raise ValueError("words must share one length")
        for w in self.words:
            if any(not 1 <= x <= self.k for x in w):
                raise ValueError(f"word {w} outside alphabet 1..{self.k}")
            for i, x in enumerate(w):
                if x > self.d:
                    for y in range(1, self.k + 1):
                        if w[:i] + (y,) + w[i + 1 :] not in self.words:
                            raise ValueError(f"not closed: {w} position {i + 1} -> {y}")

    def __len__(self) -> int:
        return len(self.words)


def close_set(words: Iterable[Sequence[int]], d: int, k: int) -> ClosedWordSet:
    """Smallest closed set containing ``words``.

    A letter above ``d`` may become anything, so each word contributes the
    product of ``{all letters}`` at such positions and its own letter
    elsewhere.
    """
    _check_kd(d, k)
    alphabet = range(1, k + 1)
    out: set[Word] = set()
    for w in words:
        choices = [alphabet if x > d else (x,) for x in w]
        out.update(itertools.product(*choices))
    return ClosedWordSet(k, d, frozenset(out))


def restrict_prime(cs: ClosedWordSet) -> frozenset[Word]:
    """Words using only the first ``d`` letters."""
    return frozenset(w for w in cs.words if max(w) <= cs.d)


def collapse_doubleprime(cs: ClosedWordSet) -> frozenset[Word]:
    """Letterwise image under ``a -> max(a, d)``."""
    return frozenset(tuple(max(x, cs.d) for x in w) for w in cs.words)


def _log(x: int, base: int) -> float:
    if x <= 0:
        raise ValueError("log of an empty set")
    if base == 1:
        return 0.0 if x == 1 else math.inf
    return math.log(x) / math.log(base)


def restriction_sides(cs: ClosedWordSet) -> Optional[tuple[float, float]]:
    """``(log_k |G|, log_d |G'|)``, or None when both sets are empty."""
    g, g1 = len(cs.words), len(restrict_prime(cs))
    if g == 0 and g1 == 0:
        return None
    if g1 == 0:
        return math.inf, -math.inf
    return _log(g, cs.k), _log(g1, cs.d)


def restriction_check(cs: ClosedWordSet, tol: float = TOL) -> bool:
    sides = restriction_sides(cs)
    return sides is None or sides[0] <= sides[1] + tol


def collapse_sides(cs: ClosedWordSet) -> Optional[tuple[float, float]]:
    """``(log_{k-d+1} |G''|, log_d |G'|)``, or None when both sets are empty."""
    g1, g2 = len(restrict_prime(cs)), len(collapse_doubleprime(cs))
    if g1 == 0 and g2 == 0:
        return None
    if g1 == 0:
        return math.inf, -math.inf
    return _log(g2, cs.k - cs.d + 1), _log(g1, cs.d)


def collapse_applies(cs: ClosedWordSet) -> bool:
    return 2 * cs.d <= cs.k + 1


def collapse_check(cs: ClosedWordSet, tol: float = TOL) -> bool:
    """Evaluates the inequality; it is only guaranteed when
    :func:`collapse_applies` holds."""
    sides = collapse_sides(cs)
    return sides is None or sides[0] <= sides[1] + tol


# -- the counterexample for large d ------------------------------------------------


def counterexample_set(k: int, d: int) -> ClosedWordSet:
    """Closure of ``{(1, k), (k, 1)}``; breaks the collapse bound when ``d > (k+1)/2``."""
    return close_set([(1, k), (k, 1)], d, k)


@dataclass(frozen=True)
class CounterexampleReport:
    k: int
    d: int
    size: int
    size_prime: int
    size_doubleprime: int
    lhs: float
    rhs: float

    @property
    def violates(self) -> bool:
        return self.lhs > self.rhs + TOL

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "d": self.d,
            "size": self.size,
            "size_prime": self.size_prime,
            "size_doubleprime": self.size_doubleprime,
            "lhs": self.lhs,
            "rhs": self.rhs,
            "violates": self.violates,
        }


def counterexample_report(k: int = 4, d: int = 3) -> CounterexampleReport:
    cs = counterexample_set(k, d)
    lhs, rhs = collapse_sides(cs)
    return CounterexampleReport(
        k, d, len(cs), len(restrict_prime(cs)), len(collapse_doubleprime(cs)), lhs, rhs
    )


def complement_pair(k: int, d: int) -> tuple[ConfusionGraph, ConfusionGraph]:
    """Clique-minus-clique graph and its complement."""
    g1 = clique_minus_clique(k, d)
    return g1, complement(g1)
