"""Independence numbers and Shannon-capacity bounds for small graphs."""
from __future__ import annotations

import os
from dataclasses import dataclass
from typing import Optional

from .errors import BudgetExceeded, SizeLimitExceeded
from .graph import ConfusionGraph, clique_partition, is_clique_union, strong_power

MAX_VERTICES = 64
MAX_POWER_VERTICES = 4096
MAX_NODES = 1 << 26


def _default_nodes() -> int:
    env = os.environ.get("BR_BUDGET")
    return int(env) if env else MAX_NODES


class _CliqueSearch:
    """Maximum clique by branch and bound with greedy-colouring bounds.

    Operates on bitsets over vertices ``0..n-1`` relabelled by degree.
    """

    def __init__(self, adj: list[int], max_nodes: int):
        self.adj = adj
        self.max_nodes = max_nodes
        self.nodes = 0
        self.best = 0

    def _colour_order(self, cand: int, kmin: int) -> tuple[list[int], list[int]]:
        # vertices coloured <= kmin can never improve the incumbent; skip them
        order, colours = [], []
        colour = 0
        uncoloured = cand
        adj = self.adj
        while uncoloured:
            colour += 1
            avail = uncoloured
            keep = colour > kmin
            while avail:
                low = avail & -avail
                uncoloured ^= low
                v = low.bit_length() - 1
                avail &= ~low & ~adj[v]
                if keep:
                    order.append(v)
                    colours.append(colour)
        return order, colours

    def expand(self, size: int, cand: int) -> None:
        self.nodes += 1
        if self.nodes > self.max_nodes:
            raise BudgetExceeded(f"independence search exceeded {self.max_nodes} nodes", self.nodes)
        order, colours = self._colour_order(cand, self.best - size)
        for v, c in zip(reversed(order), reversed(colours)):
            if size + c <= self.best:
                return
            sub = cand & self.adj[v]
            if sub:
                self.expand(size + 1, sub)
            elif size + 1 > self.best:
                self.best = size + 1
            cand &= ~(1 << v)


def independence_number(
    g: ConfusionGraph,
    max_vertices: int = MAX_VERTICES,
    max_nodes: Optional[int] = None,
) -> int:
    """Exact size of a largest set of pairwise distinguishable letters."""
    if g.k > max_vertices:
        raise SizeLimitExceeded(f"{g.k} letters exceeds limit {max_vertices}")
    if max_nodes is None:
        max_nodes = _default_nodes()
    full = (1 << g.k) - 1
    # clique search on the complement; vertices ordered by degree there, descending
    comp = [full & ~g.closed_adjacency[a] for a in range(g.k)]
    order = sorted(range(g.k), key=lambda a: (-bin(comp[a]).count("1"), a))
    pos = {a: i for i, a in enumerate(order)}
    adj = []
    for a in order:
        m = 0
        for b in range(g.k):
            if comp[a] >> b & 1:
                m |= 1 << pos[b]
        adj.append(m)
    search = _CliqueSearch(adj, max_nodes)
    search.expand(0, full)
    return search.best


def independent_set_check(g: ConfusionGraph, letters) -> bool:
    letters = list(letters)
    return all(
        not g.confusable_letters(a, b)
        for i, a in enumerate(letters)
        for b in letters[i + 1 :]
    )


# -- exact capacities ------------------------------------------------------------


def _clique_minus_clique_d(g: ConfusionGraph) -> Optional[int]:
    """``d`` when ``g`` is isomorphic to a clique-minus-clique graph."""
    rest = [a for a in g.letters if g.degree(a) != g.k - 1]
    if len(rest) < 2:
        return None
    if not independent_set_check(g, rest):
        return None
    return len(rest)


def known_capacity(g: ConfusionGraph) -> tuple[Optional[int], Optional[str]]:
    """Shannon capacity for structurally recognised perfect families.

    Returns ``(value, family)`` or ``(None, None)``.
    """
    if g.k <= 3:
        return independence_number(g), "three-letter"
    d = _clique_minus_clique_d(g)
    if d is not None:
        return d, "clique-minus-clique"
    if is_clique_union(g):
        part = clique_partition(g)
        nontrivial = [c for c in part.classes if len(c) > 1]
        if len(nontrivial) == 1:
            return part.ell, "complement-of-clique-minus-clique"
        return part.ell, "clique-union"
    return None, None


@dataclass(frozen=True)
class CapacityBound:
    graph: ConfusionGraph
    power: int
    alpha_n: int
    lower_bound: float
    exact: bool = False
    capacity: Optional[int] = None
    family: Optional[str] = None

    def to_dict(self) -> dict:
        return {
            "k": self.graph.k,
            "power": self.power,
            "alpha_n": self.alpha_n,
            "lower_bound": self.lower_bound,
            "exact": self.exact,
            "capacity": self.capacity,
            "family": self.family,
        }


def capacity_lower_bound(
    g: ConfusionGraph,
    n: int = 1,
    max_vertices: int = MAX_POWER_VERTICES,
    max_nodes: Optional[int] = None,
) -> CapacityBound:
    """``alpha(g^n)^(1/n)``, plus the exact capacity when recognisable."""
    if n < 1:
        raise ValueError("power must be >= 1")
    if g.k**n > max_vertices:
        raise SizeLimitExceeded(f"strong power has {g.k ** n} vertices > {max_vertices}")
    power = strong_power(g, n)
    alpha = independence_number(power, max_vertices=max_vertices, max_nodes=max_nodes)
    value, family = known_capacity(g)
    return CapacityBound(
        graph=g,
        power=n,
        alpha_n=alpha,
        lower_bound=alpha ** (1.0 / n),
        exact=value is not None,
        capacity=value,
        family=family,
    )
