"""Rate regions for receivers whose confusion graphs are unions of cliques.

For a letter distribution ``p`` and a set ``I`` of users, ``H_p(I)`` is the
entropy of what the users in ``I`` jointly observe. A rate vector is
achievable iff some ``p`` satisfies ``sum(R_i for i in I) <= H_p(I)`` for
every non-empty ``I``. Everything here is in bits.

The search over ``p`` maximises the smallest constraint slack. The slack of
each constraint is concave in ``p``, so the pointwise minimum is concave and a
polished grid seed usually lands on the global optimum; several seeds are
still polished and the best one kept.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional, Sequence

import numpy as np
from scipy.optimize import minimize

from .errors import DimensionMismatch, LimitExceeded
from .graph import CliquePartition

FIXED_P_TOL = 1e-9
SEARCH_TOL = 1e-7
GRID_STEP = 1 / 32
MAX_GRID_POINTS = 20000
MAX_RESTARTS = 200
MAX_USERS = 6
MAX_LETTERS = 8

_INV_LN2 = 1.0 / math.log(2.0)


def check_distribution(p: Sequence[float], k: Optional[int] = None) -> np.ndarray:
    arr = np.asarray(p, dtype=float)
    if arr.ndim != 1:
        raise DimensionMismatch("distribution must be a vector")
    if k is not None and arr.size != k:
        raise DimensionMismatch(f"distribution has {arr.size} entries, alphabet has {k}")
    if np.any(arr < 0) or abs(arr.sum() - 1.0) > 1e-12:
        raise ValueError("distribution must be nonnegative and sum to 1")
    return arr


def entropy_bits(q: Sequence[float]) -> float:
    q = np.asarray(q, dtype=float)
    q = q[q > 0]
    return float(-(q * np.log2(q)).sum())


@dataclass(frozen=True)
class JointPartition:
    """Common refinement of the clique partitions of a group of users."""

    subset: frozenset[int]
    cells: tuple[tuple[int, ...], ...]

    @property
    def s(self) -> int:
        return len(self.cells)

    @property
    def k(self) -> int:
        return sum(len(c) for c in self.cells)

    def matrix(self) -> np.ndarray:
        """``s x k`` 0/1 matrix, row ``j`` marks the letters of cell ``j``."""
        m = np.zeros((self.s, self.k))
        for j, cell in enumerate(self.cells):
            m[j, [a - 1 for a in cell]] = 1.0
        return m


def _check_partitions(partitions: Sequence[CliquePartition]) -> int:
    if not partitions:
        raise DimensionMismatch("need at least one user")
    k = partitions[0].graph.k
    if any(cp.graph.k != k for cp in partitions):
        raise DimensionMismatch("all partitions must share one alphabet")
    return k


def joint_partition(
    partitions: Sequence[CliquePartition], subset: Sequence[int]
) -> JointPartition:
    """Letters are grouped by the tuple of clique indices the users in
    ``subset`` (1-based) observe; cells are ordered by their smallest letter.
    """
    k = _check_partitions(partitions)
    users = sorted(set(subset))
    if not users or users[0] < 1 or users[-1] > len(partitions):
        raise DimensionMismatch(f"subset {users} is not a non-empty subset of users")
    groups: dict[tuple[int, ...], list[int]] = {}
    for a in range(1, k + 1):
        key = tuple(partitions[i - 1].class_of[a - 1] for i in users)
        groups.setdefault(key, []).append(a)
    cells = sorted((tuple(v) for v in groups.values()), key=lambda c: c[0])
    return JointPartition(frozenset(users), tuple(cells))


def subset_entropy(p: Sequence[float], jp: JointPartition) -> float:
    p = check_distribution(p, jp.k)
    return entropy_bits([p[[a - 1 for a in cell]].sum() for cell in jp.cells])


def feasible_at(
    p: Sequence[float],
    partitions: Sequence[CliquePartition],
    rates: Sequence[float],
    tol: float = FIXED_P_TOL,
) -> bool:
    region = entropy_region(tuple(partitions))
    rates = region.check_rates(rates)
    p = check_distribution(p, region.k)
    return bool(region.slacks(p[None, :], rates)[0].min() >= -tol)


def max_total_rate(partitions: Sequence[CliquePartition]) -> float:
    """``log2`` of the number of cells all users can jointly tell apart."""
    jp = joint_partition(partitions, range(1, len(partitions) + 1))
    return math.log2(jp.s)


def total_rate_witness(partitions: Sequence[CliquePartition]) -> np.ndarray:
    """Uniform distribution over the smallest letter of each joint cell."""
    jp = joint_partition(partitions, range(1, len(partitions) + 1))
    p = np.zeros(jp.k)
    for cell in jp.cells:
        p[cell[0] - 1] = 1.0 / jp.s
    return p


# -- numeric search ------------------------------------------------------------


def simplex_grid(k: int, step: float = GRID_STEP, max_points: int = MAX_GRID_POINTS) -> np.ndarray:
    """All distributions with entries in multiples of ``1/N``.

    ``N`` is ``round(1/step)``, lowered until the grid has at most
    ``max_points`` rows.
    """
    n = max(1, round(1 / step))
    while n > 1 and math.comb(n + k - 1, k - 1) > max_points:
        n -= 1
    bars = np.array(list(itertools.combinations(range(n + k - 1), k - 1)), dtype=int)
    if k == 1:
        return np.ones((1, 1))
    padded = np.hstack([np.full((len(bars), 1), -1), bars, np.full((len(bars), 1), n + k - 1)])
    counts = np.diff(padded, axis=1) - 1
    return counts / n


@dataclass(frozen=True)
class RegionCertificate:
    """Outcome of a membership search.

    ``feasible`` False means no witness was found at the search resolution;
    it is not a proof of infeasibility.
    """

    feasible: bool
    rates: tuple[float, ...]
    slack: float
    witness_p: Optional[tuple[float, ...]] = None
    violated_subset: Optional[tuple[int, ...]] = None
    restarts: int = 0
    exhaustive: bool = field(default=False)

    def to_dict(self) -> dict:
        return {
            "feasible": self.feasible,
            "rates": list(self.rates),
            "slack": self.slack,
            "witness_p": None if self.witness_p is None else list(self.witness_p),
            "violated_subset": None if self.violated_subset is None else list(self.violated_subset),
            "restarts": self.restarts,
            "proof": "witness" if self.feasible else "infeasible-at-resolution",
        }


class EntropyRegion:
    """Precomputed subset structure for a fixed list of clique partitions.

    Subsets are indexed by bitmask ``1..2^r-1``; bit ``i`` stands for user
    ``i+1``.
    """

    def __init__(
        self,
        partitions: Sequence[CliquePartition],
        grid_step: float = GRID_STEP,
        max_grid: int = MAX_GRID_POINTS,
    ):
        self.k = _check_partitions(partitions)
        self.partitions = tuple(partitions)
        self.r = len(partitions)
        self.masks = list(range(1, 1 << self.r))
        self.joint = [
            joint_partition(partitions, [i + 1 for i in range(self.r) if m >> i & 1])
            for m in self.masks
        ]
        self.member = np.array(
            [[1.0 if m >> i & 1 else 0.0 for i in range(self.r)] for m in self.masks]
        )
        blocks = [jp.matrix() for jp in self.joint]
        self._cells = np.vstack(blocks)
        sizes = [b.shape[0] for b in blocks]
        self._starts = np.concatenate([[0], np.cumsum(sizes)[:-1]]).astype(int)
        self.grid_step = grid_step
        self.max_grid = max_grid
        self._grid = None
        self._grid_h = None

    # entropies -----------------------------------------------------------

    def entropies(self, P: np.ndarray) -> np.ndarray:
        """``H_p(I)`` for each row of ``P`` (N x k) and each subset."""
        Q = np.atleast_2d(P) @ self._cells.T
        with np.errstate(divide="ignore", invalid="ignore"):
            terms = np.where(Q > 0, -Q * np.log2(np.where(Q > 0, Q, 1.0)), 0.0)
        return np.add.reduceat(terms, self._starts, axis=1)

    def entropy_grad(self, p: np.ndarray) -> np.ndarray:
        """Jacobian of the subset entropies, shape (subsets x k)."""
        q = np.clip(self._cells @ p, 1e-12, None)
        g = -(np.log2(q) + _INV_LN2)
        weighted = self._cells * g[:, None]
        return np.add.reduceat(weighted, self._starts, axis=0)

    def check_rates(self, rates: Sequence[float]) -> np.ndarray:
        rv = np.asarray(rates, dtype=float)
        if rv.shape != (self.r,):
            raise DimensionMismatch(f"expected {self.r} rates, got {rv.shape}")
        if np.any(rv < 0):
            raise ValueError("rates must be nonnegative")
        return rv

    def slacks(self, P: np.ndarray, rates: np.ndarray) -> np.ndarray:
        return self.entropies(P) - self.member @ rates

    @property
    def grid(self) -> np.ndarray:
        if self._grid is None:
            self._grid = simplex_grid(self.k, self.grid_step, self.max_grid)
            self._grid_h = self.entropies(self._grid)
        return self._grid

    @property
    def grid_entropies(self) -> np.ndarray:
        self.grid
        return self._grid_h

    # generic program -------------------------------------------------------
    #
    # maximise t subject to  H_I(p) - b_I - a_I * t >= 0  for every subset I
    # where a_I is 0 (hard constraint) or 1 (objective constraint)

    def _score(self, H: np.ndarray, b: np.ndarray, a: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        s = H - b
        soft = a > 0
        obj = s[:, soft].min(axis=1)
        hard = s[:, ~soft].min(axis=1) if np.any(~soft) else np.zeros(len(s))
        return obj, hard

    def _polish(self, p0: np.ndarray, b: np.ndarray, a: np.ndarray) -> np.ndarray:
        k = self.k
        obj0, _ = self._score(self.entropies(p0), b, a)

        def cons(z):
            return self.entropies(z[:k])[0] - b - a * z[k]

        def cons_jac(z):
            return np.hstack([self.entropy_grad(z[:k]), -a[:, None]])

        res = minimize(
            lambda z: -z[k],
            np.append(p0, obj0[0]),
            jac=lambda z: np.append(np.zeros(k), -1.0),
            method="SLSQP",
            bounds=[(0.0, 1.0)] * k + [(-2.0 * math.log2(k) - 1, math.log2(k) + 1)],
            constraints=[
                {"type": "ineq", "fun": cons, "jac": cons_jac},
                {"type": "eq", "fun": lambda z: z[:k].sum() - 1.0,
                 "jac": lambda z: np.append(np.ones(k), 0.0)},
            ],
            options={"maxiter": 200, "ftol": 1e-13},
        )
        p = np.clip(res.x[:k], 0.0, None)
        p /= p.sum()
        if not res.success:
            p = self._direct_search(p, b, a)
        return p

    def _direct_search(self, p0: np.ndarray, b: np.ndarray, a: np.ndarray) -> np.ndarray:
        """Nelder-Mead over a softmax parametrisation; fallback only."""

        def to_p(y):
            e = np.exp(y - y.max())
            return e / e.sum()

        def loss(y):
            obj, hard = self._score(self.entropies(to_p(y)), b, a)
            return -(obj[0] + 10.0 * min(hard[0], 0.0))

        y0 = np.log(np.clip(p0, 1e-9, None))
        res = minimize(loss, y0, method="Nelder-Mead",
                       options={"xatol": 1e-10, "fatol": 1e-12, "maxiter": 4000})
        return to_p(res.x)

    def solve(
        self,
        b: np.ndarray,
        a: np.ndarray,
        restarts: int = 8,
        stop_at: Optional[float] = None,
        hard_tol: float = FIXED_P_TOL,
    ) -> tuple[np.ndarray, float, float, int]:
        """Best ``(p, objective, hard slack, restarts used)`` over grid seeds.

        With ``stop_at`` set, returns as soon as a hard-feasible point reaches
        that objective.
        """
        restarts = max(1, min(int(restarts), MAX_RESTARTS))
        obj, hard = self._score(self.grid_entropies, b, a)
        feasible = hard >= -hard_tol
        # feasible seeds first by objective, then the least infeasible ones
        key = np.where(feasible, obj, -1e6 + hard)
        order = np.lexsort((np.arange(len(key)), -key))
        best_p = self.grid[order[0]]
        best_obj, best_hard = obj[order[0]], hard[order[0]]
        used = 0
        for idx in order[:restarts]:
            used += 1
            p = self._polish(self.grid[idx], b, a)
            o, h = self._score(self.entropies(p), b, a)
            o, h = float(o[0]), float(h[0])
            better = (h >= -hard_tol, o) > (best_hard >= -hard_tol, best_obj)
            if better:
                best_p, best_obj, best_hard = p, o, h
            if stop_at is not None and best_hard >= -hard_tol and best_obj >= stop_at:
                break
        return best_p, float(best_obj), float(best_hard), used

    # public queries -----------------------------------------------------------

    def membership(self, rates: Sequence[float], restarts: int = 8,
                   tol: float = SEARCH_TOL) -> RegionCertificate:
        rv = self.check_rates(rates)
        b = self.member @ rv
        a = np.ones(len(self.masks))
        p, slack, _, used = self.solve(b, a, restarts=restarts, stop_at=-tol)
        if slack >= -tol:
            return RegionCertificate(True, tuple(rv), slack, tuple(float(x) for x in p),
                                     restarts=used)
        s = self.slacks(p[None, :], rv)[0]
        worst = self.masks[int(np.argmin(s))]
        users = tuple(i + 1 for i in range(self.r) if worst >> i & 1)
        return RegionCertificate(False, tuple(rv), slack, None, users, restarts=used)

    def max_rate(self, user: int, others: Sequence[float], restarts: int = 4
                 ) -> tuple[Optional[float], Optional[np.ndarray]]:
        """Largest rate for ``user`` (1-based) with the other rates fixed.

        ``others`` lists all ``r`` rates; the entry for ``user`` is ignored.
        Returns ``(None, None)`` when the fixed rates are themselves
        unattainable at the search resolution.
        """
        rv = self.check_rates(others).copy()
        rv[user - 1] = 0.0
        b = self.member @ rv
        a = self.member[:, user - 1].copy()
        p, obj, hard, _ = self.solve(b, a, restarts=restarts)
        if hard < -SEARCH_TOL:
            return None, None
        return max(obj, 0.0), p


@lru_cache(maxsize=64)
def entropy_region(partitions: tuple[CliquePartition, ...]) -> EntropyRegion:
    return EntropyRegion(partitions)


def _guard(partitions: Sequence[CliquePartition], max_users: int, max_letters: int) -> None:
    k = _check_partitions(partitions)
    if len(partitions) > max_users or k > max_letters:
        raise LimitExceeded(
            f"{len(partitions)} users / {k} letters exceeds limits {max_users} / {max_letters}"
        )


def region_membership(
    partitions: Sequence[CliquePartition],
    rates: Sequence[float],
    restarts: int = 8,
    max_users: int = MAX_USERS,
    max_letters: int = MAX_LETTERS,
) -> RegionCertificate:
    _guard(partitions, max_users, max_letters)
    return entropy_region(tuple(partitions)).membership(rates, restarts=restarts)


def boundary_trace_2user(
    partitions: Sequence[CliquePartition],
    r1_grid: Sequence[float],
    restarts: int = 4,
) -> list[tuple[float, Optional[float]]]:
    """``(R1, max R2)`` pairs; ``max R2`` is None where R1 is unattainable."""
    if len(partitions) != 2:
        raise DimensionMismatch("boundary trace needs exactly two users")
    _guard(partitions, MAX_USERS, MAX_LETTERS)
    region = entropy_region(tuple(partitions))
    out = []
    for r1 in r1_grid:
        best, _ = region.max_rate(2, [float(r1), 0.0], restarts=restarts)
        out.append((float(r1), best))
    return out
