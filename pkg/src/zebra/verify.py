"""Seeded randomized suites for the closed-word-set inequalities and the
type-counting sandwich, shared by the CLI and the test suite."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from . import closed_form as cf
from .graph import clique_partition
from .oracle import compositions, type_count_bounds, type_count_check

MAX_SEED_WORDS = 4


@dataclass
class SuiteResult:
    name: str
    trials: int
    violations: int = 0
    skipped: int = 0
    first_violation: Optional[dict] = None
    notes: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.violations == 0

    def record(self, ok: bool, case: Callable[[], dict]) -> None:
        if not ok:
            self.violations += 1
            if self.first_violation is None:
                self.first_violation = case()

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "trials": self.trials,
            "violations": self.violations,
            "passed": self.passed,
        }
        if self.skipped:
            out["skipped"] = self.skipped
        if self.first_violation is not None:
            out["first_violation"] = self.first_violation
        out.update(self.notes)
        return out


def random_power_sum_input(rng) -> tuple[int, int, list[float]]:
    a = int(rng.integers(2, 11))
    b = int(rng.integers(2, a + 1))
    kind = rng.integers(0, 3)
    if kind == 0:
        xs = rng.exponential(size=b) * 10 ** rng.uniform(-3, 3)
    elif kind == 1:
        xs = rng.integers(0, 6, size=b).astype(float)
    else:
        xs = np.full(b, rng.uniform(0.1, 5.0))
        xs[rng.integers(0, b) :] *= rng.uniform(0, 1)
    return a, b, sorted((float(x) for x in xs), reverse=True)


def random_closed_set(rng, k: int, d: int, n: int) -> cf.ClosedWordSet:
    count = int(rng.integers(1, MAX_SEED_WORDS + 1))
    if rng.random() < 0.25:
        # seeds confined to the small letters keep the restriction nonempty
        seeds = rng.integers(1, d + 1, size=(count, n))
    else:
        seeds = rng.integers(1, k + 1, size=(count, n))
    return cf.close_set([tuple(int(x) for x in w) for w in seeds], d, k)


def power_sum_suite(trials: int, rng) -> SuiteResult:
    res = SuiteResult("power-sum", trials)
    for _ in range(trials):
        a, b, xs = random_power_sum_input(rng)
        res.record(cf.power_sum_check(a, b, xs), lambda: {"a": a, "b": b, "xs": xs})
    return res


def restriction_suite(trials: int, rng, max_k: int = 5, max_n: int = 4) -> SuiteResult:
    res = SuiteResult("restriction", trials)
    for _ in range(trials):
        k = int(rng.integers(2, max_k + 1))
        d = int(rng.integers(2, k + 1))
        n = int(rng.integers(1, max_n + 1))
        cs = random_closed_set(rng, k, d, n)
        res.record(cf.restriction_check(cs), lambda: {"k": k, "d": d, "words": sorted(cs.words)})
    return res


def collapse_suite(trials: int, rng, max_k: int = 5, max_n: int = 4) -> SuiteResult:
    res = SuiteResult("collapse", trials)
    for _ in range(trials):
        k = int(rng.integers(3, max_k + 1))
        d = int(rng.integers(2, (k + 1) // 2 + 1))
        n = int(rng.integers(1, max_n + 1))
        cs = random_closed_set(rng, k, d, n)
        res.record(cf.collapse_check(cs), lambda: {"k": k, "d": d, "words": sorted(cs.words)})
    return res


def type_count_suite(max_n: int = 6) -> SuiteResult:
    """Exhaustive over compositions with ``n <= max_n`` on the crossed-edges
    three-letter pair, for every nonempty user subset."""
    parts = [clique_partition(g) for g in cf.CROSSED_EDGES]
    subsets = [(1,), (2,), (1, 2)]
    cases = [
        (comp, s) for n in range(1, max_n + 1) for comp in compositions(n, 3) for s in subsets
    ]
    res = SuiteResult("type-count", len(cases))
    for comp, s in cases:
        res.record(
            type_count_check(parts, comp, s),
            lambda: {"composition": comp, "subset": s, "bounds": type_count_bounds(parts, comp, s)},
        )
    return res


def counterexample_reproduction() -> dict:
    small = cf.counterexample_report(4, 3)
    large = cf.counterexample_report(100, 51)
    ok = (
        (small.size, small.size_prime, small.size_doubleprime) == (7, 5, 3)
        and small.violates
        and (large.size_prime, large.size_doubleprime) == (101, 99)
        and large.violates
    )
    return {
        "name": "collapse-large-d",
        "status": "expected-counterexample" if ok else "not-reproduced",
        "passed": ok,
        "small": small.to_dict(),
        "large": large.to_dict(),
    }


def run_all(trials: int = 1000, seed: int = 0, type_count_n: int = 6) -> dict:
    rng = np.random.default_rng(seed)
    suites = [
        type_count_suite(type_count_n),
        power_sum_suite(trials, rng),
        restriction_suite(trials, rng),
        collapse_suite(trials, rng),
    ]
    counter = counterexample_reproduction()
    return {
        "seed": seed,
        "suites": [s.to_dict() for s in suites],
        "counterexample": counter,
        "passed": all(s.passed for s in suites) and counter["passed"],
    }

