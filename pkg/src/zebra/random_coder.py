"""Random family codes over a single type class.

Every codeword has the same letter composition. Each user splits the
observation strings it can receive into ``m_i`` random families, one per
message, and decodes by looking up the family of what it observed. A split
is usable when every message tuple has a codeword whose observations land
in the right family for every user; splits are redrawn until one is.
"""
from __future__ import annotations

import itertools
import math
from collections import Counter
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .errors import RetriesExhausted, SizeLimitExceeded, UnknownObservation
from .graph import CliquePartition, Word
from .oracle import MAX_TYPE_CLASS, TypeClass

MAX_TUPLES = 10**4

Observation = tuple[int, ...]


@dataclass(frozen=True)
class FamilyPartition:
    """Disjoint families covering one user's observation strings.

    ``families[j]`` carries message ``j + 1``; families may be empty.
    """

    user: int
    families: tuple[frozenset, ...]

    @property
    def m(self) -> int:
        return len(self.families)

    def family_of(self) -> dict[Observation, int]:
        return {y: j + 1 for j, fam in enumerate(self.families) for y in fam}

    def to_dict(self) -> dict:
        return {
            "user": self.user,
            "families": {
                ",".join(map(str, y)): j for y, j in sorted(self.family_of().items())
            },
        }


@dataclass(frozen=True)
class Validation:
    valid: bool
    counterexample: Optional[tuple[int, ...]]
    witnesses: dict

    def __bool__(self) -> bool:
        return self.valid


@dataclass(frozen=True)
class RandomCode:
    families: tuple[FamilyPartition, ...]
    composition: tuple[int, ...]
    witnesses: dict
    attempts: int
    seed: Optional[int]

    def encode(self, message: Sequence[int]) -> Word:
        return self.witnesses[tuple(message)]

    def to_dict(self, zero_based: bool = False) -> dict:
        off = 1 if zero_based else 0
        return {
            "composition": list(self.composition),
            "counts": [fp.m for fp in self.families],
            "attempts": self.attempts,
            "seed": self.seed,
            "families": [fp.to_dict() for fp in self.families],
            "encoder": {
                ",".join(map(str, t)): [x - off for x in w]
                for t, w in sorted(self.witnesses.items())
            },
        }


def _joint_images(partitions: Sequence[CliquePartition], composition) -> dict:
    """Joint observation tuple -> first (lexicographic) word producing it."""
    tc = TypeClass(tuple(composition))
    if tc.k != partitions[0].graph.k:
        raise ValueError("composition length must equal the alphabet size")
    if tc.size > MAX_TYPE_CLASS:
        raise SizeLimitExceeded(f"type class has {tc.size} words > {MAX_TYPE_CLASS}")
    images: dict = {}
    for w in tc.words():
        key = tuple(cp.observe(w) for cp in partitions)
        images.setdefault(key, w)
    return images


def user_images(partitions: Sequence[CliquePartition], composition) -> list[list[Observation]]:
    """Sorted observation strings each user can receive from the type class."""
    joint = _joint_images(partitions, composition)
    return [sorted({key[i] for key in joint}) for i in range(len(partitions))]


def _served(joint: dict, fps: Sequence[FamilyPartition]) -> dict:
    lookups = [fp.family_of() for fp in fps]
    served: dict = {}
    for key, w in joint.items():
        t = tuple(lk[y] for lk, y in zip(lookups, key))
        served.setdefault(t, w)
    return served


def validate_scheme(
    partitions: Sequence[CliquePartition],
    composition: Sequence[int],
    fps: Sequence[FamilyPartition],
) -> Validation:
    """Check every message tuple is served; report the first one that is not."""
    joint = _joint_images(partitions, composition)
    served = _served(joint, fps)
    counts = [fp.m for fp in fps]
    for t in itertools.product(*(range(1, m + 1) for m in counts)):
        if t not in served:
            return Validation(False, t, {})
    return Validation(True, None, {t: served[t] for t in sorted(served)})


def decode(fps: Sequence[FamilyPartition], user: int, observation: Sequence[int]) -> int:
    """Message index (1-based) for ``user`` (1-based) given what it observed."""
    y = tuple(observation)
    for j, fam in enumerate(fps[user - 1].families):
        if y in fam:
            return j + 1
    raise UnknownObservation(f"user {user} has no family containing {y}")


def random_families(images: Sequence[Observation], m: int, user: int, rng) -> FamilyPartition:
    labels = rng.integers(0, m, size=len(images))
    fams = [set() for _ in range(m)]
    for y, j in zip(images, labels):
        fams[j].add(y)
    return FamilyPartition(user, tuple(frozenset(f) for f in fams))


def build_scheme(
    partitions: Sequence[CliquePartition],
    composition: Sequence[int],
    counts: Sequence[int],
    seed: Optional[int] = None,
    max_retries: int = 50,
) -> RandomCode:
    """Draw uniform family splits until one serves every message tuple."""
    if len(counts) != len(partitions):
        raise ValueError("one message count per user required")
    if any(m < 1 for m in counts):
        raise ValueError("message counts must be positive")
    if math.prod(counts) > MAX_TUPLES:
        raise SizeLimitExceeded(f"{math.prod(counts)} message tuples > {MAX_TUPLES}")
    joint = _joint_images(partitions, composition)
    images = [sorted({key[i] for key in joint}) for i in range(len(partitions))]
    for i, (m, im) in enumerate(zip(counts, images)):
        if m > len(im):
            raise RetriesExhausted(
                f"user {i + 1} needs {m} messages but sees only {len(im)} strings", 0
            )
    rng = np.random.default_rng(seed)
    tuples = list(itertools.product(*(range(1, m + 1) for m in counts)))
    failures: Counter = Counter()
    for attempt in range(1, max_retries + 1):
        fps = tuple(
            random_families(im, m, i + 1, rng) for i, (m, im) in enumerate(zip(counts, images))
        )
        served = _served(joint, fps)
        missing = [t for t in tuples if t not in served]
        if not missing:
            return RandomCode(fps, tuple(composition), {t: served[t] for t in tuples}, attempt, seed)
        failures.update(missing)
    raise RetriesExhausted(
        f"no valid family split in {max_retries} attempts", max_retries, dict(failures)
    )
