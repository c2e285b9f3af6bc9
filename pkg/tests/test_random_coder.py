import itertools

import numpy as np
import pytest

from zebra.errors import RetriesExhausted, SizeLimitExceeded, UnknownObservation
from zebra.graph import clique_partition, symmetric_dense_graphs
from zebra.random_coder import (
    FamilyPartition,
    build_scheme,
    decode,
    random_families,
    user_images,
    validate_scheme,
)

from conftest import CROSSED


@pytest.fixture
def dense_parts():
    return [clique_partition(g) for g in symmetric_dense_graphs(3)]


@pytest.fixture
def crossed_parts():
    return [clique_partition(g) for g in CROSSED]


def round_trip(code, parts):
    for t, w in code.witnesses.items():
        for i, cp in enumerate(parts):
            assert decode(code.families, i + 1, cp.observe(w)) == t[i]


def test_dense_instance_builds(dense_parts):
    code = build_scheme(dense_parts, (3, 3, 3), (2, 2, 2), seed=0)
    assert code.attempts <= 50
    assert len(code.witnesses) == 8
    assert validate_scheme(dense_parts, (3, 3, 3), code.families).valid
    round_trip(code, dense_parts)
    # every codeword lies in the requested type class
    assert all(sorted(w) == [1, 1, 1, 2, 2, 2, 3, 3, 3] for w in code.witnesses.values())


def test_families_partition_the_image(dense_parts):
    code = build_scheme(dense_parts, (3, 3, 3), (2, 2, 2), seed=5)
    for fp, image in zip(code.families, user_images(dense_parts, (3, 3, 3))):
        union = set().union(*fp.families)
        assert union == set(image)
        assert sum(len(f) for f in fp.families) == len(image)


def test_same_seed_same_scheme(dense_parts):
    a = build_scheme(dense_parts, (3, 3, 3), (2, 2, 2), seed=11)
    b = build_scheme(dense_parts, (3, 3, 3), (2, 2, 2), seed=11)
    assert a.to_dict() == b.to_dict()


def test_all_ones_trivial(crossed_parts):
    code = build_scheme(crossed_parts, (1, 1, 1), (1, 1), seed=0)
    assert code.attempts == 1 and list(code.witnesses) == [(1, 1)]
    images = user_images(crossed_parts, (1, 1, 1))
    fps = [FamilyPartition(i + 1, (frozenset(im),)) for i, im in enumerate(images)]
    assert validate_scheme(crossed_parts, (1, 1, 1), fps).valid


def test_pinned_observation_breaks_validation(crossed_parts):
    # user 1 tells every word of this class apart, so a family holding one
    # observation pins the codeword and with it user 2's message
    comp = (0, 1, 2)
    img1, img2 = user_images(crossed_parts, comp)
    fam1 = (frozenset(img1[:1]), frozenset(img1[1:]))
    fam2 = (frozenset(img2[:1]), frozenset(img2[1:]))
    res = validate_scheme(
        crossed_parts, comp, [FamilyPartition(1, fam1), FamilyPartition(2, fam2)]
    )
    assert not res.valid
    assert res.counterexample[0] == 1


def test_pigeonhole_failure(dense_parts):
    with pytest.raises(RetriesExhausted) as info:
        build_scheme(dense_parts, (3, 0, 0), (2, 1, 1), seed=0)
    assert info.value.attempts == 0


def test_retries_exhausted_reports_failures(crossed_parts):
    # rate far above the region: every draw leaves some tuple unserved
    with pytest.raises(RetriesExhausted) as info:
        build_scheme(crossed_parts, (1, 1, 1), (3, 3), seed=1, max_retries=5)
    assert info.value.attempts == 5
    assert info.value.failures and all(v >= 1 for v in info.value.failures.values())


def test_decode_unknown_observation(dense_parts):
    code = build_scheme(dense_parts, (3, 3, 3), (2, 2, 2), seed=0)
    with pytest.raises(UnknownObservation):
        decode(code.families, 1, (9, 9, 9))


def test_decode_lookup():
    fp = FamilyPartition(1, (frozenset({(1,)}), frozenset(), frozenset({(2,), (3,)})))
    assert decode([fp], 1, (3,)) == 3
    assert fp.family_of()[(1,)] == 1


def test_random_families_cover():
    rng = np.random.default_rng(0)
    images = [(a, b) for a, b in itertools.product((1, 2), repeat=2)]
    fp = random_families(images, 3, 1, rng)
    assert fp.m == 3
    assert sorted(y for f in fp.families for y in f) == images


@pytest.mark.parametrize("seed", range(5))
def test_inside_region_succeeds(crossed_parts, seed):
    # rates 1/6 each are far inside the two-user region at composition (2,2,2)
    code = build_scheme(crossed_parts, (2, 2, 2), (2, 2), seed=seed)
    round_trip(code, crossed_parts)


def test_size_limits(crossed_parts):
    with pytest.raises(SizeLimitExceeded):
        build_scheme(crossed_parts, (1, 1, 1), (200, 200), seed=0)
    with pytest.raises(ValueError):
        build_scheme(crossed_parts, (1, 1, 1), (2,), seed=0)
