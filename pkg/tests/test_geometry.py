import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pdpc.geometry import (BoundingBox, DpcParams, PointSet, PriorityKey, UsageError,
                           dist, farthest_corner, priority_gt, priority_order,
                           priority_ranks, sqdist)


def test_dist_examples():
    assert dist((0, 0), (3, 4)) == 5.0
    assert dist((1, 1), (1, 1)) == 0.0
    assert dist((0, 0), (1, 1)) == pytest.approx(math.sqrt(2), abs=0, rel=1e-15)


def test_dist_dimension_mismatch():
    with pytest.raises(UsageError):
        dist((0, 0), (0, 0, 0))


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=6), st.data())
def test_dist_symmetric(a, data):
    b = data.draw(st.lists(st.floats(-1e6, 1e6), min_size=len(a), max_size=len(a)))
    assert dist(a, b) == dist(b, a)
    assert dist(a, a) == 0.0


def test_priority_gt_examples():
    assert priority_gt(PriorityKey(3, 2), PriorityKey(2, 1))
    assert priority_gt(PriorityKey(2, 1), PriorityKey(2, 5))
    assert not priority_gt(PriorityKey(2, 5), PriorityKey(2, 5))
    assert PriorityKey(2, 1) > PriorityKey.lowest()


@given(st.lists(st.integers(0, 5), min_size=1, max_size=60))
def test_priority_is_strict_total_order(rhos):
    keys = [PriorityKey(r, i + 1) for i, r in enumerate(rhos)]
    for a, b in itertools.product(keys, repeat=2):
        if a is b:
            assert not priority_gt(a, b)
        else:
            assert priority_gt(a, b) != priority_gt(b, a)
    for a, b, c in itertools.product(keys[:12], repeat=3):
        if priority_gt(a, b) and priority_gt(b, c):
            assert priority_gt(a, c)


@given(st.lists(st.integers(0, 5), min_size=1, max_size=200))
def test_priority_order_matches_keys(rhos):
    order = priority_order(np.array(rhos))
    keys = [PriorityKey(rhos[i], i + 1) for i in order]
    assert all(priority_gt(a, b) for a, b in zip(keys, keys[1:]))
    rank = priority_ranks(np.array(rhos))
    assert (rank[order] == np.arange(len(rhos))).all()


def test_farthest_corner_examples():
    box = BoundingBox((-1, -1), (1, 1))
    assert farthest_corner(box, (0, 0)).tolist() == [-1, -1]
    assert farthest_corner(BoundingBox((0, 0), (2, 2)), (0.5, 0.5)).tolist() == [2, 2]
    assert farthest_corner(BoundingBox((0, 0), (2, 4)), (1.5, 1)).tolist() == [0, 4]


@given(st.integers(1, 10), st.integers(0, 2**32 - 1))
def test_farthest_corner_is_farthest(d, seed):
    rng = np.random.default_rng(seed)
    a, b = rng.normal(size=(2, d))
    box = BoundingBox(np.minimum(a, b), np.maximum(a, b))
    c = rng.normal(size=d) * 2
    far = sqdist(c, farthest_corner(box, c))
    assert all(far >= sqdist(c, k) for k in box.corners())


def test_box_contains_closed():
    box = BoundingBox((0, 0), (1, 2))
    assert box.contains((0, 2)) and box.contains((1, 0))
    assert not box.contains((1.0000001, 0))
    with pytest.raises(UsageError):
        BoundingBox((1, 0), (0, 0))


def test_pointset_validation():
    ps = PointSet([[1, 2], [3, 4]])
    assert (ps.n, ps.d) == (2, 2)
    assert ps.point(2).tolist() == [3, 4]
    assert not ps.coords.flags.writeable
    for bad in ([], [[np.nan, 1]], [[np.inf, 0]], np.zeros((2, 0))):
        with pytest.raises(UsageError):
            PointSet(bad)


def test_params_validation():
    DpcParams(1, 0, 5)
    for args in ((0, 0, 1), (1, -1, 1), (1, 0, 0), (math.inf, 0, 1), (1, math.nan, 1)):
        with pytest.raises(UsageError):
            DpcParams(*args)
