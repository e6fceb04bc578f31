"""Interval-union container against brute-force set arithmetic."""

import math

import numpy as np
import pytest

from cfx import EmptySet, FiberSet, fatten, hausdorff_distance, one_sided_gap
from cfx.errors import BadInput
from cfx.fibers import intersection_length, merge_pairs

from oracles import (
    brute_hausdorff,
    brute_intersection_length,
    brute_merge,
    brute_point_dist,
)


def random_pairs(rng, n, span=10.0):
    los = rng.uniform(-span, span, n)
    lens = rng.uniform(0.0, 2.0, n)
    return list(zip(los, los + lens))


def test_merge_matches_brute_force():
    rng = np.random.default_rng(101)
    for _ in range(200):
        pairs = random_pairs(rng, int(rng.integers(1, 12)))
        eps = float(rng.choice([0.0, 0.01, 0.5]))
        got = merge_pairs(pairs, eps)
        want = brute_merge(pairs, eps)
        assert len(got) == len(want)
        for (glo, ghi), (wlo, whi) in zip(got, want):
            assert glo == pytest.approx(wlo, abs=1e-12)
            assert ghi == pytest.approx(whi, abs=1e-12)


def test_merge_output_is_sorted_and_gapped():
    rng = np.random.default_rng(55)
    for _ in range(100):
        eps = float(rng.uniform(0.0, 0.3))
        out = merge_pairs(random_pairs(rng, 10), eps)
        for (alo, ahi), (blo, bhi) in zip(out, out[1:]):
            assert alo <= ahi and blo <= bhi
            assert blo - ahi > eps


def test_merge_rejects_bad_intervals():
    with pytest.raises(BadInput):
        merge_pairs([(1.0, 0.0)])
    with pytest.raises(BadInput):
        merge_pairs([(0.0, math.inf)])
    with pytest.raises(BadInput):
        merge_pairs([(0.0, 1.0)], eps=-1.0)


def test_length_and_hull():
    f = FiberSet([(0.0, 1.0), (2.0, 2.5)])
    assert f.length == pytest.approx(1.5)
    assert f.hull == (0.0, 2.5)
    assert len(f) == 2
    assert not f.is_empty
    assert FiberSet().is_empty
    with pytest.raises(EmptySet):
        FiberSet().hull


def test_point_distance_matches_brute_force():
    rng = np.random.default_rng(7)
    for _ in range(100):
        pairs = merge_pairs(random_pairs(rng, 6))
        f = FiberSet(pairs)
        for y in rng.uniform(-12, 12, 20):
            assert f.distance_to(y) == pytest.approx(
                brute_point_dist(y, pairs), abs=1e-12
            )
    with pytest.raises(EmptySet):
        FiberSet().distance_to(0.0)


def test_contains_tolerance():
    f = FiberSet([(0.0, 1.0)])
    assert f.contains(1.0)
    assert not f.contains(1.0 + 1e-9)
    assert f.contains(1.0 + 1e-9, tol=1e-8)


def test_map_affine_reverses_orientation():
    f = FiberSet([(0.0, 1.0), (2.0, 3.0)])
    g = f.map_affine(-2.0, 1.0)
    assert g.intervals == ((-5.0, -3.0), (-1.0, 1.0))
    assert f.map_affine(0.5, 4.0).intervals == ((4.0, 4.5), (5.0, 5.5))


def test_fatten_closes_small_gaps():
    f = FiberSet([(0.0, 1.0), (1.1, 2.0)])
    assert len(fatten(f, 0.04)) == 2
    assert len(fatten(f, 0.05)) == 1
    assert fatten(f, 0.05).hull == (-0.05, 2.05)
    with pytest.raises(BadInput):
        fatten(f, -0.1)
    assert fatten(FiberSet(), 0.1).is_empty


def test_hausdorff_matches_brute_force():
    rng = np.random.default_rng(17)
    for _ in range(300):
        a = merge_pairs(random_pairs(rng, int(rng.integers(1, 8))))
        b = merge_pairs(random_pairs(rng, int(rng.integers(1, 8))))
        got = hausdorff_distance(FiberSet(a), FiberSet(b))
        assert got == pytest.approx(brute_hausdorff(a, b), abs=1e-12)


def test_hausdorff_of_fattened_set_is_eps():
    rng = np.random.default_rng(23)
    for _ in range(50):
        pairs = merge_pairs(random_pairs(rng, 5))
        f = FiberSet(pairs)
        eps = float(rng.uniform(0.01, 0.2))
        assert hausdorff_distance(f, fatten(f, eps)) == pytest.approx(eps, abs=1e-12)


def test_one_sided_gap_edge_cases():
    a = FiberSet([(0.0, 1.0)])
    assert one_sided_gap(FiberSet(), a) == 0.0
    with pytest.raises(EmptySet):
        one_sided_gap(a, FiberSet())
    with pytest.raises(EmptySet):
        hausdorff_distance(a, FiberSet())
    # the sup can sit strictly inside a: a gap midpoint of b
    a2 = FiberSet([(0.0, 4.0)])
    b2 = FiberSet([(0.0, 1.0), (3.0, 4.0)])
    assert one_sided_gap(a2, b2) == pytest.approx(1.0)


def test_intersection_length_matches_brute_force():
    rng = np.random.default_rng(29)
    for _ in range(200):
        a = merge_pairs(random_pairs(rng, 6))
        b = merge_pairs(random_pairs(rng, 6))
        got = intersection_length(FiberSet(a), FiberSet(b))
        assert got == pytest.approx(brute_intersection_length(a, b), abs=1e-12)


def test_union_with_eps():
    a = FiberSet([(0.0, 1.0)])
    b = FiberSet([(1.05, 2.0)])
    assert len(a.union(b)) == 2
    assert len(a.union(b, eps=0.1)) == 1
