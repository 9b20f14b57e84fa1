#!/usr/bin/env python3
"""
Test script for the Graph Generators
Tests every family, seeded reproducibility and GenSpec dispatch
"""

import sys
import os

import numpy as np
import pytest

# Add the diffgeo module to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '.'))

from diffgeo.core.exceptions import (
    BadBoundaryCount, BadEpsilon, DuplicatePoints, InvalidInputError, SizeTooSmall, TooFewPoints,
    UnsupportedFamily
)
from diffgeo.core.generators import (
    GenSpec, GraphFamily, gen_complete, gen_complete_absorbing, gen_cycle, gen_cycle_plus_boundary,
    gen_knn_point_cloud, gen_path, gen_small_world_ring, gen_two_complete_bridge, generate,
    in_dumbbell, parse_family, sample_dumbbell
)
from diffgeo.core.generators.small_world_generator import SmallWorldRingGenerator
from diffgeo.core.graph import check_reachability


def test_path_and_cycle():
    """Unit-weight walks on intervals and rings"""
    print("〰️ Testing Path and Cycle...")
    print("-" * 40)

    path = gen_path(5)
    assert path.row(0)[0].tolist() == [1]
    assert np.allclose(path.row(0)[1], [1.0])
    assert path.row(2)[0].tolist() == [1, 3]
    assert np.allclose(path.row(2)[1], [0.5, 0.5])

    cycle = gen_cycle(6)
    assert cycle.nnz == 12
    assert cycle.row(0)[0].tolist() == [1, 5]
    print(f"✅ {path} / {cycle}")

    with pytest.raises(SizeTooSmall):
        gen_path(2)
    with pytest.raises(SizeTooSmall):
        gen_cycle(2)
    print()


def test_complete_families():
    """K_n with self-loops, its absorbing variant and the two-block bridge"""
    print("🔷 Testing Complete Families...")
    print("-" * 40)

    k4 = gen_complete(4)
    assert k4.nnz == 16
    assert np.allclose(k4.weights, 0.25)

    k4a = gen_complete_absorbing(4)
    assert k4a.absorbing == frozenset({3})
    assert k4a.nnz == 12
    assert np.allclose(k4a.weights, 0.25)

    bridge = gen_two_complete_bridge(3)
    assert bridge.n == 7
    cols, weights = bridge.row(0)
    assert cols.tolist() == [0, 1, 2, 6]
    assert np.allclose(weights, 0.25)
    cols, weights = bridge.row(6)
    assert cols.tolist() == [0, 1, 2, 3, 4, 5]
    assert np.allclose(weights, 1.0 / 6.0)
    assert check_reachability(bridge)
    print(f"✅ {bridge}")
    print()


def test_cycle_plus_boundary():
    g = gen_cycle_plus_boundary(8, 0.1)
    assert g.n == 9
    assert g.absorbing == frozenset({8})
    cols, weights = g.row(0)
    assert cols.tolist() == [1, 7, 8]
    assert np.allclose(weights, [0.45, 0.45, 0.1])

    for eps in (0.0, 1.0, -0.5):
        with pytest.raises(BadEpsilon):
            gen_cycle_plus_boundary(8, eps)


def test_small_world_ring():
    """Seeded chords and boundary choice"""
    print("🌐 Testing Small-World Ring...")
    print("-" * 40)

    a = gen_small_world_ring(64, 8, 32, seed=11)
    b = gen_small_world_ring(64, 8, 32, seed=11)
    assert a == b
    assert len(a.absorbing) == 8
    assert check_reachability(a)

    # ring edges always present
    for i in range(64):
        if i in a.absorbing:
            continue
        assert (i + 1) % 64 in a.row(i)[0]
        assert (i - 1) % 64 in a.row(i)[0]

    # interior rows are uniform over incident edges
    for i in a.interior:
        weights = a.row(i)[1]
        assert np.allclose(weights, 1.0 / len(weights))

    generator = SmallWorldRingGenerator()
    counts = [len(generator.sample_extra_edges(np.random.default_rng(s), 128, 64)) for s in range(200)]
    print(f"✅ Mean chord count over 200 seeds {np.mean(counts):.2f} (expected 64)")
    assert abs(np.mean(counts) - 64) <= 0.15 * 64
    assert abs(np.mean(counts) - 64) < 4

    no_chords = generator.sample_extra_edges(np.random.default_rng(0), 32, 0)
    assert no_chords.shape == (0, 2)

    with pytest.raises(BadBoundaryCount):
        gen_small_world_ring(16, 0, 4, seed=1)
    with pytest.raises(BadBoundaryCount):
        gen_small_world_ring(16, 16, 4, seed=1)
    with pytest.raises(SizeTooSmall):
        gen_small_world_ring(7, 2, 4, seed=1)
    with pytest.raises(InvalidInputError):
        gen_small_world_ring(16, 2, 10 ** 6, seed=1)
    print()


def test_knn_from_points():
    """Stable neighbour ranking and union symmetrization"""
    print("📍 Testing kNN Graphs...")
    print("-" * 40)

    points = np.column_stack([np.arange(5, dtype=float), np.zeros(5)])
    g = gen_knn_point_cloud(points, k=1)
    # ties between equidistant neighbours go to the lower id
    assert g.row(0)[0].tolist() == [1]
    assert g.row(1)[0].tolist() == [0, 2]
    assert g.row(2)[0].tolist() == [1, 3]
    assert g.row(4)[0].tolist() == [3]
    assert np.allclose(g.row(1)[1], [0.5, 0.5])

    with pytest.raises(DuplicatePoints):
        gen_knn_point_cloud([[0.0, 0.0], [0.0, 0.0], [1.0, 1.0]], k=1)
    with pytest.raises(TooFewPoints):
        gen_knn_point_cloud(points, k=5)
    print("✅ kNN construction verified")
    print()


def test_dumbbell_sampling():
    points = sample_dumbbell(500, seed=3)
    assert points.shape == (500, 2)
    assert in_dumbbell(points).all()
    assert np.array_equal(points, sample_dumbbell(500, seed=3))

    neck = points[(points[:, 0] > 1.0) & (points[:, 0] < 1.5)]
    assert np.all(np.abs(neck[:, 1] - 0.5) <= 0.1)

    assert not in_dumbbell(np.array([[1.25, 0.9], [3.0, 0.5]])).any()


def test_genspec_dispatch():
    """Family parsing, seed rules and parameter checks"""
    print("🗂️ Testing GenSpec Dispatch...")
    print("-" * 40)

    assert parse_family('cycle-plus-boundary') is GraphFamily.CYCLE_PLUS_BOUNDARY
    with pytest.raises(UnsupportedFamily):
        parse_family('hypercube')

    g = generate(GenSpec('cycle_plus_boundary', {'n': 8, 'eps': 0.1}))
    assert g == gen_cycle_plus_boundary(8, 0.1)

    sw = generate(GenSpec(GraphFamily.SMALL_WORLD_RING,
                          {'n': 32, 'n_boundary': 4, 'expected_extra_edges': 0}, seed=5))
    assert sw.nnz == 2 * 32 - 2 * len(sw.absorbing)

    knn = generate(GenSpec('knn_point_cloud', {'n_points': 80, 'k': 6}, seed=2))
    assert knn.n == 80

    with pytest.raises(InvalidInputError):
        GenSpec('small_world_ring', {'n': 32, 'n_boundary': 4, 'expected_extra_edges': 8})
    with pytest.raises(InvalidInputError):
        GenSpec('path', {'n': 10}, seed=1)
    with pytest.raises(InvalidInputError):
        GenSpec('path', {'n': -3})
    with pytest.raises(InvalidInputError):
        generate(GenSpec('path', {'n': 10, 'width': 2}))
    with pytest.raises(InvalidInputError):
        generate(GenSpec('cycle_plus_boundary', {'n': 10}))

    assert GenSpec('path', {'n': 10}).to_dict() == {'family': 'path', 'params': {'n': 10}, 'seed': None}
    print("✅ Dispatch and validation verified")
    print()


if __name__ == "__main__":
    print("🚀 DiffGeo - Generator Tests")
    print("=" * 60)

    try:
        test_path_and_cycle()
        test_complete_families()
        test_cycle_plus_boundary()
        test_small_world_ring()
        test_knn_from_points()
        test_dumbbell_sampling()
        test_genspec_dispatch()

        print("✅ All generator tests completed successfully!")
        print("\n🎯 Key features tested:")
        print("  • Deterministic families and their transition weights")
        print("  • Seeded small-world and point-cloud families")
        print("  • Parameter validation and family dispatch")

    except Exception as e:
        print(f"\n❌ Test failed: {e}")
        import traceback
        traceback.print_exc()

    print("\n🏁 Generator tests completed!")
