#!/usr/bin/env python3
"""
Test script for the Bound Checks
Tests per-vertex eigenfunction / diffusion distance inequalities and sharpness sweeps
"""

import sys
import os
import math

import numpy as np
import pytest

# Add the diffgeo module to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '.'))

from diffgeo.core.exceptions import (
    EmptySublevel, NegativeU, NoAbsorbingSet, NotAnEquationSolution, PotentialTooLarge,
    TrivialEigenvalue, UnsupportedFamily
)
from diffgeo.core.generators import (
    GraphFamily, gen_complete_absorbing, gen_cycle, gen_path, gen_small_world_ring, gen_two_complete_bridge
)
from diffgeo.core.graph import build_graph
from diffgeo.core.spectral import (
    EigenPair, absorbing_dominant_eigenpair, first_nontrivial_eigenpair, potential_ground_state
)
from diffgeo.core.theorem_checks import (
    BoundTheorem, RowStatus, check_corollary1, check_theorem1, check_theorem2, resolve_eps,
    sharpness_sweep, sublevel_set
)
from diffgeo.utils.config import config


def test_sublevel_sets():
    u = np.array([-1.0, 0.1, 1.0])
    assert sublevel_set(u, 0.2) == frozenset({1})
    assert sublevel_set(u, 1.0) == frozenset({0, 1, 2})
    assert resolve_eps(u, 'auto') == pytest.approx(0.1)
    assert resolve_eps(u, 0.3) == 0.3
    with pytest.raises(EmptySublevel):
        sublevel_set(np.array([0.5, 1.0]), 0.0)


def test_theorem2_complete_absorbing():
    """K_100: lambda = 0.01, d = 69 and a slack of about 3e-4"""
    print("🔎 Testing Absorbing Bound on K_100...")
    print("-" * 40)

    g = gen_complete_absorbing(100)
    pair = absorbing_dominant_eigenpair(g)
    report = check_theorem2(g, pair)
    print(f"✅ min slack {report.min_slack:.3e} at vertex {report.argmin_vertex}")

    assert report.theorem is BoundTheorem.THM2
    assert abs(pair.lam - 0.01) < 1e-12
    interior = report.rows[:99]
    assert all(r.d == 69 for r in interior)
    assert interior[0].lhs == pytest.approx(69 * math.log(100 / 99), rel=1e-12)
    assert interior[0].rhs == pytest.approx(math.log(2), rel=1e-12)
    assert 3.0e-4 < report.min_slack < 3.5e-4
    assert report.violations == 0
    assert report.fraction_holding == 1.0

    boundary = report.row(99)
    assert boundary.d == 0
    assert boundary.status is RowStatus.TRIVIAL
    assert report.summary()['trivial'] == 1
    assert list(report.to_frame().columns) == ['vertex', 'd', 'capped', 'lhs', 'rhs', 'slack', 'holds', 'status']
    print()


def test_capped_rows_are_inconclusive():
    g = gen_complete_absorbing(100)
    report = check_theorem2(g, absorbing_dominant_eigenpair(g), kmax=10)
    assert report.violations == 0
    assert report.inconclusive == 99
    assert report.fraction_holding == 1.0
    assert report.row(0).status is RowStatus.INCONCLUSIVE


def test_theorem1_path_and_bridge():
    """First nontrivial eigenpairs satisfy the sublevel bound everywhere"""
    print("🔎 Testing Sublevel Bound...")
    print("-" * 40)

    g = gen_path(50)
    report = check_theorem1(g, first_nontrivial_eigenpair(g), eps=0.05)
    print(f"✅ path(50): {len(report.inputs['B'])} vertices in B, min slack {report.min_slack:.4g}")
    assert report.theorem is BoundTheorem.THM1
    assert report.violations == 0
    assert report.inconclusive == 0
    assert report.fraction_holding == 1.0
    for i in report.inputs['B']:
        assert report.row(i).d == 0
        assert report.row(i).holds

    bridge = gen_two_complete_bridge(10)
    auto = check_theorem1(bridge, first_nontrivial_eigenpair(bridge), eps='auto')
    assert auto.inputs['B'] == [20]
    assert auto.violations == 0
    assert auto.fraction_holding == 1.0
    print()


def test_theorem1_on_absorbing_pair():
    g = gen_small_world_ring(48, 4, 24, seed=17)
    pair = absorbing_dominant_eigenpair(g)
    report = check_theorem1(g, pair, eps='auto')
    assert report.inputs['eps'] == 0.0
    assert set(report.inputs['B']) == set(g.absorbing)
    assert report.violations == 0


def test_bound_check_errors():
    g = gen_path(6)
    with pytest.raises(TrivialEigenvalue):
        check_theorem1(g, EigenPair(lam=0.0, u=np.ones(6), residual=0.0, iterations=0))
    with pytest.raises(NotAnEquationSolution):
        check_theorem1(g, EigenPair(lam=0.3, u=np.linspace(-1, 1, 6), residual=0.0, iterations=0))
    with pytest.raises(NoAbsorbingSet):
        check_theorem2(gen_cycle(5), first_nontrivial_eigenpair(gen_cycle(5)))


def test_corollary_reduces_to_theorem2():
    """Constant W = lambda_1 on the interior reproduces the absorbing bound row for row"""
    print("🧪 Testing Potential Bound...")
    print("-" * 40)

    g = gen_complete_absorbing(100)
    pair = absorbing_dominant_eigenpair(g)
    W = np.zeros(g.n)
    W[g.interior] = pair.lam

    expected = check_theorem2(g, pair)
    report = check_corollary1(g, W, pair.u)
    assert report.theorem is BoundTheorem.COROLLARY1
    for a, b in zip(report.rows, expected.rows):
        assert a.d == b.d
        assert a.status is b.status
        if math.isfinite(b.slack):
            assert abs(a.slack - b.slack) <= 1e-12
    print(f"✅ Reduction holds, min slack {report.min_slack:.3e}")
    print()


def test_corollary_with_perturbed_potential():
    g = gen_complete_absorbing(100)
    W = np.full(g.n, 0.01)
    W[0] = 0.02
    state = potential_ground_state(g, W)
    report = check_corollary1(g, state.w_eff, state.u)
    assert report.violations == 0
    assert report.fraction_holding == 1.0
    assert report.inputs['w_norm'] < 1.0


def test_corollary_errors():
    g = gen_complete_absorbing(10)
    pair = absorbing_dominant_eigenpair(g)
    W = np.zeros(g.n)
    W[g.interior] = pair.lam

    with pytest.raises(NegativeU):
        check_corollary1(g, W, -pair.u)
    with pytest.raises(NotAnEquationSolution):
        check_corollary1(g, W * 2.0, pair.u)
    with pytest.raises(NoAbsorbingSet):
        check_corollary1(gen_cycle(5), np.zeros(5), np.ones(5))

    tiny = build_graph(3, list(gen_path(3).edges()), absorbing=[0, 2])
    with pytest.raises(PotentialTooLarge):
        check_corollary1(tiny, np.array([0.0, 1.0, 0.0]), np.array([0.0, 1.0, 0.0]))


def test_sharpness_sweep_complete():
    """Ratios stay at or above 1 and approach it with n"""
    print("📉 Testing Sharpness Sweeps...")
    print("-" * 40)

    table = sharpness_sweep(GraphFamily.COMPLETE_ABSORBING, [10, 100, 1000])
    print(table[['n', 'max_d', 'ratio', 'method']].to_string(index=False))
    assert table['max_d'].tolist() == [7, 69, 693]
    assert table['ratio'].iloc[1] == pytest.approx(69 * math.log(100 / 99) / math.log(2), rel=1e-9)
    assert (table['ratio'] >= 1.0 - 1e-12).all()
    assert table['ratio'].iloc[2] < 1.005
    assert (table['method'] == 'graph').all()
    assert not table['capped'].any()
    print()


def test_sharpness_sweep_lumped(monkeypatch):
    """Above the edge limit the exact two-state chain gives the same numbers"""
    full = sharpness_sweep('complete_absorbing', [10])
    monkeypatch.setattr(config, 'lump_nnz_limit', 50)
    lumped = sharpness_sweep('complete_absorbing', [10])
    assert lumped['method'].tolist() == ['lumped']
    assert lumped['max_d'].tolist() == full['max_d'].tolist()
    assert lumped['lambda'].iloc[0] == pytest.approx(full['lambda'].iloc[0], abs=1e-12)
    assert lumped['n_vertices'].tolist() == [10]


def test_sharpness_sweep_cycle():
    table = sharpness_sweep('cycle_plus_boundary', [0.5, 0.2, 0.05])
    assert table['n_vertices'].tolist() == [33, 33, 33]
    assert np.allclose(table['lambda'], [0.5, 0.2, 0.05], atol=1e-10)
    assert table['max_d'].tolist() == [1, 4, 14]
    assert table['product'].iloc[0] == pytest.approx(math.log(2), rel=1e-12)
    assert table['ratio'].iloc[0] == pytest.approx(1.0, abs=1e-12)
    assert (table['ratio'] >= 1.0 - 1e-12).all()

    with pytest.raises(UnsupportedFamily):
        sharpness_sweep('path', [10])


if __name__ == "__main__":
    print("🚀 DiffGeo - Bound Check Tests")
    print("=" * 60)

    try:
        test_sublevel_sets()
        test_theorem2_complete_absorbing()
        test_capped_rows_are_inconclusive()
        test_theorem1_path_and_bridge()
        test_theorem1_on_absorbing_pair()
        test_bound_check_errors()
        test_corollary_reduces_to_theorem2()
        test_corollary_with_perturbed_potential()
        test_corollary_errors()
        test_sharpness_sweep_complete()
        test_sharpness_sweep_cycle()

        print("✅ All bound check tests completed successfully!")

    except Exception as e:
        print(f"\n❌ Test failed: {e}")
        import traceback
        traceback.print_exc()

    print("\n🏁 Bound check tests completed!")
