#!/usr/bin/env python3
"""
Test script for Experiment Presets and Reports
Tests preset results, determinism of report documents and file output
"""

import sys
import os
import json
import math

import numpy as np
import pandas as pd
import pytest
from pydantic import ValidationError

# Add the diffgeo module to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '.'))

from diffgeo.cli.commands import (
    EXIT_INCONCLUSIVE, EXIT_INVALID, EXIT_NO_CONVERGENCE, EXIT_OK, EXIT_VIOLATION, run_exit_code
)
from diffgeo.core import experiments
from diffgeo.core.exceptions import NoConvergence
from diffgeo.core.experiments import PRESETS, ExperimentConfig, ExperimentReport, run_experiment
from diffgeo.reports import dumps, strip_volatile, to_plain, write_experiment, write_table

FIG1_DISTANCES = [0, 1, 8, 13, 15, 15, 13, 8, 1, 0]


def test_fig1_preset():
    """The path example reproduces its distance field and hit times"""
    print("🧪 Testing fig1 Preset...")
    print("-" * 40)

    report, frames = run_experiment(ExperimentConfig(preset='fig1'))
    document = report.to_document()
    print(f"✅ Status {report.status}, d = {to_plain(document['results']['d'])}")

    assert report.status == 'ok'
    assert document['schema'] == 1
    assert to_plain(document['results']['d']) == FIG1_DISTANCES
    assert to_plain(document['results']['B']) == [0, 9]
    assert frames['distance']['d'].tolist() == FIG1_DISTANCES
    assert np.allclose(frames['distance']['mean_first_hit'], [i * (9 - i) for i in range(10)], atol=1e-6)
    assert 'threads' not in document['config']
    assert 'threads' not in document['settings']
    assert document['runtime']['threads'] == 1
    print()


def test_reports_are_deterministic():
    """Two runs of one configuration differ only in the runtime block"""
    cfg = ExperimentConfig(preset='kn-sharpness', sizes=[10, 100])
    first, _ = run_experiment(cfg)
    second, _ = run_experiment(cfg.model_copy(update={'threads': 3}))
    a = dumps(strip_volatile(first.to_document()))
    b = dumps(strip_volatile(second.to_document()))
    assert a == b
    assert 'runtime' not in json.loads(a)


def test_kn_sharpness_preset():
    report, frames = run_experiment(ExperimentConfig(preset='kn-sharpness', sizes=[10, 100, 1000]))
    assert report.status == 'ok'
    assert report.results['exact_d'] is True
    table = frames['sweep']
    assert table['expected_d'].tolist() == [7, 69, 693]
    assert (table['gap_to_log2'] < 0.04).all()


def test_prop1_sweep_preset():
    report, frames = run_experiment(ExperimentConfig(preset='prop1-sweep', sizes=[0.5, 0.2, 0.05]))
    assert report.status == 'ok'
    assert report.results['ratios_at_least_1'] is True
    assert frames['sweep']['ratio'].iloc[0] == pytest.approx(1.0, abs=1e-12)


def test_small_world_preset():
    """A seeded small-world ring respects the absorbing bound at the peak of u"""
    print("🌐 Testing Small-World Preset...")
    print("-" * 40)

    cfg = ExperimentConfig(preset='sw-sparse', seeds=[1, 2], params={'n': 64, 'n_boundary': 4})
    report, frames = run_experiment(cfg)
    assert report.status == 'ok'
    seeds = report.results['seeds']
    assert [s['seed'] for s in seeds] == [1, 2]
    for s in seeds:
        print(f"✅ seed {s['seed']}: d at peak {s['d_at_argmax_u']} >= {s['predicted_min_d']:.2f}")
        assert s['bound_respected']
        assert s['violations'] == 0
    assert set(frames) == {'seed1_vertices', 'seed2_vertices', 'summary'}
    print()


def test_martingale_preset():
    report, frames = run_experiment(ExperimentConfig(preset='martingale', walkers=4000, seeds=[3]))
    assert report.status == 'ok'
    assert report.results['all_within'] is True
    assert len(frames['martingale']) == 9


def test_bound_suite_preset():
    report, _ = run_experiment(ExperimentConfig(preset='bound-suite', params={'count': 10}, seeds=[5]))
    assert report.results['graphs'] == 10
    assert report.results['violations'] == 0
    assert report.status in ('ok', 'partial')


def test_config_validation():
    assert set(PRESETS) >= {'fig1', 'sw-sparse', 'sw-dense', 'dumbbell', 'kn-sharpness', 'prop1-sweep'}
    with pytest.raises(ValidationError):
        ExperimentConfig(preset='no-such-preset')
    with pytest.raises(ValidationError):
        ExperimentConfig(preset='fig1', colour='blue')
    with pytest.raises(ValidationError):
        ExperimentConfig(preset='fig1', p=1.5)
    with pytest.raises(ValidationError):
        ExperimentConfig(preset='fig1', seeds=[-1])


def test_report_output(tmp_path):
    """Reports become one JSON document plus a CSV per table"""
    print("💾 Testing Report Output...")
    print("-" * 40)

    report, frames = run_experiment(ExperimentConfig(preset='fig1'))
    path = write_experiment(report.to_document(), frames, tmp_path)
    assert path == tmp_path / 'fig1.json'
    document = json.loads(path.read_text())
    assert document['results']['d'] == FIG1_DISTANCES
    assert pd.read_csv(tmp_path / 'fig1_distance.csv')['d'].tolist() == FIG1_DISTANCES

    table = pd.DataFrame({'vertex': [0, 1], 'u': [1.0, float('nan')]})
    csv_path = write_table(table, tmp_path / 'eig', 'csv', {'lambda': 0.25})
    assert csv_path.name == 'eig.csv'
    assert json.loads((tmp_path / 'eig_header.json').read_text()) == {'lambda': 0.25}
    json_path = write_table(table, tmp_path / 'eig', 'json', {'lambda': 0.25})
    rows = json.loads(json_path.read_text())['rows']
    assert rows[1]['u'] is None
    print(f"✅ Wrote {path.name}, {csv_path.name}, {json_path.name}")
    print()


def test_to_plain():
    assert to_plain({'a': np.int64(3), 'b': np.array([1.5, math.inf])}) == {'a': 3, 'b': [1.5, None]}
    assert to_plain(frozenset({3, 1})) == [1, 3]
    assert dumps({'b': 1, 'a': 2}).index('"a"') < dumps({'b': 1, 'a': 2}).index('"b"')

def test_kn_sharpness_large():
    """K_n up to n = 10000: exact d and d/n within 1/n of log 2, lumped above the edge limit"""
    print("📐 Testing K_n Sharpness up to 10000...")
    print("-" * 40)

    sizes = [10, 100, 1000, 10000]
    report, frames = run_experiment(ExperimentConfig(preset='kn-sharpness', sizes=sizes))
    table = frames['sweep']
    assert report.status == 'ok'
    assert report.results['exact_d'] is True
    for n, lam, d_over_n in zip(table['n'], table['lambda'], table['d_over_n']):
        assert abs(lam - 1.0 / n) <= 1e-12
        assert abs(d_over_n - math.log(2.0)) <= 1.0 / n + 1e-12
    assert table['method'].tolist() == ['graph', 'graph', 'graph', 'lumped']
    ratio_1000 = table.loc[table['n'] == 1000, 'ratio'].iloc[0]
    assert abs(ratio_1000 - 1.0) <= 0.005
    print(f"✅ d/n = {[round(x, 5) for x in table['d_over_n']]}")
    print()


def test_dumbbell_preset():
    """The extremum of |u| stays inside the guaranteed region on every seed"""
    print("🏋️ Testing Dumbbell Preset...")
    print("-" * 40)

    report, frames = run_experiment(ExperimentConfig(preset='dumbbell', seeds=list(range(10))))
    seeds = report.results['seeds']
    assert report.status == 'ok'
    assert len(seeds) == 10
    assert all(s['argmax_in_region'] for s in seeds)
    assert report.results['r_at_least_0.9'] >= 8
    assert len(frames['seed0_vertices']) == 1000
    print(f"✅ r >= 0.9 on {report.results['r_at_least_0.9']} of 10 seeds")
    print()


def test_region_miss_is_a_violation(monkeypatch):
    monkeypatch.setattr(experiments, 'bound_region', lambda *args, **kwargs: frozenset())
    report, _ = run_experiment(ExperimentConfig(preset='dumbbell', seeds=[0]))
    assert report.status == 'partial'
    assert report.failures[0]['error'] == 'RegionMembership'
    assert report.failure_categories() == {'violation'}
    assert run_exit_code(report) == EXIT_VIOLATION


def test_suite_records_convergence_failures(monkeypatch):
    """Graphs whose eigensolver fails count against the suite status"""
    def no_convergence(g, *args, **kwargs):
        raise NoConvergence("iteration limit reached", iterations=1)

    monkeypatch.setattr(experiments, 'absorbing_dominant_eigenpair', no_convergence)
    monkeypatch.setattr(experiments, 'first_nontrivial_eigenpair', no_convergence)
    report, frames = run_experiment(ExperimentConfig(preset='bound-suite', params={'count': 4}, seeds=[5]))
    assert report.results['converged'] == 0
    assert len(report.failures) == 4
    assert report.failure_categories() == {'convergence'}
    assert report.status == 'partial'
    assert run_exit_code(report) == EXIT_NO_CONVERGENCE
    assert frames['suite']['error'].tolist() == ['NoConvergence'] * 4


def test_run_exit_codes():
    def report_with(*categories, inconclusive=False):
        failures = [{'where': 'x', 'error': 'E', 'message': '', 'category': c} for c in categories]
        return ExperimentReport(config={}, failures=failures, inconclusive=inconclusive,
                                status='partial' if failures else 'ok')

    assert run_exit_code(report_with()) == EXIT_OK
    assert run_exit_code(report_with(inconclusive=True)) == EXIT_INCONCLUSIVE
    assert run_exit_code(report_with('invalid')) == EXIT_INVALID
    assert run_exit_code(report_with('invalid', 'violation')) == EXIT_VIOLATION
    assert run_exit_code(report_with('violation', 'convergence')) == EXIT_NO_CONVERGENCE



if __name__ == "__main__":
    print("🚀 DiffGeo - Experiment Tests")
    print("=" * 60)

    try:
        test_fig1_preset()
        test_reports_are_deterministic()
        test_kn_sharpness_preset()
        test_kn_sharpness_large()
        test_prop1_sweep_preset()
        test_small_world_preset()
        test_run_exit_codes()
        test_config_validation()
        test_to_plain()

        print("✅ All experiment tests completed successfully!")

    except Exception as e:
        print(f"\n❌ Test failed: {e}")
        import traceback
        traceback.print_exc()

    print("\n🏁 Experiment tests completed!")
