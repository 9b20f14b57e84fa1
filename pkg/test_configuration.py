#!/usr/bin/env python3
"""
Test script for Configuration System
Tests environment variables, validation fallbacks and helper utilities
"""

import sys
import os
import json
import logging

import numpy as np

# Add the diffgeo module to path
sys.path.insert(0, os.path.join(os.path.dirname(__file__), '.'))

from diffgeo.utils.config import Config
from diffgeo.utils.helpers import (
    finite_or_none, format_duration, safe_log, setup_logging, walker_stream, wilson_interval
)


def test_basic_config():
    """Test basic configuration loading"""
    print("🔧 Testing Basic Configuration...")
    print("-" * 40)

    config = Config()

    print(f"✅ Eigen tolerance: {config.tol}")
    print(f"✅ Step horizon factor: {config.kmax_factor}")
    print(f"✅ Threshold p: {config.threshold_p}")
    print(f"✅ Seed: {config.seed}, threads: {config.threads}")
    print(f"✅ Output: {config.out_dir} ({config.output_format})")

    exported = config.export_config()
    print(f"\nExported settings: {json.dumps(exported, indent=2)}")
    assert set(exported) >= {'tol', 'max_iters', 'kmax_factor', 'threshold_p', 'seed', 'threads'}
    assert config.default_kmax(10) == config.kmax_factor * 10
    print()


def test_environment_variables(monkeypatch):
    """Test configuration with environment variables"""
    print("🌍 Testing Environment Variables...")
    print("-" * 40)

    monkeypatch.setenv('DIFFGEO_TOL', '1e-8')
    monkeypatch.setenv('DIFFGEO_KMAX_FACTOR', '20')
    monkeypatch.setenv('DIFFGEO_THREADS', '4')
    monkeypatch.setenv('DIFFGEO_MC_WALKERS', '5000')
    monkeypatch.setenv('DIFFGEO_FORMAT', 'JSON')

    config = Config()
    assert config.tol == 1e-8
    assert config.kmax_factor == 20
    assert config.threads == 4
    assert config.mc_walkers == 5000
    assert config.output_format == 'json'
    assert config.default_kmax(7) == 140
    print("✅ All environment variable tests passed!")
    print()


def test_invalid_values_fall_back(monkeypatch):
    """Out-of-range settings are replaced by defaults"""
    monkeypatch.setenv('DIFFGEO_THRESHOLD_P', '1.5')
    monkeypatch.setenv('DIFFGEO_THREADS', '0')
    monkeypatch.setenv('DIFFGEO_FORMAT', 'xml')
    monkeypatch.setenv('LOG_LEVEL', 'chatty')

    config = Config()
    assert config.threshold_p == 0.5
    assert config.threads == 1
    assert config.output_format == 'csv'
    assert config.log_level == 'INFO'


def test_update_setting(tmp_path):
    config = Config()
    assert config.update_setting('seed', 99)
    assert config.seed == 99
    assert config.update_setting('out_dir', str(tmp_path))
    assert config.out_dir == tmp_path
    assert not config.update_setting('no_such_setting', 1)
    # validation runs on every update
    config.update_setting('slack_tol', -1.0)
    assert config.slack_tol == 1e-9
    assert 'seed=99' in str(config)


def test_setup_logging(tmp_path):
    config = Config()
    config.log_level = 'DEBUG'
    config.log_file = str(tmp_path / 'logs' / 'diffgeo.log')
    logger = setup_logging(config)
    logger.debug("log file check")
    assert logging.getLogger().level == logging.DEBUG
    assert (tmp_path / 'logs' / 'diffgeo.log').exists()
    setup_logging(Config())


def test_walker_streams():
    """Streams depend on (seed, start) only"""
    a = walker_stream(7, 3).random(5)
    b = walker_stream(7, 3).random(5)
    c = walker_stream(7, 4).random(5)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


def test_statistics_helpers():
    lo, hi = wilson_interval(50, 100)
    assert lo < 0.5 < hi
    assert 0.39 < lo < 0.41 and 0.59 < hi < 0.61
    assert wilson_interval(0, 100)[0] < 1e-12
    assert wilson_interval(100, 100)[1] > 1.0 - 1e-12
    assert wilson_interval(0, 0) == (0.0, 1.0)

    assert safe_log(0.0) == float('-inf')
    assert safe_log(1.0) == 0.0
    assert finite_or_none(float('inf')) is None
    assert finite_or_none(2) == 2.0
    assert format_duration(0.25) == "250ms"
    assert format_duration(12.34) == "12.3s"
    assert format_duration(125) == "2m 5s"


if __name__ == "__main__":
    print("🚀 DiffGeo - Configuration Tests")
    print("=" * 60)

    try:
        test_basic_config()
        test_walker_streams()
        test_statistics_helpers()

        print("✅ All configuration tests completed successfully!")

    except Exception as e:
        print(f"\n❌ Test failed: {e}")
        import traceback
        traceback.print_exc()

    print("\n🏁 Configuration tests completed!")
