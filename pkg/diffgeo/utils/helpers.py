"""
Helper utilities for DiffGeo
Logging setup, random stream derivation and small statistics helpers
"""

import os
import sys
import logging
from pathlib import Path
from typing import Optional, Tuple

import numpy as np
from scipy import stats


def setup_logging(config=None) -> logging.Logger:
    """Setup structured logging for the application"""

    # Get log level and file from config if provided
    if config:
        log_level = getattr(config, 'log_level', 'INFO')
        log_file = config.get_log_path()
    else:
        log_level = os.getenv('LOG_LEVEL', 'INFO').upper()
        log_file = os.getenv('LOG_FILE', '') or None

    # stdout carries CSV/JSON results, so log records go to stderr
    handlers = [logging.StreamHandler(sys.stderr)]
    if log_file:
        log_path = Path(log_file)
        log_path.parent.mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(log_path))

    log_format = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
    date_format = '%Y-%m-%d %H:%M:%S'

    logging.basicConfig(
        level=getattr(logging, log_level),
        format=log_format,
        datefmt=date_format,
        handlers=handlers,
        force=True
    )

    logger = logging.getLogger('diffgeo')
    logger.debug(f"Logging initialized - Level: {log_level}, File: {log_file}")

    return logger


def walker_stream(seed: int, start: int) -> np.random.Generator:
    """
    Counter-based random stream for all walkers launched from one vertex.

    The Philox key is derived from (seed, start); walker w consumes column w of
    every per-step draw, so its trajectory depends only on (seed, start, w).
    """
    key = np.random.SeedSequence([int(seed), int(start)]).generate_state(2, dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def wilson_interval(successes: int, trials: int, confidence: float = 0.95) -> Tuple[float, float]:
    """Wilson score interval for a binomial proportion"""
    if trials <= 0:
        return 0.0, 1.0

    z = float(stats.norm.ppf(0.5 + confidence / 2))
    phat = successes / trials
    denom = 1 + z * z / trials
    center = (phat + z * z / (2 * trials)) / denom
    half = z * np.sqrt(phat * (1 - phat) / trials + z * z / (4 * trials * trials)) / denom
    return max(0.0, center - half), min(1.0, center + half)


def safe_log(x: float) -> float:
    """Natural log returning -inf for zero instead of warning"""
    return float(np.log(x)) if x > 0 else float('-inf')


def finite_or_none(value: Optional[float]) -> Optional[float]:
    """Map non-finite floats to None for JSON output"""
    if value is None:
        return None
    value = float(value)
    return value if np.isfinite(value) else None


def format_duration(seconds: float) -> str:
    """Format seconds into human-readable duration"""
    if seconds < 1:
        return f"{seconds * 1000:.0f}ms"
    elif seconds < 60:
        return f"{seconds:.1f}s"
    minutes = seconds / 60
    return f"{minutes:.0f}m {seconds % 60:.0f}s"
