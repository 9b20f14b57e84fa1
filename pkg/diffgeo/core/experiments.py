"""
Experiment orchestration
Named presets that chain generate -> eig -> dist -> check -> correlate and
collect everything into one schema-versioned report
"""

import logging
import math
import time
from datetime import datetime, timezone
from typing import Any, Callable, Dict, List, Literal, Optional, Set, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, field_validator

from .analysis import bound_region, bound_threshold, correlation_study, mean_first_hit
from .diffusion import diffusion_distance, sample_walks
from .exceptions import ConvergenceError, DiffGeoError
from .generators import (
    GenSpec, GraphFamily, KnnPointCloudGenerator, gen_cycle, gen_cycle_plus_boundary, gen_path,
    gen_small_world_ring, gen_two_complete_bridge
)
from .graph import Graph, build_graph, graph_summary
from .spectral import EigenPair, absorbing_dominant_eigenpair, first_nontrivial_eigenpair
from .theorem_checks import check_theorem1, check_theorem2, sharpness_sweep
from ..utils.config import config

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
Frames = Dict[str, pd.DataFrame]


class ExperimentConfig(BaseModel):
    """Everything needed to reproduce one experiment run"""
    model_config = ConfigDict(extra='forbid')

    preset: str
    seeds: List[int] = Field(default_factory=lambda: [0])
    sizes: Optional[List[float]] = None
    params: Dict[str, Any] = Field(default_factory=dict)
    p: float = Field(default=0.5, gt=0.0, lt=1.0)
    eps: Union[float, Literal['auto']] = 'auto'
    kmax: Optional[int] = Field(default=None, ge=1)
    walkers: Optional[int] = Field(default=None, ge=1)
    threads: int = Field(default=1, ge=1)

    @field_validator('preset')
    @classmethod
    def known_preset(cls, value: str) -> str:
        if value not in PRESETS:
            raise ValueError(f"Unknown preset '{value}' (known: {', '.join(sorted(PRESETS))})")
        return value

    @field_validator('seeds')
    @classmethod
    def unsigned_seeds(cls, value: List[int]) -> List[int]:
        for seed in value:
            if not 0 <= seed < 2 ** 64:
                raise ValueError(f"Seed {seed} is not an unsigned 64-bit integer")
        return value


class ExperimentReport(BaseModel):
    """Stable JSON document produced by run_experiment"""
    model_config = ConfigDict(populate_by_name=True)

    schema_version: int = Field(default=SCHEMA_VERSION, alias='schema')
    config: Dict[str, Any]
    settings: Dict[str, Any] = Field(default_factory=dict)
    status: Literal['ok', 'partial', 'failed'] = 'ok'
    inconclusive: bool = False
    results: Dict[str, Any] = Field(default_factory=dict)
    failures: List[Dict[str, Any]] = Field(default_factory=list)
    runtime: Dict[str, Any] = Field(default_factory=dict)

    def to_document(self) -> Dict[str, Any]:
        return self.model_dump(by_alias=True)

    def failure_categories(self) -> Set[str]:
        """Categories of recorded failures: convergence, invalid or violation"""
        return {f.get('category', 'invalid') for f in self.failures}


class _Run:
    """Mutable state shared by a preset while it runs"""

    def __init__(self, cfg: ExperimentConfig):
        self.cfg = cfg
        self.results: Dict[str, Any] = {}
        self.frames: Frames = {}
        self.failures: List[Dict[str, Any]] = []
        self.inconclusive = False

    def fail(self, where: Any, error: Exception):
        category = 'convergence' if isinstance(error, ConvergenceError) else 'invalid'
        self.flag(where, type(error).__name__, str(error), category)

    def flag(self, where: Any, kind: str, message: str, category: str = 'violation'):
        logger.error(f"{self.cfg.preset} [{where}]: {kind}: {message}")
        self.failures.append({'where': where, 'error': kind, 'message': message, 'category': category})

    @property
    def walkers(self) -> int:
        return self.cfg.walkers or config.mc_walkers


def _fig1(run: _Run):
    g = gen_path(10)
    B = [0, 9]
    dist = diffusion_distance(g, B, p=run.cfg.p, kmax=run.cfg.kmax)
    hits = mean_first_hit(g, B, kmax=run.cfg.kmax)
    run.results.update({'graph': graph_summary(g), 'B': B, 'd': dist.d, 'mean_first_hit': hits.mean})
    frame = dist.to_frame()
    frame['mean_first_hit'] = hits.mean
    run.frames['distance'] = frame


def _small_world(run: _Run, expected_extra_edges: float):
    params = {'n': 128, 'n_boundary': 8, 'expected_extra_edges': expected_extra_edges}
    params.update(run.cfg.params)
    per_seed = []
    for seed in run.cfg.seeds:
        try:
            g = gen_small_world_ring(seed=seed, **params)
            pair = absorbing_dominant_eigenpair(g)
            report = check_theorem2(g, pair, kmax=run.cfg.kmax, p=run.cfg.p)
        except DiffGeoError as e:
            run.fail({'seed': seed}, e)
            continue

        d = np.array([r.d for r in report.rows])
        peak = int(np.argmax(np.abs(pair.u)))
        predicted = bound_threshold(pair.lam, 0.0, run.cfg.p)
        respected = bool(d[peak] >= predicted - config.slack_tol)
        if report.violations or not respected:
            run.flag({'seed': seed}, 'BoundViolation',
                     f"{report.violations} violated rows; d at argmax |u| = {d[peak]}, predicted {predicted:.3f}")
        corr = correlation_study(pair.u, d)
        run.inconclusive |= report.inconclusive > 0
        per_seed.append({
            'seed': seed,
            'lambda': pair.lam,
            'max_d': int(d.max()),
            'argmax_u': peak,
            'd_at_argmax_u': int(d[peak]),
            'predicted_min_d': predicted,
            'bound_respected': respected,
            'r_global': corr['r_global'],
            'r_top_half': corr['r_top_half'],
            'fraction_holding': report.fraction_holding,
            'violations': report.violations,
        })
        run.frames[f'seed{seed}_vertices'] = pd.DataFrame({
            'vertex': np.arange(g.n), 'u': pair.u, 'd': d,
            'absorbing': [i in g.absorbing for i in range(g.n)]
        })

    run.results['params'] = params
    run.results['seeds'] = per_seed
    run.results['r_at_least_0.9'] = sum(1 for s in per_seed if (s['r_global'] or 0.0) >= 0.9)
    run.frames['summary'] = pd.DataFrame.from_records(per_seed)


def _sw_sparse(run: _Run):
    _small_world(run, 64)


def _sw_dense(run: _Run):
    _small_world(run, 512)


def _dumbbell(run: _Run):
    n_points = int(run.cfg.params.get('n_points', 1000))
    k = int(run.cfg.params.get('k', 10))
    generator = KnnPointCloudGenerator()
    per_seed = []
    for seed in run.cfg.seeds:
        try:
            g = generator.generate(n_points=n_points, k=k, seed=seed)
            pair = first_nontrivial_eigenpair(g)
            report = check_theorem1(g, pair, eps=run.cfg.eps, kmax=run.cfg.kmax, p=run.cfg.p)
        except DiffGeoError as e:
            run.fail({'seed': seed}, e)
            continue

        eps = report.inputs['eps']
        d = np.array([r.d for r in report.rows])
        peak = int(np.argmax(np.abs(pair.u)))
        guaranteed = bound_region(d, pair.lam, eps, run.cfg.p)
        log2_region = bound_region(d, pair.lam, 0.0, run.cfg.p)
        corr = correlation_study(pair.u, d)
        run.inconclusive |= report.inconclusive > 0

        inside = peak in guaranteed
        if not inside and not report.inconclusive:
            run.flag({'seed': seed}, 'RegionMembership', f"argmax |u| = {peak} lies outside the guaranteed region")
        per_seed.append({
            'seed': seed,
            'lambda': pair.lam,
            'eps': eps,
            'B_size': len(report.inputs['B']),
            'argmax_u': peak,
            'argmax_in_region': inside,
            'argmax_in_log2_region': peak in log2_region,
            'region_size': len(guaranteed),
            'log2_region_size': len(log2_region),
            'r_global': corr['r_global'],
            'r_top_half': corr['r_top_half'],
            'fraction_holding': report.fraction_holding,
        })
        run.frames[f'seed{seed}_vertices'] = pd.DataFrame({
            'vertex': np.arange(g.n), 'u': pair.u, 'd': d,
            'in_region': [i in guaranteed for i in range(g.n)],
            'in_log2_region': [i in log2_region for i in range(g.n)],
        })

    run.results['n_points'] = n_points
    run.results['k'] = k
    run.results['seeds'] = per_seed
    run.results['r_at_least_0.9'] = sum(1 for s in per_seed if (s['r_global'] or 0.0) >= 0.9)
    run.frames['summary'] = pd.DataFrame.from_records(per_seed)


def _kn_sharpness(run: _Run):
    sizes = [int(s) for s in (run.cfg.sizes or [10, 100, 1000, 10000])]
    table = sharpness_sweep(GraphFamily.COMPLETE_ABSORBING, sizes, p=run.cfg.p, kmax=run.cfg.kmax)
    log_q = np.log(1.0 - run.cfg.p)
    table['expected_d'] = [math.ceil(log_q / math.log1p(-1.0 / n)) for n in sizes]
    table['d_over_n'] = table['max_d'] / table['n']
    table['gap_to_log2'] = (table['d_over_n'] - math.log(2.0)).abs()
    run.results['table'] = table
    run.results['exact_d'] = bool((table['expected_d'] == table['max_d']).all())
    run.frames['sweep'] = table


def _prop1_sweep(run: _Run):
    sizes = run.cfg.sizes or [0.2, 0.05, 0.01, 0.002]
    template = GenSpec(GraphFamily.CYCLE_PLUS_BOUNDARY, {'n': int(run.cfg.params.get('n', 32))})
    table = sharpness_sweep(template, sizes, p=run.cfg.p, kmax=run.cfg.kmax)
    ratios = table['ratio'].to_numpy()
    run.results['table'] = table
    run.results['ratios_at_least_1'] = bool(np.all(ratios >= 1.0 - 1e-12))
    run.results['ratios_decreasing'] = bool(np.all(np.diff(ratios) <= 1e-12))
    run.frames['sweep'] = table


def _suite_graph(seed: int, index: int) -> Tuple[str, Graph]:
    """One member of the randomized bound suite; family rotates with the index"""
    rng = np.random.default_rng(np.random.SeedSequence([seed, index]))
    choice = index % 5
    if choice == 0:
        n = int(rng.integers(5, 61))
        return f'path({n})', gen_path(n)
    if choice == 1:
        n = int(rng.integers(5, 61))
        return f'cycle({n})', gen_cycle(n)
    if choice == 2:
        n = int(rng.integers(16, 301))
        n_boundary = int(rng.integers(1, 9))
        extra = float(rng.integers(0, 2 * n + 1))
        sub_seed = int(rng.integers(0, 2 ** 63))
        return (f'small_world({n},{n_boundary},{extra:g})',
                gen_small_world_ring(n, n_boundary, extra, sub_seed))
    if choice == 3:
        n = int(rng.integers(2, 41))
        return f'two_complete_bridge({n})', gen_two_complete_bridge(n)
    n_points = int(rng.integers(60, 201))
    sub_seed = int(rng.integers(0, 2 ** 63))
    return f'knn_dumbbell({n_points})', KnnPointCloudGenerator().generate(n_points=n_points, k=10, seed=sub_seed)


def _bound_suite(run: _Run):
    count = int(run.cfg.params.get('count', 200))
    seed = run.cfg.seeds[0]
    records = []
    for index in range(count):
        record = {'index': index, 'graph': None, 'converged': False}
        try:
            label, g = _suite_graph(seed, index)
            record['graph'] = label
            record['n'] = g.n
            pair = absorbing_dominant_eigenpair(g) if g.has_absorbing else first_nontrivial_eigenpair(g)
            record['converged'] = True
            record['lambda'] = pair.lam

            reports = [check_theorem1(g, pair, eps=run.cfg.eps, kmax=run.cfg.kmax, p=run.cfg.p)]
            if g.has_absorbing:
                reports.append(check_theorem2(g, pair, kmax=run.cfg.kmax, p=run.cfg.p))
        except DiffGeoError as e:
            run.fail({'index': index, 'graph': record['graph']}, e)
            record['error'] = type(e).__name__
            records.append(record)
            continue

        record['rows'] = sum(len(r.rows) for r in reports)
        record['violations'] = sum(r.violations for r in reports)
        record['inconclusive'] = sum(r.inconclusive for r in reports)
        record['min_slack'] = min(r.min_slack for r in reports)
        if record['violations']:
            run.flag({'index': index, 'graph': label}, 'BoundViolation',
                     f"{record['violations']} rows violate the bound, min slack {record['min_slack']:.3e}")
        run.inconclusive |= record['inconclusive'] > 0
        records.append(record)

    table = pd.DataFrame.from_records(records)
    checked = table[table['converged']]
    rows = int(checked['rows'].sum()) if len(checked) else 0
    run.results.update({
        'graphs': count,
        'converged': int(len(checked)),
        'violations': int(checked['violations'].sum()) if len(checked) else 0,
        'inconclusive_rows': int(checked['inconclusive'].sum()) if len(checked) else 0,
        'inconclusive_fraction': (float(checked['inconclusive'].sum()) / rows) if rows else 0.0,
    })
    run.frames['suite'] = table


def _martingale_graphs() -> List[Tuple[str, Graph]]:
    return [
        ('path(10) endpoints absorbing', build_graph(10, list(gen_path(10).edges()), absorbing=[0, 9])),
        ('two_complete_bridge(5)', gen_two_complete_bridge(5)),
        ('cycle_plus_boundary(16, 0.1)', gen_cycle_plus_boundary(16, 0.1)),
    ]


def _martingale(run: _Run):
    steps = (1, 5, 10)
    seed = run.cfg.seeds[0]
    records = []
    for label, g in _martingale_graphs():
        try:
            pair: EigenPair = absorbing_dominant_eigenpair(g) if g.has_absorbing else first_nontrivial_eigenpair(g)
        except DiffGeoError as e:
            run.fail({'graph': label}, e)
            continue
        start = int(np.argmax(np.abs(pair.u)))
        walks = sample_walks(g, start, run.walkers, max(steps), seed)
        for n in steps:
            values = pair.u[walks[n]]
            mean = float(values.mean())
            stderr = float(values.std(ddof=1) / math.sqrt(len(values)))
            expected = (1.0 - pair.lam) ** n * pair.u[start]
            gap = abs(mean - expected)
            within = gap <= 4.0 * stderr if stderr > 0 else gap <= 1e-12
            records.append({
                'graph': label, 'start': start, 'steps': n, 'lambda': pair.lam,
                'mean': mean, 'expected': expected, 'stderr': stderr, 'within_4_se': bool(within)
            })

    table = pd.DataFrame.from_records(records)
    run.results['rows'] = table
    run.results['all_within'] = bool(len(table) and table['within_4_se'].all())
    run.frames['martingale'] = table


PRESETS: Dict[str, Callable[[_Run], None]] = {
    'fig1': _fig1,
    'sw-sparse': _sw_sparse,
    'sw-dense': _sw_dense,
    'dumbbell': _dumbbell,
    'kn-sharpness': _kn_sharpness,
    'prop1-sweep': _prop1_sweep,
    'bound-suite': _bound_suite,
    'martingale': _martingale,
}


def run_experiment(cfg: ExperimentConfig) -> Tuple[ExperimentReport, Frames]:
    """Run one preset; sub-operation failures are recorded and the run continues"""
    started = time.perf_counter()
    run = _Run(cfg)
    logger.info(f"Running experiment {cfg.preset} with seeds {cfg.seeds}")

    saved_threads = config.threads
    config.update_setting('threads', cfg.threads)
    try:
        PRESETS[cfg.preset](run)
    except DiffGeoError as e:
        run.fail('preset', e)
    finally:
        config.update_setting('threads', saved_threads)

    if not run.failures:
        status = 'ok'
    elif run.results:
        status = 'partial'
    else:
        status = 'failed'

    elapsed = time.perf_counter() - started
    report = ExperimentReport(
        config=cfg.model_dump(exclude={'threads'}),
        settings={k: v for k, v in config.export_config().items() if k != 'threads'},
        status=status,
        inconclusive=run.inconclusive,
        results=run.results,
        failures=run.failures,
        runtime={
            'timestamp': datetime.now(timezone.utc).isoformat(),
            'elapsed_seconds': elapsed,
            'threads': cfg.threads,
        },
    )
    logger.info(f"Experiment {cfg.preset} finished with status {status} in {elapsed:.2f}s")
    return report, run.frames
