"""
Diffusion distance engine
Exact hitting-probability dynamic programming and seeded Monte Carlo walks
"""

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import FrozenSet, Iterable, Iterator, Optional, Tuple

import numpy as np
import pandas as pd

from .exceptions import BadThreshold, EmptyTarget, IndexOutOfRange, InvalidInputError
from .graph import Graph, as_vertex_set, mask_of
from ..utils.config import config
from ..utils.helpers import walker_stream, wilson_interval

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class HittingProfile:
    """h[k, i] = P(walk from i visits B within k steps), k = 0..kmax"""
    target: FrozenSet[int]
    kmax: int
    h: np.ndarray

    def at(self, k: int) -> np.ndarray:
        return self.h[k]


@dataclass(frozen=True, eq=False)
class DiffusionField:
    """Per-vertex diffusion distance d_B^(p) with capping flags"""
    target: FrozenSet[int]
    p: float
    kmax: int
    d: np.ndarray
    capped: np.ndarray
    h_at_d: np.ndarray
    # Monte Carlo only
    ci_lo: Optional[np.ndarray] = None
    ci_hi: Optional[np.ndarray] = None
    ambiguous: Optional[np.ndarray] = None
    walkers: Optional[int] = None
    seed: Optional[int] = None

    @property
    def n(self) -> int:
        return int(self.d.shape[0])

    @property
    def is_monte_carlo(self) -> bool:
        return self.walkers is not None

    @property
    def any_capped(self) -> bool:
        return bool(np.any(self.capped))

    def max_distance(self) -> Tuple[int, int]:
        """(vertex, d) of the largest distance, lowest id on ties"""
        v = int(np.argmax(self.d))
        return v, int(self.d[v])

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame({
            'vertex': np.arange(self.n),
            'd': self.d,
            'capped': self.capped
        })
        if self.is_monte_carlo:
            frame['ci_lo'] = self.ci_lo
            frame['ci_hi'] = self.ci_hi
            frame['ambiguous'] = self.ambiguous
        return frame

    def summary(self) -> dict:
        vertex, d_max = self.max_distance()
        return {
            'p': self.p,
            'kmax': self.kmax,
            'target_size': len(self.target),
            'max_d': d_max,
            'argmax_d': vertex,
            'capped': int(np.count_nonzero(self.capped)),
            'walkers': self.walkers
        }


def prepare_target(g: Graph, B: Iterable[int], kmax: Optional[int]) -> Tuple[FrozenSet[int], np.ndarray, int]:
    target = as_vertex_set(B, g.n, 'B')
    if not target:
        raise EmptyTarget("Target set B is empty")
    kmax = config.default_kmax(g.n) if kmax is None else int(kmax)
    if kmax < 1:
        raise InvalidInputError(f"kmax must be at least 1, got {kmax}")
    return target, mask_of(target, g.n), kmax


def _check_threshold(p: Optional[float]) -> float:
    p = config.threshold_p if p is None else float(p)
    if not 0.0 < p < 1.0:
        raise BadThreshold(f"Threshold p={p} must lie strictly between 0 and 1")
    return p


def iterate_profile(g: Graph, in_target: np.ndarray, kmax: int) -> Iterator[Tuple[int, np.ndarray]]:
    """Yield (k, h_k) for k = 0..kmax without storing the whole profile"""
    P = g.transition_matrix
    h = in_target.astype(np.float64)
    yield 0, h
    for k in range(1, kmax + 1):
        h = np.where(in_target, 1.0, np.minimum(P @ h, 1.0))
        yield k, h


def hitting_profile(g: Graph, B: Iterable[int], kmax: int = None) -> HittingProfile:
    """Exact cumulative hitting probabilities h_0..h_kmax"""
    target, in_target, kmax = prepare_target(g, B, kmax)
    h = np.empty((kmax + 1, g.n))
    for k, row in iterate_profile(g, in_target, kmax):
        h[k] = row
    return HittingProfile(target=target, kmax=kmax, h=h)


def diffusion_distance(g: Graph, B: Iterable[int], p: float = None, kmax: int = None) -> DiffusionField:
    """
    d(i) = 0 on B, otherwise the smallest k >= 1 with h_k(i) >= p.
    Vertices below threshold at kmax are reported as kmax and flagged capped.
    """
    p = _check_threshold(p)
    target, in_target, kmax = prepare_target(g, B, kmax)

    d = np.zeros(g.n, dtype=np.int64)
    h_at_d = in_target.astype(np.float64)
    done = in_target.copy()
    h = h_at_d
    for k, h in iterate_profile(g, in_target, kmax):
        if k == 0:
            continue
        crossed = ~done & (h >= p)
        d[crossed] = k
        h_at_d[crossed] = h[crossed]
        done |= crossed
        if done.all():
            break

    capped = ~done
    if capped.any():
        d[capped] = kmax
        h_at_d[capped] = h[capped]
        logger.warning(f"{int(capped.sum())} vertices did not reach threshold p={p} within kmax={kmax}")

    return DiffusionField(target=target, p=p, kmax=kmax, d=d, capped=capped, h_at_d=h_at_d)


class WalkSampler:
    """
    Vectorized next-vertex sampling on a CSR graph.

    Row i owns the key interval (i, i + 1]; a uniform draw u moves a walker at
    i to the first edge whose key exceeds i + u. Walkers on sinks stay put.
    """

    def __init__(self, g: Graph):
        self.g = g
        offsets = g.row_offsets
        counts = np.diff(offsets)
        keys = np.zeros(g.nnz)
        if g.nnz:
            rows = np.repeat(np.arange(g.n), counts)
            cum = np.cumsum(g.weights)
            before = np.concatenate([[0.0], cum])[offsets[:-1]]
            within = cum - np.repeat(before, counts)
            nonempty = counts > 0
            last = offsets[1:][nonempty] - 1
            row_total = np.zeros(g.n)
            row_total[nonempty] = within[last]
            keys = rows + within / np.repeat(row_total, counts)
            keys[last] = rows[last] + 1.0
        self.keys = keys
        self.is_sink = counts == 0

    def step(self, positions: np.ndarray, u: np.ndarray) -> np.ndarray:
        g = self.g
        moving = ~self.is_sink[positions]
        nxt = positions.copy()
        cur = positions[moving]
        idx = np.searchsorted(self.keys, cur + u[moving], side='right')
        idx = np.minimum(idx, g.row_offsets[cur + 1] - 1)
        nxt[moving] = g.col_indices[idx]
        return nxt


def _check_start(g: Graph, start: int) -> int:
    start = int(start)
    if not 0 <= start < g.n:
        raise IndexOutOfRange(f"Start vertex {start} outside 0..{g.n - 1}")
    return start


def sample_walks(g: Graph, start: int, walkers: int, steps: int, seed: int) -> np.ndarray:
    """Positions (steps + 1) x walkers of seeded walks launched at start"""
    start = _check_start(g, start)
    if walkers < 1 or steps < 0:
        raise InvalidInputError(f"Need walkers >= 1 and steps >= 0, got {walkers}, {steps}")

    sampler = WalkSampler(g)
    rng = walker_stream(seed, start)
    positions = np.empty((steps + 1, walkers), dtype=np.int64)
    positions[0] = start
    for t in range(1, steps + 1):
        positions[t] = sampler.step(positions[t - 1], rng.random(walkers))
    return positions


def _first_hit_times(sampler: WalkSampler, in_target: np.ndarray, start: int, walkers: int,
                     kmax: int, seed: int, stop_fraction: Optional[float] = None) -> Tuple[np.ndarray, int]:
    """
    First visit time to B in 1..kmax per walker (kmax + 1 when not hit).
    Returns the hit times and the last simulated step; with stop_fraction the
    walk stops once that share of walkers has hit.
    """
    rng = walker_stream(seed, start)
    positions = np.full(walkers, start, dtype=np.int64)
    hit = np.full(walkers, kmax + 1, dtype=np.int64)
    pending = np.ones(walkers, dtype=bool)
    hits = 0
    for t in range(1, kmax + 1):
        positions = sampler.step(positions, rng.random(walkers))
        newly = pending & in_target[positions]
        hit[newly] = t
        pending &= ~newly
        hits += int(newly.sum())
        if hits == walkers:
            return hit, t
        if stop_fraction is not None and hits >= stop_fraction * walkers:
            return hit, t
    return hit, kmax


def mc_hitting_profile(g: Graph, B: Iterable[int], walkers: int, kmax: int, seed: int,
                       threads: int = None) -> HittingProfile:
    """Empirical hitting profile from seeded walks"""
    target, in_target, kmax = prepare_target(g, B, kmax)
    threads = config.threads if threads is None else threads
    sampler = WalkSampler(g)

    def profile_of(start: int) -> np.ndarray:
        if in_target[start]:
            return np.ones(kmax + 1)
        times, _ = _first_hit_times(sampler, in_target, start, walkers, kmax, seed)
        counts = np.bincount(times, minlength=kmax + 2)[:kmax + 1]
        return np.cumsum(counts) / walkers

    with ThreadPoolExecutor(max_workers=threads) as pool:
        columns = list(pool.map(profile_of, range(g.n)))
    return HittingProfile(target=target, kmax=kmax, h=np.column_stack(columns))


def mc_diffusion_distance(g: Graph, B: Iterable[int], p: float = None, walkers: int = None,
                          kmax: int = None, seed: int = None, threads: int = None,
                          confidence: float = 0.95) -> DiffusionField:
    """
    Monte Carlo diffusion distance with Wilson intervals on h at the crossing
    step. Vertices whose interval at d or at d - 1 contains p are flagged
    ambiguous. Results depend only on (seed, walkers), never on threads.
    """
    p = _check_threshold(p)
    target, in_target, kmax = prepare_target(g, B, kmax)
    walkers = config.mc_walkers if walkers is None else int(walkers)
    seed = config.seed if seed is None else int(seed)
    threads = config.threads if threads is None else int(threads)
    if walkers < 1:
        raise InvalidInputError(f"walkers must be at least 1, got {walkers}")

    sampler = WalkSampler(g)

    def estimate(start: int) -> Tuple[int, bool, float, float, float, bool]:
        if in_target[start]:
            return 0, False, 1.0, 1.0, 1.0, False
        times, _ = _first_hit_times(sampler, in_target, start, walkers, kmax, seed, stop_fraction=p)
        counts = np.cumsum(np.bincount(times, minlength=kmax + 2)[:kmax + 1])
        crossed = np.flatnonzero(counts[1:] >= p * walkers)
        if len(crossed):
            d, capped = int(crossed[0]) + 1, False
        else:
            d, capped = kmax, True
        lo, hi = wilson_interval(int(counts[d]), walkers, confidence)
        ambiguous = lo <= p <= hi
        if d > 1:
            lo_prev, hi_prev = wilson_interval(int(counts[d - 1]), walkers, confidence)
            ambiguous = ambiguous or lo_prev <= p <= hi_prev
        return d, capped, counts[d] / walkers, lo, hi, bool(ambiguous)

    with ThreadPoolExecutor(max_workers=threads) as pool:
        rows = list(pool.map(estimate, range(g.n)))

    d, capped, h_hat, lo, hi, ambiguous = (np.array(col) for col in zip(*rows))
    if capped.any():
        logger.warning(f"{int(capped.sum())} vertices capped at kmax={kmax} in Monte Carlo estimate")
    logger.info(f"Monte Carlo distance: {walkers} walkers per vertex, seed {seed}, "
                f"{int(ambiguous.sum())} near-threshold vertices")

    return DiffusionField(
        target=target, p=p, kmax=kmax,
        d=d.astype(np.int64), capped=capped.astype(bool), h_at_d=h_hat.astype(np.float64),
        ci_lo=lo.astype(np.float64), ci_hi=hi.astype(np.float64), ambiguous=ambiguous.astype(bool),
        walkers=walkers, seed=seed
    )
