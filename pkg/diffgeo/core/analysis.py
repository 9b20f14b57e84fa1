"""
Analysis helpers
Spectral embedding, sign classification, correlation studies between |u| and
diffusion distance, and mean first-hit times
"""

import logging
import math
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional

import numpy as np
from scipy import stats

from .diffusion import DiffusionField, iterate_profile, prepare_target
from .exceptions import DegenerateInput, DimensionMismatch, InvalidInputError
from .graph import Graph, as_vertex_set
from .spectral import nontrivial_eigenpairs
from ..utils.config import config

logger = logging.getLogger(__name__)

MAX_EMBEDDING_DIMS = 3
# Survival mass below this is treated as zero when summing hit times
TAIL_EPS = 1e-15


@dataclass(frozen=True, eq=False)
class Embedding:
    """Vertex coordinates from the first nontrivial eigenvectors"""
    dims: int
    coords: np.ndarray
    eigenvalues: List[float]

    def column(self, k: int) -> np.ndarray:
        return self.coords[:, k]


@dataclass(frozen=True, eq=False)
class MeanHitTimes:
    mean: np.ndarray
    truncated: np.ndarray
    kmax: int


def spectral_embedding(g: Graph, dims: int = 2, tol: float = None) -> Embedding:
    if int(dims) != dims or not 1 <= dims <= MAX_EMBEDDING_DIMS:
        raise InvalidInputError(f"dims must be between 1 and {MAX_EMBEDDING_DIMS}, got {dims}")
    pairs = nontrivial_eigenpairs(g, int(dims), tol=tol)
    coords = np.column_stack([pair.u for pair in pairs])
    return Embedding(dims=int(dims), coords=coords, eigenvalues=[pair.lam for pair in pairs])


def sign_classifier(u) -> np.ndarray:
    """Cluster labels -1, 0, +1 from the sign of u"""
    return np.sign(np.asarray(u, dtype=np.float64)).astype(np.int64)


def correlation(a, b, restrict: Optional[Iterable[int]] = None) -> float:
    """Pearson r, optionally over a subset of vertices"""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 1:
        raise DimensionMismatch(f"Cannot correlate shapes {a.shape} and {b.shape}")
    if restrict is not None:
        idx = sorted(as_vertex_set(restrict, len(a), 'restrict'))
        a, b = a[idx], b[idx]
    if len(a) < 2 or np.ptp(a) == 0 or np.ptp(b) == 0:
        raise DegenerateInput("Correlation needs at least two distinct values in each input")
    r, _ = stats.pearsonr(a, b)
    return float(r)


def correlation_study(u, d, restrict: Optional[Iterable[int]] = None) -> Dict[str, Optional[float]]:
    """
    Global r(|u|, d) and r over vertices whose d is at least the median,
    where localized eigenvectors are usually compared.
    """
    abs_u = np.abs(np.asarray(u, dtype=np.float64))
    d = np.asarray(d, dtype=np.float64)
    base = np.arange(len(d)) if restrict is None else np.array(sorted(restrict), dtype=np.int64)

    result: Dict[str, Optional[float]] = {'r_global': None, 'r_top_half': None}
    try:
        result['r_global'] = correlation(abs_u, d, base)
    except DegenerateInput as e:
        logger.warning(f"Global correlation undefined: {e}")

    top = base[d[base] >= np.median(d[base])]
    result['n_top_half'] = int(len(top))
    try:
        result['r_top_half'] = correlation(abs_u, d, top)
    except DegenerateInput as e:
        logger.debug(f"Top-half correlation undefined: {e}")
    return result


def mean_first_hit(g: Graph, B: Iterable[int], kmax: int = None) -> MeanHitTimes:
    """
    Expected first-hit time sum_k (1 - h_k(i)), truncated at kmax.
    Vertices with survival mass left at kmax are flagged truncated.
    """
    _, in_target, kmax = prepare_target(g, B, kmax)
    total = np.zeros(g.n)
    survival = np.zeros(g.n)
    for k, h in iterate_profile(g, in_target, kmax):
        survival = 1.0 - h
        if k == kmax:
            break
        total += survival
        if survival.max() < TAIL_EPS:
            break
    truncated = survival >= TAIL_EPS
    if truncated.any():
        logger.warning(f"Mean hit times truncated at kmax={kmax} for {int(truncated.sum())} vertices")
    return MeanHitTimes(mean=total, truncated=truncated, kmax=kmax)


def bound_threshold(lam: float, eps: float = 0.0, p: float = 0.5) -> float:
    """Smallest distance the extremal vertex of |u| must have: -log(1-p+eps) / log(1/|1-lam|)"""
    contraction = abs(1.0 - lam)
    if contraction == 0.0:
        return 0.0
    return -math.log(1.0 - p + eps) / -math.log(contraction)


def bound_region(d, lam: float, eps: float = 0.0, p: float = 0.5) -> FrozenSet[int]:
    """
    {i : d(i) log(1/|1-lam|) >= log(1/(1-p+eps))}, the set that must contain
    the maximizer of |u| when B is the eps-sublevel set of u.
    """
    if isinstance(d, DiffusionField):
        d = d.d
    d = np.asarray(d, dtype=np.float64)
    contraction = abs(1.0 - lam)
    if contraction == 0.0:
        lhs = np.where(d > 0, np.inf, 0.0)
    else:
        lhs = d * -math.log(contraction)
    rhs = -math.log(1.0 - p + eps)
    return frozenset(int(i) for i in np.flatnonzero(lhs >= rhs - config.slack_tol))
