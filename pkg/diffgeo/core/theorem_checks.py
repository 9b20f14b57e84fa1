"""
Vertex-by-vertex evaluation of the eigenfunction / diffusion distance bounds
and the sharpness sweeps over the extremal families
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, FrozenSet, List, Optional, Sequence, Union

import numpy as np
import pandas as pd

from .diffusion import DiffusionField, diffusion_distance
from .exceptions import (
    BadEpsilon, EmptySublevel, InvalidInputError, NegativeU, NoAbsorbingSet,
    NotAnEquationSolution, PotentialTooLarge, TrivialEigenvalue, UnsupportedFamily
)
from .generators import GenSpec, GraphFamily, generate, parse_family
from .graph import Graph, as_vector, build_graph
from .spectral import EigenPair, absorbing_dominant_eigenpair, apply_laplacian, laplacian_residual
from ..utils.config import config
from ..utils.helpers import safe_log

logger = logging.getLogger(__name__)

# |lambda| below this is the trivial eigenvalue
TRIVIAL_LAMBDA = 1e-14
# Families with a constant interior eigenvector, and the parameter each sweep varies
SWEEP_PARAMETER = {
    GraphFamily.COMPLETE_ABSORBING: 'n',
    GraphFamily.CYCLE_PLUS_BOUNDARY: 'eps',
}
DEFAULT_SWEEP_CYCLE = 32


class BoundTheorem(Enum):
    """Inequalities checked per vertex"""
    THM1 = "thm1"
    THM2 = "thm2"
    COROLLARY1 = "corollary1"


class RowStatus(Enum):
    HOLDS = "holds"
    TRIVIAL = "trivial"
    VIOLATED = "violated"
    INCONCLUSIVE = "inconclusive"


@dataclass
class BoundRow:
    """One vertex of a bound report"""
    vertex: int
    d: int
    capped: bool
    lhs: float
    rhs: float
    slack: float
    holds: bool
    status: RowStatus


@dataclass
class BoundReport:
    """Per-vertex rows plus aggregates for one bound check"""
    theorem: BoundTheorem
    rows: List[BoundRow]
    inputs: Dict[str, Any] = field(default_factory=dict)

    @property
    def conclusive_rows(self) -> List[BoundRow]:
        return [r for r in self.rows if r.status is not RowStatus.INCONCLUSIVE]

    @property
    def fraction_holding(self) -> float:
        rows = self.conclusive_rows
        if not rows:
            return float('nan')
        return sum(r.holds for r in rows) / len(rows)

    @property
    def violations(self) -> int:
        return sum(r.status is RowStatus.VIOLATED for r in self.rows)

    @property
    def inconclusive(self) -> int:
        return sum(r.status is RowStatus.INCONCLUSIVE for r in self.rows)

    @property
    def min_slack(self) -> float:
        finite = [r.slack for r in self.rows if np.isfinite(r.slack)]
        return min(finite) if finite else float('inf')

    @property
    def argmin_vertex(self) -> Optional[int]:
        finite = [r for r in self.rows if np.isfinite(r.slack)]
        if not finite:
            return None
        return min(finite, key=lambda r: (r.slack, r.vertex)).vertex

    def row(self, vertex: int) -> BoundRow:
        return self.rows[vertex]

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({
            'vertex': [r.vertex for r in self.rows],
            'd': [r.d for r in self.rows],
            'capped': [r.capped for r in self.rows],
            'lhs': [r.lhs for r in self.rows],
            'rhs': [r.rhs for r in self.rows],
            'slack': [r.slack for r in self.rows],
            'holds': [r.holds for r in self.rows],
            'status': [r.status.value for r in self.rows],
        })

    def summary(self) -> Dict[str, Any]:
        return {
            'theorem': self.theorem.value,
            'min_slack': self.min_slack,
            'argmin_vertex': self.argmin_vertex,
            'fraction_holding': self.fraction_holding,
            'violations': self.violations,
            'inconclusive': self.inconclusive,
            'trivial': sum(r.status is RowStatus.TRIVIAL for r in self.rows),
            'inputs': self.inputs,
        }


def sublevel_set(u, eps: float) -> FrozenSet[int]:
    """{i : |u(i)| <= eps}"""
    u = np.asarray(u, dtype=np.float64)
    if not eps >= 0:
        raise BadEpsilon(f"eps={eps} must be nonnegative")
    members = frozenset(int(i) for i in np.flatnonzero(np.abs(u) <= eps))
    if not members:
        raise EmptySublevel(f"No vertex has |u| <= {eps}")
    return members


def resolve_eps(u: np.ndarray, eps: Union[float, str, None]) -> float:
    """'auto' (or None) selects the smallest |u(i)|"""
    if eps is None or (isinstance(eps, str) and eps.strip().lower() == 'auto'):
        return float(np.min(np.abs(u)))
    return float(eps)


def _log_contraction(lam: float) -> float:
    """log(1/|1 - lam|), +inf when |1 - lam| = 0"""
    return -safe_log(abs(1.0 - lam))


def _log_ratio(u: np.ndarray, scale: float) -> np.ndarray:
    """log(|u| / scale) with -inf at zeros"""
    with np.errstate(divide='ignore'):
        return np.log(np.abs(u) / scale)


def _assemble(theorem: BoundTheorem, dist: DiffusionField, log_factor: float, rhs: np.ndarray,
              inputs: Dict[str, Any], mark_trivial: bool) -> BoundReport:
    slack_tol = config.slack_tol
    if math.isinf(log_factor):
        lhs = np.where(dist.d > 0, math.inf, 0.0)
    else:
        lhs = dist.d * log_factor

    rows = []
    for i in range(dist.n):
        l, r = float(lhs[i]), float(rhs[i])
        slack = l - r
        holds = slack >= -slack_tol
        capped = bool(dist.capped[i])
        if not holds:
            status = RowStatus.INCONCLUSIVE if capped else RowStatus.VIOLATED
        elif mark_trivial and r <= 0.0:
            status = RowStatus.TRIVIAL
        else:
            status = RowStatus.HOLDS
        rows.append(BoundRow(vertex=i, d=int(dist.d[i]), capped=capped, lhs=l, rhs=r,
                             slack=slack, holds=holds, status=status))

    report = BoundReport(theorem=theorem, rows=rows, inputs=inputs)
    if report.violations:
        logger.error(f"{theorem.value}: {report.violations} violated rows, min slack {report.min_slack:.3e}")
    if report.inconclusive:
        logger.warning(f"{theorem.value}: {report.inconclusive} rows inconclusive because of capped distances")
    logger.info(f"{theorem.value}: fraction holding {report.fraction_holding:.4f}, "
                f"min slack {report.min_slack:.3e} at vertex {report.argmin_vertex}")
    return report


def _check_pair(g: Graph, pair: EigenPair, tol: Optional[float]) -> float:
    tol = config.tol if tol is None else tol
    as_vector(pair.u, g.n, 'u')
    residual = laplacian_residual(g, pair.u, pair.lam)
    if residual > max(tol, pair.residual):
        raise NotAnEquationSolution(f"Eigenpair residual {residual:.3e} exceeds tolerance {tol:.1e}")
    return residual


def check_theorem1(g: Graph, pair: EigenPair, eps: Union[float, str, None] = 'auto',
                   kmax: int = None, p: float = None, tol: float = None) -> BoundReport:
    """
    d_B(i) log(1/|1-lam|) >= log(|u(i)|/||u||) - log(1 - p + eps) with
    B = {|u| <= eps}. Works for any real eigenpair, not just the first.
    """
    if abs(pair.lam) < TRIVIAL_LAMBDA:
        raise TrivialEigenvalue("lambda = 0 makes the left-hand side identically zero")
    _check_pair(g, pair, tol)

    u = pair.u
    eps = resolve_eps(u, eps)
    B = sublevel_set(u, eps)
    dist = diffusion_distance(g, B, p=p, kmax=kmax)

    sup = float(np.max(np.abs(u)))
    rhs = _log_ratio(u, sup) - math.log(1.0 - dist.p + eps)
    inputs = {'lambda': pair.lam, 'eps': eps, 'p': dist.p, 'B': sorted(B), 'kmax': dist.kmax}
    return _assemble(BoundTheorem.THM1, dist, _log_contraction(pair.lam), rhs, inputs, mark_trivial=False)


def check_theorem2(g: Graph, pair: EigenPair, kmax: int = None, p: float = None,
                   tol: float = None) -> BoundReport:
    """d_dV(i) log(1/|1-lam_1|) >= log(|u(i)| / ((1-p) ||u||)); rows with RHS <= 0 are trivial"""
    if not g.has_absorbing:
        raise NoAbsorbingSet("The absorbing bound needs an absorbing set")
    _check_pair(g, pair, tol)
    boundary = sorted(g.absorbing)
    if np.max(np.abs(pair.u[boundary])) > 0.0:
        raise InvalidInputError("Eigenvector must vanish on the absorbing set")

    dist = diffusion_distance(g, g.absorbing, p=p, kmax=kmax)
    u = pair.u
    rhs = _log_ratio(u, (1.0 - dist.p) * float(np.max(np.abs(u))))
    inputs = {'lambda': pair.lam, 'p': dist.p, 'absorbing': boundary, 'kmax': dist.kmax}
    return _assemble(BoundTheorem.THM2, dist, _log_contraction(pair.lam), rhs, inputs, mark_trivial=True)


def check_corollary1(g: Graph, W, u, kmax: int = None, p: float = None,
                     tol: float = None) -> BoundReport:
    """
    For Lu = W u with u >= 0 and u = 0 on the absorbing set:
    d_dV(i) log(1/(1 - ||W||)) >= log(|u(i)| / ((1-p) ||u||)).
    ||W|| is taken over interior vertices, where the equation binds.
    """
    tol = config.tol if tol is None else tol
    if not g.has_absorbing:
        raise NoAbsorbingSet("The potential bound needs an absorbing set")
    W = as_vector(W, g.n, 'W')
    u = as_vector(u, g.n, 'u')

    if np.any(u < 0):
        raise NegativeU(f"u has {int(np.sum(u < 0))} negative entries")
    boundary = sorted(g.absorbing)
    sup = float(np.max(u))
    if sup == 0.0:
        raise InvalidInputError("u vanishes identically")
    if np.any(u[boundary] != 0.0):
        raise NotAnEquationSolution("u must vanish on the absorbing set")

    residual = float(np.max(np.abs(apply_laplacian(g, u) - W * u))) / sup
    if residual > tol:
        raise NotAnEquationSolution(f"||Lu - Wu|| / ||u|| = {residual:.3e} exceeds {tol:.1e}")

    w_norm = float(np.max(np.abs(W[g.interior])))
    if w_norm >= 1.0:
        raise PotentialTooLarge(f"||W|| = {w_norm} must be below 1")

    dist = diffusion_distance(g, g.absorbing, p=p, kmax=kmax)
    rhs = _log_ratio(u, (1.0 - dist.p) * sup)
    inputs = {'w_norm': w_norm, 'p': dist.p, 'absorbing': boundary, 'kmax': dist.kmax,
              'residual': residual}
    return _assemble(BoundTheorem.COROLLARY1, dist, _log_contraction(w_norm), rhs, inputs, mark_trivial=True)


def _lumped_chain(q: float) -> Graph:
    """Interior collapsed to one state: stay with 1 - q, absorb with q"""
    return build_graph(2, [(0, 0, 1.0 - q), (0, 1, q)], absorbing=[1])


def _boundary_rate(family: GraphFamily, params: Dict[str, Any]) -> float:
    if family is GraphFamily.COMPLETE_ABSORBING:
        return 1.0 / params['n']
    return float(params['eps'])


def _full_nnz(family: GraphFamily, params: Dict[str, Any]) -> int:
    if family is GraphFamily.COMPLETE_ABSORBING:
        n = int(params['n'])
        return n * (n - 1)
    return 3 * int(params['n'])


def sharpness_sweep(family: Union[GenSpec, GraphFamily, str], sizes: Sequence[float],
                    p: float = None, kmax: int = None, tol: float = None) -> pd.DataFrame:
    """
    For each size: constant-eigenvector pair, max d over the interior, the
    product d * log(1/(1-lam)) and its ratio to log(1/(1-p)).

    Graphs that would store more than lump_nnz_limit edges are replaced by the
    exact two-state lumped chain; the method column records which was used.
    """
    if isinstance(family, GenSpec):
        base_params = dict(family.params)
        family = family.family
    else:
        base_params = {}
        family = parse_family(family)
    if family not in SWEEP_PARAMETER:
        raise UnsupportedFamily(f"Sharpness sweeps support {[f.value for f in SWEEP_PARAMETER]}, got {family.value}")
    if family is GraphFamily.CYCLE_PLUS_BOUNDARY:
        base_params.setdefault('n', DEFAULT_SWEEP_CYCLE)

    varied = SWEEP_PARAMETER[family]
    p = config.threshold_p if p is None else p
    records = []
    for size in sizes:
        params = dict(base_params, **{varied: size})
        q = _boundary_rate(family, params)
        n_vertices = int(params['n']) + (1 if family is GraphFamily.CYCLE_PLUS_BOUNDARY else 0)
        horizon = config.default_kmax(n_vertices) if kmax is None else kmax

        if _full_nnz(family, params) > config.lump_nnz_limit:
            g = _lumped_chain(q)
            method = 'lumped'
        else:
            g = generate(GenSpec(family, params))
            method = 'graph'

        pair = absorbing_dominant_eigenpair(g, tol=tol)
        dist = diffusion_distance(g, g.absorbing, p=p, kmax=horizon)
        interior = g.interior
        d_max = int(np.max(dist.d[interior]))
        product = d_max * _log_contraction(pair.lam)
        ratio = product / -math.log(1.0 - dist.p)
        records.append({
            'family': family.value,
            varied: size,
            'n_vertices': n_vertices,
            'lambda': pair.lam,
            'max_d': d_max,
            'product': product,
            'ratio': ratio,
            'capped': bool(dist.capped[interior].any()),
            'method': method,
        })
        logger.info(f"Sweep {family.value} {varied}={size}: lambda={pair.lam:.6g}, d={d_max}, "
                    f"ratio={ratio:.6f} ({method})")

    return pd.DataFrame.from_records(records)
