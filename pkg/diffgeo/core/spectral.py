"""
Spectral routines for the averaging Laplacian L = I - P
Operator application, stationary distribution, and the eigenpairs consumed by
the bound checks (first nontrivial pair, absorbing Perron pair, potential
ground states)
"""

import logging
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import splu

from .exceptions import (
    ComplexDominantPair, InvalidInputError, NoAbsorbingSet, NoConvergence, NotIrreducible
)
from .graph import Graph, as_vector, check_reachability
from ..utils.config import config

logger = logging.getLogger(__name__)

# Deterministic start vector for deflated iterations
START_SEED = 20240101
# Shift-invert refinement
REFINE_STEPS = 5
SHIFT_OFFSET = 1e-9
# Stagnation check: the best residual must improve by this factor each window
STAGNATION_WINDOW = 2000
STAGNATION_FACTOR = 0.999
# Tolerance on |1 - lambda| <= 1
GERSHGORIN_TOL = 1e-9
# Entries within this factor of the maximum count as extremal for the sign rule
EXTREMAL_RTOL = 1e-9


@dataclass(frozen=True, eq=False)
class EigenPair:
    """Eigenvalue of L and its sup-normalized eigenvector"""
    lam: float
    u: np.ndarray
    residual: float
    iterations: int
    mode: str = 'nontrivial'
    refined: bool = False

    @property
    def sup_norm(self) -> float:
        return float(np.max(np.abs(self.u)))

    def to_dict(self) -> dict:
        return {
            'lambda': float(self.lam),
            'residual': float(self.residual),
            'iterations': int(self.iterations),
            'mode': self.mode,
            'refined': self.refined
        }


@dataclass
class _IterationState:
    """Bookkeeping for stagnation and oscillation detection"""
    window: int
    best: float = np.inf
    window_best: float = np.inf
    last_rho: Optional[float] = None
    last_step: float = 0.0
    sign_changes: int = 0

    def record(self, it: int, rho: float, res: float) -> Optional[str]:
        """Returns 'oscillating' or 'stagnant' when a window ends without progress"""
        self.best = min(self.best, res)
        if self.last_rho is not None:
            step = rho - self.last_rho
            if step * self.last_step < 0:
                self.sign_changes += 1
            self.last_step = step
        self.last_rho = rho

        if it % self.window:
            return None
        verdict = None
        if self.best > STAGNATION_FACTOR * self.window_best:
            verdict = 'oscillating' if self.sign_changes > self.window // 4 else 'stagnant'
        self.window_best = self.best
        self.sign_changes = 0
        return verdict


def apply_laplacian(g: Graph, u) -> np.ndarray:
    """(Lu)(i) = -sum_j p_ij (u(j) - u(i)); absorbing rows give 0"""
    u = as_vector(u, g.n)
    P = g.transition_matrix
    row_sums = np.asarray(P.sum(axis=1)).ravel()
    return row_sums * u - P @ u


def laplacian_residual(g: Graph, u: np.ndarray, lam: float) -> float:
    """Sup-norm of Lu - lam u"""
    return float(np.max(np.abs(apply_laplacian(g, u) - lam * u)))


def fix_sign(u: np.ndarray) -> np.ndarray:
    """
    Scale u to sup-norm 1 with the lowest-index extremal entry positive.
    Only the scaling touches u, so the eigen-equation residual is unchanged.
    """
    u = np.asarray(u, dtype=np.float64)
    m = float(np.max(np.abs(u)))
    if m == 0.0 or not np.isfinite(m):
        raise NoConvergence("Eigenvector iterate vanished or overflowed")
    idx = int(np.flatnonzero(np.abs(u) >= (1.0 - EXTREMAL_RTOL) * m)[0])
    scale = m if u[idx] > 0 else -m
    return u / scale


def _sup_normalize(x: np.ndarray) -> np.ndarray:
    m = float(np.max(np.abs(x)))
    if m == 0.0 or not np.isfinite(m):
        raise NoConvergence("Power iterate vanished or overflowed")
    return x / m


def _shift_invert(M: sparse.spmatrix, x: np.ndarray, mu: float,
                  measure: Callable[[np.ndarray], Tuple[float, float]],
                  project: Callable[[np.ndarray], np.ndarray],
                  tol: float, start_residual: float) -> Optional[Tuple[float, np.ndarray, float, int]]:
    """
    A few inverse-iteration steps on (M - sigma I) with sigma next to the
    current estimate mu. Returns None when the factorization fails or the
    iterate wanders to a different eigenvalue.
    """
    n = M.shape[0]
    identity = sparse.identity(n, format='csc')
    lu = None
    for sigma in (mu + SHIFT_OFFSET, mu - SHIFT_OFFSET):
        try:
            lu = splu((M - sigma * identity).tocsc())
            break
        except RuntimeError as e:
            logger.debug(f"Shift {sigma} rejected: {e}")
    if lu is None:
        return None

    for step in range(1, REFINE_STEPS + 1):
        y = lu.solve(x)
        if not np.all(np.isfinite(y)):
            return None
        x = _sup_normalize(project(y))
        rho, res = measure(x)
        if abs(rho - mu) > 10.0 * start_residual + 1e-12:
            logger.debug(f"Refinement drifted from {mu} to {rho}")
            return None
        if res <= tol:
            return rho, x, res, step
    return None


def _pi_dot(a: np.ndarray, b: np.ndarray, pi: np.ndarray) -> float:
    return float(np.dot(pi * a, b))


def stationary_distribution(g: Graph, tol: float = None, max_iters: int = None) -> np.ndarray:
    """
    Left Perron vector of P: pi >= 0, sum(pi) = 1, pi P = pi.
    Lazy power iteration on the transpose, finished by shift-invert once close.
    """
    tol = config.tol if tol is None else tol
    max_iters = config.max_iters if max_iters is None else max_iters
    if g.has_absorbing:
        raise InvalidInputError("Stationary distribution requires a graph without absorbing vertices")
    if not check_reachability(g):
        raise NotIrreducible("Transition graph is not strongly connected")

    PT = g.transition_matrix.T.tocsr()
    pi = np.full(g.n, 1.0 / g.n)

    def measure(v):
        v = v / v.sum()
        return 1.0, float(np.max(np.abs(PT @ v - v)))

    refine_below = config.refine_threshold
    for it in range(1, max_iters + 1):
        y = PT @ pi
        res = float(np.max(np.abs(y - pi)))
        if res <= tol:
            logger.debug(f"Stationary distribution converged in {it} iterations")
            return pi
        if res <= refine_below:
            refined = _shift_invert(PT, pi / np.max(pi), 1.0, measure, lambda v: np.abs(v), tol, res)
            if refined is not None:
                _, v, _, steps = refined
                logger.debug(f"Stationary distribution refined after {it} + {steps} steps")
                return v / v.sum()
            refine_below = res * 1e-2
        pi = 0.5 * (pi + y)
        pi /= pi.sum()

    raise NoConvergence(f"Stationary distribution did not converge in {max_iters} iterations",
                        iterations=max_iters, residual=res)


def _deflated_power(P: sparse.csr_matrix, pi: np.ndarray, basis: Sequence[np.ndarray],
                    tol: float, max_iters: int) -> Tuple[float, np.ndarray, float, int, bool]:
    """Dominant pair of lazy P after removing constants and the given basis (pi-orthogonally)"""
    n = P.shape[0]
    ones = np.ones(n)
    deflate = [ones] + [np.asarray(b, dtype=np.float64) for b in basis]
    norms = [_pi_dot(b, b, pi) for b in deflate]

    def project(v: np.ndarray) -> np.ndarray:
        for b, nb in zip(deflate, norms):
            v = v - (_pi_dot(v, b, pi) / nb) * b
        return v

    def measure(v: np.ndarray) -> Tuple[float, float]:
        y = P @ v
        rho = _pi_dot(v, y, pi) / _pi_dot(v, v, pi)
        return rho, float(np.max(np.abs(y - rho * v)))

    rng = np.random.default_rng(START_SEED)
    x = _sup_normalize(project(rng.standard_normal(n)))
    state = _IterationState(window=max(STAGNATION_WINDOW, 10 * n))
    refine_below = config.refine_threshold

    for it in range(1, max_iters + 1):
        y = P @ x
        rho = _pi_dot(x, y, pi) / _pi_dot(x, x, pi)
        res = float(np.max(np.abs(y - rho * x)))
        if res <= tol:
            return rho, x, res, it, False

        if res <= refine_below:
            refined = _shift_invert(P, x, rho, measure, project, tol, res)
            if refined is not None:
                rho_r, x_r, res_r, steps = refined
                return rho_r, x_r, res_r, it + steps, True
            logger.warning(f"Shift-invert refinement failed at residual {res:.3e}; continuing power iteration")
            refine_below = res * 1e-2

        verdict = state.record(it, rho, res)
        if verdict == 'oscillating':
            raise ComplexDominantPair(
                f"Iterates oscillate after {it} iterations (residual {state.best:.3e}); "
                f"the targeted eigenvalue appears to be complex"
            )
        if verdict == 'stagnant':
            raise NoConvergence(f"Residual stagnated at {state.best:.3e} after {it} iterations",
                                iterations=it, residual=state.best)

        x = _sup_normalize(project(0.5 * (x + y)))

    raise NoConvergence(f"Deflated power iteration did not converge in {max_iters} iterations",
                        iterations=max_iters, residual=res)


def _finish_pair(g: Graph, lam: float, u: np.ndarray, iterations: int, mode: str,
                 refined: bool, tol: float) -> EigenPair:
    u = fix_sign(u)
    residual = laplacian_residual(g, u, lam)
    if residual > tol:
        raise NoConvergence(f"Independent residual check failed: {residual:.3e} > {tol:.1e}",
                            iterations=iterations, residual=residual)
    if abs(1.0 - lam) > 1.0 + GERSHGORIN_TOL:
        logger.warning(f"Eigenvalue {lam} lies outside the Gershgorin disk")
    logger.info(f"{mode} eigenpair: lambda={lam:.12g}, residual={residual:.2e}, iterations={iterations}")
    return EigenPair(lam=float(lam), u=u, residual=residual, iterations=iterations,
                     mode=mode, refined=refined)


def nontrivial_eigenpairs(g: Graph, count: int, tol: float = None,
                          max_iters: int = None) -> List[EigenPair]:
    """
    The first `count` nontrivial eigenpairs of L, in order of increasing
    eigenvalue, by successive pi-weighted deflation.
    """
    tol = config.tol if tol is None else tol
    max_iters = config.max_iters if max_iters is None else max_iters
    if count < 1:
        raise InvalidInputError(f"Eigenpair count must be at least 1, got {count}")
    if g.has_absorbing:
        raise InvalidInputError("Nontrivial eigenpairs are defined for graphs without absorbing vertices")
    if count > g.n - 1:
        raise InvalidInputError(f"A {g.n}-vertex graph has at most {g.n - 1} nontrivial eigenpairs")

    pi = stationary_distribution(g, tol=tol, max_iters=max_iters)
    P = g.transition_matrix
    pairs: List[EigenPair] = []
    for _ in range(count):
        rho, u, _, iterations, refined = _deflated_power(P, pi, [p.u for p in pairs], tol, max_iters)
        pairs.append(_finish_pair(g, 1.0 - rho, u, iterations, 'nontrivial', refined, tol))
    return pairs


def first_nontrivial_eigenpair(g: Graph, tol: float = None, max_iters: int = None) -> EigenPair:
    """Eigenvalue of L closest to 0 other than 0 itself, with its eigenvector"""
    return nontrivial_eigenpairs(g, 1, tol=tol, max_iters=max_iters)[0]


def _perron_pair(A: sparse.csr_matrix, tol: float, max_iters: int,
                 label: str) -> Tuple[float, np.ndarray, float, int, bool]:
    """Dominant eigenvalue and nonnegative eigenvector of a nonnegative matrix"""
    n = A.shape[0]

    def measure(v: np.ndarray) -> Tuple[float, float]:
        y = A @ v
        rho = float(np.dot(v, y) / np.dot(v, v))
        return rho, float(np.max(np.abs(y - rho * v)))

    def nonnegative(v: np.ndarray) -> np.ndarray:
        return v if v[np.argmax(np.abs(v))] > 0 else -v

    x = np.ones(n)
    refine_below = config.refine_threshold
    for it in range(1, max_iters + 1):
        y = A @ x
        rho = float(np.dot(x, y) / np.dot(x, x))
        res = float(np.max(np.abs(y - rho * x)))
        if res <= tol:
            return rho, x, res, it, False

        if res <= refine_below:
            refined = _shift_invert(A, x, rho, measure, nonnegative, tol, res)
            if refined is not None and np.min(refined[1]) >= -1e-12:
                rho_r, x_r, _, steps = refined
                x_r = np.maximum(x_r, 0.0)
                return rho_r, x_r, measure(x_r)[1], it + steps, True
            logger.warning(f"{label}: shift-invert refinement failed at residual {res:.3e}")
            refine_below = res * 1e-2

        x = _sup_normalize(0.5 * (x + y))

    raise NoConvergence(f"{label}: Perron iteration did not converge in {max_iters} iterations",
                        iterations=max_iters, residual=res)


def absorbing_dominant_eigenpair(g: Graph, tol: float = None, max_iters: int = None) -> EigenPair:
    """
    Perron pair of the interior block Q, embedded with u = 0 on the absorbing
    set. lambda_1 = 1 - rho(Q).
    """
    tol = config.tol if tol is None else tol
    max_iters = config.max_iters if max_iters is None else max_iters
    if not g.has_absorbing:
        raise NoAbsorbingSet("Graph has no absorbing vertices")
    if not check_reachability(g):
        raise NotIrreducible("Some vertex cannot reach the absorbing set")

    Q, idx = g.interior_block()
    if len(idx) == 0:
        raise InvalidInputError("Graph has no interior vertices")

    rho, x, _, iterations, refined = _perron_pair(Q, tol, max_iters, 'absorbing')
    u = np.zeros(g.n)
    u[idx] = x
    return _finish_pair(g, 1.0 - rho, u, iterations, 'absorbing', refined, tol)


@dataclass(frozen=True, eq=False)
class GroundState:
    """Nonnegative u with Lu = W_eff u on the interior and u = 0 on the absorbing set"""
    w_eff: np.ndarray
    u: np.ndarray
    shift: float
    residual: float
    iterations: int


def potential_ground_state(g: Graph, W, tol: float = None, max_iters: int = None) -> GroundState:
    """
    Solve Lu = (W + sigma) u for the Perron eigenfunction of Q + diag(W).

    sigma is the constant that makes the equation solvable with u >= 0; the
    returned w_eff = W + sigma on the interior and 0 on the absorbing set.
    """
    tol = config.tol if tol is None else tol
    max_iters = config.max_iters if max_iters is None else max_iters
    if not g.has_absorbing:
        raise NoAbsorbingSet("Potential ground states need an absorbing set")
    W = as_vector(W, g.n, 'W')

    Q, idx = g.interior_block()
    w_int = W[idx]
    floor = float(np.min(w_int))
    A = (Q + sparse.diags(w_int - floor)).tocsr()

    rho, x, _, iterations, _ = _perron_pair(A, tol, max_iters, 'potential')
    shift = 1.0 - rho - floor

    u = np.zeros(g.n)
    u[idx] = x / np.max(x)
    w_eff = np.zeros(g.n)
    w_eff[idx] = w_int + shift
    residual = float(np.max(np.abs(apply_laplacian(g, u) - w_eff * u)))
    logger.info(f"Potential ground state: shift={shift:.6g}, residual={residual:.2e}")
    return GroundState(w_eff=w_eff, u=u, shift=shift, residual=residual, iterations=iterations)
