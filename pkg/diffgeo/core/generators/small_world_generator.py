"""
Small-world ring generator
Ring edges plus i.i.d. random chords, with a random set of absorbing vertices
"""

import numpy as np

from ..exceptions import BadBoundaryCount, InvalidInputError
from ..graph import Graph
from .base_generator import BaseGraphGenerator


class SmallWorldRingGenerator(BaseGraphGenerator):
    """
    Ring on n vertices with extra undirected chords.

    Each non-ring vertex pair becomes a chord independently with probability
    q = expected_extra_edges / (C(n, 2) - n), so the expected chord count is
    exactly expected_extra_edges. n_boundary vertices, drawn uniformly without
    replacement, become absorbing. Interior rows are uniform over incident edges.
    """

    family = 'small_world_ring'
    randomized = True

    def sample_extra_edges(self, rng: np.random.Generator, n: int,
                           expected_extra_edges: float) -> np.ndarray:
        """Draw the chord set; consumes exactly one rng.random call"""
        rows, cols = np.triu_indices(n, k=1)
        ring = (cols - rows == 1) | ((rows == 0) & (cols == n - 1))
        rows, cols = rows[~ring], cols[~ring]

        if expected_extra_edges < 0:
            raise InvalidInputError(f"expected_extra_edges={expected_extra_edges} must be >= 0")
        if len(rows) == 0:
            q = 0.0
        else:
            q = float(expected_extra_edges) / len(rows)
        if q > 1.0:
            raise InvalidInputError(
                f"expected_extra_edges={expected_extra_edges} exceeds the {len(rows)} available pairs"
            )

        chosen = rng.random(len(rows)) < q
        return np.column_stack([rows[chosen], cols[chosen]])

    def generate(self, n: int, n_boundary: int, expected_extra_edges: float, seed: int) -> Graph:
        n = self.require_size(n, 8)
        if int(n_boundary) != n_boundary or not 0 < n_boundary < n:
            raise BadBoundaryCount(f"n_boundary={n_boundary} must satisfy 0 < n_boundary < {n}")

        rng = np.random.default_rng(seed)
        chords = self.sample_extra_edges(rng, n, expected_extra_edges)
        boundary = rng.choice(n, size=int(n_boundary), replace=False)

        ids = np.arange(n)
        ring = np.column_stack([ids, (ids + 1) % n])
        edges = self.undirected(np.vstack([ring, chords]))

        self.logger.info(
            f"Small-world ring n={n}: {len(chords)} chords "
            f"(expected {expected_extra_edges}), {n_boundary} absorbing"
        )
        return self.create_graph(n, edges, absorbing=boundary.tolist())


def gen_small_world_ring(n: int, n_boundary: int, expected_extra_edges: float, seed: int) -> Graph:
    return SmallWorldRingGenerator().generate(
        n=n, n_boundary=n_boundary, expected_extra_edges=expected_extra_edges, seed=seed
    )
