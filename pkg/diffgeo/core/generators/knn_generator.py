"""
k-nearest-neighbour graph generator
Point clouds, the dumbbell sampling domain and union-symmetrized kNN graphs
"""

import numpy as np
from scipy.spatial.distance import cdist

from ..exceptions import DuplicatePoints, InvalidInputError, TooFewPoints
from ..graph import Graph
from .base_generator import BaseGraphGenerator

# Dumbbell domain: [0,1]^2 and [1.5,2.5]x[0,1] joined by a neck along y = 0.5
DUMBBELL_NECK_START = 1.0
DUMBBELL_NECK_END = 1.5
DUMBBELL_WIDTH = 2.5
DEFAULT_NECK_WIDTH = 0.2


def in_dumbbell(points: np.ndarray, neck_width: float = DEFAULT_NECK_WIDTH) -> np.ndarray:
    """Membership mask for the dumbbell domain"""
    x, y = points[:, 0], points[:, 1]
    inside_box = (x >= 0.0) & (x <= DUMBBELL_WIDTH) & (y >= 0.0) & (y <= 1.0)
    lobes = (x <= DUMBBELL_NECK_START) | (x >= DUMBBELL_NECK_END)
    neck = np.abs(y - 0.5) <= neck_width / 2.0
    return inside_box & (lobes | neck)


def sample_dumbbell(n_points: int, seed: int, neck_width: float = DEFAULT_NECK_WIDTH) -> np.ndarray:
    """Uniform samples from the dumbbell domain by rejection from its bounding box"""
    if int(n_points) != n_points or n_points < 1:
        raise TooFewPoints(f"n_points={n_points} must be a positive integer")
    if not 0.0 < neck_width <= 1.0:
        raise InvalidInputError(f"neck_width={neck_width} must lie in (0, 1]")

    rng = np.random.default_rng(seed)
    accepted = []
    count = 0
    while count < n_points:
        batch = rng.random((2 * int(n_points), 2)) * np.array([DUMBBELL_WIDTH, 1.0])
        batch = batch[in_dumbbell(batch, neck_width)]
        accepted.append(batch)
        count += len(batch)
    return np.vstack(accepted)[:int(n_points)]


class KnnPointCloudGenerator(BaseGraphGenerator):
    """
    Exact Euclidean kNN graph with union symmetrization and unit weights.

    Neighbours are ranked by (distance, vertex id) using a stable sort over a
    brute-force distance matrix.
    """

    family = 'knn_point_cloud'
    randomized = True

    def generate(self, n_points: int, k: int, seed: int,
                 neck_width: float = DEFAULT_NECK_WIDTH) -> Graph:
        """Sample a dumbbell cloud and connect it"""
        points = sample_dumbbell(n_points, seed, neck_width)
        return self.from_points(points, k)

    def from_points(self, points, k: int) -> Graph:
        points = np.asarray(points, dtype=np.float64)
        if points.ndim != 2 or points.shape[1] != 2:
            raise InvalidInputError(f"Points must have shape (m, 2), got {points.shape}")
        m = points.shape[0]
        if int(k) != k or k < 1 or m <= k:
            raise TooFewPoints(f"Need more than k={k} >= 1 points, got {m}")
        k = int(k)

        if len(np.unique(points, axis=0)) != m:
            raise DuplicatePoints("Point cloud contains repeated coordinates")

        dist = cdist(points, points)
        np.fill_diagonal(dist, np.inf)
        neighbours = np.argsort(dist, axis=1, kind='stable')[:, :k]

        src = np.repeat(np.arange(m), k)
        dst = neighbours.ravel()
        keys = np.unique(np.concatenate([src * m + dst, dst * m + src]))
        edges = np.column_stack([keys // m, keys % m, np.ones(len(keys))])

        self.logger.debug(f"kNN graph: {m} points, k={k}, {len(keys)} directed edges")
        return self.create_graph(m, edges)


def gen_knn_point_cloud(points, k: int) -> Graph:
    return KnnPointCloudGenerator().from_points(points, k)
