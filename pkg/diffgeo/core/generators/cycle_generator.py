"""
Cycle generators
Plain cycles and cycles leaking a constant mass eps into one boundary vertex
"""

import numpy as np

from ..exceptions import BadEpsilon
from ..graph import Graph
from .base_generator import BaseGraphGenerator


def _ring_pairs(n: int) -> np.ndarray:
    ids = np.arange(n)
    return np.column_stack([ids, (ids + 1) % n])


class CycleGenerator(BaseGraphGenerator):
    """C_n with probability 1/2 to each neighbour"""

    family = 'cycle'

    def generate(self, n: int) -> Graph:
        n = self.require_size(n, 3)
        return self.create_graph(n, self.undirected(_ring_pairs(n)))


class CyclePlusBoundaryGenerator(BaseGraphGenerator):
    """
    C_n plus an absorbing vertex n.

    Every cycle vertex moves to the boundary with probability eps and to each
    cycle neighbour with (1 - eps) / 2.
    """

    family = 'cycle_plus_boundary'

    def generate(self, n: int, eps: float) -> Graph:
        n = self.require_size(n, 3)
        eps = float(eps)
        if not 0.0 < eps < 1.0:
            raise BadEpsilon(f"eps={eps} must lie strictly between 0 and 1")

        ids = np.arange(n)
        side = (1.0 - eps) / 2.0
        edges = np.vstack([
            np.column_stack([ids, (ids + 1) % n, np.full(n, side)]),
            np.column_stack([ids, (ids - 1) % n, np.full(n, side)]),
            np.column_stack([ids, np.full(n, n), np.full(n, eps)]),
        ])
        return self.create_graph(n + 1, edges, absorbing=[n])


def gen_cycle(n: int) -> Graph:
    return CycleGenerator().generate(n=n)


def gen_cycle_plus_boundary(n: int, eps: float) -> Graph:
    return CyclePlusBoundaryGenerator().generate(n=n, eps=eps)
