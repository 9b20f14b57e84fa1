"""
Complete graph generators
K_n with self-loops (p_ij = 1/n for all i, j), its absorbing variant, and two
K_n blocks joined through a bridge vertex
"""

import numpy as np

from ..graph import Graph
from .base_generator import BaseGraphGenerator


def _complete_block(ids: np.ndarray) -> np.ndarray:
    """All ordered pairs within ids, self-loops included, unit weights"""
    src = np.repeat(ids, len(ids))
    dst = np.tile(ids, len(ids))
    return np.column_stack([src, dst, np.ones(len(src))])


class CompleteGenerator(BaseGraphGenerator):
    """K_n with self-loops and no absorbing set"""

    family = 'complete'

    def generate(self, n: int) -> Graph:
        n = self.require_size(n, 2)
        return self.create_graph(n, _complete_block(np.arange(n)))


class CompleteAbsorbingGenerator(BaseGraphGenerator):
    """K_n with self-loops; vertex n-1 is the absorbing state"""

    family = 'complete_absorbing'

    def generate(self, n: int) -> Graph:
        n = self.require_size(n, 2)
        return self.create_graph(n, _complete_block(np.arange(n)), absorbing=[n - 1])


class TwoCompleteBridgeGenerator(BaseGraphGenerator):
    """
    Two K_n blocks (ids 0..n-1 and n..2n-1) and a bridge vertex 2n linked
    both ways to every block vertex.
    """

    family = 'two_complete_bridge'

    def generate(self, n: int) -> Graph:
        n = self.require_size(n, 2)
        bridge = 2 * n
        left = np.arange(n)
        right = np.arange(n, 2 * n)
        spokes = np.column_stack([np.arange(2 * n), np.full(2 * n, bridge)])
        edges = np.vstack([
            _complete_block(left),
            _complete_block(right),
            self.undirected(spokes),
        ])
        return self.create_graph(2 * n + 1, edges)


def gen_complete(n: int) -> Graph:
    return CompleteGenerator().generate(n=n)


def gen_complete_absorbing(n: int) -> Graph:
    return CompleteAbsorbingGenerator().generate(n=n)


def gen_two_complete_bridge(n: int) -> Graph:
    return TwoCompleteBridgeGenerator().generate(n=n)
