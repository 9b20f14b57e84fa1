"""
Path generator
Standard random walk on an interval of Z
"""

import numpy as np

from ..graph import Graph
from .base_generator import BaseGraphGenerator


class PathGenerator(BaseGraphGenerator):
    """Path 0 - 1 - ... - (n-1); interior vertices step left/right with 1/2 each"""

    family = 'path'

    def generate(self, n: int) -> Graph:
        n = self.require_size(n, 3)
        pairs = np.column_stack([np.arange(n - 1), np.arange(1, n)])
        # endpoints keep a single edge, which normalizes to probability 1
        return self.create_graph(n, self.undirected(pairs))


def gen_path(n: int) -> Graph:
    return PathGenerator().generate(n=n)
