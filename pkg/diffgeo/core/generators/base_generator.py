"""
Base class for all graph generators
Provides common validation and graph assembly
"""

from abc import ABC, abstractmethod
from typing import Any, ClassVar, Iterable, Optional
import logging

import numpy as np

from ..exceptions import SizeTooSmall
from ..graph import Graph, build_graph


class BaseGraphGenerator(ABC):
    """Abstract base class for graph family generators"""

    family: ClassVar[str] = ''
    randomized: ClassVar[bool] = False

    def __init__(self):
        self.logger = logging.getLogger(f"{__name__}.{self.__class__.__name__}")

    @abstractmethod
    def generate(self, **params: Any) -> Graph:
        """Construct the family member described by params"""
        pass

    def create_graph(self, n: int, edges: np.ndarray, absorbing: Iterable[int] = ()) -> Graph:
        """Assemble and normalize a graph from (src, dst, weight) rows"""
        graph = build_graph(n, edges, absorbing)
        self.logger.debug(f"{self.family}: {graph}")
        return graph

    def require_size(self, value: int, minimum: int, name: str = 'n') -> int:
        """Validate an integer size parameter"""
        if int(value) != value or value < minimum:
            raise SizeTooSmall(f"{self.family}: {name}={value} must be an integer >= {minimum}")
        return int(value)

    @staticmethod
    def undirected(pairs: np.ndarray, weight: Optional[np.ndarray] = None) -> np.ndarray:
        """Expand (i, j) pairs into edge rows in both directions"""
        pairs = np.asarray(pairs, dtype=np.int64).reshape(-1, 2)
        if weight is None:
            weight = np.ones(len(pairs))
        forward = np.column_stack([pairs[:, 0], pairs[:, 1], weight])
        backward = np.column_stack([pairs[:, 1], pairs[:, 0], weight])
        return np.vstack([forward, backward])
