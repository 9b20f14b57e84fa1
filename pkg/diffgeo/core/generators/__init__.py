"""
Graph generators module
One constructor per graph family, plus GenSpec dispatch
"""

import inspect
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Optional, Type

from ..exceptions import InvalidInputError, UnsupportedFamily
from ..graph import Graph
from .base_generator import BaseGraphGenerator
from .path_generator import PathGenerator, gen_path
from .cycle_generator import CycleGenerator, CyclePlusBoundaryGenerator, gen_cycle, gen_cycle_plus_boundary
from .complete_generator import (
    CompleteGenerator, CompleteAbsorbingGenerator, TwoCompleteBridgeGenerator,
    gen_complete, gen_complete_absorbing, gen_two_complete_bridge
)
from .small_world_generator import SmallWorldRingGenerator, gen_small_world_ring
from .knn_generator import KnnPointCloudGenerator, gen_knn_point_cloud, in_dumbbell, sample_dumbbell

SEED_LIMIT = 2 ** 64


class GraphFamily(Enum):
    """Graph families with a registered generator"""
    PATH = "path"
    CYCLE = "cycle"
    COMPLETE = "complete"
    COMPLETE_ABSORBING = "complete_absorbing"
    CYCLE_PLUS_BOUNDARY = "cycle_plus_boundary"
    TWO_COMPLETE_BRIDGE = "two_complete_bridge"
    SMALL_WORLD_RING = "small_world_ring"
    KNN_POINT_CLOUD = "knn_point_cloud"


GENERATORS: Dict[GraphFamily, Type[BaseGraphGenerator]] = {
    GraphFamily.PATH: PathGenerator,
    GraphFamily.CYCLE: CycleGenerator,
    GraphFamily.COMPLETE: CompleteGenerator,
    GraphFamily.COMPLETE_ABSORBING: CompleteAbsorbingGenerator,
    GraphFamily.CYCLE_PLUS_BOUNDARY: CyclePlusBoundaryGenerator,
    GraphFamily.TWO_COMPLETE_BRIDGE: TwoCompleteBridgeGenerator,
    GraphFamily.SMALL_WORLD_RING: SmallWorldRingGenerator,
    GraphFamily.KNN_POINT_CLOUD: KnnPointCloudGenerator,
}


def parse_family(name) -> GraphFamily:
    if isinstance(name, GraphFamily):
        return name
    try:
        return GraphFamily(str(name).strip().lower().replace('-', '_'))
    except ValueError as e:
        known = ', '.join(f.value for f in GraphFamily)
        raise UnsupportedFamily(f"Unknown graph family '{name}' (known: {known})") from e


@dataclass(frozen=True)
class GenSpec:
    """A family name, its size parameters and, for randomized families, a seed"""
    family: GraphFamily
    params: Dict[str, Any] = field(default_factory=dict)
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, 'family', parse_family(self.family))
        generator_cls = GENERATORS[self.family]

        for key, value in self.params.items():
            if isinstance(value, bool) or not isinstance(value, (int, float)) or not value > 0:
                # a chord-free small world is still a valid ring
                if not (key == 'expected_extra_edges' and value == 0):
                    raise InvalidInputError(f"Parameter {key}={value!r} must be a positive number")

        if generator_cls.randomized:
            if self.seed is None:
                raise InvalidInputError(f"Family {self.family.value} requires a seed")
            if int(self.seed) != self.seed or not 0 <= self.seed < SEED_LIMIT:
                raise InvalidInputError(f"Seed {self.seed} must be an unsigned 64-bit integer")
        elif self.seed is not None:
            raise InvalidInputError(f"Family {self.family.value} is deterministic and takes no seed")

    def to_dict(self) -> Dict[str, Any]:
        return {'family': self.family.value, 'params': dict(self.params), 'seed': self.seed}


def generate(spec: GenSpec) -> Graph:
    """Build the graph described by spec"""
    generator = GENERATORS[spec.family]()
    params = dict(spec.params)
    if generator.randomized:
        params['seed'] = int(spec.seed)

    accepted = inspect.signature(generator.generate).parameters
    unknown = sorted(set(params) - set(accepted))
    missing = sorted(
        name for name, p in accepted.items()
        if p.default is inspect.Parameter.empty and name not in params
    )
    if unknown or missing:
        raise InvalidInputError(
            f"Family {spec.family.value}: unknown parameters {unknown}, missing parameters {missing}"
        )
    return generator.generate(**params)


__all__ = [
    'BaseGraphGenerator',
    'GraphFamily',
    'GenSpec',
    'GENERATORS',
    'generate',
    'parse_family',
    'gen_path',
    'gen_cycle',
    'gen_complete',
    'gen_complete_absorbing',
    'gen_cycle_plus_boundary',
    'gen_two_complete_bridge',
    'gen_small_world_ring',
    'gen_knn_point_cloud',
    'sample_dumbbell',
    'in_dumbbell',
]
