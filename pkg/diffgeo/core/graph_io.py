"""
Graph ingestion and canonical dumps
Edge-list TSV, absorbing-set files, point-cloud CSV and canonical JSON
"""

import json
import logging
from pathlib import Path
from typing import FrozenSet, Iterable, Union

import numpy as np
import pandas as pd

from .exceptions import InvalidInputError
from .graph import Graph, build_graph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def read_edge_list(path: PathLike, absorbing: Iterable[int] = (), n: int = None) -> Graph:
    """Read `src<TAB>dst<TAB>weight` lines (comments start with #, ids are 0-based)"""
    try:
        frame = pd.read_csv(
            path, sep='\t', comment='#', header=None,
            names=['src', 'dst', 'weight'], dtype={'src': np.int64, 'dst': np.int64, 'weight': np.float64}
        )
    except (ValueError, pd.errors.ParserError) as e:
        raise InvalidInputError(f"Malformed edge list {path}: {e}") from e

    absorbing = [int(a) for a in absorbing]
    if n is None:
        n = _declared_vertex_count(path)
    if n is None:
        candidates = [-1]
        if len(frame):
            candidates.append(int(frame[['src', 'dst']].to_numpy().max()))
        if absorbing:
            candidates.append(max(absorbing))
        n = max(candidates) + 1

    logger.info(f"Read {len(frame)} edges over {n} vertices from {path}")
    return build_graph(n, frame.to_numpy(dtype=np.float64), absorbing)


def _declared_vertex_count(path: PathLike):
    """Vertex count from a leading `# n=<count>` header, if present"""
    with open(path) as f:
        first = f.readline().strip()
    if first.startswith('# n='):
        try:
            return int(first[4:])
        except ValueError:
            return None
    return None


def write_edge_list(g: Graph, path: PathLike) -> Path:
    """Write the canonical edge list as TSV"""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame = pd.DataFrame(list(g.edges()), columns=['src', 'dst', 'weight'])
    with open(path, 'w') as f:
        f.write(f"# n={g.n}\n")
        frame.to_csv(f, sep='\t', header=False, index=False, float_format='%.17g')
    return path


def read_vertex_set(source: Union[PathLike, str]) -> FrozenSet[int]:
    """
    Read a vertex set: either a file with one id per line or an inline
    comma separated list such as "0,9"
    """
    path = Path(str(source))
    if path.is_file():
        ids = []
        for line in path.read_text().splitlines():
            line = line.split('#', 1)[0].strip()
            if line:
                ids.append(int(line))
        return frozenset(ids)

    text = str(source).strip()
    if not text:
        return frozenset()
    try:
        return frozenset(int(tok) for tok in text.split(',') if tok.strip())
    except ValueError as e:
        raise InvalidInputError(f"Cannot parse vertex set '{source}'") from e


def write_vertex_set(vertices: Iterable[int], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(''.join(f"{int(v)}\n" for v in sorted(vertices)))
    return path


def read_points(path: PathLike) -> np.ndarray:
    """Read a 2-D point cloud stored as CSV `x,y`"""
    frame = pd.read_csv(path, comment='#')
    if list(frame.columns[:2]) != ['x', 'y']:
        frame = pd.read_csv(path, comment='#', header=None, names=['x', 'y'])
    return frame[['x', 'y']].to_numpy(dtype=np.float64)


def graph_to_json(g: Graph) -> str:
    """Canonical JSON dump; floats use repr so the round trip is bit-exact"""
    payload = {
        'n': g.n,
        'row_offsets': g.row_offsets.tolist(),
        'col_indices': g.col_indices.tolist(),
        'weights': g.weights.tolist(),
        'absorbing': sorted(int(a) for a in g.absorbing)
    }
    return json.dumps(payload, sort_keys=True)


def graph_from_json(text: str) -> Graph:
    payload = json.loads(text)
    n = int(payload['n'])
    offsets = payload['row_offsets']
    cols = payload['col_indices']
    weights = payload['weights']
    edges = [
        (i, cols[k], weights[k])
        for i in range(n)
        for k in range(offsets[i], offsets[i + 1])
    ]
    return build_graph(n, edges, payload.get('absorbing', []))
