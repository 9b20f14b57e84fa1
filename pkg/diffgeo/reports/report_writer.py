"""
Report output for DiffGeo
Stable JSON documents and CSV tables for plotting
"""

import json
import logging
from enum import Enum
from pathlib import Path
from typing import Any, Dict, Iterable, Optional, Union

import numpy as np
import pandas as pd

from ..utils.helpers import finite_or_none

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]
# Keys left out when comparing two runs of the same configuration
VOLATILE_KEYS = ('runtime',)


def to_plain(value: Any) -> Any:
    """Convert numpy/pandas/enum values into JSON-ready Python values; non-finite floats become None"""
    if isinstance(value, dict):
        return {str(k): to_plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [to_plain(v) for v in value]
    if isinstance(value, (set, frozenset)):
        return [to_plain(v) for v in sorted(value)]
    if isinstance(value, np.ndarray):
        return [to_plain(v) for v in value.tolist()]
    if isinstance(value, pd.DataFrame):
        return [to_plain(r) for r in value.to_dict(orient='records')]
    if isinstance(value, Enum):
        return value.value
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return finite_or_none(value)
    if isinstance(value, Path):
        return str(value)
    return value


def dumps(document: Dict[str, Any]) -> str:
    """Deterministic JSON text: sorted keys, indent 2, no NaN/Infinity"""
    return json.dumps(to_plain(document), sort_keys=True, indent=2, allow_nan=False)


def strip_volatile(document: Dict[str, Any], keys: Iterable[str] = VOLATILE_KEYS) -> Dict[str, Any]:
    """Copy of a report without timing fields"""
    return {k: v for k, v in document.items() if k not in set(keys)}


def write_json(document: Dict[str, Any], path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(document) + '\n')
    logger.info(f"Wrote {path}")
    return path


def write_csv(frame: pd.DataFrame, path: PathLike) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frame.to_csv(path, index=False, float_format='%.17g')
    logger.info(f"Wrote {path} ({len(frame)} rows)")
    return path


def write_table(frame: pd.DataFrame, path: PathLike, fmt: str = 'csv',
                header: Optional[Dict[str, Any]] = None) -> Path:
    """
    Write a per-vertex table as CSV, or as JSON {header..., rows: [...]}.
    The CSV form puts the header into a sibling .json file.
    """
    path = Path(path)
    if fmt == 'json':
        document = dict(header or {})
        document['rows'] = frame
        return write_json(document, path.with_suffix('.json'))
    written = write_csv(frame, path.with_suffix('.csv'))
    if header:
        write_json(header, path.with_name(path.stem + '_header.json'))
    return written


def write_experiment(report: Dict[str, Any], frames: Dict[str, pd.DataFrame], out_dir: PathLike) -> Path:
    """Write `<name>.json` plus one CSV per table into out_dir"""
    out_dir = Path(out_dir)
    name = report.get('config', {}).get('preset', 'experiment')
    for table, frame in frames.items():
        write_csv(frame, out_dir / f"{name}_{table}.csv")
    return write_json(report, out_dir / f"{name}.json")
