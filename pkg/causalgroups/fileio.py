"""
CSV and JSON-lines readers/writers used by the command-line interface.

All tables are UTF-8 CSV with a '.' decimal separator; numbers are written with
``settings.float_format``.
"""
import json
import logging
from pathlib import Path
from typing import Dict, Iterable, List, Optional, TextIO, Union

import numpy as np
import pandas as pd

from config import settings
from causalgroups.early_warning import NodeSeriesSet
from causalgroups.errors import DimensionMismatch, ParseError, TooFewRows
from causalgroups.graph_space import CausalGraph

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]


def format_number(value: float) -> float:
    """Round to the configured number of significant digits"""
    return float(settings.float_format % value)


def _numeric_frame(path: PathLike) -> pd.DataFrame:
    """
    Read a headered CSV and convert every cell to float.

    Raises:
        ParseError: with the 1-based data row and column of the first bad cell
    """
    raw = pd.read_csv(path, dtype=str, keep_default_na=False, skipinitialspace=True)
    converted = raw.apply(pd.to_numeric, errors="coerce")
    bad = converted.isna().to_numpy() | ~np.isfinite(converted.to_numpy(dtype=np.float64))
    if bad.any():
        row, col = (int(v) for v in np.argwhere(bad)[0])
        raise ParseError(row + 1, col + 1, raw.iat[row, col], path=str(path))
    return converted.astype(np.float64)


def load_samples_csv(path: PathLike, min_rows: int = 4, min_cols: int = 2) -> np.ndarray:
    """Sample matrix from a CSV with one header row; column order preserved"""
    frame = _numeric_frame(path)
    if frame.shape[0] < min_rows:
        raise TooFewRows(f"{path}: need at least {min_rows} rows, got {frame.shape[0]}")
    if frame.shape[1] < min_cols:
        raise DimensionMismatch(f"{path}: need at least {min_cols} columns, got {frame.shape[1]}")
    logger.info(f"Loaded {frame.shape[0]}x{frame.shape[1]} samples from {path}")
    return frame.to_numpy()


def load_feature_table(path: PathLike, target: str) -> tuple:
    """(features, target vector, feature names) from a CSV holding a named target column"""
    frame = _numeric_frame(path)
    if target not in frame.columns:
        raise DimensionMismatch(f"{path}: no target column {target!r}")
    features = frame.drop(columns=[target])
    return features.to_numpy(), frame[target].to_numpy(), list(features.columns)


def write_samples_csv(path: PathLike, S) -> None:
    S = np.asarray(S, dtype=np.float64)
    columns = [f"x{j + 1}" for j in range(S.shape[1])]
    pd.DataFrame(S, columns=columns).to_csv(path, index=False, float_format=settings.float_format)


def write_labels_csv(path: PathLike, labels) -> None:
    pd.DataFrame({"label": np.asarray(labels, dtype=np.int64)}).to_csv(path, index=False)


def load_labels_csv(path: PathLike) -> np.ndarray:
    frame = pd.read_csv(path)
    if "label" not in frame.columns:
        raise DimensionMismatch(f"{path}: expected a 'label' column, got {list(frame.columns)}")
    return frame["label"].to_numpy()


def write_kernel_csv(path: PathLike, K) -> None:
    """n header-less rows"""
    pd.DataFrame(np.asarray(K, dtype=np.float64)).to_csv(
        path, index=False, header=False, float_format=settings.float_format
    )


def write_edges_csv(path: PathLike, G: CausalGraph) -> None:
    rows = [(parent, child, G.weights[(parent, child)]) for parent, child in sorted(G.edges)]
    pd.DataFrame(rows, columns=["parent", "child", "weight"]).to_csv(
        path, index=False, float_format=settings.float_format
    )


def load_edges_csv(path: PathLike, node_count: Optional[int] = None, is_dag: bool = True) -> CausalGraph:
    """
    Graph from a ``parent,child,weight`` edge list (weight optional).

    Without ``node_count`` the graph spans 0..max node index.
    """
    frame = pd.read_csv(path)
    missing = {"parent", "child"} - set(frame.columns)
    if missing:
        raise DimensionMismatch(f"{path}: missing columns {sorted(missing)}")
    if "weight" not in frame.columns:
        frame["weight"] = 1.0
    edges = list(frame[["parent", "child", "weight"]].itertuples(index=False, name=None))
    if node_count is None:
        node_count = int(frame[["parent", "child"]].to_numpy().max()) + 1 if edges else 0
    return CausalGraph.from_edges(node_count, edges, is_dag=is_dag)


def load_node_series_csv(path: PathLike) -> Dict[str, NodeSeriesSet]:
    """
    Long-format ``node_id,group,date,value`` table pivoted into one
    NodeSeriesSet per group on the union of dates.
    """
    frame = pd.read_csv(path, dtype={"node_id": str, "group": str})
    missing = {"node_id", "group", "date", "value"} - set(frame.columns)
    if missing:
        raise DimensionMismatch(f"{path}: missing columns {sorted(missing)}")
    frame["date"] = pd.to_datetime(frame["date"])
    dates = pd.DatetimeIndex(sorted(frame["date"].unique()))

    sets = {}
    for group, block in frame.groupby("group", sort=True):
        wide = block.pivot_table(index="date", columns="node_id", values="value", aggfunc="mean")
        wide = wide.reindex(dates)
        sets[group] = NodeSeriesSet(
            group=group,
            node_ids=list(wide.columns),
            values=wide.to_numpy().T,
            years=dates.year.to_numpy(),
        )
        logger.info(f"Group {group!r}: {wide.shape[1]} nodes over {wide.shape[0]} days")
    return sets


def write_node_series_csv(path: PathLike, groups: Iterable[NodeSeriesSet], dates) -> None:
    """Inverse of load_node_series_csv; ``dates`` holds one date per time step"""
    dates = pd.DatetimeIndex(dates)
    rows = []
    for series_set in groups:
        if series_set.length != len(dates):
            raise DimensionMismatch(f"{len(dates)} dates for series of length {series_set.length}")
        for node_id, values in zip(series_set.node_ids, series_set.values):
            rows.append(pd.DataFrame({"node_id": node_id, "group": series_set.group, "date": dates, "value": values}))
    pd.concat(rows).to_csv(path, index=False, date_format="%Y-%m-%d", float_format=settings.float_format)


def load_event_years_csv(path: PathLike) -> List[int]:
    frame = pd.read_csv(path)
    if "year" not in frame.columns:
        raise DimensionMismatch(f"{path}: expected a 'year' column")
    return [int(year) for year in frame["year"]]


def _plain(value):
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (float, np.floating)):
        return None if np.isnan(value) else format_number(float(value))
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, np.ndarray):
        return [_plain(v) for v in value.tolist()]
    if isinstance(value, dict):
        return {str(k): _plain(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_plain(v) for v in value]
    return value


def write_json_lines(stream: TextIO, records: Iterable[dict]) -> None:
    """One JSON object per line; floats rounded to the configured precision"""
    for record in records:
        stream.write(json.dumps(_plain(record), sort_keys=False) + "\n")
