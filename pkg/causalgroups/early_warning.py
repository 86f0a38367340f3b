"""
Lagged causal-kernel coupling between two node groups over time and yearly
early-warning extraction.

A univariate window is turned into a sample matrix by delay embedding; the
row-wise mapping matrices of that matrix are averaged into one mapping matrix
per window, and windows are compared with the cosine/Frobenius kernel.
"""
import logging
from dataclasses import dataclass, field
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Set, Tuple

import numpy as np
import pandas as pd
from numpy.lib.stride_tricks import sliding_window_view

from config import settings
from causalgroups.causal_kernel import kappa
from causalgroups.causal_mapping import mapping_matrices
from causalgroups.errors import (
    DimensionMismatch,
    EmptyInput,
    NonFiniteInput,
    TooFewEmbeddedSamples,
    TooFewYears,
    WindowOutOfRange,
    ZeroVariance,
)
from causalgroups.eval_metrics import ConfusionCounts

logger = logging.getLogger(__name__)


@dataclass
class NodeSeriesSet:
    """Daily series of every node in one region, on a shared time index"""
    group: str
    node_ids: List[Hashable]
    values: np.ndarray          # (nodes, T)
    years: np.ndarray           # (T,)

    def __post_init__(self):
        self.values = np.atleast_2d(np.asarray(self.values, dtype=np.float64))
        self.years = np.asarray(self.years)
        if len(self.node_ids) != self.values.shape[0]:
            raise DimensionMismatch(f"{len(self.node_ids)} node ids for {self.values.shape[0]} series")
        if self.years.shape != (self.values.shape[1],):
            raise DimensionMismatch(f"year index has length {self.years.size}, series have {self.values.shape[1]}")
        if not np.all(np.isfinite(self.values)):
            raise NonFiniteInput(f"group {self.group!r} has missing or non-finite values")
        if self.values.shape[0] == 0:
            raise EmptyInput(f"group {self.group!r} has no nodes")

    @property
    def length(self) -> int:
        return self.values.shape[1]


@dataclass
class WarnConfig:
    window_w: int = 60
    embed_dim: int = 4
    max_lag: int = 100
    nu: float = 0.05
    tau: float = 1.0
    stride: int = 10
    time_stride: int = 5

    def __post_init__(self):
        if self.embed_dim < 2:
            raise ValueError(f"embed_dim must be >= 2, got {self.embed_dim}")
        if self.window_w < self.embed_dim + 3:
            raise ValueError(f"window_w must be >= embed_dim + 3 = {self.embed_dim + 3}, got {self.window_w}")
        if self.max_lag < 0:
            raise ValueError(f"max_lag must be >= 0, got {self.max_lag}")
        if self.stride < 1 or self.time_stride < 1:
            raise ValueError("strides must be >= 1")

    @classmethod
    def from_settings(cls) -> "WarnConfig":
        return cls(
            window_w=settings.window_w,
            embed_dim=settings.embed_dim,
            max_lag=settings.max_lag,
            nu=settings.nu,
            tau=settings.tau,
            stride=settings.lag_stride,
            time_stride=settings.time_stride,
        )

    @property
    def lags(self) -> range:
        return range(0, self.max_lag + 1, self.stride)

    @property
    def first_time(self) -> int:
        """Earliest window end for which every lag fits"""
        return self.window_w + self.lags[-1]


def window_embed(series, t_end: int, window_w: int, embed_dim: int) -> np.ndarray:
    """
    Delay-embed the window series[t_end - window_w : t_end].

    Rows are the window_w - embed_dim + 1 consecutive length-embed_dim
    subwindows.
    """
    series = np.asarray(series, dtype=np.float64).ravel()
    if window_w - embed_dim + 1 < 4:
        raise TooFewEmbeddedSamples(f"window {window_w} with embedding {embed_dim} yields fewer than 4 rows")
    start = t_end - window_w
    if start < 0 or t_end > series.size:
        raise WindowOutOfRange(f"window [{start}, {t_end}) outside series of length {series.size}")
    return sliding_window_view(series[start:t_end], embed_dim)


def window_mapping(series, t_end: int, config: WarnConfig) -> np.ndarray:
    """Average of the row-wise mapping matrices of one embedded window"""
    embedded = window_embed(series, t_end, config.window_w, config.embed_dim)
    matrices = mapping_matrices(embedded, config.nu)
    total = np.zeros_like(matrices[0].data)
    for matrix in matrices:
        total += matrix.data
    return total / len(matrices)


@dataclass
class WindowMappingCache:
    """Memoizes window mapping matrices keyed by (series key, window end)"""
    config: WarnConfig
    entries: Dict[Tuple[Hashable, int], np.ndarray] = field(default_factory=dict)
    hits: int = 0
    misses: int = 0

    def get(self, key: Hashable, series, t_end: int) -> np.ndarray:
        entry = self.entries.get((key, t_end))
        if entry is not None:
            self.hits += 1
            return entry
        self.misses += 1
        entry = window_mapping(series, t_end, self.config)
        self.entries[(key, t_end)] = entry
        return entry

    def get_stats(self) -> dict:
        return {"entries": len(self.entries), "hits": self.hits, "misses": self.misses}


def lagged_kappa(
    i_series,
    j_series,
    t: int,
    theta: int,
    config: WarnConfig,
    cache: Optional[WindowMappingCache] = None,
    keys: Optional[Tuple[Hashable, Hashable]] = None,
) -> Tuple[float, float]:
    """
    (kappa(theta), kappa(-theta)) for windows ending at ``t`` (exclusive).

    forward:  i's window ending at t - theta against j's window ending at t
    backward: i's window ending at t against j's window ending at t - theta

    A shared ``cache`` is keyed by ``keys``, which must then name the two series.
    """
    if theta < 0:
        raise WindowOutOfRange(f"lag must be non-negative, got {theta}")
    if cache is None:
        cache = WindowMappingCache(config)
        keys = keys or ("i", "j")
    elif keys is None:
        raise ValueError("a shared window cache needs explicit series keys")
    key_i, key_j = keys
    if key_i == key_j and i_series is not j_series:
        key_i, key_j = (key_i, "i"), (key_j, "j")

    i_now = cache.get(key_i, i_series, t)
    j_now = cache.get(key_j, j_series, t)
    i_lagged = cache.get(key_i, i_series, t - theta)
    j_lagged = cache.get(key_j, j_series, t - theta)
    return kappa(i_lagged, j_now), kappa(i_now, j_lagged)


def total_causal(
    west: NodeSeriesSet,
    east: NodeSeriesSet,
    t: int,
    config: WarnConfig,
    cache: Optional[WindowMappingCache] = None,
) -> float:
    """TC(t): sum over west/east node pairs and the lag grid of kappa(theta) + kappa(-theta)"""
    if west.length != east.length:
        raise DimensionMismatch(f"groups have different lengths: {west.length} vs {east.length}")
    cache = cache or WindowMappingCache(config)

    total = 0.0
    for wi, w_id in enumerate(west.node_ids):
        for ej, e_id in enumerate(east.node_ids):
            for theta in config.lags:
                forward, backward = lagged_kappa(
                    west.values[wi],
                    east.values[ej],
                    t,
                    theta,
                    config,
                    cache=cache,
                    keys=((west.group, w_id), (east.group, e_id)),
                )
                total += forward + backward
    return total


def tc_series(
    west: NodeSeriesSet,
    east: NodeSeriesSet,
    config: WarnConfig,
    times: Optional[Iterable[int]] = None,
) -> pd.DataFrame:
    """
    TC(t) on a grid of window ends.

    Returns:
        DataFrame with columns ``t``, ``year`` (year of the last day in the
        window) and ``tc``
    """
    if times is None:
        times = range(config.first_time, west.length + 1, config.time_stride)
    times = list(times)
    if not times:
        raise WindowOutOfRange(
            f"series of length {west.length} too short for window {config.window_w} and lag {config.max_lag}"
        )

    cache = WindowMappingCache(config)
    rows = []
    for t in times:
        rows.append({"t": t, "year": west.years[t - 1], "tc": total_causal(west, east, t, config, cache)})
    logger.info(f"Computed TC at {len(times)} time points; window cache {cache.get_stats()}")
    return pd.DataFrame(rows)


def yearly_causal(tc, years, complete_only: bool = True) -> pd.Series:
    """
    YC(y) = sum of TC(t) over the year, z-standardized across years (population sd).

    With ``complete_only`` a year is kept only when it holds as many TC points
    as the best covered year; the first and last years of a grid are often cut
    short by the window and lag reach.
    """
    tc = np.asarray(tc, dtype=np.float64).ravel()
    years = np.asarray(years).ravel()
    if tc.shape != years.shape:
        raise DimensionMismatch(f"{tc.size} TC values for {years.size} year labels")

    grouped = pd.Series(tc).groupby(years)
    yc = grouped.sum()
    if complete_only:
        counts = grouped.size()
        partial = counts.index[counts < counts.max()]
        if len(partial):
            logger.warning(f"Dropping partially covered years {list(partial)} from yearly totals")
            yc = yc.drop(partial)
    if yc.size < 2:
        raise TooFewYears(f"need at least 2 distinct years, got {yc.size}")

    sd = float(np.std(yc.to_numpy()))
    if sd <= 1e-12 * max(1.0, float(np.max(np.abs(yc.to_numpy())))):
        raise ZeroVariance("yearly totals are constant")
    return (yc - yc.mean()) / sd


def extract_warnings(yc_z, tau: float) -> Set:
    """
    Years y + 1 for which YC_z changes sign at y and |YC_z(y)| is a local
    maximum of |YC_z| that reaches ``tau``.

    Accepts a Series indexed by year or a plain sequence (years = positions).
    """
    if not isinstance(yc_z, pd.Series):
        yc_z = pd.Series(np.asarray(yc_z, dtype=np.float64))
    if yc_z.size < 3:
        raise TooFewYears(f"need at least 3 years, got {yc_z.size}")

    values = yc_z.to_numpy(dtype=np.float64)
    years = list(yc_z.index)
    magnitude = np.abs(values)
    signs = np.sign(values)

    warned = set()
    for pos in range(1, values.size):
        if signs[pos] == signs[pos - 1]:
            continue
        if magnitude[pos] < tau:
            continue
        if magnitude[pos] < magnitude[pos - 1]:
            continue
        if pos + 1 < values.size and magnitude[pos] < magnitude[pos + 1]:
            continue
        warned.add(years[pos] + 1)
    return warned


def warning_confusion(
    warned: Set,
    event_years: Iterable,
    candidate_years: Sequence,
) -> ConfusionCounts:
    """Score warned years against ground-truth event years over the candidate years"""
    events = set(event_years)
    tp = tn = fp = fn = 0
    for year in candidate_years:
        predicted = year in warned
        actual = year in events
        if predicted and actual:
            tp += 1
        elif predicted:
            fp += 1
        elif actual:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)


def run_early_warning(west: NodeSeriesSet, east: NodeSeriesSet, config: WarnConfig) -> pd.DataFrame:
    """
    Full pipeline: TC grid -> standardized YC -> warnings.

    Returns:
        DataFrame with ``year``, ``yc_z`` and ``warned`` (a warning was issued
        for that year), one row per year with a YC value plus the year after
        the last one.
    """
    tc = tc_series(west, east, config)
    yc_z = yearly_causal(tc["tc"], tc["year"])
    warned = extract_warnings(yc_z, config.tau)

    years = list(yc_z.index) + [yc_z.index[-1] + 1]
    frame = pd.DataFrame(
        {
            "year": years,
            "yc_z": list(yc_z.to_numpy()) + [np.nan],
            "warned": [year in warned for year in years],
        }
    )
    logger.info(f"Early warning: {len(warned)} warned years out of {len(years)}")
    return frame
