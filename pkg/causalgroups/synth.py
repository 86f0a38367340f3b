"""
Synthetic data: random DAGs, base samples SD = sigma * F + mu, linear and
nonlinear structural equations, multi-group benchmarks and regime-switch node
series for the early-warning pipeline.
"""
import logging
from dataclasses import dataclass, replace
from typing import List, Optional, Sequence, Tuple

import numpy as np

from causalgroups.errors import DimensionMismatch, DimensionTooSmall
from causalgroups.graph_space import CausalGraph

logger = logging.getLogger(__name__)


@dataclass
class GenConfig:
    """Generation parameters for one group of samples"""
    n: int = 100
    m: int = 10
    edge_prob: float = 0.3
    corr_nonzero: bool = True
    mu_mode: str = "uniform"        # "zero" | "uniform" (U(-4, 4))
    mu_axis: str = "sample"         # "sample": length-n vector; "feature": length-m vector
    nonlinear: bool = False
    noise_scale: float = 0.1
    noise_kind: str = "gaussian"    # "gaussian" | "laplace"
    weight_low: float = 0.5
    weight_high: float = 2.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 4:
            raise DimensionTooSmall(f"n must be >= 4, got {self.n}")
        if self.m < 2:
            raise DimensionTooSmall(f"m must be >= 2, got {self.m}")
        if self.mu_mode not in ("zero", "uniform"):
            raise ValueError(f"unknown mu_mode {self.mu_mode!r}")
        if self.mu_axis not in ("sample", "feature"):
            raise ValueError(f"unknown mu_axis {self.mu_axis!r}")
        if self.noise_kind not in ("gaussian", "laplace"):
            raise ValueError(f"unknown noise_kind {self.noise_kind!r}")
        if self.noise_scale < 0:
            raise ValueError(f"noise_scale must be >= 0, got {self.noise_scale}")


def _random_weight(rng: np.random.Generator, low: float, high: float) -> float:
    return float(rng.uniform(low, high) * rng.choice((-1.0, 1.0)))


def random_dag(
    m: int,
    edge_prob: float,
    seed: int,
    weight_low: float = 0.5,
    weight_high: float = 2.0,
) -> CausalGraph:
    """
    Uniformly random topological order; each forward pair becomes an edge with
    probability ``edge_prob``. Weight magnitudes are U(weight_low, weight_high)
    with a random sign.
    """
    if m < 2:
        raise DimensionTooSmall(f"m must be >= 2, got {m}")
    rng = np.random.default_rng(seed)
    order = rng.permutation(m)

    edges, weights = set(), {}
    for a in range(m):
        for b in range(a + 1, m):
            if rng.random() < edge_prob:
                edge = (int(order[a]), int(order[b]))
                edges.add(edge)
                weights[edge] = _random_weight(rng, weight_low, weight_high)

    logger.debug(f"random DAG m={m}, p={edge_prob}: {len(edges)} edges")
    return CausalGraph(node_count=m, edges=edges, weights=weights)


def chain_dag(m: int, seed: int, weight_low: float = 1.0, weight_high: float = 2.0) -> CausalGraph:
    """X_0 -> X_1 -> ... -> X_{m-1} with random-sign weights"""
    rng = np.random.default_rng(seed)
    edges = [(j, j + 1) for j in range(m - 1)]
    weights = {edge: _random_weight(rng, weight_low, weight_high) for edge in edges}
    return CausalGraph(node_count=m, edges=set(edges), weights=weights)


def empty_dag(m: int) -> CausalGraph:
    return CausalGraph(node_count=m)


def gen_base(config: GenConfig) -> np.ndarray:
    """SD = sigma * F + mu with one sigma ~ U(0.5, 2) and F standard normal"""
    rng = np.random.default_rng(config.seed)
    F = rng.standard_normal((config.n, config.m))
    sigma = rng.uniform(0.5, 2.0)

    if config.mu_mode == "zero":
        return sigma * F
    if config.mu_axis == "sample":
        mu = rng.uniform(-4.0, 4.0, size=(config.n, 1))
    else:
        mu = rng.uniform(-4.0, 4.0, size=(1, config.m))
    return sigma * F + mu


def apply_sem(
    SD,
    G: CausalGraph,
    nonlinear: bool = False,
    noise_scale: float = 0.0,
    seed: Optional[int] = None,
    noise_kind: str = "gaussian",
) -> np.ndarray:
    """
    Add parent contributions in topological order.

    linear:    child += sum_parents w * parent
    nonlinear: child += sum_parents w * tanh(parent) + noise
    """
    data = np.array(SD, dtype=np.float64, copy=True)
    if data.shape[1] != G.node_count:
        raise DimensionMismatch(f"data has {data.shape[1]} columns, graph has {G.node_count} nodes")
    order = G.topological_order()

    rng = np.random.default_rng(seed)
    for node in order:
        parents = G.parents(node)
        if not parents:
            continue
        for parent in parents:
            weight = G.weights[(parent, node)]
            source = np.tanh(data[:, parent]) if nonlinear else data[:, parent]
            data[:, node] += weight * source
        if nonlinear and noise_scale > 0:
            if noise_kind == "laplace":
                noise = rng.laplace(0.0, noise_scale, size=data.shape[0])
            else:
                noise = rng.normal(0.0, noise_scale, size=data.shape[0])
            data[:, node] += noise

    return data


def generate_group(config: GenConfig, G: CausalGraph) -> np.ndarray:
    """Base samples pushed through the structural equations of ``G`` (if correlated)"""
    SD = gen_base(config)
    if not config.corr_nonzero:
        return SD
    return apply_sem(
        SD,
        G,
        nonlinear=config.nonlinear,
        noise_scale=config.noise_scale,
        seed=config.seed + 1,
        noise_kind=config.noise_kind,
    )


def _child_seeds(config: GenConfig, k_groups: int) -> np.ndarray:
    return np.random.SeedSequence(config.seed).generate_state(2 * k_groups)


def group_graphs(k_groups: int, config: GenConfig) -> List[CausalGraph]:
    """The random DAGs ``benchmark_groups`` draws when no graphs are given"""
    if k_groups < 2:
        raise ValueError(f"need at least 2 groups, got {k_groups}")
    child_seeds = _child_seeds(config, k_groups)
    return [
        random_dag(config.m, config.edge_prob, int(child_seeds[2 * g + 1]), config.weight_low, config.weight_high)
        for g in range(k_groups)
    ]


def benchmark_groups(
    k_groups: int,
    config: GenConfig,
    graphs: Optional[Sequence[CausalGraph]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    ``k_groups`` groups of ``config.n`` samples, each from its own DAG.

    Args:
        k_groups: number of groups (>= 2)
        config: shared generation parameters; per-group seeds are spawned from config.seed
        graphs: optional explicit DAGs, one per group; ``group_graphs`` otherwise

    Returns:
        (samples of shape (k_groups * n, m), integer group labels)
    """
    if k_groups < 2:
        raise ValueError(f"need at least 2 groups, got {k_groups}")
    if graphs is None:
        graphs = group_graphs(k_groups, config)
    elif len(graphs) != k_groups:
        raise ValueError(f"got {len(graphs)} graphs for {k_groups} groups")

    child_seeds = _child_seeds(config, k_groups)
    blocks: List[np.ndarray] = []
    for g in range(k_groups):
        group_config = replace(config, seed=int(child_seeds[2 * g]))
        blocks.append(generate_group(group_config, graphs[g]))

    labels = np.repeat(np.arange(k_groups), config.n)
    logger.info(f"Generated {k_groups} groups x {config.n} samples, m={config.m}")
    return np.vstack(blocks), labels


def two_dag_graphs(config: GenConfig) -> List[CausalGraph]:
    """Chain DAG (|w| in [weight_low, weight_high]) and the empty DAG"""
    return [chain_dag(config.m, config.seed, config.weight_low, config.weight_high), empty_dag(config.m)]


def two_dag_benchmark(config: GenConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Chain DAG against the empty DAG"""
    return benchmark_groups(2, config, graphs=two_dag_graphs(config))


@dataclass
class RegimeSeries:
    """Daily node series for two regions plus the coupling ground truth"""
    west: np.ndarray          # (n_west, T)
    east: np.ndarray          # (n_east, T)
    years: np.ndarray         # (T,) year label per time step
    switch_year: int
    lag: int
    end_year: int             # first year after the coupling episode


def regime_switch_series(
    n_years: int = 10,
    switch_year: int = 5,
    days_per_year: int = 120,
    n_west: int = 2,
    n_east: int = 2,
    lag: int = 10,
    coupling: float = 1.5,
    ar: float = 0.7,
    noise_scale: float = 0.3,
    episode_years: Optional[int] = 1,
    seed: int = 0,
) -> RegimeSeries:
    """
    West nodes are AR(1) processes. East nodes are independent AR(1) processes
    outside the coupling episode; during it each east node also follows tanh of
    a west node ``lag`` steps earlier.

    The episode starts at ``switch_year`` and lasts ``episode_years`` years
    (``None``: until the end of the series). Years are numbered 0..n_years-1.
    """
    if not 0 <= switch_year < n_years:
        raise ValueError(f"switch_year must lie in [0, {n_years}), got {switch_year}")
    if episode_years is not None and episode_years < 1:
        raise ValueError(f"episode_years must be >= 1, got {episode_years}")
    rng = np.random.default_rng(seed)
    T = n_years * days_per_year
    years = np.repeat(np.arange(n_years), days_per_year)

    def ar_process(count: int) -> np.ndarray:
        out = np.zeros((count, T))
        shocks = rng.standard_normal((count, T))
        for t in range(1, T):
            out[:, t] = ar * out[:, t - 1] + shocks[:, t]
        return out

    west = ar_process(n_west)
    east = ar_process(n_east) * noise_scale
    end_year = n_years if episode_years is None else switch_year + episode_years
    coupled = (years >= switch_year) & (years < end_year)
    for e in range(n_east):
        source = west[e % n_west]
        lagged = np.concatenate([np.zeros(lag), source[:-lag]]) if lag > 0 else source
        east[e, coupled] += coupling * np.tanh(lagged[coupled])

    return RegimeSeries(
        west=west,
        east=east,
        years=years,
        switch_year=switch_year,
        lag=lag,
        end_year=min(end_year, n_years),
    )
