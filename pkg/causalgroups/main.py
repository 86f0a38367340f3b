"""
Command-line entry point.

Subcommands: gen, cluster, kernel, decide, graph, metrics, earlywarn, stability.
Data goes to files or stdout; logs and error records go to stderr.
"""
import argparse
import contextlib
import json
import logging
import sys
from dataclasses import dataclass, field, fields
from itertools import combinations
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import pandas as pd

from config import settings
from causalgroups.causal_kernel import kernel_matrix
from causalgroups.causal_mapping import aggregate_phi, dependence_decision
from causalgroups.clustering import baseline_kernel, cluster_pipeline, kernel_kmeans, raw_kmeans
from causalgroups.early_warning import NodeSeriesSet, WarnConfig, run_early_warning, warning_confusion
from causalgroups.errors import CausalGroupsError, IndexOutOfRange
from causalgroups.eval_metrics import ConfusionCounts, adjusted_rand_index, confusion_metrics, v_measure
from causalgroups.fileio import (
    load_edges_csv,
    load_event_years_csv,
    load_feature_table,
    load_labels_csv,
    load_node_series_csv,
    load_samples_csv,
    write_json_lines,
    write_kernel_csv,
    write_labels_csv,
    write_edges_csv,
    write_node_series_csv,
    write_samples_csv,
)
from causalgroups.graph_space import graph_sign_agreement, graphs_equivalent, longest_path_lengths, m_connectivity
from causalgroups.stability import rank_features, sta_error_eval
from causalgroups.synth import GenConfig, benchmark_groups, group_graphs, regime_switch_series, two_dag_graphs

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_USER_ERROR = 2

CALENDAR_START_YEAR = 2000


def regime_calendar(years) -> pd.DatetimeIndex:
    """Model year y maps to calendar year CALENDAR_START_YEAR + y, days counted from 1 January"""
    years = np.asarray(years)
    starts = np.flatnonzero(np.r_[True, years[1:] != years[:-1]])
    day = np.arange(years.size) - np.repeat(starts, np.diff(np.r_[starts, years.size]))
    first_days = pd.to_datetime([f"{CALENDAR_START_YEAR + int(y)}-01-01" for y in years])
    return first_days + pd.to_timedelta(day, unit="D")


@dataclass
class RunConfig:
    """Parsed command line; unset optional values fall back to ``settings``"""
    command: str
    input: Optional[str] = None
    output: Optional[str] = None
    labels: Optional[str] = None
    k: Optional[int] = None
    nu: Optional[float] = None
    seed: Optional[int] = None
    max_iter: Optional[int] = None
    # gen
    kind: str = "two-dag"
    k_groups: int = 2
    n: int = 50
    m: int = 5
    edge_prob: float = 0.3
    nonlinear: bool = False
    mu_mode: str = "uniform"
    noise_kind: str = "gaussian"
    edges: Optional[str] = None
    # cluster
    kernel: str = "causal"
    # decide
    pairs: List[str] = field(default_factory=list)
    # graph
    compare: Optional[str] = None
    node_count: Optional[int] = None
    m_len: Optional[int] = None
    samples: Optional[str] = None
    # metrics
    true_labels: Optional[str] = None
    pred_labels: Optional[str] = None
    confusion: Optional[str] = None
    # earlywarn
    west: str = "west"
    east: str = "east"
    events: Optional[str] = None
    window_w: Optional[int] = None
    embed_dim: Optional[int] = None
    max_lag: Optional[int] = None
    lag_stride: Optional[int] = None
    time_stride: Optional[int] = None
    tau: Optional[float] = None
    # stability
    target: str = "y"
    top_k: Optional[int] = None

    def __post_init__(self):
        self.nu = settings.nu if self.nu is None else self.nu
        self.seed = settings.seed if self.seed is None else self.seed
        self.max_iter = settings.max_iter if self.max_iter is None else self.max_iter
        self.k = settings.k if self.k is None else self.k
        self.top_k = settings.top_k if self.top_k is None else self.top_k
        if not 0.0 < self.nu < 1.0:
            raise ValueError(f"nu must lie in (0, 1), got {self.nu}")

    @classmethod
    def from_namespace(cls, namespace: argparse.Namespace) -> "RunConfig":
        known = {f.name for f in fields(cls)}
        return cls(**{key: value for key, value in vars(namespace).items() if key in known})

    def warn_config(self) -> WarnConfig:
        defaults = WarnConfig.from_settings()
        return WarnConfig(
            window_w=self.window_w or defaults.window_w,
            embed_dim=self.embed_dim or defaults.embed_dim,
            max_lag=defaults.max_lag if self.max_lag is None else self.max_lag,
            nu=self.nu,
            tau=defaults.tau if self.tau is None else self.tau,
            stride=self.lag_stride or defaults.stride,
            time_stride=self.time_stride or defaults.time_stride,
        )


@contextlib.contextmanager
def _output(path: Optional[str]):
    if path is None or path == "-":
        yield sys.stdout
    else:
        with open(path, "w", encoding="utf-8", newline="") as stream:
            yield stream


def _require(value, flag: str):
    if value is None:
        raise ValueError(f"{flag} is required")
    return value


def _cmd_gen(config: RunConfig) -> None:
    gen = GenConfig(
        n=config.n,
        m=config.m,
        edge_prob=config.edge_prob,
        mu_mode=config.mu_mode,
        nonlinear=config.nonlinear,
        noise_kind=config.noise_kind,
        seed=config.seed,
    )
    output = _require(config.output, "--out")
    if config.kind == "regime":
        series = regime_switch_series(seed=config.seed)
        groups = [
            NodeSeriesSet("east", [f"e{i}" for i in range(series.east.shape[0])], series.east, series.years),
            NodeSeriesSet("west", [f"w{i}" for i in range(series.west.shape[0])], series.west, series.years),
        ]
        write_node_series_csv(output, groups, regime_calendar(series.years))
        if config.labels:
            first = CALENDAR_START_YEAR + series.switch_year
            pd.DataFrame({"year": [first, first + 1]}).to_csv(config.labels, index=False)
        return

    if config.kind == "two-dag":
        graphs = two_dag_graphs(gen)
    else:
        graphs = group_graphs(config.k_groups, gen)
    S, labels = benchmark_groups(len(graphs), gen, graphs=graphs)
    write_samples_csv(output, S)
    if config.labels:
        write_labels_csv(config.labels, labels)
    if config.edges:
        directory = Path(config.edges)
        directory.mkdir(parents=True, exist_ok=True)
        for g, G in enumerate(graphs):
            write_edges_csv(directory / f"group_{g}.csv", G)
        logger.info(f"Wrote {len(graphs)} generating graphs to {directory}")


def _cmd_cluster(config: RunConfig) -> None:
    S = load_samples_csv(_require(config.input, "--input"))
    if config.kernel == "causal":
        assignment = cluster_pipeline(S, config.k, nu=config.nu, seed=config.seed, max_iter=config.max_iter)
        labels = assignment.labels
        logger.info(f"Clustering stats: {assignment.get_stats()}")
    elif config.kernel == "raw":
        labels = raw_kmeans(S, config.k, seed=config.seed)
    else:
        K = baseline_kernel(S, config.kernel)
        labels = kernel_kmeans(K, config.k, seed=config.seed, max_iter=config.max_iter).labels
    with _output(config.output) as stream:
        write_labels_csv(stream, labels)


def _cmd_kernel(config: RunConfig) -> None:
    S = load_samples_csv(_require(config.input, "--input"))
    K = kernel_matrix(S, config.nu)
    with _output(config.output) as stream:
        write_kernel_csv(stream, K.data)


def _parse_pair(text: str) -> tuple:
    try:
        p, q = (int(part) for part in text.split(","))
    except ValueError:
        raise IndexOutOfRange(f"pair {text!r} is not of the form p,q")
    return p, q


def _cmd_decide(config: RunConfig) -> None:
    S = load_samples_csv(_require(config.input, "--input"))
    m = S.shape[1]
    pairs = [_parse_pair(text) for text in config.pairs] or list(combinations(range(m), 2))
    aggregate = aggregate_phi(S, config.nu)
    records = []
    for p, q in pairs:
        decision = dependence_decision(S, p, q, config.nu, aggregate=aggregate)
        records.append({"p": p, "q": q, "aggregate": float(aggregate[p, q]), "decision": decision.value})
    with _output(config.output) as stream:
        write_json_lines(stream, records)


def _cmd_graph(config: RunConfig) -> None:
    G = load_edges_csv(_require(config.input, "--input"), node_count=config.node_count)
    lengths = longest_path_lengths(G)
    if config.m_len is not None:
        record = {"m_len": config.m_len, "pairs": sorted(m_connectivity(G, config.m_len))}
    else:
        record = {
            "node_count": G.node_count,
            "connectivity": {
                str(m_len): sorted(pair for pair, length in lengths.items() if length == m_len)
                for m_len in range(1, G.node_count)
            },
        }
    if config.compare:
        G2 = load_edges_csv(config.compare, node_count=G.node_count)
        record["equivalent"] = graphs_equivalent(G, G2)
    if config.samples:
        S = load_samples_csv(config.samples)
        record["sign_agreement"] = graph_sign_agreement(G, aggregate_phi(S, config.nu), config.m_len)
    with _output(config.output) as stream:
        write_json_lines(stream, [record])


def _cmd_metrics(config: RunConfig) -> None:
    records = []
    if config.true_labels and config.pred_labels:
        truth = load_labels_csv(config.true_labels)
        predicted = load_labels_csv(config.pred_labels)
        records.append({"metric": "ari", "value": adjusted_rand_index(truth, predicted)})
        records.append({"metric": "v_measure", "value": v_measure(truth, predicted)})
    if config.confusion:
        tp, tn, fp, fn = (int(part) for part in config.confusion.split(","))
        for name, value in confusion_metrics(ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn)).items():
            records.append({"metric": name, "value": value})
    if not records:
        raise ValueError("metrics needs --true/--pred label files or --confusion tp,tn,fp,fn")
    with _output(config.output) as stream:
        write_json_lines(stream, records)


def _cmd_earlywarn(config: RunConfig) -> None:
    groups = load_node_series_csv(_require(config.input, "--input"))
    for name in (config.west, config.east):
        if name not in groups:
            raise ValueError(f"group {name!r} not found; available: {sorted(groups)}")
    warn_config = config.warn_config()
    frame = run_early_warning(groups[config.west], groups[config.east], warn_config)

    records = [
        {"year": int(row.year), "yc_z": float(row.yc_z), "warned": bool(row.warned)}
        for row in frame.itertuples(index=False)
    ]
    if config.events:
        events = load_event_years_csv(config.events)
        warned = {record["year"] for record in records if record["warned"]}
        counts = warning_confusion(warned, events, [record["year"] for record in records[2:]])
        summary = {"summary": "confusion", "tp": counts.tp, "tn": counts.tn, "fp": counts.fp, "fn": counts.fn}
        try:
            summary.update(confusion_metrics(counts))
        except CausalGroupsError as exc:
            logger.warning(f"Confusion metrics unavailable: {exc}")
        records.append(summary)
    with _output(config.output) as stream:
        write_json_lines(stream, records)


def _cmd_stability(config: RunConfig) -> None:
    S, y, names = load_feature_table(_require(config.input, "--input"), config.target)
    labels = load_labels_csv(_require(config.labels, "--labels"))
    ranking = rank_features(S, y, labels)
    evaluation = sta_error_eval(S, y, labels, config.top_k)
    baseline = sta_error_eval(S, y, labels, S.shape[1])
    record = {
        "ranking": [names[j] for j in ranking.order],
        "variances": {names[j]: float(ranking.variances[j]) for j in range(len(names))},
        "top_k": config.top_k,
        "rmse_train": evaluation["rmse_train"],
        "sta_error": evaluation["sta_error"],
        "all_features_rmse_train": baseline["rmse_train"],
        "all_features_sta_error": baseline["sta_error"],
    }
    with _output(config.output) as stream:
        write_json_lines(stream, [record])


COMMANDS = {
    "gen": _cmd_gen,
    "cluster": _cmd_cluster,
    "kernel": _cmd_kernel,
    "decide": _cmd_decide,
    "graph": _cmd_graph,
    "metrics": _cmd_metrics,
    "earlywarn": _cmd_earlywarn,
    "stability": _cmd_stability,
}


def run(config: RunConfig) -> int:
    """Execute one subcommand and return the process exit code"""
    try:
        COMMANDS[config.command](config)
    except (CausalGroupsError, ValueError, FileNotFoundError) as exc:
        record = {"error": type(exc).__name__, "message": str(exc)}
        sys.stderr.write(json.dumps(record) + "\n")
        logger.error(f"{config.command} failed: {record['error']}: {record['message']}")
        return EXIT_USER_ERROR
    except Exception as exc:
        logger.exception(f"{config.command} failed unexpectedly")
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_UNEXPECTED
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="causalgroups", description="Causal-kernel subgroup discovery toolkit")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser, needs_input: bool = True):
        if needs_input:
            p.add_argument("--input", "-i", help="input CSV")
        p.add_argument("--out", "-o", dest="output", help="output path (default stdout)")
        p.add_argument("--nu", type=float, help=f"significance level (default {settings.nu})")
        p.add_argument("--seed", type=int, help=f"random seed (default {settings.seed})")

    p = sub.add_parser("gen", help="generate a synthetic dataset")
    common(p, needs_input=False)
    p.add_argument("--kind", choices=["two-dag", "random", "regime"], default="two-dag")
    p.add_argument("--labels", help="also write ground-truth labels (or event years for --kind regime)")
    p.add_argument("--k-groups", type=int, default=2)
    p.add_argument("--n", type=int, default=50, help="samples per group")
    p.add_argument("--m", type=int, default=5, help="features")
    p.add_argument("--edge-prob", type=float, default=0.3)
    p.add_argument("--nonlinear", action="store_true")
    p.add_argument("--mu-mode", choices=["uniform", "zero"], default="uniform")
    p.add_argument("--noise-kind", choices=["gaussian", "laplace"], default="gaussian")
    p.add_argument("--edges", help="directory for the generating DAGs, one group_<g>.csv edge list per group")

    p = sub.add_parser("cluster", help="cluster samples into subgroups")
    common(p)
    p.add_argument("--k", type=int)
    p.add_argument("--max-iter", type=int)
    p.add_argument("--kernel", choices=["causal", "poly", "rbf", "raw"], default="causal")

    p = sub.add_parser("kernel", help="write the causal kernel matrix")
    common(p)

    p = sub.add_parser("decide", help="pairwise dependence decisions")
    common(p)
    p.add_argument("--pair", dest="pairs", action="append", default=[], help="feature pair p,q (repeatable)")

    p = sub.add_parser("graph", help="m-connectivity sets of an edge-list graph")
    common(p)
    p.add_argument("--compare", help="second edge list to test for equivalence")
    p.add_argument("--node-count", type=int)
    p.add_argument("--m-len", type=int)
    p.add_argument("--samples", help="sample CSV whose aggregated mapping-matrix signs are checked against the graph")

    p = sub.add_parser("metrics", help="clustering or confusion metrics")
    common(p, needs_input=False)
    p.add_argument("--true", dest="true_labels")
    p.add_argument("--pred", dest="pred_labels")
    p.add_argument("--confusion", help="tp,tn,fp,fn")

    p = sub.add_parser("earlywarn", help="yearly causal coupling and warnings")
    common(p)
    p.add_argument("--west", default="west")
    p.add_argument("--east", default="east")
    p.add_argument("--events", help="CSV with a 'year' column of ground-truth events")
    p.add_argument("--window", dest="window_w", type=int)
    p.add_argument("--embed-dim", type=int)
    p.add_argument("--max-lag", type=int)
    p.add_argument("--lag-stride", type=int)
    p.add_argument("--time-stride", type=int)
    p.add_argument("--tau", type=float)

    p = sub.add_parser("stability", help="stable-feature ranking and Sta_Error")
    common(p)
    p.add_argument("--target", default="y")
    p.add_argument("--labels", help="subgroup labels CSV")
    p.add_argument("--top-k", type=int)

    return parser


def configure_logging() -> None:
    logging.basicConfig(
        level=getattr(logging, settings.log_level),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=[
            logging.StreamHandler(sys.stderr),
            logging.FileHandler(settings.log_file) if settings.log_file else logging.NullHandler(),
        ],
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Main entry point"""
    configure_logging()
    namespace = build_parser().parse_args(argv)
    try:
        config = RunConfig.from_namespace(namespace)
    except ValueError as exc:
        sys.stderr.write(json.dumps({"error": type(exc).__name__, "message": str(exc)}) + "\n")
        return EXIT_USER_ERROR
    return run(config)


if __name__ == "__main__":
    sys.exit(main())
