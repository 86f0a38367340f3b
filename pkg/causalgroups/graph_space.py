"""
Causal-graph and causal-matrix spaces: m-connectivity sets, graph
equivalence, sign (causal) matrices and indicator matrices.
"""
import logging
from dataclasses import dataclass, field
from itertools import combinations
from typing import Dict, Iterable, Optional, Set, Tuple

import networkx as nx
import numpy as np

from causalgroups.errors import (
    CyclicGraph,
    DimensionMismatch,
    GraphTooLarge,
    IndexOutOfRange,
    NodeCountMismatch,
    ShapeMismatch,
)

logger = logging.getLogger(__name__)

MAX_EXACT_NODES = 12

Edge = Tuple[int, int]
NodePair = Tuple[int, int]


@dataclass
class CausalGraph:
    """Weighted directed graph over nodes 0..node_count-1"""
    node_count: int
    edges: Set[Edge] = field(default_factory=set)
    weights: Dict[Edge, float] = field(default_factory=dict)
    is_dag: bool = True

    def __post_init__(self):
        self.edges = {(int(a), int(b)) for a, b in self.edges}
        for parent, child in self.edges:
            if parent == child:
                raise CyclicGraph(f"self-loop on node {parent}")
            if not (0 <= parent < self.node_count and 0 <= child < self.node_count):
                raise IndexOutOfRange(f"edge ({parent}, {child}) outside node range [0, {self.node_count})")
        for edge in self.edges:
            self.weights.setdefault(edge, 1.0)
        if self.is_dag and not nx.is_directed_acyclic_graph(self.to_networkx()):
            raise CyclicGraph(f"edges {sorted(self.edges)} contain a cycle")

    @classmethod
    def from_edges(cls, node_count: int, edges: Iterable[Tuple], is_dag: bool = True) -> "CausalGraph":
        """Build from (parent, child) or (parent, child, weight) tuples"""
        edge_set, weights = set(), {}
        for item in edges:
            parent, child = int(item[0]), int(item[1])
            edge_set.add((parent, child))
            weights[(parent, child)] = float(item[2]) if len(item) > 2 else 1.0
        return cls(node_count=node_count, edges=edge_set, weights=weights, is_dag=is_dag)

    def to_networkx(self) -> nx.DiGraph:
        graph = nx.DiGraph()
        graph.add_nodes_from(range(self.node_count))
        for edge in self.edges:
            graph.add_edge(*edge, weight=self.weights.get(edge, 1.0))
        return graph

    def parents(self, node: int) -> list:
        return sorted(parent for parent, child in self.edges if child == node)

    def topological_order(self) -> list:
        graph = self.to_networkx()
        if not nx.is_directed_acyclic_graph(graph):
            raise CyclicGraph("graph has no topological order")
        return list(nx.lexicographical_topological_sort(graph))


def _check_size(G: CausalGraph) -> None:
    if G.node_count > MAX_EXACT_NODES:
        raise GraphTooLarge(
            f"exact longest-path search is limited to {MAX_EXACT_NODES} nodes, got {G.node_count}"
        )


def longest_path_lengths(G: CausalGraph) -> Dict[NodePair, int]:
    """
    Longest simple path length (in edges) between every connected pair of the
    undirected skeleton; pairs are (a, b) with a < b.
    """
    _check_size(G)
    skeleton = G.to_networkx().to_undirected()
    lengths: Dict[NodePair, int] = {}
    for a, b in combinations(range(G.node_count), 2):
        longest = max((len(path) - 1 for path in nx.all_simple_paths(skeleton, a, b)), default=0)
        if longest > 0:
            lengths[(a, b)] = longest
    return lengths


def m_connectivity(G: CausalGraph, m_len: int) -> Set[NodePair]:
    """Unordered node pairs whose longest simple path has exactly ``m_len`` edges"""
    if m_len < 1:
        raise ValueError(f"m_len must be >= 1, got {m_len}")
    return {pair for pair, length in longest_path_lengths(G).items() if length == m_len}


def graphs_equivalent(G: CausalGraph, G2: CausalGraph) -> bool:
    """Equal m-connectivity sets for every m_len in 1..node_count-1"""
    if G.node_count != G2.node_count:
        raise NodeCountMismatch(f"node counts differ: {G.node_count} vs {G2.node_count}")
    return longest_path_lengths(G) == longest_path_lengths(G2)


def sign_matrix(Y) -> np.ndarray:
    """+1 where Y >= 0, -1 where Y < 0"""
    Y = np.asarray(Y, dtype=np.float64)
    return np.where(Y >= 0.0, 1, -1).astype(np.int8)


def matrices_equivalent(Y, Y2) -> bool:
    Y = np.asarray(Y, dtype=np.float64)
    Y2 = np.asarray(Y2, dtype=np.float64)
    if Y.shape != Y2.shape:
        raise ShapeMismatch(f"shapes differ: {Y.shape} vs {Y2.shape}")
    return bool(np.array_equal(sign_matrix(Y), sign_matrix(Y2)))


def indicator_from_graph(G: CausalGraph, m_len: int) -> np.ndarray:
    """+1 at pairs of the m_len-connectivity set (both orientations), -1 elsewhere"""
    indicator = -np.ones((G.node_count, G.node_count), dtype=np.int8)
    for a, b in m_connectivity(G, m_len):
        indicator[a, b] = 1
        indicator[b, a] = 1
    return indicator


def graph_sign_agreement(G: CausalGraph, Y, m_len: Optional[int] = None) -> float:
    """
    Fraction of off-diagonal entries where sign(Y) matches the graph's
    connectivity: +1 for connected pairs (or pairs of the given m_len set), -1
    otherwise.
    """
    Y = np.asarray(Y, dtype=np.float64)
    if Y.shape != (G.node_count, G.node_count):
        raise DimensionMismatch(f"matrix shape {Y.shape} does not match {G.node_count} nodes")
    if m_len is None:
        target = -np.ones_like(Y, dtype=np.int8)
        for a, b in longest_path_lengths(G):
            target[a, b] = target[b, a] = 1
    else:
        target = indicator_from_graph(G, m_len)
    off = ~np.eye(G.node_count, dtype=bool)
    return float(np.mean(sign_matrix(Y)[off] == target[off]))
