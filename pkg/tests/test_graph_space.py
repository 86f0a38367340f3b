import numpy as np
import pytest

from causalgroups.errors import (
    CausalGroupsError,
    CyclicGraph,
    GraphTooLarge,
    IndexOutOfRange,
    NodeCountMismatch,
    ShapeMismatch,
)
from causalgroups.graph_space import (
    CausalGraph,
    graph_sign_agreement,
    graphs_equivalent,
    indicator_from_graph,
    longest_path_lengths,
    m_connectivity,
    matrices_equivalent,
    sign_matrix,
)

# nodes O1..O4 are indices 0..3
CHAIN_2134 = CausalGraph.from_edges(4, [(1, 0), (0, 2), (2, 3)])
CHAIN_1243 = CausalGraph.from_edges(4, [(0, 1), (1, 3), (3, 2)])

Y_FIRST = np.array([[0.0, 0.8], [-0.2, 0.0]])
Y_SECOND = np.array([[0.0, 0.2], [-0.5, 0.0]])


@pytest.mark.parametrize(
    "graph,m_len,expected",
    [
        (CHAIN_2134, 1, {(0, 1), (0, 2), (2, 3)}),
        (CHAIN_2134, 3, {(1, 3)}),
        (CHAIN_1243, 3, {(0, 2)}),
        (CHAIN_1243, 1, {(0, 1), (1, 3), (2, 3)}),
    ],
)
def test_m_connectivity_chain_examples(graph, m_len, expected):
    assert m_connectivity(graph, m_len) == expected


def test_longest_path_uses_longest_route():
    # triangle 0-1-2 with chord 0-2: the longest route from 0 to 2 has two edges
    G = CausalGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)])
    assert longest_path_lengths(G) == {(0, 1): 2, (0, 2): 2, (1, 2): 2}


def test_m_connectivity_rejects_non_positive_length():
    with pytest.raises(ValueError):
        m_connectivity(CHAIN_2134, 0)


def test_graphs_equivalent():
    assert graphs_equivalent(CHAIN_2134, CHAIN_2134)
    assert not graphs_equivalent(CHAIN_2134, CHAIN_1243)
    same_edges = CausalGraph.from_edges(4, [(1, 0, 2.0), (0, 2, -1.0), (2, 3, 0.5)])
    assert graphs_equivalent(CHAIN_2134, same_edges)
    with pytest.raises(NodeCountMismatch):
        graphs_equivalent(CHAIN_2134, CausalGraph(node_count=3))


def test_graph_size_limit():
    G = CausalGraph(node_count=13)
    with pytest.raises(GraphTooLarge):
        longest_path_lengths(G)


def test_cyclic_graph_rejected():
    with pytest.raises(CyclicGraph):
        CausalGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)])
    cyclic = CausalGraph.from_edges(3, [(0, 1), (1, 2), (2, 0)], is_dag=False)
    with pytest.raises(CyclicGraph):
        cyclic.topological_order()


def test_graph_edge_validation():
    with pytest.raises(CyclicGraph):
        CausalGraph.from_edges(2, [(0, 0)])
    with pytest.raises(CyclicGraph):
        CausalGraph.from_edges(2, [(1, 1)], is_dag=False)
    with pytest.raises(IndexOutOfRange):
        CausalGraph.from_edges(2, [(0, 2)])
    with pytest.raises(IndexOutOfRange):
        CausalGraph(node_count=3, edges={(-1, 0)})
    assert issubclass(IndexOutOfRange, CausalGroupsError) and issubclass(CausalGroupsError, ValueError)


def test_parents_and_order():
    assert CHAIN_2134.parents(0) == [1]
    assert CHAIN_2134.parents(1) == []
    assert CHAIN_2134.topological_order() == [1, 0, 2, 3]
    assert CHAIN_2134.weights[(1, 0)] == 1.0


def test_sign_matrix_examples():
    expected = np.array([[1, 1], [-1, 1]])
    np.testing.assert_array_equal(sign_matrix(Y_FIRST), expected)
    np.testing.assert_array_equal(sign_matrix(Y_SECOND), expected)
    np.testing.assert_array_equal(sign_matrix(np.zeros((3, 3))), np.ones((3, 3)))


def test_matrices_equivalent(rng):
    assert matrices_equivalent(Y_FIRST, Y_SECOND)
    Y = rng.normal(size=(3, 3))
    Y[Y == 0.0] = 1.0
    assert not matrices_equivalent(Y, -Y)
    assert matrices_equivalent(Y, 2.0 * Y)
    with pytest.raises(ShapeMismatch):
        matrices_equivalent(Y, np.zeros((2, 2)))


def test_indicator_from_graph():
    indicator = indicator_from_graph(CHAIN_2134, 1)
    expected = -np.ones((4, 4), dtype=int)
    for a, b in [(0, 1), (0, 2), (2, 3)]:
        expected[a, b] = expected[b, a] = 1
    np.testing.assert_array_equal(indicator, expected)
    np.testing.assert_array_equal(indicator, indicator.T)
    np.testing.assert_array_equal(indicator_from_graph(CausalGraph(node_count=4), 1), -np.ones((4, 4)))


def test_graph_sign_agreement():
    indicator = indicator_from_graph(CHAIN_2134, 1).astype(float)
    assert graph_sign_agreement(CHAIN_2134, indicator, m_len=1) == 1.0
    assert graph_sign_agreement(CHAIN_2134, -indicator, m_len=1) == 0.0
    # every pair of a connected chain is linked, so an all-positive matrix agrees everywhere
    assert graph_sign_agreement(CHAIN_2134, np.ones((4, 4))) == 1.0
