"""Graph container, validation, Laplacians, loaders."""

import numpy as np
import pytest

from graphsmooth.errors import (
    AsymmetricInput,
    IsolatedNode,
    NegativeWeight,
    NonzeroDiagonal,
    TooSmall,
)
from graphsmooth.graphs import (
    build_graph,
    combinatorial_laplacian,
    degrees,
    is_connected,
    load_adjacency_csv,
    load_edge_list,
    load_graph,
    normalized_laplacian,
)


def k2():
    return build_graph(np.array([[0.0, 1.0], [1.0, 0.0]]))


def path3():
    return build_graph(np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]]))


def test_build_graph_basic():
    g = k2()
    assert g.num_nodes == 2
    assert np.array_equal(g.adjacency, [[0.0, 1.0], [1.0, 0.0]])


def test_adjacency_is_read_only():
    g = k2()
    with pytest.raises(ValueError):
        g.adjacency[0, 1] = 5.0


def test_rejects_nonsquare():
    with pytest.raises(Exception):
        build_graph(np.zeros((2, 3)))


def test_rejects_single_node():
    with pytest.raises(TooSmall):
        build_graph(np.zeros((1, 1)))


def test_rejects_asymmetric():
    with pytest.raises(AsymmetricInput):
        build_graph(np.array([[0.0, 1.0], [0.5, 0.0]]))


def test_rejects_negative_weight():
    with pytest.raises(NegativeWeight):
        build_graph(np.array([[0.0, -1.0], [-1.0, 0.0]]))


def test_rejects_self_loop():
    with pytest.raises(NonzeroDiagonal):
        build_graph(np.array([[1.0, 1.0], [1.0, 0.0]]))


def test_degrees_weighted():
    g = build_graph(np.array([[0.0, 2.0, 0.5], [2.0, 0.0, 0.0], [0.5, 0.0, 0.0]]))
    assert np.allclose(degrees(g), [2.5, 2.0, 0.5])


def test_combinatorial_laplacian_rows_sum_to_zero():
    g = path3()
    lap = combinatorial_laplacian(g)
    assert np.allclose(lap.sum(axis=1), 0.0)
    assert np.allclose(lap, lap.T)
    # diag(d) - A entrywise
    assert np.allclose(lap, np.diag(degrees(g)) - g.adjacency)


def test_normalized_laplacian_k2():
    lap = normalized_laplacian(k2())
    assert np.allclose(lap, [[1.0, -1.0], [-1.0, 1.0]])


def test_normalized_laplacian_rejects_isolated_node():
    adj = np.zeros((3, 3))
    adj[0, 1] = adj[1, 0] = 1.0
    g = build_graph(adj)
    with pytest.raises(IsolatedNode):
        normalized_laplacian(g)


def test_is_connected():
    assert is_connected(path3())
    adj = np.zeros((4, 4))
    adj[0, 1] = adj[1, 0] = 1.0
    adj[2, 3] = adj[3, 2] = 1.0
    assert not is_connected(build_graph(adj))


def test_load_edge_list(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("# toy triangle\n0 1 1.0\n1 2 2.0\n0 2 0.5\n")
    g = load_edge_list(p)
    assert g.num_nodes == 3
    assert g.adjacency[1, 2] == 2.0
    assert g.adjacency[2, 1] == 2.0


def test_load_edge_list_explicit_size(tmp_path):
    p = tmp_path / "g.edges"
    p.write_text("0 1 1.0\n")
    g = load_edge_list(p, num_nodes=4)
    assert g.num_nodes == 4
    assert not is_connected(g)


def test_load_adjacency_csv(tmp_path):
    p = tmp_path / "g.csv"
    p.write_text("0.0,1.0\n1.0,0.0\n")
    g = load_adjacency_csv(p)
    assert g.num_nodes == 2


def test_load_graph_dispatches_on_extension(tmp_path):
    csv = tmp_path / "a.csv"
    csv.write_text("0.0,1.0\n1.0,0.0\n")
    assert load_graph(csv).num_nodes == 2
    edges = tmp_path / "a.edges"
    edges.write_text("0 1 1.0\n")
    assert load_graph(edges).num_nodes == 2
