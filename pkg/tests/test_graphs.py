from fractions import Fraction
from itertools import product

import numpy as np
import pytest

from dkspectra.graphs import (
    GraphError,
    all_pairs_distances,
    distance_k_matrix,
    distance_matrices,
    mean_degree,
    named_family,
    parse_family,
    parse_graph,
)


def test_parse_path():
    g = parse_graph("0 1\n1 2")
    assert g.vertex_count == 3
    assert g.edges == {(0, 1), (1, 2)}


def test_parse_comments_and_header():
    g = parse_graph("# a star\nn 4\n0 1\n\n0 2\n# done\n0 3\n")
    assert (g.vertex_count, g.edge_count) == (4, 3)


def test_header_adds_isolated_vertex_and_fails_connectivity():
    with pytest.raises(GraphError) as exc:
        parse_graph("n 4\n0 1\n1 2")
    assert exc.value.kind == "disconnected"


@pytest.mark.parametrize(
    "text, kind",
    [
        ("0 1\n0 1", "duplicate_edge"),
        ("0 1\n1 0", "duplicate_edge"),
        ("0 1\n1 1", "self_loop"),
        ("0 x", "non_integer"),
        ("0 1\n2 3", "disconnected"),
        ("", "too_small"),
        ("0 1 2", "malformed_line"),
        ("n 2\n0 5", "vertex_range"),
    ],
)
def test_parse_errors(text, kind):
    with pytest.raises(GraphError) as exc:
        parse_graph(text)
    assert exc.value.kind == kind


def test_families():
    k2 = named_family("K", 2)
    assert (k2.vertex_count, k2.edge_count) == (2, 1)
    c5 = named_family("C", 5)
    assert (c5.vertex_count, c5.edge_count) == (5, 5)
    assert set(c5.degrees()) == {2}
    s3 = named_family("S", 3)
    assert (s3.vertex_count, s3.edge_count) == (4, 3)
    assert s3.degrees()[0] == 3
    p4 = named_family("P", 4)
    assert p4.edges == {(0, 1), (1, 2), (2, 3)}


@pytest.mark.parametrize("text, kind", [("Q:3", "unknown_family"), ("C:2", "family_param"), ("K:1", "family_param"), ("S:0", "family_param"), ("K", "family_format"), ("K:a", "family_format")])
def test_family_errors(text, kind):
    with pytest.raises(GraphError) as exc:
        parse_family(text)
    assert exc.value.kind == kind


def test_distances_examples():
    d = all_pairs_distances(named_family("P", 3))
    assert d.max() == 2 and d[0, 2] == 2
    d = all_pairs_distances(named_family("K", 4))
    assert (d == 1 - np.eye(4, dtype=int)).all()
    d = all_pairs_distances(named_family("C", 5))
    assert d.max() == 2 and d[0, 2] == 2


def test_distance_k_matrix_examples():
    p3 = named_family("P", 3)
    d2 = distance_k_matrix(p3, 2)
    assert d2.sum() == 2 and d2[0, 2] == d2[2, 0] == 1
    assert (distance_k_matrix(p3, 0) == np.eye(3)).all()
    assert not distance_k_matrix(p3, 5).any()


def _floyd_warshall(g):
    n = g.vertex_count
    inf = 10**9
    d = [[0 if i == j else inf for j in range(n)] for i in range(n)]
    for u, v in g.edges:
        d[u][v] = d[v][u] = 1
    for k, i, j in product(range(n), repeat=3):
        if d[i][k] + d[k][j] < d[i][j]:
            d[i][j] = d[i][k] + d[k][j]
    return np.array(d)


def test_bfs_matches_floyd_warshall(graph):
    assert (graph.distances == _floyd_warshall(graph)).all()


def test_distance_matrices_partition_pairs(graph):
    mats = distance_matrices(graph)
    assert (sum(mats) == 1).all()
    assert (mats[1] == graph.adjacency).all()


def test_triangle_inequality(graph):
    d = graph.distances
    assert (d[:, None, :] <= d[:, :, None] + d[None, :, :]).all()
    assert (d == d.T).all() and not np.diag(d).any()


def test_mean_degree():
    assert mean_degree(named_family("K", 3)) == 2
    assert mean_degree(named_family("K", 2)) == 1
    assert mean_degree(named_family("S", 3)) == Fraction(3, 2)


def test_mean_degree_is_trace_of_square(graph):
    a = graph.adjacency
    assert mean_degree(graph) == Fraction(int(np.trace(a @ a)), graph.vertex_count)
    assert mean_degree(graph) == Fraction(sum(graph.degrees()), graph.vertex_count)
