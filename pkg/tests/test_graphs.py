import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spanhop.graphs import (
    Graph,
    ParameterError,
    ball,
    ball_boundary,
    beta_limited_apsp,
    beta_limited_sssp,
    exact_apsp,
    read_graph,
    write_graph,
)

from oracles import brute_apsp, brute_beta_limited

INF = float("inf")


def path_graph(n):
    return Graph.build(n, [(i, i + 1) for i in range(n - 1)])


# --- construction invariants ------------------------------------------------


def test_rejects_self_loop():
    with pytest.raises(ParameterError):
        Graph.build(3, [(0, 0)])


def test_rejects_duplicate_edge():
    with pytest.raises(ParameterError):
        Graph.build(3, [(0, 1), (1, 0)])


def test_rejects_out_of_range():
    with pytest.raises(ParameterError):
        Graph.build(2, [(0, 2)])


def test_rejects_bad_weights():
    with pytest.raises(ParameterError):
        Graph.build(2, [(0, 1, 2.0)], weighted=False)
    with pytest.raises(ParameterError):
        Graph.build(2, [(0, 1, 0.0)], weighted=True)
    with pytest.raises(ParameterError):
        Graph.build(2, [(0, 1, -1.0)], weighted=True)


# --- exact_apsp --------------------------------------------------------------


def test_apsp_path_graph():
    d = exact_apsp(path_graph(3))
    assert d[0][2] == 2


def test_apsp_single_vertex():
    d = exact_apsp(Graph.build(1, []))
    assert d.shape == (1, 1) and d[0][0] == 0


def test_apsp_five_cycle_matches_brute_force():
    edges = [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]
    g = Graph.build(5, edges)
    d = exact_apsp(g)
    expected = brute_apsp(5, edges)
    assert d[0][2] == 2 and d[0][3] == 2
    assert np.allclose(d, expected)


@given(st.integers(0, 10_000))
def test_apsp_symmetric_triangle(seed):
    from conftest import random_graph

    g = random_graph(14, 0.3, seed)
    d = exact_apsp(g)
    assert np.array_equal(d, d.T)
    assert np.all(np.diag(d) == 0)
    finite = np.isfinite(d)
    for u in range(g.n):
        for v in range(g.n):
            if not finite[u, v]:
                continue
            via = d[u] + d[:, v]
            assert d[u, v] <= via.min() + 1e-9


# --- beta_limited_sssp -------------------------------------------------------


def test_beta_one_on_path_is_direct_neighbors_only():
    g = path_graph(4)
    d = beta_limited_sssp(g, None, 0, 1)
    assert d[1] == 1 and d[3] == INF


def test_beta_one_with_shortcut_hop():
    g = path_graph(4)
    d = beta_limited_sssp(g, [(0, 3, 3.0)], 0, 1)
    assert d[3] == 3


def test_weighted_cycle_two_rounds_matches_walk_enumeration():
    edges = [(0, 1, 1.0), (1, 2, 2.0), (2, 3, 1.0), (0, 3, 2.0)]
    g = Graph.build(4, edges, weighted=True)
    got = beta_limited_sssp(g, None, 0, 2)
    expected = brute_beta_limited(4, edges, [], 0, 2)
    assert got[2] == 3.0
    assert np.allclose(got, expected)


@given(st.integers(0, 10_000), st.integers(1, 6))
def test_beta_limited_matches_brute_force(seed, beta):
    from conftest import random_graph

    g = random_graph(9, 0.35, seed)
    edges = list(zip(g.eu.tolist(), g.ev.tolist()))
    got = beta_limited_sssp(g, None, 0, beta)
    expected = brute_beta_limited(g.n, edges, [], 0, beta)
    assert np.allclose(got, expected)


@given(st.integers(0, 10_000))
def test_beta_monotone_and_oracle_equivalence(seed):
    from conftest import random_graph

    g = random_graph(16, 0.2, seed)
    d = exact_apsp(g)
    prev = beta_limited_sssp(g, None, 0, 1)
    for beta in range(2, g.n):
        cur = beta_limited_sssp(g, None, 0, beta)
        assert np.all(cur <= prev + 1e-12)
        prev = cur
    assert np.allclose(beta_limited_sssp(g, None, 0, g.n - 1), d[0])


def test_beta_limited_apsp_matches_per_source(small_weighted_graph):
    g = small_weighted_graph
    full = beta_limited_apsp(g, None, 3)
    for s in (0, 5, g.n - 1):
        assert np.allclose(full[s], beta_limited_sssp(g, None, s, 3))


# --- balls -------------------------------------------------------------------


def test_ball_star():
    g = Graph.build(5, [(0, i) for i in range(1, 5)])
    assert set(ball(g, 0, 1)) == {0, 1, 2, 3, 4}


def test_ball_radius_zero():
    g = path_graph(4)
    assert list(ball(g, 2, 0)) == [2]


def test_ball_six_path():
    g = path_graph(6)
    d = exact_apsp(g)
    assert set(ball(g, 0, 2)) == {v for v in range(6) if d[0][v] <= 2} == {0, 1, 2}
    assert set(ball_boundary(g, 0, 2)) == {2}


# --- file format ------------------------------------------------------------


def test_graph_file_roundtrip(tmp_path, small_weighted_graph):
    p = tmp_path / "g.txt"
    write_graph(p, small_weighted_graph)
    g2 = read_graph(p)
    assert g2.n == small_weighted_graph.n
    assert np.array_equal(g2.eu, small_weighted_graph.eu)
    assert np.allclose(g2.ew, small_weighted_graph.ew)
    assert g2.weighted


def test_graph_file_comments_and_errors(tmp_path):
    p = tmp_path / "g.txt"
    p.write_text("# comment\n3 2 0\n0 1\n1 2\n")
    g = read_graph(p)
    assert g.n == 3 and g.m == 2
    p.write_text("3 5 0\n0 1\n")
    with pytest.raises(Exception):
        read_graph(p)
