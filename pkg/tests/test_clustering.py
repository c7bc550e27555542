import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spanhop.clustering import (
    AbstractGraph,
    Clustering,
    basic_spanner,
    c_dist,
    closest,
    cluster_graph,
    make_clustering,
    sample_clusters,
    singleton_clustering,
    supercluster_phase,
    superclustering_plan,
    truncated_baswana_sen,
    truncated_tz,
)
from spanhop.generators import GenSpec, generate
from spanhop.graphs import Graph, ParameterError, beta_limited_apsp, exact_apsp
from spanhop.rng import RngStream
from spanhop.structures import EdgeSubgraph
from spanhop.verify import audit_baswana_sen, audit_truncated_tz

from oracles import brute_min_cycle


def path_graph(n):
    return Graph.build(n, [(i, i + 1) for i in range(n - 1)])


# --- c_dist -------------------------------------------------------------------


def test_c_dist_two_singletons_on_path():
    g = path_graph(3)
    c = make_clustering(3, [(0, [0]), (2, [2])], 0.0)
    assert c_dist(g.apsp, c.clusters[0], c.clusters[1]) == 2


def test_c_dist_vertex_to_own_center_is_zero():
    g = path_graph(3)
    c = make_clustering(3, [(1, [0, 1, 2])], 1.0)
    assert c_dist(g.apsp, 1, c) == 0


def test_c_dist_tie_prefers_smaller_cluster_id():
    # centers 3, 5, 9 on a path; vertex 0 sees distances 3, 5, 9
    g = path_graph(10)
    c = make_clustering(10, [(3, [3]), (5, [5]), (9, [9])], 0.0)
    d, elem = closest(g.apsp, 0, c)
    assert d == 3 and elem.id == 0
    # a genuine tie: centers 2 and 4 are both at distance 1 from vertex 3
    c2 = make_clustering(10, [(2, [2]), (4, [4])], 0.0)
    d2, elem2 = closest(g.apsp, 3, c2)
    assert d2 == 1 and elem2.id == 0  # smaller id wins
    assert c_dist(g.apsp, 0, make_clustering(10, [], 0.0)) == math.inf


# --- sampling -----------------------------------------------------------------


def test_sample_extremes():
    c = singleton_clustering(10)
    mask0, sel0 = sample_clusters(c, 0.0, RngStream(1))
    mask1, sel1 = sample_clusters(c, 1.0, RngStream(1))
    assert not mask0.any() and sel0 == []
    assert mask1.all() and len(sel1) == 10


def test_sample_deterministic_under_seed():
    c = singleton_clustering(20)
    m1, _ = sample_clusters(c, 0.3, RngStream(42))
    m2, _ = sample_clusters(c, 0.3, RngStream(42))
    assert np.array_equal(m1, m2)


def test_sample_binomial_mean():
    c = singleton_clustering(10)
    sizes = [sample_clusters(c, 0.5, RngStream(s))[0].sum() for s in range(1000)]
    assert 4 <= np.mean(sizes) <= 6


# --- truncated Baswana-Sen ------------------------------------------------------


def test_bs_zero_steps_identity():
    g = path_graph(5)
    c, H = truncated_baswana_sen(g, 3, 0, RngStream(0))
    assert len(c.clusters) == 5 and H.edge_count == 0


def test_bs_parameter_errors():
    g = path_graph(5)
    with pytest.raises(ParameterError):
        truncated_baswana_sen(g, 3, 4, RngStream(0))
    with pytest.raises(ParameterError):
        truncated_baswana_sen(g, 3, -1, RngStream(0))


def test_bs_k1_detour_bound_one():
    # with t = k = 1, every edge incident to an unclustered vertex must be in H
    g = generate(GenSpec("gnp", {"n": 24, "p": 0.2}, seed=4))
    for s in range(10):
        c, H = truncated_baswana_sen(g, 1, 1, RngStream(s))
        covered = c.covered()
        for u, v in zip(g.eu, g.ev):
            if not (covered[u] and covered[v]):
                assert H.has_edge(int(u), int(v))


def test_bs_contract_on_random_graph():
    g = generate(GenSpec("gnp", {"n": 64, "p": 0.2}, seed=7))
    out = audit_baswana_sen(g, 3, 3, seeds=range(100))
    assert out["fact2_violations"] == 0
    assert out["fact4_violations"] == 0
    assert out["ok"], out


# --- truncated Thorup-Zwick -----------------------------------------------------


def test_tz_level_one_zero_radius(small_weighted_graph):
    g = small_weighted_graph
    c, h = truncated_tz(g, 4, 1, 0.0, RngStream(3))
    levels = h.meta["levels"]
    # radius-0 clusters: exactly the sampled centers as singletons
    assert sorted(cl.center for cl in c.clusters) == sorted(levels[1].tolist())
    assert all(len(cl.members) == 1 for cl in c.clusters)
    # every vertex holds a hop to its level-1 pivot
    pivot = h.meta["pivot"]
    hop_keys = set(h.hop_set())
    D = g.apsp
    for v in range(g.n):
        pv = pivot[1, v]
        if pv >= 0 and pv != v:
            key = (min(v, int(pv)), max(v, int(pv)))
            in_parent = key in g.edge_weight and abs(g.edge_weight[key] - D[v, pv]) <= 1e-9
            assert key in hop_keys or in_parent


def test_tz_parameter_errors(small_weighted_graph):
    with pytest.raises(ParameterError):
        truncated_tz(small_weighted_graph, 4, 0, 1.0, RngStream(0))
    with pytest.raises(ParameterError):
        truncated_tz(small_weighted_graph, 4, 4, 1.0, RngStream(0))


def test_tz_two_hop_contract(small_weighted_graph):
    out = audit_truncated_tz(small_weighted_graph, 4, 2, seeds=range(25))
    assert out["fact_i_violations"] == 0
    assert out["fact_ii_violations"] == 0


# --- cluster graph --------------------------------------------------------------


def test_cluster_graph_boundary_inclusive():
    g = path_graph(6)
    c = make_clustering(6, [(0, [0]), (5, [5])], 0.0)
    assert cluster_graph(g, c, 5.0).edges == [(0, 1)]
    assert cluster_graph(g, c, 4.99).edges == []


def test_cluster_graph_single_cluster():
    g = path_graph(3)
    c = make_clustering(3, [(1, [0, 1, 2])], 1.0)
    assert cluster_graph(g, c, 100.0).edges == []


def test_cluster_graph_path_spacing():
    g = path_graph(16)
    c = make_clustering(16, [(0, [0]), (5, [5]), (10, [10]), (15, [15])], 0.0)
    ag = cluster_graph(g, c, 5.0)
    assert ag.edges == [(0, 1), (1, 2), (2, 3)]


# --- greedy spanner --------------------------------------------------------------


def test_greedy_stretch_one_keeps_all():
    ag = AbstractGraph(4, [(0, 1), (1, 2), (2, 3), (0, 3), (0, 2)])
    assert len(basic_spanner(ag, 1)) == 5


def test_greedy_five_cycle_keeps_all():
    ag = AbstractGraph(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)])
    assert len(basic_spanner(ag, 3)) == 5


def test_greedy_k4():
    ag = AbstractGraph(4, [(a, b) for a in range(4) for b in range(a + 1, 4)])
    kept = basic_spanner(ag, 3)
    assert len(kept) <= 4
    # verify the stretch on the kept subgraph against the full graph
    gk = Graph.build(4, kept)
    gf = Graph.build(4, ag.edges)
    assert np.all(exact_apsp(gk) <= 3 * exact_apsp(gf) + 1e-9)


@given(st.integers(0, 2000), st.sampled_from([1, 3, 5]))
def test_greedy_girth_property(seed, stretch):
    rng = np.random.default_rng(seed)
    n = int(rng.integers(4, 11))
    edges = [(a, b) for a in range(n) for b in range(a + 1, n) if rng.random() < 0.45]
    kept = basic_spanner(AbstractGraph(n, edges), stretch)
    cyc = brute_min_cycle(range(n), kept, stretch + 1)
    assert cyc is None, f"cycle of length {cyc} <= stretch+1"


# --- superclustering plan ---------------------------------------------------------


def test_plan_integral_zero_phases():
    plan, t, branch = superclustering_plan(256, 0.5)
    assert plan == [] and t == 4 and branch == "integral"


def test_plan_integral_two_phases():
    plan, t, branch = superclustering_plan(4096, 1.0 / 3.0)
    assert plan == [4, 4] and branch == "integral"


def test_plan_fractional_branches():
    plan, t, branch = superclustering_plan(512, 0.45)
    assert branch == "fractional-full" and plan == [5]
    plan2, t2, branch2 = superclustering_plan(512, 0.49)
    assert branch2 == "fractional-partial"
    assert len(plan2) == 1 and plan2[0] == 1  # floor(T)=0 full phases + floor(t^c) steps


def test_supercluster_phase_zero_steps_identity(small_unweighted_graph):
    g = small_unweighted_graph
    c0, _ = truncated_baswana_sen(g, 256, 2, RngStream(1))
    H = EdgeSubgraph(g)
    out = supercluster_phase(g, c0, 16, 0, 0.5, RngStream(2), H, "path", True, "t")
    assert len(out.clustering.clusters) == len(c0.clusters)
    assert H.edge_count == 0
