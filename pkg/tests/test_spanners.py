import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

from spanhop.clustering import make_clustering, truncated_baswana_sen
from spanhop.generators import GenSpec, generate
from spanhop.graphs import Graph, ParameterError, exact_apsp
from spanhop.rng import RngStream
from spanhop.spanners import (
    approx_sssp_via_spanner,
    assemble_alpha_beta_spanner,
    effective_eps,
    spanner_long_dist,
    spanner_short_dist,
    spanner_three_eps,
    spanner_three_eps_improved,
    supercluster_augment,
    three_eps_schedule,
)
from spanhop.verify import audit_three_eps, certify_spanner


def test_effective_eps():
    assert effective_eps(1.0) == 1.0
    assert effective_eps(4.0) == 4.0
    assert effective_eps(3.0) == 2.0  # shrink to the next integral 4/eps
    assert effective_eps(0.8) == 0.8
    assert effective_eps(16.0) == 16.0  # no integral 4/eps at or below; keep
    with pytest.raises(ParameterError):
        effective_eps(0.0)


# --- short-distance construction -------------------------------------------------


def test_short_dist_single_edge():
    g = Graph.build(2, [(0, 1)])
    H = spanner_short_dist(g, 4, 1, RngStream(0))
    r = certify_spanner(g, H)
    assert r.ok


def test_short_dist_parameter_error():
    g = Graph.build(2, [(0, 1)])
    with pytest.raises(ParameterError):
        spanner_short_dist(g, 4, 2, RngStream(0))  # d > floor(sqrt(k)/2)


def test_short_dist_unclustered_edges_bound():
    g = generate(GenSpec("gnp", {"n": 48, "p": 0.15}, seed=3))
    for s in range(5):
        H = spanner_short_dist(g, 4, 1, RngStream(s))
        assert certify_spanner(g, H).ok
        # edges incident to unclustered vertices detour within 2k/d - 1
        dh = exact_apsp(H.to_graph())
        assert np.all(dh[g.eu, g.ev] <= 7 * 4 + 1e-9)


def test_short_dist_moderate_sweep():
    g = generate(GenSpec("gnp", {"n": 96, "p": 0.08}, seed=5))
    for s in range(3):
        for d in (1, 2):
            H = spanner_short_dist(g, 16, d, RngStream(s))
            r = certify_spanner(g, H, alpha=0.0, beta=7 * 16, d_range=(d, d))
            assert r.ok, r.violations[:5]


# --- supercluster augmentation ----------------------------------------------------


def _clustering_with_radius(g, radius_bound):
    c, _ = truncated_baswana_sen(g, 400, 2, RngStream(5))
    for cl in c.clusters:
        cl.radius_bound = radius_bound
    return c


def test_alpha_table_ceiling_recurrence():
    # r0 = 17, ceil(k^eps) = 20: alpha_1..3 = 4, 9, 16
    g = generate(GenSpec("gnp", {"n": 40, "p": 0.2}, seed=8))
    c = _clustering_with_radius(g, 17.0)
    _, _, out = supercluster_augment(g, 20**2, 3, 0.5, c, RngStream(1), steps=3)
    assert out.alphas == [0.0, 4, 9, 16]
    # radius recurrence r_j = r_{j-1} + 2 r_0 + 2 alpha_j
    assert out.radii == [17.0, 17 + 34 + 8, 59 + 34 + 18, 111 + 34 + 32]


def test_alpha_closed_form_bound():
    # Claim: alpha_j <= (r0 + (K-3)/4) * ((1 + 4/(K-3))^j - 1) for the ceiling recurrence
    for r0, K in ((17, 20), (16, 16), (5, 24)):
        denom = K - 3
        a, alphas = 0.0, []
        for j in range(1, 9):
            a = math.ceil(4 * r0 / denom + (1 + 4 / denom) * a - 1e-9)
            alphas.append(a)
        for j, aj in enumerate(alphas, 1):
            bound = (r0 + denom / 4) * ((1 + 4 / denom) ** j - 1)
            assert aj <= bound + 1e-9, (r0, K, j, aj, bound)


def test_supercluster_radius_oracle(small_unweighted_graph):
    g = small_unweighted_graph
    c = _clustering_with_radius(g, 3.0)
    _, H, out = supercluster_augment(g, 20**2, 2, 0.5, c, RngStream(7), steps=2)
    for tracked, oracle in zip(out.radii[1:], out.oracle_radii):
        assert oracle <= tracked + 1e-9


# --- long-distance construction ----------------------------------------------------


def test_long_dist_degenerate_T_zero():
    g = generate(GenSpec("gnp", {"n": 64, "p": 0.1}, seed=2))
    H = spanner_long_dist(g, 256, 2, 0.5, RngStream(0))
    assert H.ledger["plan"] == []
    assert H.ledger["branch"] == "integral"
    assert certify_spanner(g, H).ok


def test_long_dist_parameter_errors():
    g = generate(GenSpec("gnp", {"n": 16, "p": 0.3}, seed=2))
    with pytest.raises(ParameterError):
        spanner_long_dist(g, 8, 1, 0.5, RngStream(0))  # k < 16^(1/eps)
    with pytest.raises(ParameterError):
        spanner_long_dist(g, 256, 1, 0.7, RngStream(0))  # eps >= 1/2


def test_long_dist_fractional_branches_certify():
    g = generate(GenSpec("gnp", {"n": 48, "p": 0.15}, seed=6))
    H1 = spanner_long_dist(g, 512, 2, 0.45, RngStream(1))
    assert H1.ledger["branch"] == "fractional-full"
    assert certify_spanner(g, H1).ok
    H2 = spanner_long_dist(g, 512, 2, 0.49, RngStream(1))
    assert H2.ledger["branch"] == "fractional-partial"
    assert certify_spanner(g, H2).ok


def test_assemble_empty_graph():
    g = Graph.build(4, [])
    H = assemble_alpha_beta_spanner(g, 256, 0.5, RngStream(0))
    assert H.edge_count == 0


def test_assemble_tiny_graph_single_class():
    g = Graph.build(3, [(0, 1), (1, 2), (0, 2)])
    H = assemble_alpha_beta_spanner(g, 256, 0.5, RngStream(0))
    assert H.certificate["params"]["classes"] == [1]
    assert certify_spanner(g, H).ok


def test_assemble_union_size_ledger():
    g = generate(GenSpec("gnp", {"n": 64, "p": 0.08}, seed=9))
    H = assemble_alpha_beta_spanner(g, 256, 0.5, RngStream(3))
    per_class = H.ledger["per_class"]
    assert H.edge_count <= sum(row["edges"] for row in per_class)
    assert certify_spanner(g, H).ok


# --- (3+eps) meta-algorithm ----------------------------------------------------------


def test_three_eps_radius_table_eps16():
    sched = three_eps_schedule(4, 16.0, None, improved=False)
    assert sched.radii[1:] == [2.0, 12.0, 72.0]


def test_three_eps_improved_radius_table_eps8():
    sched = three_eps_schedule(4, 8.0, None, improved=True)
    assert sched.radii[1:] == [1.0, 4.0, 16.0]


def test_three_eps_oracle_radii_within_bound():
    g = generate(GenSpec("gnp", {"n": 64, "p": 0.15}, seed=4))
    for s in range(5):
        H = spanner_three_eps(g, 4, 16.0, RngStream(s))
        for ph in H.ledger["phases"]:
            assert ph["oracle_radius"] <= ph["tracked_radius"] + 1e-9
            assert ph["tracked_radius"] <= 2 * (5 + 16 / 16.0) ** (ph["phase"] - 1) + 1e-9


def test_three_eps_k1_neighbors_of_one_unclustered():
    g = generate(GenSpec("gnp", {"n": 32, "p": 0.15}, seed=5))
    for s in range(10):
        H = spanner_three_eps(g, 1, 1.0, RngStream(s))
        assert H.ledger["schedule"]["T"] == 1
        member = H.ledger["memberships"][1]  # after phase 1
        dh = exact_apsp(H.to_graph())
        for u, v in zip(g.eu, g.ev):
            if member[u] < 0 or member[v] < 0:
                assert dh[u, v] == 1.0


def test_three_eps_global_certificate():
    g = generate(GenSpec("gnp", {"n": 96, "p": 0.07}, seed=6))
    for s in range(5):
        for k, eps in ((2, 1.0), (3, 4.0)):
            H = spanner_three_eps(g, k, eps, RngStream(s))
            r = certify_spanner(g, H)
            assert r.ok, r.violations[:5]
            # subgraph property: spanner distance never below graph distance
            dh = exact_apsp(H.to_graph())
            dg = g.apsp
            fin = np.isfinite(dg)
            assert np.all(dh[fin] >= dg[fin] - 1e-9)


def test_three_eps_improved_certificate():
    g = generate(GenSpec("gnp", {"n": 96, "p": 0.07}, seed=6))
    for s in range(5):
        H = spanner_three_eps_improved(g, 4, 8.0, RngStream(s))
        r_T = H.ledger["schedule"]["radii"][-1]
        assert 4 * r_T == 64.0
        assert certify_spanner(g, H, alpha=11.0, beta=3 * 64.0).ok
        assert certify_spanner(g, H, alpha=3 + 8.0, beta=4 * r_T).ok


def test_three_eps_empty_final_clustering_is_legal():
    # tiny graph, aggressive k: the last phase often loses every cluster
    g = Graph.build(6, [(i, i + 1) for i in range(5)])
    seen_empty = False
    for s in range(40):
        H = spanner_three_eps(g, 2, 1.0, RngStream(s))
        seen_empty |= H.ledger["final_clusters"] == 0
        assert certify_spanner(g, H).ok
    assert seen_empty  # the degenerate branch was actually exercised


def test_three_eps_expectation_audit():
    g = generate(GenSpec("gnp", {"n": 128, "p": 0.08}, seed=7))
    out = audit_three_eps(g, 3, 1.0, seeds=range(100))
    assert out["ok"], out


def test_rho_schedule_shape():
    sched = three_eps_schedule(3, 1.0, 0.5, improved=False)
    assert sched.i0 == 1 and sched.i1 == 3 and sched.T == 4


# --- approximate S x V ---------------------------------------------------------------


def test_approx_sssp_identity_spanner():
    g = generate(GenSpec("gnp", {"n": 32, "p": 0.2}, seed=8))
    from spanhop.structures import EdgeSubgraph

    s = EdgeSubgraph(g)
    for u, v in zip(g.eu, g.ev):
        s.add_edge(int(u), int(v), "all")
    s.certificate = {"alpha": 1.0, "beta": 0.0}
    dist, cert = approx_sssp_via_spanner(g, [0, 5], s)
    assert np.allclose(dist, g.apsp[[0, 5]])
    assert cert["alpha"] == 1.0


def test_approx_sssp_empty_sources():
    g = generate(GenSpec("gnp", {"n": 16, "p": 0.3}, seed=9))
    H = spanner_three_eps(g, 2, 1.0, RngStream(0))
    dist, _ = approx_sssp_via_spanner(g, [], H)
    assert dist.shape == (0, 16)


def test_approx_sssp_within_certificate():
    g = generate(GenSpec("gnp", {"n": 64, "p": 0.12}, seed=10))
    H = spanner_three_eps(g, 3, 1.0, RngStream(1))
    dist, cert = approx_sssp_via_spanner(g, [0, 1, 2], H)
    dg = g.apsp[[0, 1, 2]]
    fin = np.isfinite(dg)
    assert np.all(dist[fin] <= cert["alpha"] * dg[fin] + cert["beta"] + 1e-6)
    assert np.all(dist[fin] >= dg[fin] - 1e-9)
