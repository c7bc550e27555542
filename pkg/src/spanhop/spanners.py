"""Spanner constructions.

Four constructions plus the distance-class assembler and an approximate
S x V solver on top of any certified spanner:

  * spanner_short_dist   -- truncated clustering + cluster-graph spanner,
                            stretch 7k/d for pairs at distance d <= sqrt(k)/2
  * spanner_long_dist    -- superclustering middle stage, per-distance
                            guarantee 4 k^eps d + 64^(1/eps) k / 6
  * assemble_alpha_beta_spanner -- union over distance classes, certified
                            (8 k^eps, 64^(1/eps) k)
  * spanner_three_eps / spanner_three_eps_improved -- the phase meta-
                            algorithm, certified (3+eps, beta); with the
                            efficiency parameter rho it switches to the
                            frozen-sampling schedule, truncates the final
                            trees to depth 5 r_T and certifies (4+eps, beta)

All constructions are deterministic under their RngStream.  Cost-model
simulators drive run_three_eps_spanner with a recorder; recorders observe
wave depths and coverage but never influence a single decision, so every
execution model emits the identical edge set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import dijkstra

from .clustering import (
    Clustering,
    basic_spanner,
    closest_center_rows,
    cluster_graph,
    make_clustering,
    singleton_clustering,
    supercluster_phase,
    superclustering_plan,
    truncated_baswana_sen,
)
from .graphs import DIST_TOL, INF, Graph, ParameterError, bfs_tree_edges, leq, walk_shortest_path
from .rng import as_stream
from .structures import EdgeSubgraph


def effective_eps(eps: float) -> float:
    """Largest eps' <= eps with 4/eps' integral; eps > 4 is kept as given
    (no integral 4/eps exists there and the recurrences need no rounding)."""
    if eps <= 0:
        raise ParameterError("eps must be positive")
    if eps > 4:
        return float(eps)
    return 4.0 / math.ceil(4.0 / eps - DIST_TOL)


@dataclass
class PhaseSchedule:
    """Resolved schedule of the phase meta-algorithm."""

    T: int
    alphas: list[float]
    radii: list[float]  # radii[i] = tracked bound after phase i; radii[0] = 0
    rho: float | None = None
    i0: int | None = None
    i1: int | None = None
    probs: list[float] = field(default_factory=list)  # realized p_i, filled by the run


def three_eps_schedule(k: int, eps_eff: float, rho, improved: bool) -> PhaseSchedule:
    if k < 1:
        raise ParameterError("k must be >= 1")
    growth = (3.0 if improved else 5.0) + (8.0 if improved else 16.0) / eps_eff
    jf = 2.0 if improved else 4.0
    if rho is None:
        T = math.ceil(math.log2(k) + 1) if k > 1 else 1
        i0 = i1 = None
    else:
        if not 0 < rho <= 1:
            raise ParameterError("rho must lie in (0, 1]")
        i0 = max(1, math.ceil(math.log2(k * rho)))
        i1 = math.ceil(2.0 / rho - 1.0)
        T = i0 + i1
    radii = [0.0]
    alphas = []
    for i in range(1, T + 1):
        a = 0.5 if i == 1 else (4.0 / eps_eff) * radii[-1]
        alphas.append(a)
        radii.append(radii[-1] + jf * (radii[-1] + a))
    return PhaseSchedule(T=T, alphas=alphas, radii=radii, rho=rho, i0=i0, i1=i1)


class NullRecorder:
    """Cost-model observer interface; the default observes nothing."""

    wants_cover = False

    def wave(self, phase: int, kind: str, depth: float, edges_now: int) -> None:
        pass

    def step5(self, phase, depth, dist_rows, p_i, edges_now) -> None:
        pass

    def final(self, depth, dist_rows, edges_now) -> None:
        pass


def run_three_eps_spanner(g: Graph, k: int, eps: float, rng, rho=None,
                          improved: bool = False, recorder=None, D=None) -> EdgeSubgraph:
    """Phase meta-algorithm engine; see spanner_three_eps for the contract."""
    if g.weighted:
        raise ParameterError("spanner constructions require an unweighted graph")
    rec = recorder or NullRecorder()
    eps_eff = effective_eps(eps)
    sched = three_eps_schedule(k, eps_eff, rho, improved)
    jf = 2.0 if improved else 4.0
    n = g.n
    H = EdgeSubgraph(g, tag="spanner3eps-improved" if improved else "spanner3eps")
    phase_log = []
    memberships = []
    if n == 0:
        final_r = 0.0
        clusters = []
    else:
        D = g.apsp if D is None else D
        gen = as_stream(rng).generator()
        clusters = [(v, np.array([v], dtype=np.int64)) for v in range(n)]
        p_frozen = None
        member_of = np.zeros(n, dtype=np.int64)
        for i in range(1, sched.T + 1):
            alpha_i = sched.alphas[i - 1]
            r_prev, r_i = sched.radii[i - 1], sched.radii[i]
            if sched.i0 is not None and i > sched.i0:
                p_i = p_frozen
            elif i == 1:
                p_i = n ** (-1.0 / k)
            else:
                p_i = len(clusters) / n
            if sched.i0 is not None and i == sched.i0:
                p_frozen = p_i
            sched.probs.append(p_i)

            centers = np.array([c for c, _ in clusters], dtype=np.int64)
            member_of.fill(-1)
            for idx, (_, mem) in enumerate(clusters):
                member_of[mem] = idx
            memberships.append(member_of.copy())
            depth1 = r_prev + alpha_i
            # (1) attach near-enough unclustered vertices to their closest center
            unc = np.flatnonzero(member_of < 0)
            if len(unc) and len(centers):
                cd, ci = closest_center_rows(D, centers, unc)
                for v, dist, idx in zip(unc, cd, ci):
                    if leq(dist, depth1):
                        z = int(centers[idx])
                        H.add_path(walk_shortest_path(g, D[z], int(v), z), f"phase{i}/attach")
            rec.wave(i, "attach", depth1, H.edge_count)
            # (2) sample clusters
            smask = gen.random(len(clusters)) < p_i
            sampled_idx = np.flatnonzero(smask)
            scenters = centers[sampled_idx]
            # (3) join the closest sampled cluster within reach
            depth3 = jf * (r_prev + alpha_i)
            joined: dict[int, list[int]] = {int(si): [] for si in sampled_idx}
            lost = []
            for cidx in range(len(clusters)):
                if smask[cidx]:
                    continue
                if len(scenters):
                    dists = D[scenters, centers[cidx]]
                    best = int(np.argmax(dists <= dists.min() + DIST_TOL))
                    bd = float(dists[best])
                else:
                    bd = INF
                if leq(bd, depth3):
                    si = int(sampled_idx[best])
                    joined[si].append(cidx)
                    z = int(scenters[best])
                    H.add_path(walk_shortest_path(g, D[z], int(centers[cidx]), z), f"phase{i}/join")
                else:
                    lost.append(cidx)
            rec.wave(i, "join", depth3, H.edge_count)
            # (5) lost clusters report to every center within the step-5 radius
            depth5 = 2.0 * (r_prev + alpha_i)
            paths5 = 0
            for cidx in lost:
                cc = int(centers[cidx])
                near = np.flatnonzero(D[centers, cc] <= depth5 + DIST_TOL)
                for c2 in near:
                    z = int(centers[c2])
                    if z != cc:
                        H.add_path(walk_shortest_path(g, D[z], cc, z), f"phase{i}/step5")
                        paths5 += 1
            rec.step5(i, depth5, D[centers[lost]] if rec.wants_cover else None, p_i, H.edge_count)
            # (4) the new clustering: sampled stars
            new_clusters = []
            for si in sampled_idx:
                mem = [clusters[int(si)][1]] + [clusters[c][1] for c in joined[int(si)]]
                new_clusters.append((clusters[int(si)][0], np.sort(np.concatenate(mem))))
            oracle_r = 0.0
            for c, mem in new_clusters:
                if len(mem):
                    oracle_r = max(oracle_r, float(D[c, mem].max()))
            phase_log.append(
                {
                    "phase": i,
                    "p": float(p_i),
                    "clusters_before": len(clusters),
                    "clusters_after": len(new_clusters),
                    "lost": len(lost),
                    "paths5": paths5,
                    "tracked_radius": r_i,
                    "oracle_radius": oracle_r,
                }
            )
            clusters = new_clusters
        final_member = np.full(n, -1, dtype=np.int64)
        for idx, (_, mem) in enumerate(clusters):
            final_member[mem] = idx
        memberships.append(final_member)
        final_r = sched.radii[sched.T]
        # final stage: BFS trees from the remaining centers (skipped when empty);
        # truncated to depth 5 r_T under the efficiency schedule
        depth_final = None if rho is None else 5.0 * final_r
        for c, _ in clusters:
            H.add_path(bfs_tree_edges(g, int(c), depth_final, D[c]), "final/bfs-tree")
        if rec.wants_cover and clusters:
            fcenters = np.array([c for c, _ in clusters], dtype=np.int64)
            rec.final(depth_final if depth_final is not None else float(n), D[fcenters], H.edge_count)
        else:
            rec.final(depth_final if depth_final is not None else float(n), None, H.edge_count)

    growth = (3.0 if improved else 5.0) + (8.0 if improved else 16.0) / eps_eff
    if rho is None:
        alpha = 3.0 + eps_eff
        beta = 4.0 * final_r if improved else 8.0 * k ** math.log2(5.0 + 16.0 / eps_eff)
    else:
        alpha = 4.0 + eps_eff
        beta = (16.0 + 4.0 * eps_eff) * final_r
    H.certificate = {
        "construction": "spanner3eps-improved" if improved else "spanner3eps",
        "kind": "spanner",
        "alpha": alpha,
        "beta": beta,
        "params": {"k": k, "eps": eps, "eps_effective": eps_eff, "rho": rho},
        "edge_count": H.edge_count,
    }
    H.ledger = {
        "phases": phase_log,
        "schedule": {
            "T": sched.T,
            "i0": sched.i0,
            "i1": sched.i1,
            "alphas": sched.alphas,
            "radii": sched.radii,
            "probs": sched.probs,
            "growth": growth,
        },
        "memberships": memberships,
        "final_clusters": len(clusters),
        "size_ledger": H.size_ledger(),
    }
    return H


def spanner_three_eps(g: Graph, k: int, eps: float, rng, rho=None, D=None) -> EdgeSubgraph:
    """(3+eps, beta) spanner, beta = 8 k^log2(5+16/eps); with rho the
    frozen-sampling schedule gives (4+eps, (16+4 eps) r_T) instead."""
    return run_three_eps_spanner(g, k, eps, rng, rho=rho, improved=False, D=D)


def spanner_three_eps_improved(g: Graph, k: int, eps: float, rng, D=None) -> EdgeSubgraph:
    """Tighter join radius: (3+eps, 4 r_T) with r_T <= (3+8/eps)^(T-1)."""
    return run_three_eps_spanner(g, k, eps, rng, rho=None, improved=True, D=D)


# ---------------------------------------------------------------------------
# Short-distance construction


def spanner_short_dist(g: Graph, k: int, d: int, rng, D=None) -> EdgeSubgraph:
    """Stretch 7k/d for every pair at distance exactly d, d <= sqrt(k)/2."""
    if g.weighted:
        raise ParameterError("spanner constructions require an unweighted graph")
    if k < 1:
        raise ParameterError("k must be >= 1")
    dmax = math.floor(math.sqrt(k) / 2.0 + DIST_TOL)
    if not 1 <= d <= dmax:
        raise ParameterError(f"d={d} outside [1, floor(sqrt(k)/2)={dmax}]")
    D = g.apsp if D is None else D
    rng = as_stream(rng)
    t = k // d
    clustering, H = truncated_baswana_sen(g, k, t, rng.child(0), D=D)
    threshold = d + 2.0 * k / d
    ghat = cluster_graph(g, clustering, threshold, D=D)
    hhat = basic_spanner(ghat, 2 * d - 1)
    centers = clustering.centers
    for a, b in hhat:
        za, zb = int(centers[a]), int(centers[b])
        src, dst = max(za, zb), min(za, zb)
        H.add_path(walk_shortest_path(g, D[dst], src, dst), "cluster-spanner")
    H.certificate = {
        "construction": "spanner-short-dist",
        "kind": "spanner",
        "alpha": 0.0,
        "beta": 7.0 * k,
        "d_range": [d, d],
        "params": {"k": k, "d": d},
        "edge_count": H.edge_count,
    }
    H.ledger.update(
        {
            "bs_steps": t,
            "cluster_graph": {"nodes": ghat.nodes, "edges": len(ghat.edges), "kept": len(hhat)},
            "size_ledger": H.size_ledger(),
        }
    )
    return H


# ---------------------------------------------------------------------------
# Long-distance construction (superclustering middle stage)


def _check_long_dist_params(k: int, eps: float):
    # eps = 1/2 is the degenerate zero-phase case and is legal
    if not 0 < eps <= 0.5:
        raise ParameterError("eps must lie in (0, 1/2]")
    if k < 16.0 ** (1.0 / eps) - DIST_TOL:
        raise ParameterError(f"k={k} below 16^(1/eps)={16.0 ** (1.0 / eps):.1f}")


def supercluster_augment(g: Graph, k: int, t: int, eps: float, clustering: Clustering,
                         rng, D=None, steps=None):
    """One phase of supercluster growing for the long-distance spanner.

    Returns (new clustering, EdgeSubgraph with this phase's paths, outcome).
    t is ceil(k^eps)/4 rounded up; `steps` overrides it for the fractional
    final phase.
    """
    if g.weighted:
        raise ParameterError("supercluster augmentation inlines paths; unweighted only")
    kceil = math.ceil(k**eps)
    if math.ceil(kceil / 4.0) < 1 or kceil < 16:
        raise ParameterError("supercluster augmentation needs ceil(k^eps) >= 16")
    t = int(t)
    H = EdgeSubgraph(g, tag="supercluster-augment")
    n0 = len(clustering.clusters)
    p = n0 / g.n if g.n else 0.0
    out = supercluster_phase(
        g,
        clustering,
        kceil,
        steps if steps is not None else t,
        p,
        as_stream(rng),
        H,
        mode="path",
        alpha_ceil=True,
        tag="sca",
        D=D,
    )
    return out.clustering, H, out


def spanner_long_dist(g: Graph, k: int, d: int, eps: float, rng, D=None) -> EdgeSubgraph:
    """Per-distance guarantee dist_H <= 4 k^eps d + 64^(1/eps) k / 6 for
    pairs at distance exactly d (widened x4 when 4 does not divide ceil(k^eps))."""
    if g.weighted:
        raise ParameterError("spanner constructions require an unweighted graph")
    _check_long_dist_params(k, eps)
    if d < 1:
        raise ParameterError("d must be >= 1")
    D = g.apsp if D is None else D
    rng = as_stream(rng)
    kceil = math.ceil(k**eps)
    plan, t, branch = superclustering_plan(k, eps)
    clustering, H = truncated_baswana_sen(g, k, kceil, rng.child(0), D=D)
    phase_tables = []
    for i, steps_i in enumerate(plan, 1):
        clustering, Hi, out = supercluster_augment(
            g, k, t, eps, clustering, rng.child(i), D=D, steps=steps_i
        )
        H.union_from(Hi)
        phase_tables.append(
            {
                "phase": i,
                "steps": steps_i,
                "alphas": out.alphas,
                "radii": out.radii,
                "oracle_radii": out.oracle_radii,
                "sc_counts": out.sc_counts,
                "r_in": out.radii[0],
                "r_out": out.radii[-1],
            }
        )
    r_T = max((c.radius_bound for c in clustering.clusters), default=float(kceil))
    # finalizing stage
    centers = clustering.centers
    covered = clustering.covered()
    unc = np.flatnonzero(~covered)
    if len(unc) and len(centers):
        cd, ci = closest_center_rows(D, centers, unc)
        for v, dist, idx in zip(unc, cd, ci):
            if leq(dist, r_T + d):
                z = int(centers[idx])
                H.add_path(walk_shortest_path(g, D[z], int(v), z), "final/attach")
    ghat = cluster_graph(g, clustering, 2.0 * r_T + 2.0 * d, D=D)
    hhat = basic_spanner(ghat, 2 * kceil - 3)
    for a, b in hhat:
        za, zb = int(centers[a]), int(centers[b])
        src, dst = max(za, zb), min(za, zb)
        H.add_path(walk_shortest_path(g, D[dst], src, dst), "final/cluster-spanner")
    widen = 1.0 if kceil % 4 == 0 else 4.0
    H.certificate = {
        "construction": "spanner-long-dist",
        "kind": "spanner",
        "alpha": widen * 4.0 * k**eps,
        "beta": widen * (64.0 ** (1.0 / eps)) * k / 6.0,
        "d_range": [d, d],
        "params": {"k": k, "d": d, "eps": eps, "branch": branch},
        "edge_count": H.edge_count,
    }
    H.ledger.update(
        {
            "plan": plan,
            "branch": branch,
            "t": t,
            "kceil": kceil,
            "phase_tables": phase_tables,
            "r_T": r_T,
            "final_clusters": len(clustering.clusters),
            "cluster_graph": {"nodes": ghat.nodes, "edges": len(ghat.edges), "kept": len(hhat)},
            "size_ledger": H.size_ledger(),
        }
    )
    return H


def assemble_alpha_beta_spanner(g: Graph, k: int, eps: float, rng, D=None) -> EdgeSubgraph:
    """Union of long-distance spanners over d in {1, 2, 4, ...}: the
    (8 k^eps, 64^(1/eps) k) spanner."""
    _check_long_dist_params(k, eps)
    D = g.apsp if D is None else D
    rng = as_stream(rng)
    H = EdgeSubgraph(g, tag="spanner-alpha-beta")
    finite = D[np.isfinite(D)]
    diam = float(finite.max()) if len(finite) else 0.0
    bound = (64.0 ** (1.0 / eps)) * k ** (1.0 - eps)
    classes = []
    if diam > 0:
        limit = min(diam, bound)
        d = 1
        while True:
            classes.append(min(d, math.ceil(bound)))
            if d >= limit:
                break
            d *= 2
    per_class = []
    for idx, d in enumerate(classes):
        Hd = spanner_long_dist(g, k, d, eps, rng.child(idx), D=D)
        H.union_from(Hd)
        per_class.append({"d": d, "edges": Hd.edge_count})
    H.certificate = {
        "construction": "spanner-alpha-beta",
        "kind": "spanner",
        "alpha": 8.0 * k**eps,
        "beta": (64.0 ** (1.0 / eps)) * k,
        "params": {"k": k, "eps": eps, "classes": classes},
        "edge_count": H.edge_count,
    }
    H.ledger = {"per_class": per_class, "size_ledger": H.size_ledger(), "diameter": diam}
    return H


# ---------------------------------------------------------------------------
# Approximate S x V distances via a spanner


def approx_sssp_via_spanner(g: Graph, sources, spanner: EdgeSubgraph):
    """Exact distances on the spanner, reported with its certificate."""
    if spanner.parent is not g and spanner.parent.n != g.n:
        raise ParameterError("spanner was not built on this graph")
    sources = np.asarray(sorted(int(s) for s in sources), dtype=np.int64)
    if len(sources) == 0:
        return np.zeros((0, g.n)), dict(spanner.certificate)
    hg = spanner.to_graph()
    if hg.m == 0:
        dist = np.full((len(sources), g.n), INF)
        dist[np.arange(len(sources)), sources] = 0.0
    else:
        dist = dijkstra(hg.csr, directed=False, indices=sources, unweighted=not hg.weighted)
    return dist, dict(spanner.certificate)
