"""Hopset constructions on weighted graphs.

Every hop carries weight equal to the exact graph distance between its
endpoints.  Per-class constructions guarantee, for pairs in their distance
class, a bounded-hop path of bounded stretch:

  * hopset_small_hops     -- (18 k^eps, 8 k^(1-eps) + 1) for eps in [1/2, 1)
  * hopset_small_stretch  -- (9 k^eps, 36^(1/eps) k^(1-eps)) for eps < 1/2,
                             superclustering middle stage with hops
  * hopset_three_eps      -- (3 + 1.125 eps, 16 R') per class, the phase
                             meta-algorithm with hops; the full-aspect-ratio
                             driver consumes it with eps' = 8/9 eps
  * hopset_three_eps_improved -- tighter join radius, R' = (3+8/eps) k^log2(3+8/eps)

build_full_hopset unions per-class runs over a [d, 2d] class plan covering
the exact aspect ratio.  Certificates record both the recurrence-form hop
bound and the effective bound actually certified, which is clamped at n-1:
positive weights make every optimal walk simple, so a hopset with formula
bound >= n-1 is certified as an (alpha, n-1) hopset.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .clustering import (
    closest_center_rows,
    cluster_graph,
    basic_spanner,
    make_clustering,
    supercluster_phase,
    superclustering_plan,
)
from .graphs import DIST_TOL, INF, Graph, ParameterError, leq
from .rng import as_stream
from .structures import Hopset


@dataclass
class DistanceClassPlan:
    d_min: float
    d_max: float
    classes: list[tuple[float, float]] = field(default_factory=list)

    @property
    def aspect_ratio(self) -> float:
        return self.d_max / self.d_min if self.d_min > 0 else 1.0


def distance_class_plan(g: Graph, D=None) -> DistanceClassPlan:
    """[d, 2d] classes covering the exact extremal pairwise distances."""
    D = g.apsp if D is None else D
    off = D[np.isfinite(D) & (D > 0)]
    if len(off) == 0:
        return DistanceClassPlan(0.0, 0.0, [])
    d_min, d_max = float(off.min()), float(off.max())
    classes = []
    lo = d_min
    while True:
        classes.append((lo, 2 * lo))
        if 2 * lo >= d_max - DIST_TOL:
            break
        lo *= 2
    return DistanceClassPlan(d_min, d_max, classes)


def _effective_beta(beta_formula: float, n: int) -> int:
    """Hop bound actually certified; optimal walks are simple, so n-1 caps it."""
    return int(min(math.ceil(beta_formula - DIST_TOL), max(1, n - 1)))


def _certify_fields(h: Hopset, construction, alpha, beta_formula, d_range, params):
    h.certificate = {
        "construction": construction,
        "kind": "hopset",
        "alpha": float(alpha),
        "beta": _effective_beta(beta_formula, h.parent.n),
        "beta_formula": float(beta_formula),
        "d_range": [float(d_range[0]), float(d_range[1])] if d_range else None,
        "params": params,
        "hop_count": h.hop_count,
    }


# ---------------------------------------------------------------------------
# (18 k^eps, 8 k^(1-eps) + 1), eps in [1/2, 1)


def hopset_small_hops(g: Graph, k: int, d: float, eps: float, rng, D=None) -> Hopset:
    from .clustering import truncated_tz

    if not 0.5 <= eps < 1.0:
        raise ParameterError("eps must lie in [1/2, 1)")
    if k**eps < 10.0 - DIST_TOL:
        raise ParameterError(f"k^eps = {k**eps:.2f} < 10 (need k >= 10^(1/eps))")
    if d <= 0:
        raise ParameterError("d must be positive")
    D = g.apsp if D is None else D
    kceil = math.ceil(k**eps)
    r0 = d * (kceil + 1) / k ** (1.0 - eps)
    clustering, H = truncated_tz(g, k, kceil, r0, as_stream(rng), D=D)
    ghat = cluster_graph(g, clustering, 2.0 * r0 + d, D=D)
    hhat = basic_spanner(ghat, 2.0 * k ** (1.0 - eps) - 1.0)
    centers = clustering.centers
    for a, b in hhat:
        za, zb = int(centers[a]), int(centers[b])
        H.add_hop(za, zb, D[za, zb], "cluster-spanner")
    _certify_fields(
        H,
        "hopset-small-hops",
        alpha=18.0 * k**eps,
        beta_formula=8.0 * k ** (1.0 - eps) + 1.0,
        d_range=(d / 2.0, d),
        params={"k": k, "eps": eps, "d": d, "r0": r0, "kceil": kceil},
    )
    H.ledger.update(
        {
            "cluster_graph": {"nodes": ghat.nodes, "edges": len(ghat.edges), "kept": len(hhat)},
            "size_ledger": H.size_ledger(),
            "clusters": len(clustering.clusters),
        }
    )
    return H


# ---------------------------------------------------------------------------
# (9 k^eps, 36^(1/eps) k^(1-eps)), eps in (0, 1/2)


def cluster_and_augment_hop(g: Graph, k: int, eps: float, clustering, rng, D=None, steps=None):
    """One superclustering phase emitting hops; join hops come from every
    member vertex.  Sampling probability is min(n^(-1/k), |C|/n)."""
    kceil = math.ceil(k**eps)
    if kceil < 16:
        raise ParameterError("hop superclustering needs ceil(k^eps) >= 16")
    t = math.ceil(kceil / 4.0 - DIST_TOL)
    H = Hopset(g, tag="cluster-augment-hop")
    n0 = len(clustering.clusters)
    p = min(g.n ** (-1.0 / k), n0 / g.n) if g.n else 0.0
    out = supercluster_phase(
        g,
        clustering,
        kceil,
        steps if steps is not None else t,
        p,
        as_stream(rng),
        H,
        mode="hop",
        alpha_ceil=False,
        tag="cah",
        D=D,
    )
    return out.clustering, H, out


def hopset_small_stretch(g: Graph, k: int, d: float, eps: float, rng, D=None) -> Hopset:
    from .clustering import truncated_tz

    # eps = 1/2 is the degenerate zero-phase case and is legal
    if not 0.0 < eps <= 0.5:
        raise ParameterError("eps must lie in (0, 1/2]")
    if k < 16.0 ** (1.0 / eps) - DIST_TOL:
        raise ParameterError(f"k={k} below 16^(1/eps)={16.0 ** (1.0 / eps):.1f}")
    if d <= 0:
        raise ParameterError("d must be positive")
    D = g.apsp if D is None else D
    rng = as_stream(rng)
    kceil = math.ceil(k**eps)
    r_div = 0.5 * 36.0 ** (1.0 / eps) * k ** (1.0 - 2.0 * eps)
    r0 = d / r_div
    plan, t, branch = superclustering_plan(k, eps)
    clustering, H = truncated_tz(g, k, kceil, r0, rng.child(0), D=D)
    phase_tables = []
    for i, steps_i in enumerate(plan, 1):
        clustering, Hi, out = cluster_and_augment_hop(g, k, eps, clustering, rng.child(i), D=D, steps=steps_i)
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
    r_T = max((c.radius_bound for c in clustering.clusters), default=r0)
    centers = clustering.centers
    covered = clustering.covered()
    unc = np.flatnonzero(~covered)
    if len(unc) and len(centers):
        cd, ci = closest_center_rows(D, centers, unc)
        for v, dist, idx in zip(unc, cd, ci):
            if leq(dist, r_T + d):
                z = int(centers[idx])
                H.add_hop(int(v), z, D[v, z], "final/attach")
    ghat = cluster_graph(g, clustering, 2.0 * r_T + 2.0 * d, D=D)
    hhat = basic_spanner(ghat, 2 * kceil - 3)
    for a, b in hhat:
        za, zb = int(centers[a]), int(centers[b])
        H.add_hop(za, zb, D[za, zb], "final/cluster-spanner")
    widen = 1.0 if kceil % 4 == 0 else 4.0
    _certify_fields(
        H,
        "hopset-small-stretch",
        alpha=widen * 4.5 * k**eps,
        beta_formula=36.0 ** (1.0 / eps) * k ** (1.0 - eps),
        d_range=(d / 2.0, d),
        params={"k": k, "eps": eps, "d": d, "r0": r0, "kceil": kceil, "branch": branch},
    )
    H.ledger.update(
        {
            "plan": plan,
            "branch": branch,
            "t": t,
            "phase_tables": phase_tables,
            "r_T": r_T,
            "final_clusters": len(clustering.clusters),
            "cluster_graph": {"nodes": ghat.nodes, "edges": len(ghat.edges), "kept": len(hhat)},
            "size_ledger": H.size_ledger(),
        }
    )
    return H


# ---------------------------------------------------------------------------
# (3+eps, beta) hopsets: phase meta-algorithm with hops


def run_three_eps_hopset(g: Graph, k: int, d: float, eps: float, rng, rho=None,
                         improved: bool = False, D=None) -> Hopset:
    from .spanners import effective_eps, three_eps_schedule

    if k < 1:
        raise ParameterError("k must be >= 1")
    if d <= 0:
        raise ParameterError("d must be positive")
    eps_eff = effective_eps(eps)
    growth = (3.0 if improved else 5.0) + (8.0 if improved else 16.0) / eps_eff
    jf = 2.0 if improved else 4.0
    n = g.n
    D = g.apsp if D is None else D
    gen = as_stream(rng).generator()
    H = Hopset(g, tag="hopset3eps-improved" if improved else "hopset3eps")
    if rho is None:
        T = math.ceil(math.log2(k)) if k > 1 else 0
        i0 = i1 = None
        r_div = growth * k ** math.log2(growth) if improved else growth**T
    else:
        if not 0 < rho <= 1:
            raise ParameterError("rho must lie in (0, 1]")
        i0 = max(1, math.ceil(math.log2(k * rho)))
        i1 = math.ceil(2.0 / rho - 1.0)
        T = i0 + i1
        r_div = growth**T
    r0 = d / (2.0 * r_div)

    # first stage: a single center-sampling iteration
    mask = gen.random(n) < (n ** (-1.0 / k) if n else 0.0)
    A1 = np.flatnonzero(mask)
    if len(A1):
        pdist, pidx = closest_center_rows(D, A1, np.arange(n))
        pvt = A1[pidx]
    else:
        pdist = np.full(n, INF)
        pvt = np.full(n, -1, dtype=np.int64)
    groups = {}
    for v in range(n):
        if pvt[v] >= 0 and pvt[v] != v and np.isfinite(pdist[v]):
            H.add_hop(v, int(pvt[v]), pdist[v], "stage0/pivot")
        if leq(pdist[v], r0):
            groups.setdefault(int(pvt[v]), []).append(v)
    for v in range(n):
        if not leq(pdist[v], r0):
            near = np.flatnonzero(D[v] <= pdist[v] + DIST_TOL)
            for u in near:
                if int(u) != v and np.isfinite(D[v, u]):
                    H.add_hop(v, int(u), D[v, u], "stage0/unclustered-ball")
    clusters = [(z, np.asarray(mem, dtype=np.int64)) for z, mem in sorted(groups.items())]
    radii = [r0]
    alphas = []
    p_frozen = None
    phase_log = []
    memberships = []

    def _snapshot():
        member = np.full(n, -1, dtype=np.int64)
        for idx, (_, mem) in enumerate(clusters):
            member[mem] = idx
        memberships.append(member)

    _snapshot()
    for i in range(1, T + 1):
        r_prev = radii[-1]
        alpha_i = (4.0 / eps_eff) * r_prev
        r_i = growth * r_prev
        radii.append(r_i)
        alphas.append(alpha_i)
        if i0 is not None and i > i0:
            p_i = p_frozen
        else:
            p_i = len(clusters) / n if n else 0.0
        if i0 is not None and i == i0:
            p_frozen = p_i
        centers = np.array([c for c, _ in clusters], dtype=np.int64)
        member_of = np.full(n, -1, dtype=np.int64)
        for idx, (_, mem) in enumerate(clusters):
            member_of[mem] = idx
        # (1) attach
        unc = np.flatnonzero(member_of < 0)
        if len(unc) and len(centers):
            cd, ci = closest_center_rows(D, centers, unc)
            for v, dist, idx in zip(unc, cd, ci):
                if leq(dist, r_prev + alpha_i):
                    H.add_hop(int(v), int(centers[idx]), dist, f"phase{i}/attach")
        # (2) sample
        smask = gen.random(len(clusters)) < p_i
        sampled_idx = np.flatnonzero(smask)
        scenters = centers[sampled_idx]
        # (3) join: every member vertex hops to the new center
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
            if leq(bd, jf * (r_prev + alpha_i)):
                si = int(sampled_idx[best])
                joined[si].append(cidx)
                z = int(scenters[best])
                for u in clusters[cidx][1]:
                    if int(u) != z:
                        H.add_hop(int(u), z, D[u, z], f"phase{i}/join")
            else:
                lost.append(cidx)
        # (5) lost centers hop to every center within reach
        hops5 = 0
        for cidx in lost:
            cc = int(centers[cidx])
            near = np.flatnonzero(D[centers, cc] <= 2.0 * (r_prev + alpha_i) + DIST_TOL)
            for c2 in near:
                z = int(centers[c2])
                if z != cc:
                    H.add_hop(cc, z, D[cc, z], f"phase{i}/step5")
                    hops5 += 1
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
                "hops5": hops5,
                "tracked_radius": r_i,
                "oracle_radius": oracle_r,
            }
        )
        clusters = new_clusters
        _snapshot()
    r_T = radii[-1]
    # final stage: hop from every vertex near a remaining center
    for z, _ in clusters:
        near = np.flatnonzero(D[z] <= r_T + 2.0 * d + DIST_TOL)
        for v in near:
            if int(v) != z:
                H.add_hop(int(v), z, D[z, v], "final/center")
    name = "hopset3eps-improved" if improved else "hopset3eps"
    _certify_fields(
        H,
        name,
        alpha=3.0 + 1.125 * eps_eff,
        beta_formula=16.0 * r_div,
        d_range=(d, 2.0 * d),
        params={
            "k": k,
            "eps": eps,
            "eps_effective": eps_eff,
            "d": d,
            "rho": rho,
            "r0": r0,
            "r_div": r_div,
            "T": T,
            "i0": i0,
            "i1": i1,
        },
    )
    H.ledger.update(
        {
            "phases": phase_log,
            "radii": radii,
            "alphas": alphas,
            "memberships": memberships,
            "r_T": r_T,
            "final_clusters": len(clusters),
            "size_ledger": H.size_ledger(),
        }
    )
    return H


def hopset_three_eps(g: Graph, k: int, d: float, eps: float, rng, rho=None, D=None) -> Hopset:
    return run_three_eps_hopset(g, k, d, eps, rng, rho=rho, improved=False, D=D)


def hopset_three_eps_improved(g: Graph, k: int, d: float, eps: float, rng, D=None) -> Hopset:
    return run_three_eps_hopset(g, k, d, eps, rng, rho=None, improved=True, D=D)


# ---------------------------------------------------------------------------
# Full aspect-ratio driver

HOPSET_VARIANTS = ("small-hops", "small-stretch", "3eps", "3eps-improved")


def build_full_hopset(g: Graph, k: int, eps: float, variant: str, rng, rho=None, D=None) -> Hopset:
    """Union of per-class hopsets over the [d, 2d] class plan.

    The 3eps variants consume the user's eps with eps' = 8/9 eps, so the
    certified stretch is 3 + 1.125 eps' <= 3 + eps.
    """
    if variant not in HOPSET_VARIANTS:
        raise ParameterError(f"unknown hopset variant {variant!r}")
    D = g.apsp if D is None else D
    rng = as_stream(rng)
    plan = distance_class_plan(g, D)
    H = Hopset(g, tag=f"full-{variant}")
    alpha, beta_formula = 1.0, 1.0
    per_class = []
    for idx, (lo, hi) in enumerate(plan.classes):
        child = rng.child(idx)
        if variant == "small-hops":
            Hc = hopset_small_hops(g, k, hi, eps, child, D=D)
        elif variant == "small-stretch":
            Hc = hopset_small_stretch(g, k, hi, eps, child, D=D)
        elif variant == "3eps":
            Hc = hopset_three_eps(g, k, lo, 8.0 * eps / 9.0, child, rho=rho, D=D)
        else:
            Hc = hopset_three_eps_improved(g, k, lo, 8.0 * eps / 9.0, child, D=D)
        H.union_from(Hc)
        alpha = max(alpha, Hc.certificate["alpha"])
        beta_formula = max(beta_formula, Hc.certificate["beta_formula"])
        per_class.append({"class": [lo, hi], "hops": Hc.hop_count, "alpha": Hc.certificate["alpha"]})
    _certify_fields(
        H,
        f"full-{variant}",
        alpha=alpha,
        beta_formula=beta_formula,
        d_range=(plan.d_min, plan.d_max) if plan.classes else None,
        params={"k": k, "eps": eps, "variant": variant, "rho": rho},
    )
    H.certificate["classes"] = [[lo, hi] for lo, hi in plan.classes]
    H.ledger = {
        "per_class": per_class,
        "aspect_ratio": plan.aspect_ratio,
        "size_ledger": H.size_ledger(),
    }
    return H
