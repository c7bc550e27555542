"""Shared clustering machinery.

Clusters and superclusters with tracked radius bounds, center distances,
the truncated randomized clustering of Baswana-Sen, the truncated
Thorup-Zwick hierarchy, Bernoulli cluster sampling, cluster graphs, the
greedy multiplicative spanner, and the superclustering phase engine shared
by the long-distance spanner and the small-stretch hopset.

Tie rules used everywhere:
  * "closest" collections break distance ties by minimum cluster id,
  * cluster ids are assigned in center-vertex-id order,
  * inlined shortest paths walk to the minimum-id neighbor closer to the
    target, so paths toward one target form a forest and reuse edges.
Tracked radius bounds are maintained by the paper-facing recurrences; tests
audit oracle radii against them.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import DIST_TOL, INF, Graph, ParameterError, leq, lt, walk_shortest_path
from .rng import RngStream, as_stream
from .structures import EdgeSubgraph, Hopset


@dataclass
class Cluster:
    id: int
    center: int
    members: np.ndarray
    radius_bound: float


@dataclass
class Clustering:
    n: int
    clusters: list[Cluster]
    tag: str = ""

    @property
    def centers(self) -> np.ndarray:
        return np.array([c.center for c in self.clusters], dtype=np.int64)

    def vertex_cluster(self) -> np.ndarray:
        """Cluster id per vertex, -1 for unclustered."""
        out = np.full(self.n, -1, dtype=np.int64)
        for c in self.clusters:
            out[c.members] = c.id
        return out

    def covered(self) -> np.ndarray:
        return self.vertex_cluster() >= 0


@dataclass
class SuperCluster:
    id: int
    center: int
    member_clusters: list[int]
    radius_bound: float


@dataclass
class SuperClustering:
    superclusters: list[SuperCluster]
    tag: str = ""


def make_clustering(n, groups, radius_bound, tag="") -> Clustering:
    """Build a Clustering from (center, members) pairs; ids in center order."""
    groups = sorted(groups, key=lambda g: g[0])
    clusters = [
        Cluster(i, int(center), np.sort(np.asarray(members, dtype=np.int64)), radius_bound)
        for i, (center, members) in enumerate(groups)
    ]
    for c in clusters:
        if c.center not in c.members:
            raise ParameterError(f"center {c.center} outside its cluster")
    return Clustering(n=n, clusters=clusters, tag=tag)


def singleton_clustering(n) -> Clustering:
    return make_clustering(n, [(v, [v]) for v in range(n)], 0.0, tag="singletons")


# ---------------------------------------------------------------------------
# Center distances


def _center_of(obj):
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return int(obj.center)


def c_dist(D: np.ndarray, a, b) -> float:
    """Center distance; for collections, the minimum over elements.

    a is a vertex, Cluster, or SuperCluster; b additionally may be a
    Clustering or SuperClustering.  Empty collections give inf.
    """
    dist, _ = closest(D, a, b)
    return dist


def closest(D: np.ndarray, a, b):
    """(distance, element) of the closest element of b to a.

    Ties break toward the smaller cluster/supercluster id; a singleton b
    returns itself.  Empty collections give (inf, None).
    """
    ca = _center_of(a)
    if isinstance(b, Clustering):
        elems = b.clusters
    elif isinstance(b, SuperClustering):
        elems = b.superclusters
    elif isinstance(b, (list, tuple)):
        elems = list(b)
    else:
        return float(D[ca, _center_of(b)]), b
    if not elems:
        return INF, None
    centers = np.array([_center_of(e) for e in elems], dtype=np.int64)
    dists = D[centers, ca]
    best = dists.min()
    idx = int(np.argmax(dists <= best + DIST_TOL))
    return float(dists[idx]), elems[idx]


def closest_center_rows(D, centers, verts):
    """Vectorized closest-center query for many vertices at once.

    centers must be listed in cluster-id order; ties then resolve to the
    smaller id.  Returns (dist array, index-into-centers array).
    """
    if len(centers) == 0:
        return np.full(len(verts), INF), np.full(len(verts), -1, dtype=np.int64)
    sub = D[np.ix_(np.asarray(centers), np.asarray(verts))]
    mn = sub.min(axis=0)
    idx = (sub <= mn + DIST_TOL).argmax(axis=0)
    return mn, idx


# ---------------------------------------------------------------------------
# Sampling


def sample_clusters(collection, p: float, rng) -> tuple[np.ndarray, list]:
    """Independent Bernoulli(p) over the elements, in id order.

    Returns (boolean mask, selected elements).  Deterministic under a fixed
    RngStream seed.
    """
    if not (0.0 <= p <= 1.0):
        raise ParameterError("sampling probability outside [0,1]")
    if isinstance(collection, Clustering):
        elems = collection.clusters
    elif isinstance(collection, SuperClustering):
        elems = collection.superclusters
    else:
        elems = list(collection)
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    mask = gen.random(len(elems)) < p
    return mask, [e for e, m in zip(elems, mask) if m]


# ---------------------------------------------------------------------------
# Truncated Baswana-Sen


def truncated_baswana_sen(g: Graph, k: int, t: int, rng, D=None):
    """t sampling steps of the randomized clustering over singletons.

    Returns (clustering, H).  H carries the per-level cluster label arrays
    and realized cluster counts in its ledger so the contract checks (radius
    <= level, unclustered-edge detours <= 2i-1, expected sizes) can audit
    every level.
    """
    if g.weighted:
        raise ParameterError("truncated clustering is defined for unweighted graphs")
    if k < 1:
        raise ParameterError("k must be >= 1")
    if t < 0 or t > k:
        raise ParameterError(f"step count t={t} outside [0, k={k}]")
    n = g.n
    gen = as_stream(rng).generator()
    H = EdgeSubgraph(g, tag="truncated-bs")
    q = n ** (-1.0 / k) if n > 0 else 0.0
    # cluster label = center vertex id; -1 = unclustered for good
    label = np.arange(n, dtype=np.int64)
    parent = np.full(n, -1, dtype=np.int64)
    indptr, indices, _ = g._adj
    levels = [label.copy()]
    counts = []
    for step in range(1, t + 1):
        ids = np.unique(label[label >= 0])
        smask = gen.random(len(ids)) < q
        sampled = set(ids[smask].tolist())
        new_label = np.full(n, -1, dtype=np.int64)
        for v in range(n):
            c = label[v]
            if c < 0:
                continue
            if c in sampled:
                new_label[v] = c
                continue
            nbrs = indices[indptr[v]:indptr[v + 1]]
            best = {}
            for u in nbrs:
                cu = label[u]
                if cu < 0:
                    continue
                cu = int(cu)
                if cu not in best or u < best[cu]:
                    best[cu] = int(u)
            sampled_adj = [c2 for c2 in best if c2 in sampled]
            if sampled_adj:
                c2 = min(sampled_adj)
                w = best[c2]
                new_label[v] = c2
                parent[v] = w
                H.add_edge(v, w, f"bs/step{step}/join")
            else:
                # one edge into each adjacent cluster of the previous level
                for c2 in sorted(best):
                    H.add_edge(v, best[c2], f"bs/step{step}/unclustered")
                parent[v] = -1
        # spanning trees of the current clusters (all levels accumulate)
        for v in np.flatnonzero((new_label >= 0) & (parent >= 0)):
            H.add_edge(int(v), int(parent[v]), f"bs/step{step}/tree")
        label = new_label
        levels.append(label.copy())
        counts.append(int(np.unique(label[label >= 0]).size))
    groups = [(int(c), np.flatnonzero(label == c)) for c in np.unique(label[label >= 0])]
    clustering = make_clustering(n, groups, radius_bound=float(t), tag=f"bs-t{t}")
    H.ledger = {"levels": levels, "cluster_counts": counts, "k": k, "t": t}
    return clustering, H


# ---------------------------------------------------------------------------
# Truncated Thorup-Zwick


def truncated_tz(g: Graph, k: int, l: int, r0: float, rng, D=None):
    """l sub-sampling levels of the center hierarchy plus an r0-clustering.

    Emits one hop per bunch member and per pivot, then clusters of radius r0
    centered at the deepest level with a hop from each member to its center.
    Returns (clustering, hopset); hopset.meta holds levels, pivots and bunch
    sizes for the contract audits.
    """
    if k < 2:
        raise ParameterError("k must be >= 2 for the truncated hierarchy")
    if not 1 <= l <= k - 1:
        raise ParameterError(f"level count l={l} outside [1, k-1={k - 1}]")
    if r0 < 0:
        raise ParameterError("cluster radius must be nonnegative")
    n = g.n
    D = g.apsp if D is None else D
    gen = as_stream(rng).generator()
    q = n ** (-1.0 / k) if n > 0 else 0.0
    levels = [np.arange(n, dtype=np.int64)]
    for _ in range(l):
        prev = levels[-1]
        keep = gen.random(len(prev)) < q
        levels.append(prev[keep])
    pivot = np.full((l + 1, n), -1, dtype=np.int64)
    pdist = np.full((l + 1, n), INF)
    pivot[0] = np.arange(n)
    pdist[0] = 0.0
    for i in range(1, l + 1):
        if len(levels[i]):
            d_i, idx = closest_center_rows(D, levels[i], np.arange(n))
            pivot[i] = levels[i][idx]
            pdist[i] = d_i
            pivot[i][~np.isfinite(d_i)] = -1
    hopset = Hopset(g, tag=f"tz-l{l}")
    for i in range(1, l + 1):
        for v in range(n):
            pv = pivot[i, v]
            if pv >= 0 and pv != v:
                hopset.add_hop(v, pv, D[v, pv], f"tz/pivot{i}")
    bunch_sizes = np.zeros((l, n))
    for i in range(l):
        cand = np.setdiff1d(levels[i], levels[i + 1])
        if len(cand) == 0:
            continue
        inb = D[:, cand] < pdist[i + 1][:, None] - DIST_TOL
        bunch_sizes[i] = inb.sum(axis=1)
        for v, j in zip(*np.nonzero(inb)):
            u = int(cand[j])
            if u != v:
                hopset.add_hop(int(v), u, D[v, u], f"tz/bunch{i}")
    # clusters of radius r0 centered at the deepest level
    groups = []
    if len(levels[l]):
        cd, ci = closest_center_rows(D, levels[l], np.arange(n))
        member = cd <= r0 + DIST_TOL
        centers = levels[l][ci]
        for z in levels[l]:
            mem = np.flatnonzero(member & (centers == z))
            if len(mem):
                groups.append((int(z), mem))
                for u in mem:
                    if int(u) != int(z):
                        hopset.add_hop(int(u), int(z), D[u, z], "tz/cluster-center")
    clustering = make_clustering(n, groups, radius_bound=float(r0), tag=f"tz-l{l}")
    hopset.meta = {
        "levels": levels,
        "pivot": pivot,
        "pdist": pdist,
        "bunch_sizes": bunch_sizes,
        "k": k,
        "l": l,
        "r0": float(r0),
    }
    return clustering, hopset


# ---------------------------------------------------------------------------
# Cluster graphs and the greedy multiplicative spanner


@dataclass
class AbstractGraph:
    """Unweighted graph over cluster ids (the paper's cluster graph)."""

    nodes: int
    edges: list[tuple[int, int]] = field(default_factory=list)


def cluster_graph(g: Graph, clustering: Clustering, threshold: float, D=None) -> AbstractGraph:
    """Nodes are clusters; an edge joins clusters with center distance <= threshold."""
    D = g.apsp if D is None else D
    centers = clustering.centers
    ell = len(centers)
    edges = []
    if ell > 1:
        sub = D[np.ix_(centers, centers)]
        iu, iv = np.triu_indices(ell, k=1)
        keep = sub[iu, iv] <= threshold + DIST_TOL
        edges = list(zip(iu[keep].tolist(), iv[keep].tolist()))
    return AbstractGraph(nodes=ell, edges=edges)


def basic_spanner(ag: AbstractGraph, stretch) -> list[tuple[int, int]]:
    """Greedy multiplicative spanner of an abstract graph.

    Scans edges in endpoint-lexicographic order and keeps an edge exactly
    when the current spanner offers no path of length <= stretch, so the
    output has girth > stretch + 1.
    """
    if stretch < 1:
        raise ParameterError("spanner stretch must be >= 1")
    adj: list[set[int]] = [set() for _ in range(ag.nodes)]
    kept = []
    for a, b in sorted(tuple(sorted(e)) for e in ag.edges):
        if _bounded_hops(adj, a, b, stretch) > stretch:
            kept.append((a, b))
            adj[a].add(b)
            adj[b].add(a)
    return kept


def _bounded_hops(adj, a, b, limit):
    """BFS distance from a to b, or limit+1 once it exceeds limit."""
    if a == b:
        return 0
    seen = {a}
    frontier = [a]
    depth = 0
    while frontier and depth < limit:
        depth += 1
        nxt = []
        for u in frontier:
            for v in adj[u]:
                if v == b:
                    return depth
                if v not in seen:
                    seen.add(v)
                    nxt.append(v)
        frontier = nxt
    return limit + 1


# ---------------------------------------------------------------------------
# Superclustering phase engine (long-distance spanner / small-stretch hopset)


@dataclass
class PhaseOutcome:
    clustering: Clustering
    alphas: list[float]
    radii: list[float]
    oracle_radii: list[float]
    sc_counts: list[int]
    paths_added: int


def supercluster_phase(
    g: Graph,
    clustering: Clustering,
    kceil: int,
    steps: int,
    sample_p: float,
    rng,
    sink,
    mode: str,
    alpha_ceil: bool,
    tag: str,
    D=None,
) -> PhaseOutcome:
    """One superclustering phase: `steps` rounds of grow-and-sample.

    mode 'path' inlines shortest paths into an EdgeSubgraph sink (unweighted
    long-distance spanner); mode 'hop' adds weighted hops into a Hopset sink,
    with every member vertex of a joining cluster hopping to its new center.
    The augmentation radius follows the shared recurrence, with the ceiling
    applied only in path mode (integral distances).  Thresholds use tracked
    radius bounds, never measured radii, so runs are seed-reproducible.
    """
    if mode not in ("path", "hop"):
        raise ParameterError(f"unknown supercluster mode {mode!r}")
    if kceil - 3 <= 0:
        raise ParameterError("superclustering needs ceil(k^eps) > 3")
    if steps < 0:
        raise ParameterError("negative step count")
    D = g.apsp if D is None else D
    gen = rng.generator() if isinstance(rng, RngStream) else rng
    base_clusters = clustering.clusters
    r0 = max((c.radius_bound for c in base_clusters), default=0.0)
    denom = kceil - 3

    sc_center = {c.id: c.center for c in base_clusters}
    sc_members: dict[int, list[int]] = {c.id: [c.id] for c in base_clusters}
    alive = sorted(sc_members)  # supercluster ids == head cluster id, center order
    cluster_sc = {c.id: c.id for c in base_clusters}
    members_of = {c.id: c.members for c in base_clusters}
    center_of = {c.id: c.center for c in base_clusters}

    alphas, radii = [0.0], [r0]
    oracle_radii, sc_counts = [], []
    paths_added = 0

    def emit_path(x, z, what):
        nonlocal paths_added
        if x == z:
            return
        sink.add_path(walk_shortest_path(g, D[z], x, z), f"{tag}/{what}")
        paths_added += 1

    def emit_hop(x, z, what):
        nonlocal paths_added
        if x == z:
            return
        sink.add_hop(x, z, D[x, z], f"{tag}/{what}")
        paths_added += 1

    emit = emit_path if mode == "path" else emit_hop

    for j in range(1, steps + 1):
        a_prev, r_prev = alphas[-1], radii[-1]
        a_j = 4.0 * r0 / denom + (1.0 + 4.0 / denom) * a_prev
        if alpha_ceil:
            a_j = math.ceil(a_j - DIST_TOL)
        r_j = r_prev + 2.0 * r0 + 2.0 * a_j
        alphas.append(a_j)
        radii.append(r_j)

        centers = np.array([sc_center[s] for s in alive], dtype=np.int64)
        covered = np.zeros(g.n, dtype=bool)
        for s in alive:
            for cid in sc_members[s]:
                covered[members_of[cid]] = True
        # (1) augmentation: near-enough unclustered vertices reach the closest center
        unc = np.flatnonzero(~covered)
        if len(unc) and len(centers):
            cd, ci = closest_center_rows(D, centers, unc)
            for v, dist, idx in zip(unc, cd, ci):
                if leq(dist, r_prev + a_j):
                    z = int(centers[idx])
                    if mode == "path":
                        sink.add_path(walk_shortest_path(g, D[z], int(v), z), f"{tag}/augment")
                    else:
                        sink.add_hop(int(v), z, D[v, z], f"{tag}/augment")
        # (2) sample superclusters
        smask = gen.random(len(alive)) < sample_p
        sampled = [s for s, m in zip(alive, smask) if m]
        sampled_centers = np.array([sc_center[s] for s in sampled], dtype=np.int64)
        delta = r0 + r_prev + 2.0 * a_j
        # (3)/(5): every base cluster re-attaches or reports to its neighborhood
        new_members: dict[int, list[int]] = {s: [] for s in sampled}
        for cid in sorted(cluster_sc):
            if cluster_sc[cid] is None:
                continue
            cc = center_of[cid]
            if len(sampled_centers):
                dists = D[sampled_centers, cc]
                best = int(np.argmax(dists <= dists.min() + DIST_TOL))
                bd = float(dists[best])
            else:
                bd = INF
            if leq(bd, delta):
                s = sampled[best]
                new_members[s].append(cid)
                cluster_sc[cid] = s
                if mode == "path":
                    emit(cc, sc_center[s], "join")
                else:
                    z = sc_center[s]
                    for u in members_of[cid]:
                        if int(u) != z:
                            sink.add_hop(int(u), z, D[u, z], f"{tag}/join")
                    paths_added += 1
            else:
                # lost: report to the center of every supercluster within delta
                for s in alive:
                    if s != cid and leq(D[sc_center[s], cc], delta):
                        emit(cc, sc_center[s], "lost")
                cluster_sc[cid] = None
        alive = sampled
        sc_members = new_members
        sc_counts.append(len(alive))
        # oracle radius of the new superclusters, for the audits
        worst = 0.0
        for s in alive:
            z = sc_center[s]
            for cid in sc_members[s]:
                mem = members_of[cid]
                if len(mem):
                    worst = max(worst, float(D[z, mem].max()))
        oracle_radii.append(worst)

    groups = []
    for s in alive:
        mem = np.concatenate([members_of[cid] for cid in sc_members[s]]) if sc_members[s] else np.array([], dtype=np.int64)
        groups.append((sc_center[s], np.sort(mem)))
    out = make_clustering(g.n, groups, radius_bound=radii[-1], tag=f"{tag}/out")
    return PhaseOutcome(out, alphas, radii, oracle_radii, sc_counts, paths_added)


def superclustering_plan(k: int, eps: float):
    """Phase plan for the middle stage: step counts per phase.

    T = log_{ceil(k^eps)/4}(k^(1-2eps)).  Integral T runs T phases of t
    steps.  Otherwise, with c the fractional part: if t^c > t/3 run ceil(T)
    full phases, else floor(T) full phases plus one phase of floor(t^c)
    steps.  Returns (list of step counts, t, branch label).
    """
    kceil = math.ceil(k**eps)
    t_exact = kceil / 4.0
    if t_exact <= 1.0:
        raise ParameterError("superclustering needs ceil(k^eps) >= 8")
    steps = math.ceil(t_exact - DIST_TOL)
    x = k ** (1.0 - 2.0 * eps)
    T_exact = math.log(x) / math.log(t_exact) if x > 1.0 + DIST_TOL else 0.0
    frac = T_exact - math.floor(T_exact)
    if frac <= 1e-9 or 1.0 - frac <= 1e-9:
        T = round(T_exact)
        return [steps] * T, steps, "integral"
    if t_exact**frac > t_exact / 3.0:
        return [steps] * math.ceil(T_exact), steps, "fractional-full"
    plan = [steps] * math.floor(T_exact) + [math.floor(t_exact**frac)]
    return plan, steps, "fractional-partial"
