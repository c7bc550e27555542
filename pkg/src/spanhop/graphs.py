"""Graph representation, exact distance oracles and hop-limited distances.

Everything downstream (constructions and certification alike) measures
distances against the oracles defined here.  Graphs are undirected, loaded
once into a compressed adjacency, and never mutated by any algorithm.

Distances are float64 throughout with INF as the disconnected sentinel;
unweighted graphs carry integral values exactly.  Comparisons against
thresholds go through leq()/lt() with a fixed absolute tolerance so weighted
tie handling is uniform across modules.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import shortest_path

INF = float("inf")
DIST_TOL = 1e-9


class ParameterError(ValueError):
    """A construction precondition was violated."""


class GraphFormatError(ValueError):
    """A graph/hopset file could not be parsed."""


def leq(a, b):
    """a <= b up to the global distance tolerance."""
    return a <= b + DIST_TOL


def lt(a, b):
    """a < b strictly, up to the global distance tolerance."""
    return a < b - DIST_TOL


@dataclass(frozen=True)
class Graph:
    """Immutable undirected graph with vertex ids 0..n-1.

    Edges are stored canonically with u < v.  Unweighted graphs store weight
    1.0 on every edge.
    """

    n: int
    eu: np.ndarray
    ev: np.ndarray
    ew: np.ndarray
    weighted: bool

    @staticmethod
    def build(n: int, edges, weighted: bool = False) -> "Graph":
        if n < 0:
            raise ParameterError("vertex count must be nonnegative")
        eu, ev, ew = [], [], []
        seen = set()
        for e in edges:
            if len(e) == 3:
                u, v, w = e
            else:
                u, v = e
                w = 1.0
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ParameterError(f"self-loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ParameterError(f"edge ({u},{v}) outside [0,{n})")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ParameterError(f"duplicate edge ({u},{v})")
            seen.add((u, v))
            if weighted:
                if w <= 0:
                    raise ParameterError(f"nonpositive weight on ({u},{v})")
            elif w != 1.0:
                raise ParameterError("unweighted graph with weight != 1")
            eu.append(u)
            ev.append(v)
            ew.append(w)
        order = np.lexsort((ev, eu)) if eu else np.array([], dtype=np.intp)
        g = Graph(
            n=n,
            eu=np.asarray(eu, dtype=np.int64)[order],
            ev=np.asarray(ev, dtype=np.int64)[order],
            ew=np.asarray(ew, dtype=np.float64)[order],
            weighted=bool(weighted),
        )
        for a in (g.eu, g.ev, g.ew):
            a.setflags(write=False)
        return g

    @property
    def m(self) -> int:
        return len(self.eu)

    @cached_property
    def edge_weight(self) -> dict:
        return {(int(u), int(v)): float(w) for u, v, w in zip(self.eu, self.ev, self.ew)}

    @cached_property
    def csr(self) -> sp.csr_matrix:
        u = np.concatenate([self.eu, self.ev])
        v = np.concatenate([self.ev, self.eu])
        w = np.concatenate([self.ew, self.ew])
        return sp.csr_matrix((w, (u, v)), shape=(self.n, self.n))

    @cached_property
    def _adj(self):
        """Symmetric adjacency as (indptr, indices, weights), neighbors sorted."""
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        u = np.concatenate([self.eu, self.ev])
        v = np.concatenate([self.ev, self.eu])
        w = np.concatenate([self.ew, self.ew])
        order = np.lexsort((v, u))
        u, v, w = u[order], v[order], w[order]
        np.add.at(indptr, u + 1, 1)
        np.cumsum(indptr, out=indptr)
        return indptr, v, w

    def neighbors(self, v: int) -> np.ndarray:
        indptr, indices, _ = self._adj
        return indices[indptr[v]:indptr[v + 1]]

    @cached_property
    def apsp(self) -> np.ndarray:
        return exact_apsp(self)


def exact_apsp(g: Graph) -> np.ndarray:
    """All-pairs shortest path distances; INF for disconnected pairs.

    BFS per source for unweighted inputs, Dijkstra otherwise (nonnegative
    weights only).  The matrix is symmetric and has a zero diagonal.
    """
    if g.n == 0:
        return np.zeros((0, 0))
    if g.m == 0:
        d = np.full((g.n, g.n), INF)
        np.fill_diagonal(d, 0.0)
        return d
    return shortest_path(g.csr, method="auto", directed=False, unweighted=not g.weighted)


def _relaxation_arrays(g: Graph, hops):
    """Directed relaxation arrays over E(g) union the hop set."""
    hu, hv, hw = hops_as_arrays(hops)
    src = np.concatenate([g.eu, g.ev, hu, hv])
    dst = np.concatenate([g.ev, g.eu, hv, hu])
    w = np.concatenate([g.ew, g.ew, hw, hw])
    return src, dst, w


def hops_as_arrays(hops):
    """Normalize a hop collection to (u, v, w) arrays.

    Accepts None, a Hopset-like object with .arrays(), a dict {(u,v): w}, or
    an iterable of (u, v, w) triples.
    """
    if hops is None:
        e = np.array([], dtype=np.int64)
        return e, e.copy(), np.array([], dtype=np.float64)
    if hasattr(hops, "arrays"):
        return hops.arrays()
    if isinstance(hops, dict):
        items = sorted(hops.items())
        hu = np.array([k[0] for k, _ in items], dtype=np.int64)
        hv = np.array([k[1] for k, _ in items], dtype=np.int64)
        hw = np.array([w for _, w in items], dtype=np.float64)
        return hu, hv, hw
    items = sorted((int(u), int(v), float(w)) for u, v, w in hops)
    hu = np.array([t[0] for t in items], dtype=np.int64)
    hv = np.array([t[1] for t in items], dtype=np.int64)
    hw = np.array([t[2] for t in items], dtype=np.float64)
    return hu, hv, hw


def beta_limited_sssp(g: Graph, hops, source: int, beta: int) -> np.ndarray:
    """Shortest walks from source using at most beta edges of E(g) union hops.

    Runs beta rounds of Bellman-Ford edge relaxation.  Rounds stop early once
    a full round changes nothing: relaxation is monotone, so the remaining
    rounds could not alter the result.
    """
    if beta < 1:
        raise ParameterError("beta must be >= 1")
    src, dst, w = _relaxation_arrays(g, hops)
    d = np.full(g.n, INF)
    d[source] = 0.0
    for _ in range(int(beta)):
        nd = d.copy()
        np.minimum.at(nd, dst, d[src] + w)
        if np.array_equal(nd, d):
            break
        d = nd
    return d


def beta_limited_apsp(g: Graph, hops, beta: int) -> np.ndarray:
    """All-sources variant of beta_limited_sssp (same relaxation semantics)."""
    if beta < 1:
        raise ParameterError("beta must be >= 1")
    src, dst, w = _relaxation_arrays(g, hops)
    d = np.full((g.n, g.n), INF)
    np.fill_diagonal(d, 0.0)
    dT = d.T.copy()  # dT[v, s] = distance s -> v
    for _ in range(int(beta)):
        nd = dT.copy()
        np.minimum.at(nd, dst, dT[src] + w[:, None])
        if np.array_equal(nd, dT):
            break
        dT = nd
    return dT.T.copy()


def ball(g: Graph, u: int, r, dist_row: np.ndarray | None = None) -> np.ndarray:
    """Vertices at distance <= r from u, in increasing vertex id order."""
    row = g.apsp[u] if dist_row is None else dist_row
    return np.flatnonzero(row <= r + DIST_TOL)


def ball_boundary(g: Graph, u: int, r, dist_row: np.ndarray | None = None) -> np.ndarray:
    """Vertices at distance exactly r from u."""
    row = g.apsp[u] if dist_row is None else dist_row
    return np.flatnonzero(np.abs(row - r) <= DIST_TOL)


def walk_shortest_path(g: Graph, dist_to_target: np.ndarray, x: int, z: int):
    """Edges of the canonical shortest x-z path in an unweighted graph.

    dist_to_target must be the BFS row of z.  At each step the walk moves to
    the minimum-id neighbor one layer closer to z; paths toward a common
    target therefore form a forest and repeated inlining reuses edges.
    """
    if g.weighted:
        raise ParameterError("path inlining is defined for unweighted graphs only")
    if not np.isfinite(dist_to_target[x]):
        raise ParameterError(f"no path from {x} to {z}")
    edges = []
    u = x
    while u != z:
        du = dist_to_target[u]
        nbrs = g.neighbors(u)
        closer = nbrs[dist_to_target[nbrs] == du - 1]
        nxt = int(closer.min())
        edges.append((u, nxt))
        u = nxt
    return edges


def bfs_tree_edges(g: Graph, root: int, depth=None, dist_row: np.ndarray | None = None):
    """Edges of the canonical BFS tree of root, truncated at the given depth.

    Each vertex attaches to its minimum-id neighbor in the previous layer,
    matching the tie rule of walk_shortest_path.
    """
    if g.weighted:
        raise ParameterError("BFS trees are defined for unweighted graphs only")
    row = g.apsp[root] if dist_row is None else dist_row
    limit = INF if depth is None else depth + DIST_TOL
    edges = []
    for v in np.flatnonzero((row > 0) & (row <= limit)):
        v = int(v)
        nbrs = g.neighbors(v)
        parent = int(nbrs[row[nbrs] == row[v] - 1].min())
        edges.append((v, parent))
    return edges


# ---------------------------------------------------------------------------
# Text formats: graph files are "n m weighted" then one edge per line;
# comment lines start with '#'.


def write_graph(path, g: Graph) -> None:
    with open(path, "w") as f:
        f.write(f"{g.n} {g.m} {1 if g.weighted else 0}\n")
        for u, v, w in zip(g.eu, g.ev, g.ew):
            if g.weighted:
                f.write(f"{u} {v} {float(w)!r}\n")
            else:
                f.write(f"{u} {v}\n")


def read_graph(path) -> Graph:
    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise GraphFormatError("empty graph file")
    head = lines[0].split()
    if len(head) != 3:
        raise GraphFormatError("header must be: n m weighted(0|1)")
    n, m, wflag = int(head[0]), int(head[1]), head[2]
    if wflag not in ("0", "1"):
        raise GraphFormatError("weighted flag must be 0 or 1")
    weighted = wflag == "1"
    if len(lines) - 1 != m:
        raise GraphFormatError(f"expected {m} edge lines, found {len(lines) - 1}")
    edges = []
    for ln in lines[1:]:
        parts = ln.split()
        if weighted:
            if len(parts) != 3:
                raise GraphFormatError(f"bad weighted edge line: {ln!r}")
            edges.append((int(parts[0]), int(parts[1]), float(parts[2])))
        else:
            if len(parts) not in (2, 3):
                raise GraphFormatError(f"bad edge line: {ln!r}")
            edges.append((int(parts[0]), int(parts[1])))
    return Graph.build(n, edges, weighted=weighted)
