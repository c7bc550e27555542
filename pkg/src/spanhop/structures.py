"""Output containers: spanners under construction and hopsets.

An EdgeSubgraph is a subset of the parent graph's edges with per-edge
provenance (which phase/step added it) and a certificate describing the
guarantee the construction claims.  A Hopset is a set of weighted shortcut
edges whose weight always equals the exact parent-graph distance between the
endpoints.  Both deduplicate on insertion keeping the earliest provenance.
"""

from __future__ import annotations

from collections import Counter

import numpy as np

from .graphs import DIST_TOL, Graph, ParameterError, hops_as_arrays


def _canon(u: int, v: int):
    u, v = int(u), int(v)
    if u == v:
        raise ParameterError("self edge")
    return (u, v) if u < v else (v, u)


class EdgeSubgraph:
    """A spanner under construction: kept edges of a fixed parent graph."""

    def __init__(self, parent: Graph, tag: str = ""):
        self.parent = parent
        self.tag = tag
        self._edges: dict[tuple[int, int], str] = {}
        self.certificate: dict = {}
        self.ledger: dict = {}

    def add_edge(self, u: int, v: int, tag: str) -> bool:
        key = _canon(u, v)
        if key not in self.parent.edge_weight:
            raise ParameterError(f"edge {key} is not in the parent graph")
        if key in self._edges:
            return False
        self._edges[key] = tag
        return True

    def add_path(self, edges, tag: str) -> int:
        return sum(self.add_edge(u, v, tag) for u, v in edges)

    def has_edge(self, u: int, v: int) -> bool:
        return _canon(u, v) in self._edges

    @property
    def edge_count(self) -> int:
        return len(self._edges)

    def edges(self):
        return sorted(self._edges)

    def edge_set(self):
        return frozenset(self._edges)

    def to_graph(self) -> Graph:
        ew = self.parent.edge_weight
        return Graph.build(
            self.parent.n,
            [(u, v, ew[(u, v)]) for u, v in self.edges()],
            weighted=self.parent.weighted,
        )

    def size_ledger(self) -> dict:
        return dict(Counter(self._edges.values()))

    def union_from(self, other: "EdgeSubgraph") -> None:
        if other.parent.n != self.parent.n:
            raise ParameterError("union of subgraphs over different graphs")
        for key, tag in other._edges.items():
            self._edges.setdefault(key, tag)


class Hopset:
    """Weighted shortcut edges; weight = exact parent distance, always."""

    def __init__(self, parent: Graph, tag: str = ""):
        self.parent = parent
        self.tag = tag
        self._hops: dict[tuple[int, int], tuple[float, str]] = {}
        self.certificate: dict = {}
        self.ledger: dict = {}
        self.meta: dict = {}

    def add_hop(self, u: int, v: int, w: float, tag: str) -> bool:
        key = _canon(u, v)
        w = float(w)
        if not np.isfinite(w):
            return False
        # A hop duplicating a parent edge of equal weight carries no information.
        pw = self.parent.edge_weight.get(key)
        if pw is not None and abs(pw - w) <= DIST_TOL:
            return False
        if key in self._hops:
            return False
        self._hops[key] = (w, tag)
        return True

    @property
    def hop_count(self) -> int:
        return len(self._hops)

    def hops(self):
        return [(u, v, w) for (u, v), (w, _) in sorted(self._hops.items())]

    def hop_set(self):
        return frozenset(self._hops)

    def arrays(self):
        items = sorted(self._hops.items())
        hu = np.array([k[0] for k, _ in items], dtype=np.int64)
        hv = np.array([k[1] for k, _ in items], dtype=np.int64)
        hw = np.array([val[0] for _, val in items], dtype=np.float64)
        return hu, hv, hw

    def size_ledger(self) -> dict:
        return dict(Counter(tag for _, tag in self._hops.values()))

    def union_from(self, other: "Hopset") -> None:
        if other.parent.n != self.parent.n:
            raise ParameterError("union of hopsets over different graphs")
        for key, val in other._hops.items():
            self._hops.setdefault(key, val)


def write_hopset(path, h: Hopset) -> None:
    with open(path, "w") as f:
        f.write(f"{h.parent.n} {h.hop_count}\n")
        for u, v, w in h.hops():
            f.write(f"{u} {v} {float(w)!r}\n")


def read_hopset_arrays(path):
    """Parse a hopset file into (n, [(u, v, w), ...])."""
    from .graphs import GraphFormatError

    with open(path) as f:
        lines = [ln.strip() for ln in f if ln.strip() and not ln.lstrip().startswith("#")]
    if not lines:
        raise GraphFormatError("empty hopset file")
    head = lines[0].split()
    if len(head) != 2:
        raise GraphFormatError("hopset header must be: n h")
    n, m = int(head[0]), int(head[1])
    if len(lines) - 1 != m:
        raise GraphFormatError(f"expected {m} hop lines, found {len(lines) - 1}")
    triples = []
    for ln in lines[1:]:
        parts = ln.split()
        if len(parts) != 3:
            raise GraphFormatError(f"bad hop line: {ln!r}")
        triples.append((int(parts[0]), int(parts[1]), float(parts[2])))
    return n, triples


def hopset_from_triples(parent: Graph, triples, tag: str = "loaded") -> Hopset:
    h = Hopset(parent)
    for u, v, w in triples:
        h._hops[_canon(u, v)] = (float(w), tag)
    return h


__all__ = [
    "EdgeSubgraph",
    "Hopset",
    "write_hopset",
    "read_hopset_arrays",
    "hopset_from_triples",
    "hops_as_arrays",
]
