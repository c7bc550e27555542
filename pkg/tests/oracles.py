"""Independent brute-force oracles for the unit tests.

These enumerate paths, walks and cycles directly and never touch the library
implementations they are used to check.
"""

from __future__ import annotations

import math
from itertools import combinations


def adjacency(n, edges):
    adj = {v: [] for v in range(n)}
    for e in edges:
        u, v, w = e if len(e) == 3 else (*e, 1.0)
        adj[u].append((v, w))
        adj[v].append((u, w))
    return adj


def brute_apsp(n, edges):
    """Exact distances by enumerating simple paths (tiny graphs only)."""
    adj = adjacency(n, edges)
    dist = [[math.inf] * n for _ in range(n)]

    def dfs(start, v, length, seen):
        if length < dist[start][v]:
            dist[start][v] = length
        for u, w in adj[v]:
            if u not in seen:
                seen.add(u)
                dfs(start, u, length + w, seen)
                seen.remove(u)

    for s in range(n):
        dist[s][s] = 0.0
        dfs(s, s, 0.0, {s})
    return dist


def brute_beta_limited(n, edges, hops, source, beta):
    """Shortest <= beta-edge walks by exhaustive enumeration."""
    adj = adjacency(n, list(edges) + [tuple(h) for h in hops])
    best = [math.inf] * n
    best[source] = 0.0
    frontier = {source: 0.0}
    for _ in range(beta):
        nxt = {}
        for v, length in frontier.items():
            for u, w in adj[v]:
                cand = length + w
                if cand < nxt.get(u, math.inf):
                    nxt[u] = cand
        for u, length in nxt.items():
            if length < best[u]:
                best[u] = length
        frontier = nxt
    return best


def brute_min_cycle(nodes, edges, limit):
    """Length of the shortest cycle of length <= limit, or None.

    Enumerates vertex subsets of size up to limit and checks for Hamiltonian
    cycles on them; fine for the <= 12-node abstract graphs in the tests.
    """
    eset = {tuple(sorted(e)) for e in edges}

    def has_cycle_through(subset):
        subset = list(subset)
        first = subset[0]
        rest = subset[1:]
        from itertools import permutations

        for perm in permutations(rest):
            cyc = [first, *perm, first]
            if all(tuple(sorted((cyc[i], cyc[i + 1]))) in eset for i in range(len(cyc) - 1)):
                return True
        return False

    for size in range(3, min(limit, len(nodes)) + 1):
        for subset in combinations(nodes, size):
            if has_cycle_through(subset):
                return size
    return None
