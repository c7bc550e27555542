"""Seeded synthetic graph families for tests and benchmarks.

The same GenSpec always produces the same graph.  Weighted families control
the aspect ratio explicitly: expclasses(c) draws weights from {1, 2, ..., 2^c}
so the per-distance-class drivers see several classes.

barbell and ring-of-cliques exist to create long shortest paths mixing
clustered and unclustered stretches, which is where the superclustering
claims actually bite.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, ParameterError
from .rng import RngStream

FAMILIES = ("gnp", "grid", "ring-of-cliques", "random-geometric", "path", "star", "barbell")


@dataclass(frozen=True)
class GenSpec:
    family: str
    params: dict = field(default_factory=dict)
    weights: str = "unit"  # unit | uniform(lo,hi) | expclasses(c)
    seed: int = 0

    def label(self) -> str:
        ps = ",".join(f"{k}={v}" for k, v in sorted(self.params.items()))
        return f"{self.family}:{ps},w={self.weights},gseed={self.seed}"


def _structure(spec: GenSpec, rng: np.random.Generator):
    """Return (n, list of (u, v)) for the requested family."""
    p = spec.params
    fam = spec.family
    if fam == "gnp":
        n, prob = int(p["n"]), float(p["p"])
        if not (0 <= prob <= 1):
            raise ParameterError("gnp probability outside [0,1]")
        iu, iv = np.triu_indices(n, k=1)
        mask = rng.random(len(iu)) < prob
        return n, list(zip(iu[mask].tolist(), iv[mask].tolist()))
    if fam == "grid":
        rows, cols = int(p["rows"]), int(p["cols"])
        n = rows * cols
        edges = []
        for r in range(rows):
            for c in range(cols):
                v = r * cols + c
                if c + 1 < cols:
                    edges.append((v, v + 1))
                if r + 1 < rows:
                    edges.append((v, v + cols))
        return n, edges
    if fam == "ring-of-cliques":
        m, s = int(p["m"]), int(p["s"])
        if m < 3 or s < 1:
            raise ParameterError("ring-of-cliques needs m >= 3 cliques of size >= 1")
        n = m * s
        edges = []
        for i in range(m):
            base = i * s
            edges.extend((base + a, base + b) for a in range(s) for b in range(a + 1, s))
            # one bridge edge to the next clique in the ring
            nxt = ((i + 1) % m) * s
            edges.append((base + s - 1, nxt) if base + s - 1 != nxt else (base, nxt))
        return n, sorted(set(tuple(sorted(e)) for e in edges))
    if fam == "random-geometric":
        n, radius = int(p["n"]), float(p["r"])
        pts = rng.random((n, 2))
        d2 = ((pts[:, None, :] - pts[None, :, :]) ** 2).sum(-1)
        iu, iv = np.triu_indices(n, k=1)
        mask = d2[iu, iv] <= radius * radius
        return n, list(zip(iu[mask].tolist(), iv[mask].tolist()))
    if fam == "path":
        n = int(p["n"])
        return n, [(i, i + 1) for i in range(n - 1)]
    if fam == "star":
        n = int(p["n"])
        return n, [(0, i) for i in range(1, n)]
    if fam == "barbell":
        s = int(p["s"])
        bridge = int(p.get("bridge", 1))
        if s < 2 or bridge < 1:
            raise ParameterError("barbell needs clique size >= 2 and bridge >= 1")
        n = 2 * s + (bridge - 1)
        edges = []
        for base in (0, s + bridge - 1):
            edges.extend((base + a, base + b) for a in range(s) for b in range(a + 1, s))
        # path of `bridge` edges from vertex s-1 through the middle to vertex s+bridge-1
        chain = [s - 1] + list(range(s, s + bridge - 1)) + [s + bridge - 1]
        edges.extend((chain[i], chain[i + 1]) for i in range(len(chain) - 1))
        return n, sorted(set(tuple(sorted(e)) for e in edges))
    raise ParameterError(f"unknown family {fam!r}")


_WLAW = re.compile(r"^(unit|uniform\(([^,]+),([^)]+)\)|expclasses\((\d+)\))$")


def _weights(law: str, m: int, rng: np.random.Generator):
    mt = _WLAW.match(law)
    if not mt:
        raise ParameterError(f"unknown weight law {law!r}")
    if law == "unit":
        return None
    if law.startswith("uniform"):
        lo, hi = float(mt.group(2)), float(mt.group(3))
        if not (0 < lo <= hi):
            raise ParameterError("uniform weight bounds must satisfy 0 < lo <= hi")
        return rng.uniform(lo, hi, size=m)
    c = int(mt.group(4))
    return np.exp2(rng.integers(0, c + 1, size=m)).astype(float)


def generate(spec: GenSpec) -> Graph:
    stream = RngStream(spec.seed).child(hash(spec.family) & 0x7FFFFFFF)
    rng = stream.generator()
    n, edges = _structure(spec, rng)
    w = _weights(spec.weights, len(edges), rng)
    if w is None:
        return Graph.build(n, edges, weighted=False)
    return Graph.build(n, [(u, v, wi) for (u, v), wi in zip(edges, w)], weighted=True)


def parse_genspec(text: str, seed: int | None = None) -> GenSpec:
    """Parse CLI syntax like 'gnp:n=256,p=0.05,w=uniform(1,4),gseed=3'."""
    if ":" in text:
        fam, rest = text.split(":", 1)
    else:
        fam, rest = text, ""
    fam = fam.strip()
    if fam not in FAMILIES:
        raise ParameterError(f"unknown generator family {fam!r}")
    params: dict = {}
    weights = "unit"
    gseed = 0
    for part in filter(None, (s.strip() for s in re.split(r",(?![^()]*\))", rest))):
        key, _, val = part.partition("=")
        key = key.strip()
        val = val.strip()
        if key == "w":
            weights = val
        elif key == "gseed":
            gseed = int(val)
        elif key in ("n", "rows", "cols", "m", "s", "bridge"):
            params[key] = int(val)
        elif key in ("p", "r"):
            params[key] = float(val)
        else:
            raise ParameterError(f"unknown generator parameter {key!r}")
    if seed is not None:
        gseed = seed
    return GenSpec(family=fam, params=params, weights=weights, seed=gseed)
