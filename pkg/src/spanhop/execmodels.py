"""Synchronous-round and streaming cost accounting for the phase meta-algorithm.

The simulators run the exact same engine as the centralized construction and
only observe it: a recorder sees wave depths and coverage but takes part in
no decision, so LOCAL, CONGEST and both streaming modes emit edge sets
bit-identical to the centralized run under the same seed.

Accounting rules:
  * every scheduled wave charges ceil(depth) rounds/passes, even if its
    frontier dies early (rounds are the schedule, not the trace);
  * LOCAL ignores congestion; CONGEST charges a queuing delay of
    (max per-vertex wave multiplicity - 1) on the concurrent step-(5) waves
    and on the final trees, i.e. ID-ordered serialization;
  * streaming passes equal BFS layers; space is counted in items (retained
    spanner edges plus per-vertex wave records plus n base records);
  * the low-space mode splits step (5) into sub-steps of re-sampled centers
    drawn from a scheduling stream that is independent of the construction
    stream, so the emitted spanner is unchanged.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import DIST_TOL, Graph, ParameterError
from .rng import as_stream
from .spanners import run_three_eps_spanner

_SCHED_LABEL = 0x5CEDD  # scheduling noise, never the construction stream
_STREAM_LABEL = 0x57E43


def _rounds(depth: float) -> int:
    return max(0, math.ceil(depth - DIST_TOL))


@dataclass
class RoundLedger:
    model: str
    rounds: int
    per_edge_congestion: int
    per_vertex_traversals: list[int]
    detail: dict = field(default_factory=dict)

    @property
    def max_vertex_traversals(self) -> int:
        return max(self.per_vertex_traversals, default=0)


@dataclass
class StreamLedger:
    mode: str
    passes: int
    peak_space_items: int
    detail: dict = field(default_factory=dict)


class _DistributedRecorder:
    """Shared counting for LOCAL and CONGEST."""

    wants_cover = True

    def __init__(self, g: Graph, congest: bool):
        self.g = g
        self.congest = congest
        self.rounds = 0
        self.phase_vertex_max: list[int] = []
        self.edge_congestion = 0
        self.detail = {"waves": []}

    def _cover_counts(self, depth, dist_rows):
        if dist_rows is None or len(dist_rows) == 0:
            return None
        return (dist_rows <= depth + DIST_TOL).sum(axis=0)

    def _edge_counts(self, depth, dist_rows):
        if dist_rows is None or len(dist_rows) == 0:
            return 0
        da = dist_rows[:, self.g.eu]
        db = dist_rows[:, self.g.ev]
        lo = np.minimum(da, db)
        hi = np.maximum(da, db)
        traversed = (lo <= depth - 1 + DIST_TOL) & (hi <= depth + DIST_TOL)
        per_edge = traversed.sum(axis=0)
        return int(per_edge.max()) if len(per_edge) else 0

    def wave(self, phase, kind, depth, edges_now):
        self.rounds += _rounds(depth)
        self.detail["waves"].append((phase, kind, _rounds(depth)))

    def step5(self, phase, depth, dist_rows, p_i, edges_now):
        r = _rounds(depth)
        counts = self._cover_counts(depth, dist_rows)
        vmax = int(counts.max()) if counts is not None and len(counts) else 0
        self.phase_vertex_max.append(vmax)
        self.edge_congestion = max(self.edge_congestion, self._edge_counts(depth, dist_rows))
        if self.congest and vmax > 1:
            r += vmax - 1
        self.rounds += r
        self.detail["waves"].append((phase, "step5", r))

    def final(self, depth, dist_rows, edges_now):
        r = _rounds(depth)
        counts = self._cover_counts(depth, dist_rows)
        vmax = int(counts.max()) if counts is not None and len(counts) else 0
        self.edge_congestion = max(self.edge_congestion, self._edge_counts(depth, dist_rows))
        if self.congest and vmax > 1:
            r += vmax - 1
        self.rounds += r
        self.detail["waves"].append((-1, "final", r))
        self.detail["final_tree_multiplicity"] = vmax

    def ledger(self) -> RoundLedger:
        return RoundLedger(
            model="congest" if self.congest else "local",
            rounds=self.rounds,
            per_edge_congestion=self.edge_congestion,
            per_vertex_traversals=self.phase_vertex_max,
            detail=self.detail,
        )


class _StreamRecorder:
    wants_cover = True

    def __init__(self, g: Graph, mode: str, sched_rng):
        if mode not in ("high", "low"):
            raise ParameterError("stream mode must be 'high' or 'low'")
        self.g = g
        self.mode = mode
        self.sched = sched_rng
        self.passes = 0
        self.peak = 0
        self.detail = {"substeps": []}

    def _bump_space(self, edges_now, records):
        self.peak = max(self.peak, self.g.n + int(edges_now) + int(records))

    def wave(self, phase, kind, depth, edges_now):
        self.passes += _rounds(depth)
        self._bump_space(edges_now, self.g.n)

    def step5(self, phase, depth, dist_rows, p_i, edges_now):
        if dist_rows is None or len(dist_rows) == 0:
            self.passes += _rounds(depth)
            self._bump_space(edges_now, 0)
            return
        cover = dist_rows <= depth + DIST_TOL
        if self.mode == "high":
            self.passes += _rounds(depth)
            self._bump_space(edges_now, cover.sum())
            return
        # low space: sub-steps of re-sampled centers; a center's wave runs in
        # the first sub-step that samples it
        remaining = np.arange(len(dist_rows))
        tau_target = math.ceil(4.0 * math.log2(max(2, self.g.n)) / max(p_i, 1e-12))
        substeps = 0
        while len(remaining):
            substeps += 1
            if substeps > 4 * tau_target:
                picked = remaining  # force the stragglers; counted like any sub-step
            else:
                mask = self.sched.random(len(remaining)) < p_i
                picked = remaining[mask]
            self.passes += _rounds(depth)
            if len(picked):
                self._bump_space(edges_now, cover[picked].sum())
            remaining = np.setdiff1d(remaining, picked, assume_unique=True)
        self.detail["substeps"].append((phase, substeps, tau_target))

    def final(self, depth, dist_rows, edges_now):
        self.passes += _rounds(depth)
        records = 0
        if dist_rows is not None and len(dist_rows):
            records = (dist_rows <= depth + DIST_TOL).sum()
        self._bump_space(edges_now, records)

    def ledger(self) -> StreamLedger:
        return StreamLedger(
            mode=f"stream-{self.mode}",
            passes=self.passes,
            peak_space_items=self.peak,
            detail=self.detail,
        )


def simulate_local(g: Graph, k: int, eps: float, rho: float, rng, D=None):
    """(spanner, RoundLedger) under LOCAL accounting of the rho-schedule run."""
    rec = _DistributedRecorder(g, congest=False)
    H = run_three_eps_spanner(g, k, eps, as_stream(rng), rho=rho, recorder=rec, D=D)
    led = rec.ledger()
    led.detail["final_clusters"] = H.ledger["final_clusters"]
    return H, led


def simulate_congest(g: Graph, k: int, eps: float, rho: float, rng, D=None):
    """(spanner, RoundLedger) with queuing delays on concurrent step-(5) waves."""
    rec = _DistributedRecorder(g, congest=True)
    H = run_three_eps_spanner(g, k, eps, as_stream(rng), rho=rho, recorder=rec, D=D)
    led = rec.ledger()
    led.detail["final_clusters"] = H.ledger["final_clusters"]
    return H, led


def simulate_stream(g: Graph, k: int, eps: float, rho: float, mode: str, rng, D=None):
    """(spanner, StreamLedger) in the multi-pass streaming model.

    The edge stream order is a seeded shuffle (recorded in the ledger); pass
    counts are order-independent because every pass scans the full stream.
    """
    stream = as_stream(rng)
    order = stream.child(_STREAM_LABEL).generator().permutation(g.m)
    rec = _StreamRecorder(g, mode, stream.child(_SCHED_LABEL).generator())
    H = run_three_eps_spanner(g, k, eps, stream, rho=rho, recorder=rec, D=D)
    led = rec.ledger()
    led.detail["final_clusters"] = H.ledger["final_clusters"]
    led.detail["stream_order_head"] = order[:8].tolist()
    return H, led
