"""Command-line harness: build, certify and sweep.

    spanhop build   --construction spanner3eps --gen gnp:n=256,p=0.05 \
                    --k 3 --eps 1 --seed 7 --out runs/demo
    spanhop certify --input runs/demo
    spanhop sweep   --construction spanner3eps --gen gnp:n=128,p=0.1 \
                    --k 3 --eps 1 --seed 0..19 --out runs/sweep

build persists the graph, the artifact (edge list / hop list), the
certificate and the run config, so certify can re-run the verification from
the directory alone and a persisted config reproduces its run exactly.
Parameter errors exit with status 2 and a message naming the violated
precondition; a certification with violations exits 1 but still writes the
report.
"""

from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from . import execmodels, hopsets, spanners
from .generators import GenSpec, generate, parse_genspec
from .graphs import Graph, ParameterError, read_graph, write_graph
from .rng import RngStream
from .structures import (
    EdgeSubgraph,
    Hopset,
    hopset_from_triples,
    read_hopset_arrays,
    write_hopset,
)
from .verify import certify_hopset, certify_spanner

SPANNER_CONSTRUCTIONS = (
    "spanner-short-dist",
    "spanner-long-dist",
    "spanner-alpha-beta",
    "spanner3eps",
    "spanner3eps-improved",
)
HOPSET_CONSTRUCTIONS = (
    "hopset-small-hops",
    "hopset-small-stretch",
    "hopset3eps",
    "hopset3eps-improved",
)
MODELS = ("centralized", "local", "congest", "stream-high", "stream-low")


@dataclass
class RunConfig:
    command: str
    construction: str | None = None
    gen: str | None = None
    input: str | None = None
    k: int | None = None
    eps: float | None = None
    rho: float | None = None
    seeds: list[int] = field(default_factory=list)
    model: str = "centralized"
    classes: str = "auto"
    out: str | None = None

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)


def _parse_seeds(text: str) -> list[int]:
    seeds = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            lo, hi = part.split("..")
            seeds.extend(range(int(lo), int(hi) + 1))
        elif part:
            seeds.append(int(part))
    return seeds


def _load_graph(cfg: RunConfig) -> Graph:
    if cfg.input:
        return read_graph(cfg.input)
    if cfg.gen:
        return generate(parse_genspec(cfg.gen))
    raise ParameterError("need --gen or --input")


def _single_d(cfg: RunConfig):
    if cfg.classes == "auto":
        return None
    vals = [float(x) for x in cfg.classes.split(",") if x.strip()]
    return vals


def _build_artifact(g: Graph, cfg: RunConfig, seed: int, model: str = "centralized"):
    """Run the named construction; returns (kind, object, exec ledger or None)."""
    name = cfg.construction
    rng = RngStream(seed)
    if name in SPANNER_CONSTRUCTIONS:
        if model != "centralized":
            if name != "spanner3eps" or cfg.rho is None:
                raise ParameterError("non-centralized models require spanner3eps with --rho")
            if model == "local":
                H, led = execmodels.simulate_local(g, cfg.k, cfg.eps, cfg.rho, rng)
            elif model == "congest":
                H, led = execmodels.simulate_congest(g, cfg.k, cfg.eps, cfg.rho, rng)
            else:
                H, led = execmodels.simulate_stream(
                    g, cfg.k, cfg.eps, cfg.rho, model.removeprefix("stream-"), rng
                )
            return "spanner", H, led
        if name == "spanner-short-dist":
            ds = _single_d(cfg)
            if not ds or len(ds) != 1:
                raise ParameterError("spanner-short-dist needs --classes <d>")
            return "spanner", spanners.spanner_short_dist(g, cfg.k, int(ds[0]), rng), None
        if name == "spanner-long-dist":
            ds = _single_d(cfg)
            if not ds or len(ds) != 1:
                raise ParameterError("spanner-long-dist needs --classes <d>")
            return "spanner", spanners.spanner_long_dist(g, cfg.k, int(ds[0]), cfg.eps, rng), None
        if name == "spanner-alpha-beta":
            return "spanner", spanners.assemble_alpha_beta_spanner(g, cfg.k, cfg.eps, rng), None
        if name == "spanner3eps":
            return "spanner", spanners.spanner_three_eps(g, cfg.k, cfg.eps, rng, rho=cfg.rho), None
        return "spanner", spanners.spanner_three_eps_improved(g, cfg.k, cfg.eps, rng), None
    if name in HOPSET_CONSTRUCTIONS:
        variant = {
            "hopset-small-hops": "small-hops",
            "hopset-small-stretch": "small-stretch",
            "hopset3eps": "3eps",
            "hopset3eps-improved": "3eps-improved",
        }[name]
        ds = _single_d(cfg)
        if ds is None:
            return "hopset", hopsets.build_full_hopset(g, cfg.k, cfg.eps, variant, rng, rho=cfg.rho), None
        h = Hopset(g, tag=name)
        alpha, beta_formula = 1.0, 1.0
        for i, d in enumerate(ds):
            child = rng.child(i)
            if variant == "small-hops":
                hc = hopsets.hopset_small_hops(g, cfg.k, d, cfg.eps, child)
            elif variant == "small-stretch":
                hc = hopsets.hopset_small_stretch(g, cfg.k, d, cfg.eps, child)
            elif variant == "3eps":
                hc = hopsets.hopset_three_eps(g, cfg.k, d, cfg.eps, child, rho=cfg.rho)
            else:
                hc = hopsets.hopset_three_eps_improved(g, cfg.k, d, cfg.eps, child)
            h.union_from(hc)
            alpha = max(alpha, hc.certificate["alpha"])
            beta_formula = max(beta_formula, hc.certificate["beta_formula"])
            h.certificate = dict(hc.certificate)
        if len(ds) > 1:
            hopsets._certify_fields(
                h, name, alpha, beta_formula,
                d_range=None, params={"k": cfg.k, "eps": cfg.eps, "classes": ds},
            )
        return "hopset", h, None
    raise ParameterError(f"unknown construction {cfg.construction!r}")


def _ledger_jsonable(obj):
    if isinstance(obj, dict):
        return {str(k): _ledger_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_ledger_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (np.floating,)):
        return float(obj)
    return obj


def cmd_build(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    seed = cfg.seeds[0] if cfg.seeds else 0
    kind, art, led = _build_artifact(g, cfg, seed, cfg.model)
    out = Path(cfg.out or "run-out")
    out.mkdir(parents=True, exist_ok=True)
    write_graph(out / "graph.txt", g)
    cert = dict(art.certificate)
    cert["seed"] = seed
    cert["model"] = cfg.model
    if led is not None:
        cert["exec_ledger"] = _ledger_jsonable(asdict(led))
    cert["size_ledger"] = art.size_ledger()
    if kind == "spanner":
        write_graph(out / "spanner.txt", art.to_graph())
    else:
        write_hopset(out / "hopset.txt", art)
    (out / "certificate.json").write_text(json.dumps(_ledger_jsonable(cert), sort_keys=True, indent=1))
    (out / "run_config.json").write_text(cfg.to_json())
    print(f"built {cfg.construction}: {kind} with "
          f"{art.edge_count if kind == 'spanner' else art.hop_count} edges -> {out}")
    return 0


def cmd_certify(cfg: RunConfig) -> int:
    src = Path(cfg.input or cfg.out or ".")
    g = read_graph(src / "graph.txt")
    cert = json.loads((src / "certificate.json").read_text())
    if cert.get("kind") == "spanner":
        hg = read_graph(src / "spanner.txt")
        s = EdgeSubgraph(g, tag=cert.get("construction", "loaded"))
        for u, v, w in zip(hg.eu, hg.ev, hg.ew):
            s.add_edge(int(u), int(v), "loaded")
        s.certificate = cert
        report = certify_spanner(g, s)
    else:
        n, triples = read_hopset_arrays(src / "hopset.txt")
        if n != g.n:
            raise ParameterError(f"hopset n={n} does not match graph n={g.n}")
        h = hopset_from_triples(g, triples)
        h.certificate = cert
        report = certify_hopset(g, h)
    (src / "report.json").write_text(report.to_json())
    status = "OK" if report.ok else f"FAIL ({report.n_violations} violations)"
    print(f"certify {report.construction}: alpha={report.alpha} beta={report.beta} "
          f"pairs={report.n_pairs} -> {status}")
    return 0 if report.ok else 1


def cmd_sweep(cfg: RunConfig) -> int:
    g = _load_graph(cfg)
    rows = []
    for seed in cfg.seeds or [0]:
        kind, art, led = _build_artifact(g, cfg, seed, cfg.model)
        if kind == "spanner":
            report = certify_spanner(g, art)
            size = art.edge_count
        else:
            report = certify_hopset(g, art)
            size = art.hop_count
        worst = max((v for v in report.worst_by_bucket.values()), default=0.0)
        row = {
            "construction": cfg.construction,
            "model": cfg.model,
            "n": g.n,
            "k": cfg.k,
            "eps": cfg.eps,
            "rho": cfg.rho if cfg.rho is not None else "",
            "seed": seed,
            "size": size,
            "alpha": report.alpha,
            "beta": report.beta,
            "alpha_beta_product": report.alpha * report.beta,
            "violations": report.n_violations,
            "worst_residual": worst,
            "rounds": "",
            "passes": "",
            "congestion": "",
        }
        if led is not None:
            if hasattr(led, "rounds"):
                row["rounds"] = led.rounds
                row["congestion"] = led.max_vertex_traversals
            else:
                row["passes"] = led.passes
        rows.append(row)
    out = Path(cfg.out or "sweep-out")
    out.mkdir(parents=True, exist_ok=True)
    if rows:
        with open(out / "sweep.csv", "w", newline="") as f:
            writer = csv.DictWriter(f, fieldnames=list(rows[0]))
            writer.writeheader()
            writer.writerows(rows)
    (out / "sweep.json").write_text(json.dumps(_ledger_jsonable(rows), sort_keys=True, indent=1))
    print(f"sweep: {len(rows)} rows -> {out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="spanhop", description=__doc__,
                                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True)
    for name in ("build", "certify", "sweep"):
        p = sub.add_parser(name)
        p.add_argument("--construction", choices=SPANNER_CONSTRUCTIONS + HOPSET_CONSTRUCTIONS)
        p.add_argument("--k", type=int)
        p.add_argument("--eps", type=float)
        p.add_argument("--rho", type=float)
        p.add_argument("--seed", type=str, default="0")
        p.add_argument("--gen", type=str)
        p.add_argument("--input", type=str)
        p.add_argument("--out", type=str)
        p.add_argument("--model", choices=MODELS, default="centralized")
        p.add_argument("--classes", type=str, default="auto")
    return ap


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    cfg = RunConfig(
        command=args.command,
        construction=args.construction,
        gen=args.gen,
        input=args.input,
        k=args.k,
        eps=args.eps,
        rho=args.rho,
        seeds=_parse_seeds(args.seed),
        model=args.model,
        classes=args.classes,
        out=args.out,
    )
    try:
        if args.command == "build":
            return cmd_build(cfg)
        if args.command == "certify":
            return cmd_certify(cfg)
        return cmd_sweep(cfg)
    except ParameterError as exc:
        print(f"parameter error: {exc}", file=sys.stderr)
        return 2
    except FileNotFoundError as exc:
        print(f"missing file: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
