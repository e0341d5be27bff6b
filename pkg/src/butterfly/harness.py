"""Experiment harness: seeded runs, JSONL/CSV reporting, and comparisons.

A :class:`RunSpec` names an algorithm, a graph source (file path or
generator spec), repetitions, and parameters.  :func:`run` executes the
repetitions with seeds base_seed, base_seed+1, ... against fresh oracles,
resolves ground truth when it can, and emits one JSONL record per run
plus a CSV summary row.  Identical specs produce identical records except
for wall-clock fields.
"""

from __future__ import annotations

import csv
import json
import os
import re
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, fields
from pathlib import Path
from typing import Iterable

import numpy as np

from .baseline import EstimateReport, espar_estimate, wps_estimate
from .exact import count_butterflies_bruteforce, count_butterflies_exact
from .graph import (
    BipartiteGraph,
    complete_bipartite,
    erdos_renyi,
    hub_adversary,
    load_cache,
    load_konect,
)
from .oracle import QueryBudget, QueryCounts, QueryOracle
from .theory import TheoryConstants, estimate_wedges, hlgp_estimate, tls_eg
from .tls import TlsConfig, tls_estimate

TRUTH_DIR_ENV = "BUTTERFLY_TRUTH_DIR"
DEFAULT_TRUTH_CUTOFF = 50_000_000

ALGORITHMS = ("exact", "bruteforce", "espar", "wps", "tls", "tlseg", "hlgp")

_GEN_PREFIXES = ("kab:", "er:", "hub:")


@dataclass(frozen=True)
class RunSpec:
    """One experiment: an algorithm, a graph, repetitions, and parameters."""

    algorithm: str
    source: str
    reps: int = 1
    base_seed: int = 0
    p: float = 0.2
    espar_mode: str = "unbiased"
    rounds: int = 20_000
    s1_factor: float = 0.5
    epsilon: float = 0.5
    c_heavy: float | None = None
    scale_t: float = 1.0
    scale_s: float = 1.0
    scale_s1: float = 1.0
    scale_s2: float = 1.0
    scale_reps: float = 1.0
    b_bar: float | None = None
    w_bar: float | None = None
    budget_queries: int | None = None
    time_limit_ms: float | None = None
    truth_cutoff: int = DEFAULT_TRUTH_CUTOFF
    truth_dir: str | None = None
    workers: int = 1
    out_prefix: str | None = None

    def __post_init__(self):
        if self.algorithm not in ALGORITHMS:
            raise ValueError(f"unknown algorithm {self.algorithm!r}")
        if self.reps < 1:
            raise ValueError("reps must be positive")
        if self.workers < 1:
            raise ValueError("workers must be positive")


@dataclass
class RunSummary:
    spec: RunSpec
    dataset: str
    truth: int | None
    reports: list[EstimateReport]
    records: list[dict]
    mean_estimate: float | None
    mean_queries: dict[str, float]
    mean_wall_millis: float
    error_quantiles: dict[str, float] | None


def parse_graph_source(source: str) -> BipartiteGraph:
    """Materialize a graph from a generator spec or a file path.

    Generator grammar: ``kab:a,b`` (complete bipartite), ``er:n1,n2,p,seed``
    (independent edges), ``hub:h,t`` (two hubs plus h pendants).  Anything
    else is a path: binary caches are detected by magic, otherwise the
    file is parsed as a KONECT edge list.
    """
    if source.startswith("kab:"):
        a, b = _parse_ints(source[4:], 2, source)
        return complete_bipartite(a, b)
    if source.startswith("er:"):
        parts = source[3:].split(",")
        if len(parts) != 4:
            raise ValueError(f"generator spec {source!r} needs n1,n2,p,seed")
        try:
            n1, n2, seed = int(parts[0]), int(parts[1]), int(parts[3])
            p = float(parts[2])
        except ValueError as exc:
            raise ValueError(f"bad generator spec {source!r}") from exc
        return erdos_renyi(n1, n2, p, seed)
    if source.startswith("hub:"):
        h, t = _parse_ints(source[4:], 2, source)
        return hub_adversary(h, t)
    path = Path(source)
    with path.open("rb") as fh:
        head = fh.read(8)
    if head == b"BFGCACH1":
        return load_cache(path)
    return load_konect(path)


def _parse_ints(text: str, count: int, source: str) -> list[int]:
    parts = text.split(",")
    if len(parts) != count:
        raise ValueError(f"generator spec {source!r} needs {count} integers")
    try:
        return [int(x) for x in parts]
    except ValueError as exc:
        raise ValueError(f"bad generator spec {source!r}") from exc


def dataset_name(source: str) -> str:
    if source.startswith(_GEN_PREFIXES):
        return source
    return Path(source).stem


def resolve_truth(
    graph: BipartiteGraph,
    dataset: str,
    truth_dir: str | None = None,
    cutoff: int = DEFAULT_TRUTH_CUTOFF,
) -> int | None:
    """Sidecar truth file if present, exact count if the graph fits, else None."""
    directory = truth_dir or os.environ.get(TRUTH_DIR_ENV)
    if directory:
        for name in (dataset, re.sub(r"[^A-Za-z0-9_.-]", "_", dataset)):
            candidate = Path(directory) / f"{name}.truth"
            if candidate.is_file():
                return int(candidate.read_text().strip())
    if graph.edge_count <= cutoff:
        return count_butterflies_exact(graph)
    return None


def _constants(spec: RunSpec) -> TheoryConstants:
    kwargs = dict(
        epsilon=spec.epsilon,
        scale_t=spec.scale_t,
        scale_s=spec.scale_s,
        scale_s1=spec.scale_s1,
        scale_s2=spec.scale_s2,
        scale_reps=spec.scale_reps,
    )
    if spec.c_heavy is not None:
        kwargs["c_heavy"] = spec.c_heavy
    return TheoryConstants(**kwargs)


def _single_run(
    graph: BipartiteGraph, spec: RunSpec, seed: int, truth: int | None
) -> EstimateReport:
    start = time.perf_counter()
    if spec.algorithm in ("exact", "bruteforce"):
        counter = (
            count_butterflies_exact
            if spec.algorithm == "exact"
            else count_butterflies_bruteforce
        )
        value = counter(graph)
        return EstimateReport(
            estimate=float(value),
            queries=QueryCounts(),
            wall_millis=(time.perf_counter() - start) * 1e3,
            rounds_used=1,
            seed=seed,
        )
    budget = QueryBudget(spec.budget_queries) if spec.budget_queries else None
    oracle = QueryOracle(graph, budget)
    deadline = (
        time.monotonic() + spec.time_limit_ms / 1e3 if spec.time_limit_ms else None
    )
    if spec.algorithm == "espar":
        return espar_estimate(oracle, spec.p, seed=seed, mode=spec.espar_mode)
    if spec.algorithm == "wps":
        return wps_estimate(oracle, rounds=spec.rounds, seed=seed, deadline=deadline)
    if spec.algorithm == "tls":
        cfg = TlsConfig(s1_factor=spec.s1_factor)
        return tls_estimate(oracle, cfg, seed=seed, deadline=deadline)
    if spec.algorithm == "tlseg":
        import random as _random

        constants = _constants(spec)
        b_bar = spec.b_bar if spec.b_bar is not None else truth
        if b_bar is None or b_bar <= 0:
            raise ValueError("tlseg needs b_bar (or computable truth) > 0")
        rng = _random.Random(seed)
        w_bar = (
            spec.w_bar
            if spec.w_bar is not None
            else estimate_wedges(oracle, mode="exact")
        )
        value = tls_eg(oracle, constants, float(b_bar), float(w_bar), rng)
        return EstimateReport(
            estimate=value,
            queries=oracle.snapshot_counts(),
            wall_millis=(time.perf_counter() - start) * 1e3,
            rounds_used=1,
            seed=seed,
        )
    # hlgp
    return hlgp_estimate(oracle, _constants(spec), seed=seed)


def _record(
    spec: RunSpec, dataset: str, truth: int | None, report: EstimateReport
) -> dict:
    rel = None
    if truth is not None and truth > 0 and report.estimate is not None:
        rel = (report.estimate - truth) / truth
    q = report.queries
    return {
        "algorithm": spec.algorithm,
        "dataset": dataset,
        "seed": report.seed,
        "estimate": report.estimate,
        "truth": truth,
        "rel_error": rel,
        "q_degree": q.degree,
        "q_neighbor": q.neighbor,
        "q_pair": q.vertex_pair,
        "q_edge_sample": q.edge_sample,
        "q_total": q.total,
        "wall_millis": report.wall_millis,
        "rounds_used": report.rounds_used,
        "flags": sorted(report.flags),
    }


_POOL_STATE: dict = {}


def _pool_init(source: str) -> None:
    _POOL_STATE["graph"] = parse_graph_source(source)


def _pool_run(args: tuple) -> EstimateReport:
    spec_dict, seed, truth = args
    spec = RunSpec(**spec_dict)
    return _single_run(_POOL_STATE["graph"], spec, seed, truth)


def run(spec: RunSpec, graph: BipartiteGraph | None = None) -> RunSummary:
    """Execute a spec and optionally persist JSONL and CSV outputs.

    Repetition i runs with seed base_seed + i against a fresh oracle.
    With ``workers`` above 1 the repetitions are distributed over a
    process pool (each worker materializes the graph once); records are
    always emitted in repetition order through a single writer.
    """
    if graph is None:
        graph = parse_graph_source(spec.source)
    dataset = dataset_name(spec.source)
    truth = resolve_truth(graph, dataset, spec.truth_dir, spec.truth_cutoff)
    seeds = [spec.base_seed + i for i in range(spec.reps)]
    if spec.workers > 1 and spec.reps > 1:
        spec_dict = {f.name: getattr(spec, f.name) for f in fields(spec)}
        args = [(spec_dict, s, truth) for s in seeds]
        with ProcessPoolExecutor(
            max_workers=spec.workers,
            initializer=_pool_init,
            initargs=(spec.source,),
        ) as pool:
            reports = list(pool.map(_pool_run, args))
    else:
        reports = [_single_run(graph, spec, s, truth) for s in seeds]
    records = [_record(spec, dataset, truth, r) for r in reports]

    estimates = [r.estimate for r in reports if r.estimate is not None]
    errors = [rec["rel_error"] for rec in records if rec["rel_error"] is not None]
    mean_queries = {
        key: float(np.mean([rec[key] for rec in records]))
        for key in ("q_degree", "q_neighbor", "q_pair", "q_edge_sample", "q_total")
    }
    quantiles = None
    if errors:
        arr = np.asarray(errors, dtype=float)
        quantiles = {
            "q05": float(np.percentile(arr, 5)),
            "q50": float(np.percentile(arr, 50)),
            "q95": float(np.percentile(arr, 95)),
            "min": float(arr.min()),
            "max": float(arr.max()),
        }
    summary = RunSummary(
        spec=spec,
        dataset=dataset,
        truth=truth,
        reports=reports,
        records=records,
        mean_estimate=float(np.mean(estimates)) if estimates else None,
        mean_queries=mean_queries,
        mean_wall_millis=float(np.mean([r.wall_millis for r in reports])),
        error_quantiles=quantiles,
    )
    if spec.out_prefix:
        write_jsonl(Path(f"{spec.out_prefix}.jsonl"), records)
        write_summary_csv(Path(f"{spec.out_prefix}.summary.csv"), [summary])
    return summary


def write_jsonl(path: Path, records: Iterable[dict]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for rec in records:
            fh.write(json.dumps(rec, sort_keys=True) + "\n")


_SUMMARY_COLUMNS = [
    "algorithm",
    "dataset",
    "reps",
    "truth",
    "mean_estimate",
    "mean_q_degree",
    "mean_q_neighbor",
    "mean_q_pair",
    "mean_q_edge_sample",
    "mean_q_total",
    "mean_wall_millis",
    "err_q05",
    "err_q50",
    "err_q95",
    "err_min",
    "err_max",
]


def summary_row(summary: RunSummary) -> dict:
    row = {
        "algorithm": summary.spec.algorithm,
        "dataset": summary.dataset,
        "reps": summary.spec.reps,
        "truth": summary.truth,
        "mean_estimate": summary.mean_estimate,
        "mean_q_degree": summary.mean_queries["q_degree"],
        "mean_q_neighbor": summary.mean_queries["q_neighbor"],
        "mean_q_pair": summary.mean_queries["q_pair"],
        "mean_q_edge_sample": summary.mean_queries["q_edge_sample"],
        "mean_q_total": summary.mean_queries["q_total"],
        "mean_wall_millis": summary.mean_wall_millis,
    }
    q = summary.error_quantiles
    row["err_q05"] = q["q05"] if q else None
    row["err_q50"] = q["q50"] if q else None
    row["err_q95"] = q["q95"] if q else None
    row["err_min"] = q["min"] if q else None
    row["err_max"] = q["max"] if q else None
    return row


def write_summary_csv(path: Path, summaries: Iterable[RunSummary]) -> None:
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_SUMMARY_COLUMNS)
        writer.writeheader()
        for s in summaries:
            writer.writerow(summary_row(s))


def compare(specs: Iterable[RunSpec], out_path: str | Path | None = None) -> list[RunSummary]:
    """Run several specs and write one summary CSV row per spec.

    An empty spec list still yields a header-only CSV.
    """
    summaries = [run(s) for s in specs]
    if out_path is not None:
        write_summary_csv(Path(out_path), summaries)
    return summaries


def load_compare_config(path: str | Path) -> list[RunSpec]:
    """Read a JSON file of the form {"specs": [{...RunSpec fields...}]}."""
    data = json.loads(Path(path).read_text(encoding="utf-8"))
    if not isinstance(data, dict) or "specs" not in data:
        raise ValueError("config must be an object with a 'specs' list")
    names = {f.name for f in fields(RunSpec)}
    specs = []
    for i, entry in enumerate(data["specs"]):
        unknown = set(entry) - names
        if unknown:
            raise ValueError(f"spec {i}: unknown fields {sorted(unknown)}")
        specs.append(RunSpec(**entry))
    return specs
