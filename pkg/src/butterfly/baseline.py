"""Baseline butterfly estimators: edge sparsification and weighted pair sampling."""

from __future__ import annotations

import random
import time
from bisect import bisect_right
from dataclasses import dataclass, field
from itertools import accumulate
from math import comb
from typing import Literal

from .exact import count_butterflies_exact
from .graph import Side, VertexRef, from_edges
from .oracle import BudgetExhausted, EmptyGraph, QueryCounts, QueryOracle

DEFAULT_WPS_ROUNDS = 20_000

FLAG_BUDGET = "budget_exhausted"
FLAG_UNAVAILABLE = "estimate_unavailable"
FLAG_TIME_LIMIT = "time_limit"
FLAG_NOT_CONVERGED = "not_converged"


@dataclass(frozen=True)
class EstimateReport:
    """Outcome of one estimator run.

    ``estimate`` is None when the run could not produce a value (for
    example the budget ran out before anything was computed); the reason
    is then present in ``flags``.
    """

    estimate: float | None
    queries: QueryCounts
    wall_millis: float
    rounds_used: int
    seed: int
    flags: tuple[str, ...] = field(default=())


def espar_estimate(
    oracle: QueryOracle,
    p: float,
    seed: int = 0,
    mode: Literal["unbiased", "quartered"] = "unbiased",
) -> EstimateReport:
    """Keep each edge independently with probability p, count exactly, rescale.

    Every retained edge is one charged edge read.  The butterfly count of
    the retained subgraph is local computation and costs nothing.  In
    ``unbiased`` mode the count is rescaled by p^-4, making the estimator
    exactly unbiased; ``quartered`` additionally divides by four, the
    convention for pipelines that count each butterfly once per
    participating wedge pair.
    """
    if not 0.0 < p <= 1.0:
        raise ValueError("retention probability must lie in (0, 1]")
    if mode not in ("unbiased", "quartered"):
        raise ValueError(f"unknown mode {mode!r}")
    rng = random.Random(seed)
    start = time.perf_counter()
    m = oracle.edge_count
    kept: list[tuple[int, int]] = []
    flags: tuple[str, ...] = ()
    try:
        for eid in range(m):
            if rng.random() < p:
                e = oracle.edge_at(eid)
                kept.append((e.upper.index, e.lower.index))
    except BudgetExhausted:
        # A partial edge scan admits no principled rescale, so no estimate.
        return EstimateReport(
            estimate=None,
            queries=oracle.snapshot_counts(),
            wall_millis=(time.perf_counter() - start) * 1e3,
            rounds_used=0,
            seed=seed,
            flags=(FLAG_BUDGET, FLAG_UNAVAILABLE),
        )
    sub = from_edges(kept, upper_count=oracle.upper_count, lower_count=oracle.lower_count)
    count = count_butterflies_exact(sub)
    estimate = count / p**4
    if mode == "quartered":
        estimate /= 4.0
    return EstimateReport(
        estimate=estimate,
        queries=oracle.snapshot_counts(),
        wall_millis=(time.perf_counter() - start) * 1e3,
        rounds_used=1,
        seed=seed,
        flags=flags,
    )


def wps_pair_value(
    oracle: QueryOracle,
    u: VertexRef,
    d_u: int,
    v: VertexRef,
    d_v: int,
    m: int,
) -> float:
    """Round value for one sampled same-side pair (u, v), u != v.

    The co-neighborhood is resolved from the smaller-degree endpoint: each
    of its neighbors costs one neighbor query plus one vertex-pair query
    against the other endpoint.  Returns m^2 / (2 d_u d_v) * C(n_uv, 2).
    """
    if d_u <= d_v:
        probe, probe_deg, other = u, d_u, v
    else:
        probe, probe_deg, other = v, d_v, u
    hits = 0
    for i in range(probe_deg):
        w = oracle.neighbor(probe, i)
        if oracle.has_edge(w, other):
            hits += 1
    return m * m / (2.0 * d_u * d_v) * comb(hits, 2)


def wps_estimate(
    oracle: QueryOracle,
    rounds: int = DEFAULT_WPS_ROUNDS,
    seed: int = 0,
    deadline: float | None = None,
) -> EstimateReport:
    """Weighted pair sampling over one vertex layer.

    Scans the degrees of the smaller layer once (charged), then repeatedly
    draws two vertices of that layer proportionally to degree.  Equal
    draws contribute zero; otherwise the pair's co-neighborhood size n_uv
    turns into the unbiased round value m^2/(2 d_u d_v) * C(n_uv, 2).
    The estimate is the mean over executed rounds.
    """
    if rounds < 1:
        raise ValueError("rounds must be positive")
    rng = random.Random(seed)
    start = time.perf_counter()
    side = Side.UPPER if oracle.upper_count <= oracle.lower_count else Side.LOWER
    layer = oracle.side_count(side)
    if oracle.edge_count == 0:
        raise EmptyGraph("weighted pair sampling needs at least one edge")

    def report(estimate, done, flags):
        return EstimateReport(
            estimate=estimate,
            queries=oracle.snapshot_counts(),
            wall_millis=(time.perf_counter() - start) * 1e3,
            rounds_used=done,
            seed=seed,
            flags=flags,
        )

    try:
        degrees = [oracle.degree(VertexRef(side, i)) for i in range(layer)]
    except BudgetExhausted:
        return report(None, 0, (FLAG_BUDGET, FLAG_UNAVAILABLE))
    prefix = list(accumulate(degrees))
    m = prefix[-1]

    total = 0.0
    done = 0
    flags: tuple[str, ...] = ()
    for _ in range(rounds):
        if deadline is not None and time.monotonic() >= deadline:
            flags += (FLAG_TIME_LIMIT,)
            break
        iu = bisect_right(prefix, rng.randrange(m))
        iv = bisect_right(prefix, rng.randrange(m))
        if iu == iv:
            done += 1
            continue
        try:
            total += wps_pair_value(
                oracle,
                VertexRef(side, iu),
                degrees[iu],
                VertexRef(side, iv),
                degrees[iv],
                m,
            )
        except BudgetExhausted:
            flags += (FLAG_BUDGET,)
            break
        done += 1
    if done == 0:
        return report(None, 0, flags + (FLAG_UNAVAILABLE,))
    return report(total / done, done, flags)
