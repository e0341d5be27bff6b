"""Two-level sampling butterfly estimator.

The first level keeps a small multiset of uniformly sampled edges; the
second level repeatedly extends those edges into wedges and tests, with a
handful of queries each time, whether a wedge closes into a butterfly.
Estimates from both levels are rescaled so the whole thing stays unbiased,
and the loop sizes adapt to a pair of relative-change thresholds instead
of being fixed up front.
"""

from __future__ import annotations

import random
import time
from bisect import bisect_right
from dataclasses import dataclass
from itertools import accumulate
from math import ceil, sqrt
from typing import NamedTuple

from .graph import EdgeRef, Side, VertexRef, Wedge, precedes_by_degree
from .oracle import BudgetExhausted, EmptyGraph, QueryOracle
from .baseline import (
    FLAG_BUDGET,
    FLAG_TIME_LIMIT,
    FLAG_UNAVAILABLE,
    EstimateReport,
)


@dataclass(frozen=True)
class TlsConfig:
    """Knobs for the adaptive two-level estimator.

    ``s1`` and ``inner_batch`` default to floor(s1_factor * sqrt(m)) and
    floor(inner_batch_factor * sqrt(m)), both at least 1, when left None.
    The inner loop stops once the round estimate moves by less than
    ``inner_rel_threshold`` between batches (after ``min_inner_batches``);
    the outer loop applies the same rule to the running mean of round
    estimates.  Relative change is measured against max(|old|, 1) so a
    zero estimate terminates cleanly.
    """

    s1: int | None = None
    inner_batch: int | None = None
    s1_factor: float = 0.5
    inner_batch_factor: float = 0.1
    inner_rel_threshold: float = 0.02
    outer_rel_threshold: float = 0.002
    min_inner_batches: int = 3
    min_outer_rounds: int = 2
    max_inner_batches: int = 1000
    max_outer_rounds: int = 1000

    def __post_init__(self):
        if self.s1 is not None and self.s1 < 1:
            raise ValueError("s1 must be positive")
        if self.inner_batch is not None and self.inner_batch < 1:
            raise ValueError("inner_batch must be positive")
        if self.s1_factor <= 0 or self.inner_batch_factor <= 0:
            raise ValueError("size factors must be positive")
        if not 0 < self.inner_rel_threshold < 1:
            raise ValueError("inner_rel_threshold must lie in (0, 1)")
        if not 0 < self.outer_rel_threshold < 1:
            raise ValueError("outer_rel_threshold must lie in (0, 1)")
        if self.min_inner_batches < 1 or self.min_outer_rounds < 1:
            raise ValueError("minimum batch and round counts must be positive")
        if self.max_inner_batches < self.min_inner_batches:
            raise ValueError("max_inner_batches below min_inner_batches")
        if self.max_outer_rounds < self.min_outer_rounds:
            raise ValueError("max_outer_rounds below min_outer_rounds")


class RepresentativeSet(NamedTuple):
    """First-level edge multiset with degree-derived sampling weights."""

    edges: list[EdgeRef]
    deg_upper: list[int]
    deg_lower: list[int]
    edge_degrees: list[int]
    prefix_weights: list[int]
    total_weight: int


class WedgeSample(NamedTuple):
    """A wedge plus the base edge and the degrees already paid for.

    ``wedge.endpoint_a`` is the base-edge endpoint opposite the center and
    ``wedge.endpoint_b`` is the freshly sampled third vertex.
    """

    wedge: Wedge
    base: EdgeRef
    d_center: int
    d_endpoint: int


def build_representative_set(
    oracle: QueryOracle, s1: int, rng: random.Random
) -> RepresentativeSet:
    """Draw s1 edges with replacement and fetch both endpoint degrees.

    Costs exactly s1 edge samples plus 2*s1 degree queries.  Each edge's
    weight is its wedge count d_u + d_v - 2; the prefix sums drive
    weighted selection later.
    """
    if s1 < 1:
        raise ValueError("s1 must be positive")
    edges = [oracle.sample_edge(rng) for _ in range(s1)]
    deg_upper = [oracle.degree(e.upper) for e in edges]
    deg_lower = [oracle.degree(e.lower) for e in edges]
    edge_degrees = [du + dl - 2 for du, dl in zip(deg_upper, deg_lower)]
    prefix = list(accumulate(edge_degrees))
    return RepresentativeSet(
        edges, deg_upper, deg_lower, edge_degrees, prefix, prefix[-1] if prefix else 0
    )


def sample_wedge_through_edge(
    edge: EdgeRef,
    d_upper: int,
    d_lower: int,
    oracle: QueryOracle,
    rng: random.Random,
) -> WedgeSample:
    """Uniform wedge containing ``edge``; requires d_upper + d_lower > 2.

    One endpoint becomes the center with probability proportional to its
    degree minus one, then the third vertex is a uniform neighbor of the
    center other than the remaining endpoint, found by rejection (each
    draw costs one neighbor query).
    """
    d_e = d_upper + d_lower - 2
    if rng.randrange(d_e) < d_upper - 1:
        center, d_center = edge.upper, d_upper
        endpoint, d_endpoint = edge.lower, d_lower
    else:
        center, d_center = edge.lower, d_lower
        endpoint, d_endpoint = edge.upper, d_upper
    while True:
        x = oracle.neighbor(center, rng.randrange(d_center))
        if x != endpoint:
            break
    return WedgeSample(Wedge(endpoint, center, x), edge, d_center, d_endpoint)


def sample_wedge(
    rep: RepresentativeSet, oracle: QueryOracle, rng: random.Random
) -> WedgeSample | None:
    """Weighted wedge draw over the representative set.

    Picks a slot proportionally to edge degree, then a uniform wedge
    through that edge.  Returns None when every slot has weight zero.
    """
    if rep.total_weight == 0:
        return None
    k = bisect_right(rep.prefix_weights, rng.randrange(rep.total_weight))
    return sample_wedge_through_edge(
        rep.edges[k], rep.deg_upper[k], rep.deg_lower[k], oracle, rng
    )


def estimate_wedge_butterflies(
    sample: WedgeSample, oracle: QueryOracle, rng: random.Random, m: int
) -> float:
    """Second-level estimate of the butterflies a wedge participates in.

    Let y be the lower-degree wedge endpoint (ties broken by the vertex
    order).  Over R = max(ceil(10 d_y / sqrt(m)), 10) trials a uniform
    neighbor z of y is drawn; a trial scores d_y / 4 when z is distinct
    from the center, adjacent to the far endpoint, and the sampled
    endpoint precedes z in the degree order.  The quarter compensates for
    each butterfly being countable through four of its eight
    edge-and-wedge completions.  Returns the mean trial score.

    Queries per call: one degree query for the sampled endpoint, one
    neighbor query per trial, plus one vertex-pair and one degree query
    for trials that reach the closure tests.
    """
    endpoint, center, x = sample.wedge
    d_x = oracle.degree(x)
    if precedes_by_degree(d_x, x, sample.d_endpoint, endpoint):
        y, d_y, far = x, d_x, endpoint
    else:
        y, d_y, far = endpoint, sample.d_endpoint, x
    trials = max(ceil(10.0 * d_y / sqrt(m)), 10)
    score = 0.0
    for _ in range(trials):
        z = oracle.neighbor(y, rng.randrange(d_y))
        if z == center:
            continue  # degenerate quadruple, no pair query spent
        if not oracle.has_edge(z, far):
            continue
        d_z = oracle.degree(z)
        if precedes_by_degree(d_x, x, d_z, z):
            score += d_y / 4.0
    return score / trials


def _rel_change(new: float, old: float) -> float:
    return abs(new - old) / max(abs(old), 1.0)


def tls_estimate(
    oracle: QueryOracle,
    config: TlsConfig | None = None,
    seed: int = 0,
    deadline: float | None = None,
) -> EstimateReport:
    """Adaptive two-level sampling estimate of the butterfly count.

    Each outer round draws a fresh representative set, then streams
    batches of wedge estimates until the round value stabilizes; rounds
    accumulate until their running mean stabilizes as well.  The round
    value is (m / (s1 * k)) * W * sum of k wedge estimates, where W is the
    set's total wedge weight.  A round whose set has zero weight
    contributes zero.  Budget exhaustion ends the run early and reports
    the mean over completed rounds.
    """
    cfg = config or TlsConfig()
    m = oracle.edge_count
    if m == 0:
        raise EmptyGraph("two-level sampling needs at least one edge")
    s1 = cfg.s1 if cfg.s1 is not None else max(1, int(cfg.s1_factor * sqrt(m)))
    batch = (
        cfg.inner_batch
        if cfg.inner_batch is not None
        else max(1, int(cfg.inner_batch_factor * sqrt(m)))
    )
    rng = random.Random(seed)
    start = time.perf_counter()
    flags: tuple[str, ...] = ()
    round_values: list[float] = []
    running = None
    try:
        for _ in range(cfg.max_outer_rounds):
            if deadline is not None and time.monotonic() >= deadline:
                flags += (FLAG_TIME_LIMIT,)
                break
            rep = build_representative_set(oracle, s1, rng)
            if rep.total_weight == 0:
                round_value = 0.0
            else:
                score = 0.0
                used = 0
                prev = None
                round_value = 0.0
                for _ in range(cfg.max_inner_batches):
                    for _ in range(batch):
                        ws = sample_wedge(rep, oracle, rng)
                        score += estimate_wedge_butterflies(ws, oracle, rng, m)
                        used += 1
                    round_value = m / (s1 * used) * rep.total_weight * score
                    batches = used // batch
                    if (
                        batches >= cfg.min_inner_batches
                        and prev is not None
                        and _rel_change(round_value, prev) < cfg.inner_rel_threshold
                    ):
                        break
                    prev = round_value
            round_values.append(round_value)
            new_mean = sum(round_values) / len(round_values)
            if (
                len(round_values) >= cfg.min_outer_rounds
                and running is not None
                and _rel_change(new_mean, running) < cfg.outer_rel_threshold
            ):
                running = new_mean
                break
            running = new_mean
    except BudgetExhausted:
        flags += (FLAG_BUDGET,)
    wall = (time.perf_counter() - start) * 1e3
    if not round_values:
        return EstimateReport(
            estimate=None,
            queries=oracle.snapshot_counts(),
            wall_millis=wall,
            rounds_used=0,
            seed=seed,
            flags=flags + (FLAG_UNAVAILABLE,),
        )
    return EstimateReport(
        estimate=sum(round_values) / len(round_values),
        queries=oracle.snapshot_counts(),
        wall_millis=wall,
        rounds_used=len(round_values),
        seed=seed,
        flags=flags,
    )
