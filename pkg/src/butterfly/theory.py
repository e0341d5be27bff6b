"""Heavy-light edge classification and the theoretically sized estimator stack.

The practical estimator in :mod:`butterfly.tls` picks its loop sizes
adaptively.  The routines here instead follow the analyzed sizing: edges
are split into heavy and light by a sampling classifier, butterflies are
credited fractionally to their light edges so nothing is double counted,
and an outer ladder guesses the butterfly count, decreasing the guess
until an estimate confirms it.

All loop-size formulas expose multiplicative ``scale_*`` knobs; with every
knob at 1.0 the literal analyzed sizes are used, which are far too large
for desk-scale graphs.  Tests document the scaled-down settings they run
with.  Logarithms are natural throughout.
"""

from __future__ import annotations

import hashlib
import random
import time
from dataclasses import dataclass, replace
from enum import Enum
from math import ceil, log, sqrt
from statistics import median

from .baseline import FLAG_BUDGET, FLAG_NOT_CONVERGED, FLAG_UNAVAILABLE, EstimateReport
from .graph import EdgeRef, Side, VertexRef, precedes_by_degree
from .oracle import BudgetExhausted, EmptyGraph, QueryOracle
from .tls import build_representative_set, sample_wedge, sample_wedge_through_edge

DEFAULT_C_HEAVY = 1.77e4


@dataclass(frozen=True)
class TheoryConstants:
    """Accuracy target and scaling knobs for the analyzed estimators.

    ``c_heavy`` is the constant bounding how many butterflies a correct
    heavy-light split may leave without any light edge, relative to
    epsilon times the true count.  The ``scale_*`` fields multiply the
    corresponding loop-size formulas (classifier repetitions, classifier
    wedge trials, first-level set size, second-level trial count, ladder
    repetitions); 1.0 reproduces the analyzed sizes.
    """

    epsilon: float
    c_heavy: float = DEFAULT_C_HEAVY
    scale_t: float = 1.0
    scale_s: float = 1.0
    scale_s1: float = 1.0
    scale_s2: float = 1.0
    scale_reps: float = 1.0

    def __post_init__(self):
        if not 0.0 < self.epsilon < 1.0:
            raise ValueError("epsilon must lie in (0, 1)")
        if self.c_heavy <= 0:
            raise ValueError("c_heavy must be positive")
        for name in ("scale_t", "scale_s", "scale_s1", "scale_s2", "scale_reps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")


class HeavyLabel(Enum):
    HEAVY = "heavy"
    LIGHT = "light"


def definitely_heavy(b_e: int, d_e: int, b_bar: float, w_bar: float, epsilon: float) -> bool:
    """Exact-quantity form of the heavy definition."""
    return b_e > 2.0 * b_bar**0.75 / epsilon**0.25 or d_e > w_bar / (epsilon * b_bar) ** 0.25


def definitely_light(b_e: int, d_e: int, b_bar: float, w_bar: float, epsilon: float) -> bool:
    """Exact-quantity form of the light definition.

    Edges in the gap between the two definitions may carry either label.
    """
    return (
        b_e < b_bar**0.75 / (2.0 * epsilon**0.25)
        and d_e < w_bar / (epsilon * b_bar) ** 0.25
    )


def classifier_trial_counts(
    constants: TheoryConstants, m: int, b_bar: float, w_bar: float
) -> tuple[int, int]:
    """(repetitions, wedge trials per repetition) for the classifier."""
    t = max(1, ceil(constants.scale_t * 48.0 * log(2.0 * m)))
    s = max(
        1,
        ceil(
            constants.scale_s
            * 12.0
            * sqrt(m)
            * w_bar
            / (constants.epsilon**2 * b_bar)
        ),
    )
    return t, s


def classify_heavy(
    edge: EdgeRef,
    d_upper: int,
    d_lower: int,
    oracle: QueryOracle,
    constants: TheoryConstants,
    b_bar: float,
    w_bar: float,
    rng: random.Random,
) -> HeavyLabel:
    """Sampling classifier for one edge against guessed totals.

    A wedgeless edge is light.  An edge whose wedge count alone exceeds
    w_bar / (epsilon * b_bar)^(1/4) is heavy with no sampling.  Otherwise
    t repetitions of s wedge trials estimate the edge's butterfly count:
    each trial draws a wedge through the edge, then R = ceil(d_y / sqrt(m))
    uniform-neighbor probes of the cheaper endpoint y score d_y on a
    filtered closure.  Per repetition the mean trial score is rescaled by
    the edge's wedge count so it estimates the per-edge butterfly count;
    the median over repetitions is compared against
    b_bar^(3/4) / epsilon^(1/4).
    """
    d_e = d_upper + d_lower - 2
    if d_e == 0:
        return HeavyLabel.LIGHT
    eps = constants.epsilon
    if w_bar < (eps * b_bar) ** 0.25 * d_e:
        return HeavyLabel.HEAVY
    m = oracle.edge_count
    root_m = sqrt(m)
    t, s = classifier_trial_counts(constants, m, b_bar, w_bar)
    reps: list[float] = []
    for _ in range(t):
        acc = 0.0
        for _ in range(s):
            ws = sample_wedge_through_edge(edge, d_upper, d_lower, oracle, rng)
            endpoint, center, x = ws.wedge
            d_x = oracle.degree(x)
            if precedes_by_degree(d_x, x, ws.d_endpoint, endpoint):
                y, d_y, far = x, d_x, endpoint
            else:
                y, d_y, far = endpoint, ws.d_endpoint, x
            rounds = ceil(d_y / root_m)
            hit = 0
            for _ in range(rounds):
                z = oracle.neighbor(y, rng.randrange(d_y))
                if z == center:
                    continue
                if not oracle.has_edge(z, far):
                    continue
                d_z = oracle.degree(z)
                if precedes_by_degree(d_x, x, d_z, z):
                    hit += 1
            acc += d_y * hit / rounds
        reps.append(d_e * acc / s)
    return (
        HeavyLabel.HEAVY
        if median(reps) > b_bar**0.75 / eps**0.25
        else HeavyLabel.LIGHT
    )


def _edge_seed(base_seed: int, key: tuple[int, int]) -> int:
    digest = hashlib.blake2b(
        f"{base_seed}:{key[0]}:{key[1]}".encode(), digest_size=8
    ).digest()
    return int.from_bytes(digest, "big")


class EdgePartitionCache:
    """Memoized heavy-light labels that stand in for a fixed partition.

    The classifier is randomized, so asking twice could disagree; labels
    are cached by edge, and each edge's classifier run is seeded from the
    cache seed and the edge key, making the induced partition independent
    of query order within a run.
    """

    def __init__(self, base_seed: int):
        self._base_seed = base_seed
        self._labels: dict[tuple[int, int], HeavyLabel] = {}

    def __len__(self) -> int:
        return len(self._labels)

    def label(
        self,
        edge: EdgeRef,
        d_upper: int,
        d_lower: int,
        oracle: QueryOracle,
        constants: TheoryConstants,
        b_bar: float,
        w_bar: float,
    ) -> HeavyLabel:
        key = (edge.upper.index, edge.lower.index)
        got = self._labels.get(key)
        if got is not None:
            return got
        rng = random.Random(_edge_seed(self._base_seed, key))
        lab = classify_heavy(
            edge, d_upper, d_lower, oracle, constants, b_bar, w_bar, rng
        )
        self._labels[key] = lab
        return lab


def light_edge_count_in_butterfly(
    uppers: tuple[tuple[VertexRef, int], tuple[VertexRef, int]],
    lowers: tuple[tuple[VertexRef, int], tuple[VertexRef, int]],
    partition: EdgePartitionCache,
    oracle: QueryOracle,
    constants: TheoryConstants,
    b_bar: float,
    w_bar: float,
) -> int:
    """Number of the butterfly's four edges the partition labels light."""
    count = 0
    for u, d_u in uppers:
        for v, d_v in lowers:
            lab = partition.label(
                EdgeRef(u, v), d_u, d_v, oracle, constants, b_bar, w_bar
            )
            if lab is HeavyLabel.LIGHT:
                count += 1
    return count


def estimate_wedges(
    oracle: QueryOracle,
    mode: str = "exact",
    sample_size: int | None = None,
    rng: random.Random | None = None,
) -> float:
    """Total-wedge estimate w_bar.

    ``exact`` scans every vertex degree (one query each) and returns
    sum C(d, 2) exactly.  ``sampled`` draws ``sample_size`` edge
    endpoints, each one edge sample plus one degree query, and returns the
    degree-debiased plug-in m/k * sum (d_i - 1).
    """
    if mode == "exact":
        total = 0
        for side in (Side.UPPER, Side.LOWER):
            for i in range(oracle.side_count(side)):
                d = oracle.degree(VertexRef(side, i))
                total += d * (d - 1) // 2
        return float(total)
    if mode == "sampled":
        if sample_size is None or sample_size < 1:
            raise ValueError("sampled mode needs a positive sample_size")
        if rng is None:
            raise ValueError("sampled mode needs an rng")
        m = oracle.edge_count
        if m == 0:
            raise EmptyGraph("cannot sample wedges from an edgeless graph")
        acc = 0
        for _ in range(sample_size):
            e = oracle.sample_edge(rng)
            v = e.upper if rng.random() < 0.5 else e.lower
            acc += oracle.degree(v) - 1
        return m * acc / sample_size
    raise ValueError(f"unknown mode {mode!r}")


def weighted_trial_counts(
    constants: TheoryConstants, n: int, m: int, b_bar: float, w_bar: float
) -> tuple[int, int]:
    """(first-level set size, second-level trial count) for ``tls_eg``.

    The first-level constant is the analyzed lower bound
    1 / (2 (1 - c_heavy * epsilon)) doubled as safety margin; it requires
    c_heavy * epsilon < 1.
    """
    eps = constants.epsilon
    if constants.c_heavy * eps >= 1.0:
        raise ValueError("c_heavy * epsilon must be below 1 for the sizing formulas")
    c1 = 1.0 / (1.0 - constants.c_heavy * eps)
    s1 = max(
        1,
        ceil(
            constants.scale_s1 * c1 * m * log(n / eps**2) / (b_bar**0.25 * eps**2.25)
        ),
    )
    s2 = max(
        1,
        ceil(
            constants.scale_s2
            * 40.0
            * (1.0 + 2.0 * constants.c_heavy * eps)
            * w_bar
            * sqrt(m)
            * log(n) ** 2
            / (eps**4 * b_bar)
        ),
    )
    return s1, s2


def tls_eg(
    oracle: QueryOracle,
    constants: TheoryConstants,
    b_bar: float,
    w_bar: float,
    rng: random.Random,
    partition: EdgePartitionCache | None = None,
) -> float:
    """Two-level estimate that credits butterflies to their light edges.

    Follows the two-level sampling shape, with three changes driven by the
    analysis.  The probe count R is stochastic: for d_y <= sqrt(m) a
    single probe runs with probability d_y / sqrt(m), otherwise
    ceil(d_y / sqrt(m)) probes run.  A filtered closure only scores if the
    sampled base edge is light under the (memoized) classifier partition,
    and it then scores max(sqrt(m), d_y) divided by the number of light
    edges of the discovered butterfly, so each butterfly with any light
    edge is credited exactly once in expectation.  Returns
    (m / (s1 s2)) * W * sum of trial scores.
    """
    m = oracle.edge_count
    if m == 0:
        raise EmptyGraph("estimator needs at least one edge")
    n = oracle.vertex_count
    if b_bar <= 0 or w_bar <= 0:
        raise ValueError("guessed totals must be positive")
    s1, s2 = weighted_trial_counts(constants, n, m, b_bar, w_bar)
    if partition is None:
        partition = EdgePartitionCache(rng.getrandbits(64))
    root_m = sqrt(m)
    rep = build_representative_set(oracle, s1, rng)
    if rep.total_weight == 0:
        return 0.0
    score = 0.0
    for _ in range(s2):
        ws = sample_wedge(rep, oracle, rng)
        endpoint, center, x = ws.wedge
        d_x = oracle.degree(x)
        if precedes_by_degree(d_x, x, ws.d_endpoint, endpoint):
            y, d_y, far = x, d_x, endpoint
        else:
            y, d_y, far = endpoint, ws.d_endpoint, x
        if d_y <= root_m:
            probes = 1 if rng.random() < d_y / root_m else 0
        else:
            probes = ceil(d_y / root_m)
        if probes == 0:
            continue
        acc = 0.0
        base = ws.base
        base_du = ws.d_center if center.side == Side.UPPER else ws.d_endpoint
        base_dl = ws.d_endpoint if center.side == Side.UPPER else ws.d_center
        for _ in range(probes):
            z = oracle.neighbor(y, rng.randrange(d_y))
            if z == center:
                continue
            if not oracle.has_edge(z, far):
                continue
            d_z = oracle.degree(z)
            if not precedes_by_degree(d_x, x, d_z, z):
                continue
            if (
                partition.label(
                    base, base_du, base_dl, oracle, constants, b_bar, w_bar
                )
                is not HeavyLabel.LIGHT
            ):
                continue
            if center.side == Side.UPPER:
                uppers = ((center, ws.d_center), (z, d_z))
                lowers = ((endpoint, ws.d_endpoint), (x, d_x))
            else:
                uppers = ((endpoint, ws.d_endpoint), (x, d_x))
                lowers = ((center, ws.d_center), (z, d_z))
            light = light_edge_count_in_butterfly(
                uppers, lowers, partition, oracle, constants, b_bar, w_bar
            )
            assert light >= 1, "sampled edge is light, so the butterfly has a light edge"
            acc += max(root_m, d_y) / light
        score += acc / probes
    return m / (s1 * s2) * rep.total_weight * score


def hlgp_estimate(
    oracle: QueryOracle,
    constants: TheoryConstants,
    seed: int = 0,
    bbar_trace: list[tuple[int, float]] | None = None,
) -> EstimateReport:
    """Guessing ladder around :func:`tls_eg`.

    Works with an internal accuracy epsilon / (3 c_heavy) and an exact
    degree-scan wedge count.  Guesses b_bar sweep downward from n^4 by
    halving; each guess takes the minimum of several independent
    estimates, and the first estimate at or above its guess is returned.
    Each sweep extends one halving step further than the last, so early
    sweeps are cheap and a failed acceptance gets retried at every later
    sweep.  If the ladder exhausts (floor guess below 1) the last estimate
    is returned flagged ``not_converged``; a butterfly-free graph ends
    that way with estimate 0.  ``rounds_used`` reports the number of
    inner estimator calls.  ``bbar_trace`` (when given) collects
    (sweep, guess) pairs.
    """
    if oracle.edge_count == 0:
        raise EmptyGraph("estimator needs at least one edge")
    rng = random.Random(seed)
    start = time.perf_counter()
    eps_internal = constants.epsilon / (3.0 * constants.c_heavy)
    internal = replace(constants, epsilon=eps_internal)
    n = oracle.vertex_count

    def report(estimate, calls, flags):
        return EstimateReport(
            estimate=estimate,
            queries=oracle.snapshot_counts(),
            wall_millis=(time.perf_counter() - start) * 1e3,
            rounds_used=calls,
            seed=seed,
            flags=flags,
        )

    try:
        w_bar = estimate_wedges(oracle, mode="exact")
        if w_bar == 0.0:
            # No wedges means no butterflies; the ladder has nothing to probe.
            return report(0.0, 0, (FLAG_NOT_CONVERGED,))
        reps = max(
            1, ceil(constants.scale_reps * (1.0 / eps_internal) * log(log(n)))
        )
        last = None
        calls = 0
        floor_guess = float(n) ** 4
        sweep = 0
        while floor_guess >= 1.0:
            b_bar = float(n) ** 4
            while b_bar >= floor_guess:
                if bbar_trace is not None:
                    bbar_trace.append((sweep, b_bar))
                last = min(
                    tls_eg(oracle, internal, b_bar, w_bar, rng) for _ in range(reps)
                )
                calls += reps
                if last >= b_bar:
                    return report(last, calls, ())
                b_bar /= 2.0
            floor_guess /= 2.0
            sweep += 1
        return report(last, calls, (FLAG_NOT_CONVERGED,))
    except BudgetExhausted:
        return report(None, 0, (FLAG_BUDGET, FLAG_UNAVAILABLE))
