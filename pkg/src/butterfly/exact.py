"""Exact butterfly and wedge counters.

These run on the graph directly (no metering); they provide ground truth
for the estimators and for tests.  Counts accumulate in Python integers,
so they stay exact far past 64-bit range.
"""

from __future__ import annotations

import math
from typing import Iterator

import numpy as np

from .graph import BipartiteGraph, EdgeRef, Side, VertexRef

_BRUTEFORCE_SIDE_LIMIT = 64


def count_butterflies_bruteforce(graph: BipartiteGraph) -> int:
    """Count butterflies by testing every vertex quadruple.

    Enumerates all C(|U|,2) * C(|L|,2) quadruples and checks the four
    adjacencies, so it is only usable on tiny graphs; both sides must have
    at most 64 vertices.  Deliberately naive: this is the reference the
    faster counter is validated against.
    """
    nu, nl = graph.upper_count, graph.lower_count
    if nu > _BRUTEFORCE_SIDE_LIMIT or nl > _BRUTEFORCE_SIDE_LIMIT:
        raise ValueError(
            f"bruteforce counter limited to {_BRUTEFORCE_SIDE_LIMIT} vertices per side"
        )
    nbr = [set(graph.neighbors(VertexRef(Side.UPPER, u)).tolist()) for u in range(nu)]
    total = 0
    for u1 in range(nu):
        n1 = nbr[u1]
        for u2 in range(u1 + 1, nu):
            n2 = nbr[u2]
            for v1 in range(nl):
                if v1 not in n1 or v1 not in n2:
                    continue
                for v2 in range(v1 + 1, nl):
                    if v2 in n1 and v2 in n2:
                        total += 1
    return total


def count_butterflies_exact(graph: BipartiteGraph) -> int:
    """Count butterflies via per-pivot co-neighbor aggregation.

    Iterates the side with fewer vertices; for each pivot vertex its
    two-hop co-neighbor counts are accumulated in a dense counter that is
    flushed per pivot, adding C(count, 2) for every co-neighbor with a
    higher index than the pivot.
    """
    side = Side.UPPER if graph.upper_count <= graph.lower_count else Side.LOWER
    count = graph.side_count(side)
    total = 0
    for u in range(count):
        nbrs = graph.neighbors(VertexRef(side, u))
        if nbrs.size == 0:
            continue
        two_hop = [graph.neighbors(VertexRef(side.opposite, int(w))) for w in nbrs]
        co = np.bincount(np.concatenate(two_hop), minlength=count)
        tail = co[u + 1 :]
        part = int(np.dot(tail, tail - 1)) // 2
        if part < 0:
            raise OverflowError("co-neighbor accumulator overflow")
        total += part
    return total


def count_wedges_exact(graph: BipartiteGraph) -> int:
    """Total wedges: sum of C(d_v, 2) over all vertices of both sides."""
    total = 0
    for side in (Side.UPPER, Side.LOWER):
        d = graph.degree_array(side).astype(object)
        total += int(np.sum(d * (d - 1)) // 2)
    return total


def butterflies_per_edge(graph: BipartiteGraph, e: EdgeRef) -> int:
    """Exact number of butterflies containing edge ``e``.

    For e = (u, v) this is the sum over u' in N(v) \\ {u} of
    |N(u) ∩ N(u')| - 1, the shared lower vertices other than v itself.
    """
    nu = graph.neighbors(e.upper)
    total = 0
    for u2 in graph.neighbors(e.lower):
        if int(u2) == e.upper.index:
            continue
        nu2 = graph.neighbors(VertexRef(Side.UPPER, int(u2)))
        common = np.intersect1d(nu, nu2, assume_unique=True).size
        total += common - 1
    return total


def enumerate_butterflies(
    graph: BipartiteGraph,
) -> Iterator[tuple[int, int, int, int]]:
    """Yield every butterfly as (u1, u2, v1, v2) with u1 < u2 and v1 < v2.

    Intended for small graphs in tests and for weight-function checks.
    """
    nu = graph.upper_count
    for u1 in range(nu):
        n1 = graph.neighbors(VertexRef(Side.UPPER, u1))
        for u2 in range(u1 + 1, nu):
            n2 = graph.neighbors(VertexRef(Side.UPPER, u2))
            common = np.intersect1d(n1, n2, assume_unique=True)
            for i in range(common.size):
                for j in range(i + 1, common.size):
                    yield (u1, u2, int(common[i]), int(common[j]))


def complete_bipartite_butterflies(a: int, b: int) -> int:
    """Closed form for K_{a,b}: C(a,2) * C(b,2)."""
    return math.comb(a, 2) * math.comb(b, 2)
