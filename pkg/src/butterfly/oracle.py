"""Metered access to a bipartite graph.

Estimators never touch the graph directly; they hold a :class:`QueryOracle`
and pay one unit per degree, neighbor, vertex-pair, or edge-sample query.
Vertex and edge counts are load-time metadata and cost nothing.  The oracle
itself never caches answers, so repeated queries are charged repeatedly.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import BipartiteGraph, EdgeRef, Side, VertexRef


@dataclass(frozen=True)
class QueryCounts:
    """Immutable snapshot of per-kind query counters."""

    degree: int = 0
    neighbor: int = 0
    vertex_pair: int = 0
    edge_sample: int = 0

    @property
    def total(self) -> int:
        return self.degree + self.neighbor + self.vertex_pair + self.edge_sample


@dataclass(frozen=True)
class QueryBudget:
    """Optional hard ceiling on total queries."""

    max_total: int | None = None


class OracleError(Exception):
    pass


class BudgetExhausted(OracleError):
    """The next query would exceed the budget.  Carries spent counts."""

    def __init__(self, counts: QueryCounts):
        super().__init__(f"query budget exhausted after {counts.total} queries")
        self.counts = counts


class EmptyGraph(OracleError):
    """Operation needs at least one edge."""


class SameSidePair(OracleError):
    """Vertex-pair query with both endpoints on one side."""


class QueryOracle:
    """Charges exactly one unit per query, independent of local work.

    Argument validation happens before charging, so a rejected call leaves
    the counters untouched.  With a budget set, a call that would push the
    total past ``max_total`` raises :class:`BudgetExhausted` instead of
    executing.
    """

    __slots__ = ("_graph", "_max_total", "_degree", "_neighbor", "_pair", "_edge")

    def __init__(self, graph: BipartiteGraph, budget: QueryBudget | None = None):
        self._graph = graph
        self._max_total = budget.max_total if budget is not None else None
        self._degree = 0
        self._neighbor = 0
        self._pair = 0
        self._edge = 0

    # -- metadata (not metered) --

    @property
    def upper_count(self) -> int:
        return self._graph.upper_count

    @property
    def lower_count(self) -> int:
        return self._graph.lower_count

    @property
    def vertex_count(self) -> int:
        return self._graph.vertex_count

    @property
    def edge_count(self) -> int:
        return self._graph.edge_count

    def side_count(self, side: Side) -> int:
        return self._graph.side_count(side)

    # -- metered queries --

    def degree(self, v: VertexRef) -> int:
        self._check_vertex(v)
        self._spend()
        self._degree += 1
        return self._graph.degree(v)

    def neighbor(self, v: VertexRef, i: int) -> VertexRef:
        self._check_vertex(v)
        if not 0 <= i < self._graph.degree(v):
            raise IndexError(f"neighbor index {i} out of range for {v}")
        self._spend()
        self._neighbor += 1
        return self._graph.neighbor(v, i)

    def has_edge(self, a: VertexRef, b: VertexRef) -> bool:
        self._check_vertex(a)
        self._check_vertex(b)
        if a.side == b.side:
            raise SameSidePair(f"vertex-pair query needs opposite sides: {a}, {b}")
        self._spend()
        self._pair += 1
        return self._graph.has_edge(a, b)

    def sample_edge(self, rng: random.Random) -> EdgeRef:
        """Uniform edge draw; deterministic given the rng state."""
        if self._graph.edge_count == 0:
            raise EmptyGraph("cannot sample an edge from an edgeless graph")
        self._spend()
        self._edge += 1
        return self._graph.edge_at(rng.randrange(self._graph.edge_count))

    def edge_at(self, eid: int) -> EdgeRef:
        """Positional edge read, charged like an edge sample.

        This is the enumeration path used by subgraph-sampling estimators
        that walk edge ids and keep a Bernoulli subset.
        """
        if not 0 <= eid < self._graph.edge_count:
            raise IndexError(f"edge id {eid} out of range")
        self._spend()
        self._edge += 1
        return self._graph.edge_at(eid)

    # -- accounting --

    def snapshot_counts(self) -> QueryCounts:
        return QueryCounts(self._degree, self._neighbor, self._pair, self._edge)

    def reset_counts(self) -> None:
        self._degree = 0
        self._neighbor = 0
        self._pair = 0
        self._edge = 0

    @property
    def total(self) -> int:
        return self._degree + self._neighbor + self._pair + self._edge

    def _spend(self) -> None:
        if self._max_total is not None and self.total + 1 > self._max_total:
            raise BudgetExhausted(self.snapshot_counts())

    def _check_vertex(self, v: VertexRef) -> None:
        if not 0 <= v.index < self._graph.side_count(v.side):
            raise IndexError(f"vertex index out of range: {v}")
