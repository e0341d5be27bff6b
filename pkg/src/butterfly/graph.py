"""Immutable bipartite graph storage, loaders, and synthetic generators.

Vertices live on two sides (upper and lower) and are addressed by
(side, index) pairs with dense 0-based indices per side.  Neighbor lists
are kept sorted ascending so positional neighbor access and membership
tests are deterministic.
"""

from __future__ import annotations

import math
import struct
from enum import IntEnum
from pathlib import Path
from typing import Iterable, NamedTuple, Sequence

import numpy as np


class Side(IntEnum):
    UPPER = 0
    LOWER = 1

    @property
    def opposite(self) -> "Side":
        return Side.LOWER if self is Side.UPPER else Side.UPPER


class VertexRef(NamedTuple):
    """A vertex addressed by side and dense index."""

    side: Side
    index: int


class EdgeRef(NamedTuple):
    """An edge as its two endpoints, upper first."""

    upper: VertexRef
    lower: VertexRef


class Wedge(NamedTuple):
    """A two-edge path: endpoint_a - center - endpoint_b.

    Both endpoints sit on the side opposite the center.  Code that samples
    wedges by extending a base edge puts the pre-existing endpoint in
    ``endpoint_a`` and the freshly drawn third vertex in ``endpoint_b``.
    """

    endpoint_a: VertexRef
    center: VertexRef
    endpoint_b: VertexRef


class GraphFormatError(ValueError):
    """Malformed input line in an edge-list file."""


class EmptyInputError(ValueError):
    """Edge-list file contained no edges."""


class DuplicateEdgeError(ValueError):
    """Duplicate edge encountered while deduplication is disabled."""


_CACHE_MAGIC = b"BFGCACH1"


class BipartiteGraph:
    """Bipartite graph with CSR adjacency on both sides.

    The structure is immutable after construction.  Edges carry stable ids
    0..m-1 in (upper, lower) lexicographic order, which fixes the meaning
    of uniform edge sampling and of positional edge access.
    """

    __slots__ = (
        "_upper_count",
        "_lower_count",
        "_indptr",
        "_indices",
        "_degrees",
        "_edge_upper",
        "_edge_lower",
        "_labels",
    )

    def __init__(
        self,
        upper_count: int,
        lower_count: int,
        edge_upper: np.ndarray,
        edge_lower: np.ndarray,
        upper_labels: np.ndarray | None = None,
        lower_labels: np.ndarray | None = None,
    ):
        if upper_count < 0 or lower_count < 0:
            raise ValueError("vertex counts must be non-negative")
        edge_upper = np.asarray(edge_upper, dtype=np.int64)
        edge_lower = np.asarray(edge_lower, dtype=np.int64)
        if edge_upper.shape != edge_lower.shape or edge_upper.ndim != 1:
            raise ValueError("edge arrays must be 1-d and equally long")
        if edge_upper.size:
            if edge_upper.min() < 0 or edge_upper.max() >= upper_count:
                raise ValueError("upper edge index out of range")
            if edge_lower.min() < 0 or edge_lower.max() >= lower_count:
                raise ValueError("lower edge index out of range")

        # Canonical edge order: sort by (upper, lower).
        order = np.lexsort((edge_lower, edge_upper))
        eu = edge_upper[order]
        el = edge_lower[order]
        if eu.size > 1:
            same = (eu[1:] == eu[:-1]) & (el[1:] == el[:-1])
            if same.any():
                k = int(np.flatnonzero(same)[0])
                raise DuplicateEdgeError(
                    f"duplicate edge (upper={int(eu[k])}, lower={int(el[k])})"
                )

        self._upper_count = int(upper_count)
        self._lower_count = int(lower_count)
        self._edge_upper = eu
        self._edge_lower = el

        up_ptr = np.zeros(upper_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(eu, minlength=upper_count), out=up_ptr[1:])
        lo_order = np.lexsort((eu, el))
        lo_ptr = np.zeros(lower_count + 1, dtype=np.int64)
        np.cumsum(np.bincount(el, minlength=lower_count), out=lo_ptr[1:])

        self._indptr = (up_ptr, lo_ptr)
        self._indices = (el, eu[lo_order])
        self._degrees = (np.diff(up_ptr), np.diff(lo_ptr))

        if upper_labels is None:
            upper_labels = np.arange(upper_count, dtype=np.int64)
        if lower_labels is None:
            lower_labels = np.arange(lower_count, dtype=np.int64)
        self._labels = (
            np.asarray(upper_labels, dtype=np.int64),
            np.asarray(lower_labels, dtype=np.int64),
        )
        if len(self._labels[0]) != upper_count or len(self._labels[1]) != lower_count:
            raise ValueError("label array length mismatch")

    @property
    def upper_count(self) -> int:
        return self._upper_count

    @property
    def lower_count(self) -> int:
        return self._lower_count

    @property
    def vertex_count(self) -> int:
        return self._upper_count + self._lower_count

    @property
    def edge_count(self) -> int:
        return int(self._edge_upper.size)

    def side_count(self, side: Side) -> int:
        return self._upper_count if side == Side.UPPER else self._lower_count

    def degree(self, v: VertexRef) -> int:
        return int(self._degrees[v.side][v.index])

    def degree_array(self, side: Side) -> np.ndarray:
        """Read-only degree vector for one side."""
        return self._degrees[side]

    def neighbors(self, v: VertexRef) -> np.ndarray:
        """Sorted neighbor indices of ``v`` on the opposite side (a view)."""
        ptr = self._indptr[v.side]
        return self._indices[v.side][ptr[v.index] : ptr[v.index + 1]]

    def neighbor(self, v: VertexRef, i: int) -> VertexRef:
        """The i-th neighbor of ``v`` in ascending index order."""
        ptr = self._indptr[v.side]
        start = ptr[v.index]
        if not 0 <= i < ptr[v.index + 1] - start:
            raise IndexError(f"neighbor index {i} out of range for {v}")
        return VertexRef(v.side.opposite, int(self._indices[v.side][start + i]))

    def has_edge(self, a: VertexRef, b: VertexRef) -> bool:
        if a.side == b.side:
            raise ValueError("has_edge needs endpoints on opposite sides")
        u, lo = (a, b) if a.side == Side.UPPER else (b, a)
        nbrs = self.neighbors(u)
        k = int(np.searchsorted(nbrs, lo.index))
        return k < nbrs.size and int(nbrs[k]) == lo.index

    def edge_at(self, eid: int) -> EdgeRef:
        """Edge with id ``eid`` in the canonical (upper, lower) order."""
        if not 0 <= eid < self.edge_count:
            raise IndexError(f"edge id {eid} out of range")
        return EdgeRef(
            VertexRef(Side.UPPER, int(self._edge_upper[eid])),
            VertexRef(Side.LOWER, int(self._edge_lower[eid])),
        )

    def edge_arrays(self) -> tuple[np.ndarray, np.ndarray]:
        """The (upper, lower) index arrays in canonical edge order (views)."""
        return self._edge_upper, self._edge_lower

    def label_of(self, v: VertexRef) -> int:
        """Original input id of ``v`` (its own index for synthetic graphs)."""
        return int(self._labels[v.side][v.index])

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BipartiteGraph):
            return NotImplemented
        return (
            self._upper_count == other._upper_count
            and self._lower_count == other._lower_count
            and np.array_equal(self._edge_upper, other._edge_upper)
            and np.array_equal(self._edge_lower, other._edge_lower)
            and np.array_equal(self._labels[0], other._labels[0])
            and np.array_equal(self._labels[1], other._labels[1])
        )

    def __hash__(self):  # mutable-free but not meant for dict keys
        return id(self)

    def __repr__(self) -> str:
        return (
            f"BipartiteGraph(upper={self._upper_count}, "
            f"lower={self._lower_count}, edges={self.edge_count})"
        )


def from_edges(
    pairs: Iterable[tuple[int, int]],
    upper_count: int | None = None,
    lower_count: int | None = None,
    dedupe: bool = False,
    upper_labels: Sequence[int] | None = None,
    lower_labels: Sequence[int] | None = None,
) -> BipartiteGraph:
    """Build a graph from (upper_index, lower_index) pairs."""
    arr = np.asarray(list(pairs), dtype=np.int64)
    if arr.size == 0:
        arr = arr.reshape(0, 2)
    eu, el = arr[:, 0], arr[:, 1]
    if dedupe and eu.size:
        arr = np.unique(arr, axis=0)
        eu, el = arr[:, 0], arr[:, 1]
    if upper_count is None:
        upper_count = int(eu.max()) + 1 if eu.size else 0
    if lower_count is None:
        lower_count = int(el.max()) + 1 if el.size else 0
    return BipartiteGraph(
        upper_count,
        lower_count,
        eu,
        el,
        None if upper_labels is None else np.asarray(upper_labels, dtype=np.int64),
        None if lower_labels is None else np.asarray(lower_labels, dtype=np.int64),
    )


def load_konect(path: str | Path, dedupe: bool = True) -> BipartiteGraph:
    """Load a KONECT-style out.* edge list.

    Lines starting with '%' or '#' are comments.  Each remaining line holds
    two 1-based integer ids (upper then lower); extra columns such as
    weights or timestamps are ignored.  Ids are compacted to dense 0-based
    indices in order of first appearance, and the original ids are kept as
    labels.  ``dedupe`` collapses repeated edges; with it disabled a repeat
    raises ``DuplicateEdgeError``.
    """
    path = Path(path)
    upper_ids: dict[int, int] = {}
    lower_ids: dict[int, int] = {}
    pairs: list[tuple[int, int]] = []
    seen: set[tuple[int, int]] = set()
    with path.open("r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.strip()
            if not line or line.startswith("%") or line.startswith("#"):
                continue
            cols = line.split()
            if len(cols) < 2:
                raise GraphFormatError(f"{path.name}:{lineno}: expected two columns")
            try:
                u_id = int(cols[0])
                l_id = int(cols[1])
            except ValueError as exc:
                raise GraphFormatError(
                    f"{path.name}:{lineno}: non-integer vertex id"
                ) from exc
            if u_id < 1 or l_id < 1:
                raise GraphFormatError(
                    f"{path.name}:{lineno}: vertex ids are 1-based and positive"
                )
            ui = upper_ids.setdefault(u_id, len(upper_ids))
            li = lower_ids.setdefault(l_id, len(lower_ids))
            key = (ui, li)
            if key in seen:
                if dedupe:
                    continue
                raise DuplicateEdgeError(f"{path.name}:{lineno}: duplicate edge")
            seen.add(key)
            pairs.append(key)
    if not pairs:
        raise EmptyInputError(f"{path.name}: no edges found")
    return from_edges(
        pairs,
        upper_count=len(upper_ids),
        lower_count=len(lower_ids),
        upper_labels=list(upper_ids),
        lower_labels=list(lower_ids),
    )


def save_cache(graph: BipartiteGraph, path: str | Path) -> None:
    """Write a binary snapshot that ``load_cache`` restores byte-exactly."""
    eu, el = graph.edge_arrays()
    lab_u = np.asarray([graph.label_of(VertexRef(Side.UPPER, i)) for i in range(graph.upper_count)], dtype=np.int64)
    lab_l = np.asarray([graph.label_of(VertexRef(Side.LOWER, i)) for i in range(graph.lower_count)], dtype=np.int64)
    with Path(path).open("wb") as fh:
        fh.write(_CACHE_MAGIC)
        fh.write(struct.pack("<3q", graph.upper_count, graph.lower_count, graph.edge_count))
        for arr in (eu, el, lab_u, lab_l):
            fh.write(np.ascontiguousarray(arr, dtype=np.int64).tobytes())


def load_cache(path: str | Path) -> BipartiteGraph:
    data = Path(path).read_bytes()
    if data[: len(_CACHE_MAGIC)] != _CACHE_MAGIC:
        raise GraphFormatError(f"{path}: not a graph cache file")
    off = len(_CACHE_MAGIC)
    nu, nl, m = struct.unpack_from("<3q", data, off)
    off += struct.calcsize("<3q")

    def take(count: int) -> np.ndarray:
        nonlocal off
        arr = np.frombuffer(data, dtype=np.int64, count=count, offset=off)
        off += count * 8
        return arr.copy()

    eu = take(m)
    el = take(m)
    lab_u = take(nu)
    lab_l = take(nl)
    return BipartiteGraph(nu, nl, eu, el, lab_u, lab_l)


def edge_degree(graph: BipartiteGraph, e: EdgeRef) -> int:
    """Number of wedges that contain edge ``e``: d(u) + d(v) - 2."""
    return graph.degree(e.upper) + graph.degree(e.lower) - 2


def precedes_by_degree(d_a: int, a: VertexRef, d_b: int, b: VertexRef) -> bool:
    """Strict total order: degree first, then (side, index) as tiebreak.

    Upper side sorts before lower.  Callers that already paid for the two
    degree queries pass them in so the comparison itself is metering-free.
    """
    if d_a != d_b:
        return d_a < d_b
    return (a.side, a.index) < (b.side, b.index)


def vertex_precedes(graph: BipartiteGraph, a: VertexRef, b: VertexRef) -> bool:
    """``precedes_by_degree`` with degrees read directly from the graph."""
    if a == b:
        return False
    return precedes_by_degree(graph.degree(a), a, graph.degree(b), b)


def complete_bipartite(a: int, b: int) -> BipartiteGraph:
    """K_{a,b}: every upper vertex adjacent to every lower vertex."""
    if a < 1 or b < 1:
        raise ValueError("side sizes must be positive")
    eu = np.repeat(np.arange(a, dtype=np.int64), b)
    el = np.tile(np.arange(b, dtype=np.int64), a)
    return BipartiteGraph(a, b, eu, el)


def erdos_renyi(n1: int, n2: int, p: float, seed: int) -> BipartiteGraph:
    """Each of the n1*n2 possible edges kept independently with probability p."""
    if n1 < 1 or n2 < 1:
        raise ValueError("side sizes must be positive")
    if not 0.0 <= p <= 1.0:
        raise ValueError("edge probability must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    ups: list[np.ndarray] = []
    lows: list[np.ndarray] = []
    for i in range(n1):
        cols = np.flatnonzero(rng.random(n2) < p)
        if cols.size:
            ups.append(np.full(cols.size, i, dtype=np.int64))
            lows.append(cols.astype(np.int64))
    if ups:
        eu = np.concatenate(ups)
        el = np.concatenate(lows)
    else:
        eu = np.empty(0, dtype=np.int64)
        el = np.empty(0, dtype=np.int64)
    return BipartiteGraph(n1, n2, eu, el)


def hub_adversary(h: int, t: int) -> BipartiteGraph:
    """Two upper hubs sharing t lower vertices, plus h two-edge pendants.

    Upper vertices 0 and 1 are both adjacent to lower vertices 0..t-1.
    Upper vertices 2..h+1 are each adjacent to lower vertices t and t+1,
    which therefore become high-degree.  The graph packs its butterflies
    into C(t,2) hub pairs plus C(h,2) pendant pairs while keeping most
    per-vertex degrees tiny, the shape that defeats per-vertex sampling.
    """
    if h < 1 or t < 1:
        raise ValueError("hub and pendant counts must be positive")
    shared = np.arange(t, dtype=np.int64)
    eu = np.concatenate(
        [
            np.zeros(t, dtype=np.int64),
            np.ones(t, dtype=np.int64),
            np.repeat(np.arange(2, h + 2, dtype=np.int64), 2),
        ]
    )
    el = np.concatenate(
        [
            shared,
            shared,
            np.tile(np.asarray([t, t + 1], dtype=np.int64), h),
        ]
    )
    return BipartiteGraph(h + 2, t + 2, eu, el)


def hub_adversary_butterflies(h: int, t: int) -> int:
    """Closed-form butterfly count of ``hub_adversary(h, t)``."""
    return math.comb(t, 2) + math.comb(h, 2)
