"""Shared graph builders and tiny reference enumerators for the tests."""

from fractions import Fraction

from butterfly import BipartiteGraph, EdgeRef, Side, VertexRef, from_edges

TWO_BUTTERFLY_EDGES = [(0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 1), (2, 2)]


def two_butterfly_graph() -> BipartiteGraph:
    """Seven-edge graph with exactly two butterflies sharing edge (u1, v1)."""
    return from_edges(TWO_BUTTERFLY_EDGES)


def two_butterfly_konect_text() -> str:
    return "".join(f"{u + 1} {v + 1}\n" for u, v in TWO_BUTTERFLY_EDGES)


def two_square_graph() -> BipartiteGraph:
    """Disjoint union of two 2x2 bicliques: two butterflies, eight edges."""
    pairs = [(u, v) for u in (0, 1) for v in (0, 1)]
    pairs += [(u, v) for u in (2, 3) for v in (2, 3)]
    return from_edges(pairs)


def classifier_graph() -> BipartiteGraph:
    """Dense 8x8 block plus one pendant upper vertex touching v0 and a fresh v8.

    Every block edge sits in 49 butterflies; both pendant edges sit in none.
    """
    pairs = [(u, v) for u in range(8) for v in range(8)]
    pairs += [(8, 0), (8, 8)]
    return from_edges(pairs)


def random_bipartite(rng, nu: int, nl: int, p: float) -> BipartiteGraph:
    pairs = [(u, v) for u in range(nu) for v in range(nl) if rng.random() < p]
    return from_edges(pairs, upper_count=nu, lower_count=nl)


def all_edges(graph: BipartiteGraph) -> list[EdgeRef]:
    eu, el = graph.edge_arrays()
    return [
        EdgeRef(VertexRef(Side.UPPER, int(u)), VertexRef(Side.LOWER, int(v)))
        for u, v in zip(eu, el)
    ]


def wedges_bruteforce(graph: BipartiteGraph) -> int:
    """Wedge count by literal center/endpoint-pair enumeration."""
    total = 0
    for side in (Side.UPPER, Side.LOWER):
        for c in range(graph.side_count(side)):
            nbrs = graph.neighbors(VertexRef(side, c))
            total += nbrs.size * (nbrs.size - 1) // 2
    return total


def wedges_through_edge_bruteforce(graph: BipartiteGraph, e: EdgeRef) -> int:
    """Wedges containing ``e``, counted by extending either endpoint."""
    count = 0
    for x in graph.neighbors(e.upper):
        if int(x) != e.lower.index:
            count += 1
    for x in graph.neighbors(e.lower):
        if int(x) != e.upper.index:
            count += 1
    return count


def butterflies_with_edge_bruteforce(graph: BipartiteGraph, e: EdgeRef) -> int:
    """Quadruple enumeration restricted to quadruples containing ``e``."""
    u1, v1 = e.upper.index, e.lower.index
    nbr = [
        set(graph.neighbors(VertexRef(Side.UPPER, u)).tolist())
        for u in range(graph.upper_count)
    ]
    total = 0
    for u2 in range(graph.upper_count):
        if u2 == u1 or v1 not in nbr[u2]:
            continue
        for v2 in range(graph.lower_count):
            if v2 != v1 and v2 in nbr[u1] and v2 in nbr[u2]:
                total += 1
    return total


def butterfly_edge_sets(graph: BipartiteGraph) -> list[tuple[tuple[int, int], ...]]:
    """Each butterfly as its four (upper, lower) edge keys."""
    from butterfly.exact import enumerate_butterflies

    out = []
    for u1, u2, v1, v2 in enumerate_butterflies(graph):
        out.append(((u1, v1), (u1, v2), (u2, v1), (u2, v2)))
    return out


def light_weight_by_edge(
    butterflies: list[tuple[tuple[int, int], ...]], light: set[tuple[int, int]]
) -> dict[tuple[int, int], Fraction]:
    """Per-light-edge weight: 1/ell from each butterfly with ell > 0 light edges."""
    weights: dict[tuple[int, int], Fraction] = {key: Fraction(0) for key in light}
    for edges in butterflies:
        members = [key for key in edges if key in light]
        if members:
            share = Fraction(1, len(members))
            for key in members:
                weights[key] += share
    return weights


def butterflies_touching_light(
    butterflies: list[tuple[tuple[int, int], ...]], light: set[tuple[int, int]]
) -> int:
    return sum(1 for edges in butterflies if any(key in light for key in edges))
