"""Butterfly counting on bipartite graphs under a metered query model."""

from .graph import (
    BipartiteGraph,
    DuplicateEdgeError,
    EdgeRef,
    EmptyInputError,
    GraphFormatError,
    Side,
    VertexRef,
    Wedge,
    complete_bipartite,
    edge_degree,
    erdos_renyi,
    from_edges,
    hub_adversary,
    load_cache,
    load_konect,
    save_cache,
    vertex_precedes,
)
from .oracle import (
    BudgetExhausted,
    EmptyGraph,
    QueryBudget,
    QueryCounts,
    QueryOracle,
    SameSidePair,
)
from .exact import (
    butterflies_per_edge,
    count_butterflies_bruteforce,
    count_butterflies_exact,
    count_wedges_exact,
)
from .baseline import EstimateReport, espar_estimate, wps_estimate
from .tls import (
    RepresentativeSet,
    TlsConfig,
    build_representative_set,
    estimate_wedge_butterflies,
    sample_wedge,
    tls_estimate,
)
from .theory import (
    EdgePartitionCache,
    HeavyLabel,
    TheoryConstants,
    classify_heavy,
    estimate_wedges,
    hlgp_estimate,
    light_edge_count_in_butterfly,
    tls_eg,
)
from .harness import RunSpec, RunSummary, compare, run

__version__ = "0.1.0"

__all__ = [
    "BipartiteGraph",
    "BudgetExhausted",
    "DuplicateEdgeError",
    "EdgePartitionCache",
    "EdgeRef",
    "EmptyGraph",
    "EmptyInputError",
    "EstimateReport",
    "GraphFormatError",
    "HeavyLabel",
    "QueryBudget",
    "QueryCounts",
    "QueryOracle",
    "RepresentativeSet",
    "RunSpec",
    "RunSummary",
    "SameSidePair",
    "Side",
    "TheoryConstants",
    "TlsConfig",
    "VertexRef",
    "Wedge",
    "butterflies_per_edge",
    "build_representative_set",
    "classify_heavy",
    "compare",
    "complete_bipartite",
    "count_butterflies_bruteforce",
    "count_butterflies_exact",
    "count_wedges_exact",
    "edge_degree",
    "erdos_renyi",
    "espar_estimate",
    "estimate_wedge_butterflies",
    "estimate_wedges",
    "from_edges",
    "hlgp_estimate",
    "hub_adversary",
    "light_edge_count_in_butterfly",
    "load_cache",
    "load_konect",
    "run",
    "sample_wedge",
    "save_cache",
    "tls_eg",
    "tls_estimate",
    "vertex_precedes",
    "wps_estimate",
]
