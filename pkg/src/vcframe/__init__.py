"""vcframe: exact vertex connectivity via clustering, isolating cuts, and matching."""

from .graph import (
    Graph,
    GraphFormatError,
    GraphRangeError,
    VertexCut,
    load_graph,
    min_degree,
    neighborhood_difference,
    validate_cut,
)

__version__ = "0.1.0"

__all__ = [
    "Graph",
    "GraphFormatError",
    "GraphRangeError",
    "VertexCut",
    "load_graph",
    "min_degree",
    "neighborhood_difference",
    "validate_cut",
    "__version__",
]
