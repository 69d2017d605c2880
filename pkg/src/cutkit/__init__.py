"""Cut-query algorithms: sparsification, max-cut approximation and cut dimension."""

from .errors import (AlignmentError, ConstructionError, CutKitError, GraphFormatError,
                     IncompleteLedgerError, InvalidCutError, InvalidForestError,
                     InvalidInputError, LedgerError, NoEdgeError, SizeLimitError)
from .graph import Edge, WeightedGraph, cut_value, read_graph, write_graph
from .oracle import CutQueryOracle
from .contraction import ContractionState
from .sparsifier import (CrudeStrengthTable, Sparsifier, StrengthLedger, SubsampleConfig,
                         approximate_kruskal, construct_sparsifier, estimate_and_contract,
                         fast_weighted_subsample, naive_weighted_subsample)

__version__ = "0.1.0"

__all__ = [
    "AlignmentError", "ConstructionError", "ContractionState", "CrudeStrengthTable",
    "CutKitError", "CutQueryOracle", "Edge", "GraphFormatError", "IncompleteLedgerError",
    "InvalidCutError", "InvalidForestError", "InvalidInputError", "LedgerError",
    "NoEdgeError", "SizeLimitError", "Sparsifier", "StrengthLedger", "SubsampleConfig",
    "WeightedGraph", "approximate_kruskal", "construct_sparsifier", "cut_value",
    "estimate_and_contract", "fast_weighted_subsample", "naive_weighted_subsample",
    "read_graph", "write_graph",
]
