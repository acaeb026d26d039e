"""Robust graph-based semi-supervised classification with noisy labels.

Graph trend filtering on a KNN graph combined with a robust l2,1 label
fidelity, solved in the span of the smoothest Laplacian eigenvectors.
"""
from .baselines import (BaselineResult, baseline_config, gfhf, gtf_only,
                        l2_l1_fidelity)
from .errors import (DataIOError, DegenerateGraphError, EigensolverError,
                     InvalidLabelError, NumericalError, SIISError,
                     ValidationError)
from .graph import (Dataset, DisconnectedGraphWarning, Graph, build_knn_graph,
                    connected_components, difference_operator, label_indicator,
                    laplacian, load_csv, load_sparse)
from .solver import (Problem, SIISResult, SolverConfig, SolverState, objective,
                     row_shrink, solve)
from .spectral import SpectralBasis, smallest_eigenpairs

__version__ = "0.1.0"

__all__ = [
    "BaselineResult", "baseline_config", "gfhf", "gtf_only", "l2_l1_fidelity",
    "DataIOError", "DegenerateGraphError", "EigensolverError",
    "InvalidLabelError", "NumericalError", "SIISError", "ValidationError",
    "Dataset", "DisconnectedGraphWarning", "Graph", "build_knn_graph",
    "connected_components", "difference_operator", "label_indicator",
    "laplacian", "load_csv", "load_sparse", "Problem", "SIISResult",
    "SolverConfig", "SolverState", "objective", "row_shrink", "solve",
    "SpectralBasis", "smallest_eigenpairs",
]
