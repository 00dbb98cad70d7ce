"""Stability bounds for polynomial graph filters and GCNs under double edge rewiring."""

from .filters import PolynomialFilter, apply_filter, filter_distance, filter_matrix, prop1_bound
from .graph import Graph, GraphError, graph_from_edge_list, read_edge_list, write_edge_list
from .models import (
    GcnModel,
    SgcnModel,
    corollary_bound,
    gcn_forward,
    prop2_bound,
    prop3_bound,
    sgcn_logits,
    softmax_rows,
)
from .perturbation import (
    ErrorMatrix,
    Rewiring,
    RewiringSummary,
    apply_plan,
    apply_rewiring,
    error_matrix,
    norm_max,
    norm_one,
    norm_two,
    rewiring_bound,
    row_norm_closed_form,
    summarize_plan,
)
from .shift import (
    ConvergenceError,
    ShiftOperator,
    build_shift,
    eigendecompose,
    gft,
    inverse_gft,
    spectral_norm,
)

__version__ = "0.1.0"
