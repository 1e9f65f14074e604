"""Exact computations on Lipschitz-free spaces over finite metric spaces and graphs."""

from .errors import CapExceeded, FreeIsoError
from .extgraph import classify_edge_set, classify_prague, ext_graph, is_preserved_extreme
from .graphkit import DirectedSymGraph, graph_metric, simple_cycles
from .isogroup import (
    apply_sigma,
    check_conditions,
    decide_rigidity,
    enumerate_sigma,
    graph_liso,
    l1_decomposition_check,
    pieces,
)
from .metric import FiniteMetricSpace, Molecule, compute_dilations, compute_isometries, elementary_molecule, validate_metric
from .transport import free_norm, lipschitz_dual_norm, transport_norm
from .whitney import SignedEdgeBijection, reconstruct_vertex_map

__version__ = "0.1.0"
