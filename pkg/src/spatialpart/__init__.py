"""Spatially contiguous k-way partitioning of placed netlists."""

__version__ = "0.1.0"

from .annealer import SAConfig, best_of_corners, two_way_spatial_part
from .boundary import Boundary, CostParams, Corner
from .errors import (ConfigError, CoverageError, DegenerateGridError, EmbeddingError,
                     InfeasibleBalanceError, NetlistError, NetlistSemanticError,
                     NetlistSyntaxError, SpatialPartError)
from .gridgraph import GridGraph, build_grid_graph, laplacian
from .kway import KWayConfig, kway_partition
from .metrics import PartitionResult, evaluate_assignment, fragments, spatial_cut_size
from .netlist import Cell, Net, PlacedNetlist, make_netlist, parse_netlist, write_result
from .steiner import RectTree, steiner_tree

__all__ = [
    "Boundary", "Cell", "ConfigError", "Corner", "CostParams", "CoverageError",
    "DegenerateGridError", "EmbeddingError", "GridGraph", "InfeasibleBalanceError",
    "KWayConfig", "Net", "NetlistError", "NetlistSemanticError", "NetlistSyntaxError",
    "PartitionResult", "PlacedNetlist", "RectTree", "SAConfig", "SpatialPartError",
    "best_of_corners", "build_grid_graph", "evaluate_assignment", "fragments",
    "kway_partition", "laplacian", "make_netlist", "parse_netlist", "spatial_cut_size",
    "steiner_tree", "two_way_spatial_part", "write_result",
]
