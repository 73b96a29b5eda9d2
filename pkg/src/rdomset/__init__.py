"""O(1)-approximate minimum-weight r-dominating sets on planar graphs via
Voronoi-contraction supports and quasi-uniform sampling."""
from .balls import Ball, build_augmented, enumerate_cells, hit_sets
from .cover import (
    CoverInstance,
    exact_cover,
    greedy_cover,
    lp_fractional_cover,
    quasi_uniform_round,
    solve_rdomset,
    verify_cover,
)
from .graph import Graph, contract_cells, gen_planar, induced_connected, multi_source_voronoi, parse_graph
from .planarity import is_planar
from .shallow import BallSystem, shallow_profile, verify_unique_encoding
from .support import build_dual_support, build_intersection_support

__version__ = "0.1.0"
