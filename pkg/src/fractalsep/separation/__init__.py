"""Balanced separators: exact search, constructive cuts, and lower bounds."""

from .components import component_labels, components
from .constructive import (
    PlaneBoundViolation,
    constructive_cut,
    cube_cut_bound,
    cube_plane_bound,
    level_for_size,
    separation_constant,
    sparse_plane_candidates,
)
from .exact import cut_epsilon_exact, naive_cut_ids
from .lines import direct_line_lower_bound, untouched_lines_union
from .paths import (
    PathBound,
    PathConstructionError,
    PathSystem,
    build_canonical_paths,
    congestion_bound,
    path_lower_bound,
    recount_congestion,
)
from .result import CutResult, size_limit

__all__ = [
    "CutResult",
    "PathBound",
    "PathConstructionError",
    "PathSystem",
    "PlaneBoundViolation",
    "build_canonical_paths",
    "component_labels",
    "components",
    "congestion_bound",
    "constructive_cut",
    "cube_cut_bound",
    "cube_plane_bound",
    "cut_epsilon_exact",
    "direct_line_lower_bound",
    "level_for_size",
    "naive_cut_ids",
    "path_lower_bound",
    "recount_congestion",
    "separation_constant",
    "size_limit",
    "sparse_plane_candidates",
    "untouched_lines_union",
]
