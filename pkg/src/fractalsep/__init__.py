"""Separation of Sierpinski-carpet and Menger-sponge lattice graphs."""

from .fractal_core import (
    CARPET,
    MENGER,
    BudgetExceeded,
    ConeGraph,
    FractalParams,
    LevelGraph,
    build_complete_lines_subgraph,
    build_cone,
    build_level_graph,
    complete_lines_count,
    digit,
    exponent_E,
    is_complete_line,
    is_vertex,
    lines_multiplicity,
    vertex_count_formula,
)

__version__ = "0.1.0"

__all__ = [
    "CARPET",
    "MENGER",
    "BudgetExceeded",
    "ConeGraph",
    "FractalParams",
    "LevelGraph",
    "build_complete_lines_subgraph",
    "build_cone",
    "build_level_graph",
    "complete_lines_count",
    "digit",
    "exponent_E",
    "is_complete_line",
    "is_vertex",
    "lines_multiplicity",
    "vertex_count_formula",
]
