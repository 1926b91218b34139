"""Plain-text graph export (edge list + JSON header) and SVG lattice pictures."""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .fractal_core import FractalParams, LevelGraph

FILL = "#1f1f1f"
HIGHLIGHT = "#c8102e"


def header_dict(g: LevelGraph) -> dict:
    return {
        "params": g.params.to_dict(),
        "k": g.level,
        "name": g.name,
        "n": g.n,
        "edges": int(len(g.edges)),
        "vertices": g.coords.tolist(),
    }


def edge_list_text(g: LevelGraph) -> str:
    return "".join(f"{u} {v}\n" for u, v in g.edges.tolist())


def write_graph(g: LevelGraph, prefix: str | Path) -> tuple[Path, Path]:
    """Write ``<prefix>.edgelist`` and ``<prefix>.json``; returns both paths."""
    prefix = Path(prefix)
    prefix.parent.mkdir(parents=True, exist_ok=True)
    edges_path = prefix.with_name(prefix.name + ".edgelist")
    header_path = prefix.with_name(prefix.name + ".json")
    edges_path.write_text(edge_list_text(g), encoding="utf-8")
    header_path.write_text(json.dumps(header_dict(g), sort_keys=True) + "\n", encoding="utf-8")
    return edges_path, header_path


def read_graph(prefix: str | Path) -> LevelGraph:
    """Inverse of :func:`write_graph`; checks the edge list against the coordinates."""
    prefix = Path(prefix)
    header = json.loads(prefix.with_name(prefix.name + ".json").read_text(encoding="utf-8"))
    params = FractalParams.from_dict(header["params"])
    coords = np.array(header["vertices"], dtype=np.int64).reshape(-1, params.d)
    g = LevelGraph(params, int(header["k"]), coords, header.get("name", ""))
    text = prefix.with_name(prefix.name + ".edgelist").read_text(encoding="utf-8")
    listed = np.array([[int(t) for t in line.split()] for line in text.splitlines() if line.strip()], dtype=np.int64)
    listed = listed.reshape(-1, 2)
    if not np.array_equal(listed, g.edges):
        raise ValueError(f"edge list under {prefix} does not match the vertex table")
    return g


def render_svg(g: LevelGraph, highlight: LevelGraph | None = None, scale: int = 8) -> str:
    """One filled unit square per vertex; ``highlight`` vertices get a second fill.

    y grows upwards, so (0, 0) is the bottom-left cell.
    """
    if g.params.d != 2:
        raise ValueError(f"SVG rendering needs d = 2, got d = {g.params.d}")
    side = g.side
    marked = np.zeros(g.n, dtype=bool)
    if highlight is not None and highlight.n:
        ids = g.lookup(highlight.coords)
        marked[ids[ids >= 0]] = True

    def rects(sel: np.ndarray) -> list[str]:
        return [
            f'<rect x="{x}" y="{side - 1 - y}" width="1" height="1"/>'
            for x, y in g.coords[sel].tolist()
        ]

    lines = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{side * scale}" height="{side * scale}" '
        f'viewBox="0 0 {side} {side}" shape-rendering="crispEdges">',
        f"<title>{g.params.label} level {g.level}</title>",
        f'<rect width="{side}" height="{side}" fill="#ffffff"/>',
        f'<g id="cells" fill="{FILL}">',
        *rects(~marked),
        "</g>",
    ]
    if highlight is not None:
        lines += [f'<g id="complete" fill="{HIGHLIGHT}">', *rects(marked), "</g>"]
    lines.append("</svg>")
    return "\n".join(lines) + "\n"
