"""Lemma-style lower bound for the carpet: cut^(1/2)(C_k) >= 2^(k-1).

Fewer than 2^(k-1) deletions leave more than half of the 2^k complete lines
in each direction untouched; those lines cross pairwise, so their union is
one component holding more than half of C_k.
"""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from ..fractal_core import CARPET, FractalParams, LevelGraph, complete_lines, line_points


def direct_line_lower_bound(params: FractalParams, k: int) -> int:
    if params != CARPET:
        raise ValueError(f"the direct line bound is proved for the carpet only, got {params.label}")
    if k < 0:
        raise ValueError(f"level must be >= 0, got {k}")
    # C_0 is a single vertex, which must be deleted
    return max(1, math.ceil(2 ** (k - 1)))


def untouched_lines_union(c: LevelGraph, removed: Iterable[Sequence[int]]) -> np.ndarray:
    """Ids of C_k lying on complete lines that avoid every removed point."""
    gone = {tuple(int(v) for v in p) for p in removed}
    ids = []
    for axis, fixed in complete_lines(c.params, c.level):
        pts = line_points(c.params, c.level, axis, fixed)
        if any(tuple(int(v) for v in p) in gone for p in pts):
            continue
        ids.append(c.lookup(pts))
    if not ids:
        return np.zeros(0, dtype=np.int64)
    return np.unique(np.concatenate(ids))
