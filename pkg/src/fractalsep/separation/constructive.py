"""Constructive balanced separators for subgraphs of S(d, b, A, m).

Two phases, both driven by per-axis medians of the piece being cut:

* coarse: around each median, remove the sparsest axis-perpendicular plane
  within half a block width on either side.  Only the box between the planes
  can still hold an oversized component, and its side is below b^k where
  (bN)^k <= n < (bN)^(k+1).
* cube recursion: inside a cube of side b^(k+1), use planes whose k low
  digits all lie in A.  These meet at most b^(d-1) N^k vertices, and one sits
  at or below each median with a partner exactly b^k above it, so the
  leftover box has side below b^k and the recursion terminates.

Both plans are computed; the smaller cutset wins.  A final pass puts back
any deleted vertex whose return would not create an oversized component.
"""

from __future__ import annotations

import math
from fractions import Fraction

import numpy as np

from ..fractal_core import FractalParams, LevelGraph, lines_multiplicity
from .components import component_labels, label_points
from .result import CutResult, size_limit


class PlaneBoundViolation(AssertionError):
    """A cutting plane met more vertices than the construction allows."""


# ---------------------------------------------------------------------------
# plane candidates and bounds


def _low_patterns(params: FractalParams, k: int) -> list[int]:
    """Residues mod b^k whose k low digits all lie in A, ascending."""
    pats = [0]
    for j in range(k):
        pats = [p + a * params.b**j for p in pats for a in params.A]
    return sorted(pats)


def sparse_plane_candidates(
    params: FractalParams, axis: int, k: int, limit: int | None = None
) -> list[int]:
    """Plane offsets in [0, limit) whose k low base-b digits all lie in A.

    ``limit`` defaults to b^(k+1), one cube side.  With A empty every offset
    qualifies; the cutter then picks planes by direct counting.
    """
    if not 0 <= axis < params.d:
        raise ValueError(f"axis {axis} outside [0, {params.d})")
    if limit is None:
        limit = params.b ** (k + 1)
    if not params.A:
        return list(range(limit))
    period = params.b**k
    pats = _low_patterns(params, k)
    return [lam * period + p for lam in range(-(-limit // period)) for p in pats if lam * period + p < limit]


def _largest_candidate_at_most(params: FractalParams, k: int, x: int) -> int:
    period = params.b**k
    pats = _low_patterns(params, k)
    r = x % period
    below = [p for p in pats if p <= r]
    if below:
        return x - r + below[-1]
    return x - r - period + pats[-1]


def cube_plane_bound(params: FractalParams, k: int) -> int:
    """Max vertices on a candidate plane inside a cube of side b^(k+1)."""
    return params.b ** (params.d - 1) * lines_multiplicity(params) ** k


def coarse_plane_bound(params: FractalParams, k: int) -> int:
    """Pigeonhole bound for the sparsest window plane when n < (bN)^(k+1)."""
    return params.b * lines_multiplicity(params) ** (k + 1)


def cube_cut_bound(params: FractalParams, j: int) -> int:
    """Cutset size bound for any subgraph of a cube of side b^j."""
    N = lines_multiplicity(params)
    per_level = 2 * params.d * params.b ** (params.d - 1)
    return 1 + per_level * sum(N**i for i in range(j))


def separation_constant(params: FractalParams) -> Fraction:
    """C with cut <= C * N^k whenever n < (bN)^(k+1); requires N >= 2.

    Coarse phase: 2d planes of at most bN^(k+1) vertices.  Cube recursion:
    2d planes of at most b^(d-1) N^i vertices at each level i < k, summed as a
    geometric series.  For the carpet this is 24 + 12 = 36.
    """
    N = lines_multiplicity(params)
    if N < 2:
        raise ValueError(f"{params.label}: N = {N}, no constant of the form C * N^k exists")
    d, b = params.d, params.b
    return Fraction(2 * d * b * N) + Fraction(2 * d * b ** (d - 1), N - 1)


def level_for_size(params: FractalParams, n: int) -> int:
    """k with (bN)^k <= n < (bN)^(k+1) (0 for n < bN)."""
    base = params.b * lines_multiplicity(params)
    k = 0
    if base < 2:
        return 0
    while base ** (k + 1) <= n:
        k += 1
    return k


def _ceil_log(b: int, x: int) -> int:
    j = 0
    while b**j < x:
        j += 1
    return j


# ---------------------------------------------------------------------------
# the cutter


def _lower_median(values: np.ndarray) -> int:
    s = np.sort(values)
    return int(s[(len(s) - 1) // 2])


class _Cutter:
    def __init__(self, g: LevelGraph, limit: int):
        self.g = g
        self.params = g.params
        self.limit = limit
        self.removed: list[np.ndarray] = []
        self.planes: list[dict] = []

    def _oversized(self, ids: np.ndarray) -> np.ndarray | None:
        """Ids of the one component of ``ids`` above the limit, if any."""
        if len(ids) <= self.limit:
            return None
        lab, count = label_points(self.g.coords[ids])
        sizes = np.bincount(lab, minlength=count)
        top = int(np.argmax(sizes))
        if sizes[top] <= self.limit:
            return None
        return ids[lab == top]

    def _remove(self, ids: np.ndarray, mask: np.ndarray) -> np.ndarray:
        self.removed.append(ids[mask])
        return ids[~mask]

    def cube(self, ids: np.ndarray) -> None:
        p = self.params
        while True:
            pts = self.g.coords[ids]
            extent = int((pts.max(axis=0) - pts.min(axis=0)).max()) + 1
            if extent == 1:
                self._remove(ids, np.ones(len(ids), dtype=bool))
                return
            k = _ceil_log(p.b, extent) - 1
            bound = cube_plane_bound(p, k)
            cut = np.zeros(len(ids), dtype=bool)
            lo_hi = []
            for axis in range(p.d):
                med = _lower_median(pts[:, axis])
                if p.A:
                    p1 = _largest_candidate_at_most(p, k, med)
                    p2 = p1 + p.b**k
                else:
                    p1, p2 = self._sparsest_pair(pts[:, axis], med, p.b**k)
                for plane in (p1, p2):
                    on = pts[:, axis] == plane
                    hits = int(on.sum())
                    if hits > bound:
                        raise PlaneBoundViolation(
                            f"cube plane x_{axis}={plane} meets {hits} > {bound} vertices (k={k})"
                        )
                    self.planes.append({"phase": "cube", "k": k, "axis": axis, "offset": plane, "size": hits})
                    cut |= on
                lo_hi.append((p1, p2))
            ids = self._oversized(self._remove(ids, cut))
            if ids is None:
                return
            inner = self.g.coords[ids]
            for axis, (p1, p2) in enumerate(lo_hi):
                if inner[:, axis].min() <= p1 or inner[:, axis].max() >= p2:
                    raise AssertionError("oversized component escaped the middle cube")

    @staticmethod
    def _sparsest_pair(values: np.ndarray, med: int, width: int) -> tuple[int, int]:
        lo = int(values.min())
        counts = np.bincount(values - lo)

        def count(x: int) -> int:
            return int(counts[x - lo]) if 0 <= x - lo < len(counts) else 0

        p1 = min(range(med - width + 1, med + 1), key=lambda x: (count(x), med - x))
        p2 = min(range(max(med, p1 + 1), p1 + width + 1), key=lambda x: (count(x), x - med))
        return p1, p2

    def coarse(self, ids: np.ndarray, n: int) -> None:
        p = self.params
        k = level_for_size(p, n)
        half = p.b**k // 2
        bound = coarse_plane_bound(p, k)
        pts = self.g.coords[ids]
        cut = np.zeros(len(ids), dtype=bool)
        for axis in range(p.d):
            vals = pts[:, axis]
            med = _lower_median(vals)
            lo = int(vals.min())
            counts = np.bincount(vals - lo)
            chosen = []
            for sign in (1, -1):
                best = None
                for t in range(half + 1):
                    x = med + sign * t
                    c = int(counts[x - lo]) if 0 <= x - lo < len(counts) else 0
                    if best is None or c < best[0]:
                        best = (c, x)
                chosen.append(best)
            for hits, plane in chosen:
                if hits > bound:
                    raise PlaneBoundViolation(
                        f"coarse plane x_{axis}={plane} meets {hits} > {bound} vertices (k={k})"
                    )
                self.planes.append({"phase": "coarse", "k": k, "axis": axis, "offset": plane, "size": hits})
                cut |= vals == plane
        rest = self._oversized(self._remove(ids, cut))
        if rest is not None:
            self.cube(rest)

    def result(self) -> np.ndarray:
        if not self.removed:
            return np.zeros(0, dtype=np.int64)
        return np.unique(np.concatenate(self.removed))


def _restore_redundant(g: LevelGraph, cut: np.ndarray, limit: int) -> np.ndarray:
    """Put cut vertices back while every component stays within the limit."""
    if len(cut) == 0:
        return cut
    in_cut = np.zeros(g.n, dtype=bool)
    in_cut[cut] = True
    labels, count = component_labels(g, in_cut)
    sizes = np.bincount(labels[labels >= 0], minlength=count).tolist()
    parent = list(range(count))

    def find(a: int) -> int:
        while parent[a] != a:
            parent[a] = parent[parent[a]]
            a = parent[a]
        return a

    d = g.params.d
    offsets = np.concatenate([np.eye(d, dtype=np.int64), -np.eye(d, dtype=np.int64)])
    nbrs = g.lookup(g.coords[cut][:, None, :] + offsets[None, :, :])
    vertex_label = labels.copy()
    keep = []
    # highest ids first so the result does not depend on plan order
    for pos in range(len(cut) - 1, -1, -1):
        v = int(cut[pos])
        roots = {find(int(vertex_label[u])) for u in nbrs[pos] if u >= 0 and not in_cut[u]}
        total = 1 + sum(sizes[r] for r in roots)
        if total > limit:
            keep.append(v)
            continue
        new = len(parent)
        parent.append(new)
        sizes.append(total)
        for r in roots:
            parent[r] = new
        in_cut[v] = False
        vertex_label[v] = new
    return np.array(sorted(keep), dtype=np.int64)


def constructive_cut(g: LevelGraph, epsilon: float = 0.5, *, prune: bool = True) -> CutResult:
    """Balanced cutset from the two-phase plane construction.

    Valid for any ``epsilon >= 1/2`` (the construction targets 1/2).  The
    result's ``meta`` carries the proven size bound and the plane log.
    """
    params = getattr(g, "params", None)
    if not isinstance(params, FractalParams):
        raise ValueError("constructive_cut needs a LevelGraph labelled with FractalParams")
    if not 0.5 <= epsilon < 1:
        raise ValueError(f"the construction targets epsilon >= 1/2, got {epsilon}")
    n = g.n
    limit = size_limit(0.5, n)
    ids = np.arange(n, dtype=np.int64)
    meta: dict = {"level_for_size": level_for_size(params, n)}
    big = _Cutter(g, limit)._oversized(ids) if n else None
    if big is None:
        return CutResult.evaluate(g, [], epsilon, meta={**meta, "bound": 0, "plan": "none"})

    extent = int((g.coords[big].max(axis=0) - g.coords[big].min(axis=0)).max()) + 1
    j = _ceil_log(params.b, extent)
    cube_plan = _Cutter(g, limit)
    cube_plan.cube(big)
    coarse_plan = _Cutter(g, limit)
    coarse_plan.coarse(big, n)

    k = meta["level_for_size"]
    bound_cube = cube_cut_bound(params, j)
    bound_coarse = 2 * params.d * coarse_plane_bound(params, k) + cube_cut_bound(params, k)
    plans = [("cube", cube_plan, bound_cube), ("coarse", coarse_plan, bound_coarse)]
    name, plan, _ = min(plans, key=lambda t: len(t[1].result()))
    cut = plan.result()
    raw = len(cut)
    if prune:
        cut = _restore_redundant(g, cut, limit)
    meta.update(
        plan=name,
        raw_size=raw,
        bound=min(bound_cube, bound_coarse),
        cube_bound=bound_cube,
        coarse_bound=bound_coarse,
        planes=plan.planes,
    )
    try:
        meta["constant"] = float(separation_constant(params))
    except ValueError:
        meta["constant"] = math.inf
    res = CutResult.evaluate(g, cut, epsilon, meta=meta)
    if not res.valid:
        raise AssertionError(f"constructive cut left a component of {res.largest_component} > {limit}")
    return res
