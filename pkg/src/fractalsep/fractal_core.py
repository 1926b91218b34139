"""Fractal lattice graphs Gamma_k(d, b, A, m) and their complete-lines subgraphs.

A level-k vertex is a point of [0, b^k)^d whose base-b digit columns each
contain at most ``m`` digits from ``A``.  The carpet is ``(2, 3, {1}, 1)`` and
the Menger sponge is ``(3, 3, {1}, 1)``.

Membership is evaluated on dense boolean grids built by broadcasting the
per-axis digit tables, so graphs with a few million vertices are cheap to
enumerate.  Closed-form counts never touch the grid.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
from scipy import sparse

DEFAULT_MAX_VERTICES = 2_000_000
# dense grids are bool/int8, so this is roughly the memory ceiling in bytes
DEFAULT_MAX_GRID_CELLS = 120_000_000


class BudgetExceeded(RuntimeError):
    """Raised when a requested graph would exceed the enumeration budget."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(f"{what} would have {size} elements (limit {limit})")
        self.what = what
        self.size = size
        self.limit = limit


@dataclass(frozen=True)
class FractalParams:
    d: int
    b: int
    A: tuple[int, ...]
    m: int

    def __post_init__(self) -> None:
        A = tuple(sorted({int(a) for a in self.A}))
        object.__setattr__(self, "A", A)
        if self.d < 2:
            raise ValueError(f"dimension d must be >= 2, got {self.d}")
        if self.b < 3:
            raise ValueError(f"base b must be >= 3, got {self.b}")
        if not 0 <= self.m <= self.d:
            raise ValueError(f"m must lie in [0, d], got m={self.m}, d={self.d}")
        bad = [a for a in A if not 0 <= a < self.b]
        if bad:
            raise ValueError(f"digits {bad} outside [0, {self.b - 1}]")

    @property
    def label(self) -> str:
        digits = ",".join(map(str, self.A))
        return f"S({self.d},{self.b},{{{digits}}},{self.m})"

    @cached_property
    def digit_in_A(self) -> np.ndarray:
        table = np.zeros(self.b, dtype=bool)
        table[list(self.A)] = True
        return table

    def to_dict(self) -> dict:
        return {"d": self.d, "b": self.b, "A": list(self.A), "m": self.m}

    @classmethod
    def from_dict(cls, data: dict) -> "FractalParams":
        return cls(int(data["d"]), int(data["b"]), tuple(data["A"]), int(data["m"]))


CARPET = FractalParams(2, 3, (1,), 1)
MENGER = FractalParams(3, 3, (1,), 1)


def digit(x: int, j: int, b: int) -> int:
    return (x // b**j) % b


def digits(x: int, k: int, b: int) -> list[int]:
    """Low-order-first base-b digits of ``x`` at positions 0..k-1."""
    return [digit(x, j, b) for j in range(k)]


def _check_point(p: Sequence[int], params: FractalParams, k: int) -> None:
    if len(p) != params.d:
        raise ValueError(f"point {tuple(p)} has {len(p)} coordinates, expected {params.d}")
    side = params.b**k
    for x in p:
        if not 0 <= x < side:
            raise ValueError(f"coordinate {x} outside [0, {side}) at level {k}")


def is_vertex(p: Sequence[int], params: FractalParams, k: int) -> bool:
    _check_point(p, params, k)
    A = set(params.A)
    for j in range(k):
        hits = sum(1 for x in p if digit(x, j, params.b) in A)
        if hits > params.m:
            return False
    return True


# ---------------------------------------------------------------------------
# closed forms


def per_column_count(params: FractalParams) -> int:
    """Number of digit columns (one digit per coordinate) with <= m digits in A."""
    a = len(params.A)
    return sum(
        math.comb(params.d, i) * a**i * (params.b - a) ** (params.d - i)
        for i in range(params.m + 1)
    )


def vertex_count_formula(params: FractalParams, k: int) -> int:
    return per_column_count(params) ** k


def lines_multiplicity(params: FractalParams) -> int:
    """N: complete lines per direction grow like N^k."""
    a = len(params.A)
    if a == 0:
        # no digit is ever in A, so every line is complete
        return params.b ** (params.d - 1)
    return sum(
        math.comb(params.d - 1, i) * a**i * (params.b - a) ** (params.d - 1 - i)
        for i in range(params.m)
    )


def complete_lines_count(params: FractalParams, k: int) -> int:
    return lines_multiplicity(params) ** k


def exponent_E(params: FractalParams) -> float:
    N = lines_multiplicity(params)
    if N < 1:
        raise ValueError(f"{params.label} has no complete lines (N = 0); exponent undefined")
    return math.log(N) / (math.log(N) + math.log(params.b))


def is_complete_line(
    params: FractalParams, k: int, direction: int, fixed: Sequence[int]
) -> bool:
    """Digit criterion for the axis-``direction`` line through ``fixed``.

    ``fixed`` lists the d-1 coordinates other than ``direction`` in axis
    order.  A line is complete when every one of its b^k points is a vertex.
    """
    if not 0 <= direction < params.d:
        raise ValueError(f"direction {direction} outside [0, {params.d})")
    if len(fixed) != params.d - 1:
        raise ValueError(f"expected {params.d - 1} fixed coordinates, got {len(fixed)}")
    side = params.b**k
    if any(not 0 <= x < side for x in fixed):
        raise ValueError(f"fixed coordinates {tuple(fixed)} outside [0, {side})")
    # the moving coordinate sweeps every digit, so it contributes one A-digit
    # per column whenever A is non-empty
    allowed = params.m - (1 if params.A else 0)
    A = set(params.A)
    for j in range(k):
        if sum(1 for x in fixed if digit(x, j, params.b) in A) > allowed:
            return False
    return True


# ---------------------------------------------------------------------------
# dense grid machinery


def _digit_hits(params: FractalParams, k: int) -> np.ndarray:
    """(k, b^k) table: does coordinate value x have an A-digit at position j."""
    side = params.b**k
    x = np.arange(side, dtype=np.int64)
    out = np.empty((k, side), dtype=bool)
    for j in range(k):
        out[j] = params.digit_in_A[(x // params.b**j) % params.b]
    return out


def _column_mask(params: FractalParams, k: int, ndim: int, allowed: int) -> np.ndarray:
    """Boolean grid over [0, b^k)^ndim: every digit column has <= allowed A-digits."""
    side = params.b**k
    shape = (side,) * ndim
    if allowed < 0:
        return np.zeros(shape, dtype=bool) if k > 0 else np.ones(shape, dtype=bool)
    mask = np.ones(shape, dtype=bool)
    if allowed >= ndim:
        return mask
    hits = _digit_hits(params, k)
    count = np.empty(shape, dtype=np.int8)
    for j in range(k):
        count[...] = 0
        for i in range(ndim):
            view = [1] * ndim
            view[i] = side
            count += hits[j].reshape(view)
        mask &= count <= allowed
    return mask


def _guard_grid(params: FractalParams, k: int, max_cells: int) -> None:
    cells = params.b ** (k * params.d)
    if cells > max_cells:
        raise BudgetExceeded("ambient grid", cells, max_cells)


def vertex_mask(
    params: FractalParams, k: int, *, max_cells: int = DEFAULT_MAX_GRID_CELLS
) -> np.ndarray:
    _guard_grid(params, k, max_cells)
    return _column_mask(params, k, params.d, params.m)


def complete_fixed_mask(params: FractalParams, k: int) -> np.ndarray:
    """Grid over the d-1 fixed coordinates: True where the line is complete."""
    allowed = params.m - (1 if params.A else 0)
    return _column_mask(params, k, params.d - 1, allowed)


def complete_lines_mask(
    params: FractalParams, k: int, *, max_cells: int = DEFAULT_MAX_GRID_CELLS
) -> np.ndarray:
    """Grid over [0, b^k)^d marking the union of complete lines in all directions."""
    _guard_grid(params, k, max_cells)
    fixed_ok = complete_fixed_mask(params, k)
    side = params.b**k
    shape = (side,) * params.d
    mask = np.zeros(shape, dtype=bool)
    for axis in range(params.d):
        mask |= np.broadcast_to(np.expand_dims(fixed_ok, axis), shape)
    return mask


# ---------------------------------------------------------------------------
# graphs


def _strides(side: int, d: int) -> np.ndarray:
    return np.array([side ** (d - 1 - i) for i in range(d)], dtype=np.int64)


@dataclass(frozen=True, eq=False)
class LevelGraph:
    """Induced subgraph of the level-k lattice on a lexicographically sorted point set.

    ``coords`` is an ``(n, d)`` integer array; vertex ids are row indices.
    Adjacency joins points at L1 distance one and is built on first use.
    """

    params: FractalParams
    level: int
    coords: np.ndarray
    name: str = field(default="")

    def __post_init__(self) -> None:
        coords = np.ascontiguousarray(self.coords, dtype=np.int64).reshape(-1, self.params.d)
        coords.setflags(write=False)
        object.__setattr__(self, "coords", coords)
        keys = coords @ _strides(self.side, self.params.d)
        if keys.size and (np.any(coords < 0) or np.any(coords >= self.side)):
            raise ValueError(f"coordinates outside [0, {self.side}) at level {self.level}")
        if keys.size > 1 and np.any(np.diff(keys) <= 0):
            raise ValueError("vertices must be strictly lexicographically sorted")
        keys.setflags(write=False)
        object.__setattr__(self, "keys", keys)

    @classmethod
    def from_mask(cls, params: FractalParams, k: int, mask: np.ndarray, name: str = "") -> "LevelGraph":
        coords = np.stack(np.nonzero(mask), axis=1)
        return cls(params, k, coords, name)

    @classmethod
    def from_points(
        cls, params: FractalParams, k: int, points: Iterable[Sequence[int]], name: str = ""
    ) -> "LevelGraph":
        pts = np.array(sorted({tuple(int(c) for c in p) for p in points}), dtype=np.int64)
        return cls(params, k, pts.reshape(-1, params.d), name)

    @property
    def side(self) -> int:
        return self.params.b**self.level

    @property
    def n(self) -> int:
        return len(self.coords)

    def __len__(self) -> int:
        return self.n

    @property
    def vertices(self) -> list[tuple[int, ...]]:
        return [tuple(int(c) for c in row) for row in self.coords]

    def point(self, i: int) -> tuple[int, ...]:
        return tuple(int(c) for c in self.coords[i])

    def lookup(self, points: np.ndarray) -> np.ndarray:
        """Vertex ids of ``points`` (shape (..., d)); -1 where absent."""
        points = np.asarray(points, dtype=np.int64)
        inside = np.all((points >= 0) & (points < self.side), axis=-1)
        keys = np.where(inside, points @ _strides(self.side, self.params.d), -1)
        pos = np.searchsorted(self.keys, keys)
        pos = np.minimum(pos, max(self.n - 1, 0))
        found = inside & (self.n > 0)
        if self.n:
            found &= self.keys[pos] == keys
        return np.where(found, pos, -1)

    def index_of(self, p: Sequence[int]) -> int:
        i = int(self.lookup(np.asarray(p))[()])
        if i < 0:
            raise KeyError(tuple(p))
        return i

    def __contains__(self, p: Sequence[int]) -> bool:
        return int(self.lookup(np.asarray(p))[()]) >= 0

    @cached_property
    def edges(self) -> np.ndarray:
        """(E, 2) array of id pairs (u < v), sorted."""
        blocks = []
        for axis in range(self.params.d):
            nxt = self.coords.copy()
            nxt[:, axis] += 1
            j = self.lookup(nxt)
            hit = j >= 0
            blocks.append(np.stack([np.nonzero(hit)[0], j[hit]], axis=1))
        e = np.concatenate(blocks) if blocks else np.zeros((0, 2), dtype=np.int64)
        if len(e):
            e = e[np.lexsort((e[:, 1], e[:, 0]))]
        e.setflags(write=False)
        return e

    @cached_property
    def adjacency(self) -> sparse.csr_matrix:
        e = self.edges
        n = self.n
        data = np.ones(2 * len(e), dtype=np.int8)
        rows = np.concatenate([e[:, 0], e[:, 1]])
        cols = np.concatenate([e[:, 1], e[:, 0]])
        return sparse.csr_matrix((data, (rows, cols)), shape=(n, n))

    def neighbors(self, i: int) -> np.ndarray:
        a = self.adjacency
        return a.indices[a.indptr[i] : a.indptr[i + 1]]

    def adjacency_lists(self) -> list[list[int]]:
        a = self.adjacency
        return [a.indices[a.indptr[i] : a.indptr[i + 1]].tolist() for i in range(self.n)]

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.adjacency.indptr)

    def induced(self, ids: Iterable[int], name: str = "") -> "LevelGraph":
        ids = np.unique(np.fromiter(ids, dtype=np.int64))
        return LevelGraph(self.params, self.level, self.coords[ids], name or self.name)

    def same_as(self, other: "LevelGraph") -> bool:
        return (
            self.params == other.params
            and self.level == other.level
            and np.array_equal(self.coords, other.coords)
        )


def _guard_vertices(what: str, size: int, max_vertices: int) -> None:
    if size > max_vertices:
        raise BudgetExceeded(what, size, max_vertices)


def build_level_graph(
    params: FractalParams, k: int, *, max_vertices: int = DEFAULT_MAX_VERTICES
) -> LevelGraph:
    if k < 0:
        raise ValueError(f"level must be >= 0, got {k}")
    _guard_vertices(f"Gamma_{k} of {params.label}", vertex_count_formula(params, k), max_vertices)
    mask = vertex_mask(params, k)
    return LevelGraph.from_mask(params, k, mask, name=f"Gamma_{k}")


def build_complete_lines_subgraph(
    params: FractalParams, k: int, *, max_vertices: int = DEFAULT_MAX_VERTICES
) -> LevelGraph:
    if k < 0:
        raise ValueError(f"level must be >= 0, got {k}")
    # d lines-families of N^k lines, b^k points each
    estimate = min(
        params.d * complete_lines_count(params, k) * params.b**k,
        vertex_count_formula(params, k),
    )
    _guard_vertices(f"C_{k} of {params.label}", estimate, max_vertices)
    mask = complete_lines_mask(params, k)
    return LevelGraph.from_mask(params, k, mask, name=f"C_{k}")


# ---------------------------------------------------------------------------
# hyperbolic cone


@dataclass(frozen=True)
class ConeGraph:
    """Levels 0..k_max with cross edges (parent id at level k-1, child id at level k).

    ``cross_edges[k]`` holds the edges into level k; ``cross_edges[0]`` is empty.
    A child's parent agrees with it on digit positions 0..k-2, i.e. it is the
    child reduced mod b^(k-1) coordinate-wise.
    """

    params: FractalParams
    levels: tuple[LevelGraph, ...]
    cross_edges: tuple[np.ndarray, ...]

    @property
    def k_max(self) -> int:
        return len(self.levels) - 1

    @property
    def offsets(self) -> list[int]:
        out, total = [], 0
        for g in self.levels:
            out.append(total)
            total += g.n
        return out

    def edge_list(self) -> np.ndarray:
        """All cone edges in global ids (levels concatenated in order)."""
        off = self.offsets
        blocks = []
        for k, g in enumerate(self.levels):
            blocks.append(g.edges + off[k])
            if k:
                ce = self.cross_edges[k].copy()
                ce[:, 0] += off[k - 1]
                ce[:, 1] += off[k]
                blocks.append(ce)
        return np.concatenate(blocks) if blocks else np.zeros((0, 2), dtype=np.int64)


def build_cone(
    params: FractalParams, k_max: int, *, max_vertices: int = DEFAULT_MAX_VERTICES
) -> ConeGraph:
    total = sum(vertex_count_formula(params, k) for k in range(k_max + 1))
    _guard_vertices(f"cone{params.label} up to level {k_max}", total, max_vertices)
    levels = tuple(build_level_graph(params, k, max_vertices=max_vertices) for k in range(k_max + 1))
    cross = [np.zeros((0, 2), dtype=np.int64)]
    for k in range(1, k_max + 1):
        child = levels[k].coords
        parent = levels[k - 1].lookup(child % params.b ** (k - 1))
        has = parent >= 0
        cross.append(np.stack([parent[has], np.nonzero(has)[0]], axis=1))
    return ConeGraph(params, levels, tuple(cross))


def complete_lines(params: FractalParams, k: int) -> list[tuple[int, tuple[int, ...]]]:
    """Every complete line as (direction, fixed coordinates), direction-major."""
    fixed_ok = complete_fixed_mask(params, k)
    out = []
    for axis in range(params.d):
        for fixed in zip(*np.nonzero(fixed_ok)):
            out.append((axis, tuple(int(v) for v in fixed)))
    return out


def line_points(params: FractalParams, k: int, direction: int, fixed: Sequence[int]) -> np.ndarray:
    side = params.b**k
    pts = np.empty((side, params.d), dtype=np.int64)
    others = [t for t in range(params.d) if t != direction]
    for t, v in zip(others, fixed):
        pts[:, t] = v
    pts[:, direction] = np.arange(side)
    return pts
