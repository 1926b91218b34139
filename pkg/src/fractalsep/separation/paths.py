"""Canonical all-pairs paths on complete-lines subgraphs (m = 1) and the
congestion lower bound cut >= n^2 / (8 * max congestion).

A point of C_k has at most one coordinate carrying an A-digit.  The path
from x to y changes one coordinate at a time, always along a line whose
other coordinates are A-free, hence complete:

1. move x's A-coordinate i1 (axis 0 if none) onto the value of another
   coordinate i2, making every coordinate A-free;
2. copy y's coordinates one axis at a time, skipping i1 and y's
   A-coordinate j1;
3. move coordinate i1 to y's value;
4. if j1 != i1, move coordinate j1 to y's value.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Mapping, Sequence

import numpy as np

from ..fractal_core import FractalParams, LevelGraph, _digit_hits
from .components import components
from .constructive import constructive_cut
from .result import CutResult

DEFAULT_MAX_PAIRS = 10_000_000


class PathConstructionError(RuntimeError):
    """A canonical path stepped outside the complete-lines subgraph."""


def _a_axis(c: LevelGraph) -> np.ndarray:
    """Per vertex: the axis whose coordinate has an A-digit, or -1."""
    hits = _digit_hits(c.params, c.level).any(axis=0) if c.level else np.zeros(1, dtype=bool)
    flags = hits[c.coords]
    many = flags.sum(axis=1)
    if np.any(many > 1):
        bad = c.point(int(np.argmax(many > 1)))
        raise PathConstructionError(f"{bad} has two coordinates with A-digits; not on a complete line")
    return np.where(many == 1, np.argmax(flags, axis=1), -1)


def _aux_axis(d: int, i1: int, j1: int) -> int:
    """Axis whose value x's A-coordinate borrows in step 1.

    The first axis copied in step 2, so that borrowed value is never also
    held by an untouched coordinate (that would double-count in the
    congestion census).  With d = 2 it is simply the other axis.
    """
    rest = [t for t in range(d) if t not in (i1, j1)]
    return rest[0] if rest else 1 - i1


@dataclass
class PathSystem:
    """Congestion census of an all-pairs path system.

    ``paths`` is stored implicitly: ``path(i, j)`` rebuilds the walk.  Pairs
    include i == j, whose trivial path adds 1 to its endpoint.
    """

    n: int
    congestion: np.ndarray
    pair_count: int
    graph: LevelGraph | None = None
    _walk: Callable[[int, int], list[int]] | None = field(default=None, repr=False)

    @property
    def max_congestion(self) -> int:
        return int(self.congestion.max()) if self.n else 0

    def path(self, i: int, j: int) -> list[int]:
        if self._walk is None:
            raise LookupError("this path system does not keep its paths")
        return self._walk(i, j)

    @classmethod
    def from_paths(cls, n: int, paths: Mapping[tuple[int, int], Sequence[int]], adjacency=None) -> "PathSystem":
        """Explicit path system on vertices 0..n-1, optionally checked as walks."""
        cong = np.zeros(n, dtype=np.int64)
        for (i, j), p in paths.items():
            if p[0] != i or p[-1] != j:
                raise ValueError(f"path for {(i, j)} runs {p[0]} -> {p[-1]}")
            if adjacency is not None:
                for u, v in zip(p, p[1:]):
                    if v not in adjacency[u]:
                        raise ValueError(f"path for {(i, j)} uses non-edge {(u, v)}")
            cong[np.unique(np.asarray(p, dtype=np.int64))] += 1
        stored = {key: list(p) for key, p in paths.items()}
        return cls(n, cong, len(paths), None, lambda i, j: stored[(i, j)])

    def summary(self, bound: float | None = None) -> dict:
        return {
            "n": self.n,
            "pair_count": self.pair_count,
            "max_congestion": self.max_congestion,
            "bound": bound,
        }

    def to_json(self, bound: float | None = None) -> str:
        return json.dumps(self.summary(bound), sort_keys=True)


class _Builder:
    def __init__(self, c: LevelGraph):
        self.c = c
        self.d = c.params.d
        self.a_axis = _a_axis(c)

    def _plan(self, i: int, j: int) -> list[tuple[int, int]]:
        """(axis, target value) moves for the pair (i, j)."""
        x = self.c.coords[i]
        y = self.c.coords[j]
        i1 = int(self.a_axis[i])
        i1 = 0 if i1 < 0 else i1
        j1 = int(self.a_axis[j])
        j1 = 0 if j1 < 0 else j1
        i2 = _aux_axis(self.d, i1, j1)
        moves = [(i1, int(x[i2]))]
        moves += [(t, int(y[t])) for t in range(self.d) if t not in (i1, j1)]
        moves.append((i1, int(y[i1])))
        if j1 != i1:
            moves.append((j1, int(y[j1])))
        return moves

    def walk(self, i: int, j: int) -> list[int]:
        if i == j:
            return [i]
        cur = self.c.coords[i].copy()
        pts = [cur.copy()]
        for axis, target in self._plan(i, j):
            step = 1 if target > cur[axis] else -1
            while cur[axis] != target:
                cur[axis] += step
                pts.append(cur.copy())
        ids = self.c.lookup(np.array(pts))
        if np.any(ids < 0):
            bad = tuple(int(v) for v in pts[int(np.argmax(ids < 0))])
            raise PathConstructionError(f"path {self.c.point(i)} -> {self.c.point(j)} leaves C_k at {bad}")
        return ids.tolist()

    def source_congestion(self, i: int) -> np.ndarray:
        """Congestion contributed by all pairs (i, *), vectorised over targets."""
        c, d, n = self.c, self.d, self.c.n
        x = c.coords[i]
        i1 = int(self.a_axis[i])
        i1 = 0 if i1 < 0 else i1
        ys = c.coords
        j1 = np.where(self.a_axis < 0, 0, self.a_axis)
        i2 = np.array([_aux_axis(d, i1, t) for t in range(d)])[j1]
        cur = np.repeat(x[None, :], n, axis=0)
        pair = np.arange(n)
        chunks: list[tuple[np.ndarray, np.ndarray]] = []

        def move(sel: np.ndarray, axis: int, target: np.ndarray) -> None:
            if not sel.any():
                return
            rows = np.nonzero(sel)[0]
            start = cur[rows, axis]
            tgt = target[rows]
            length = np.abs(tgt - start)
            total = int(length.sum())
            if total:
                rep = np.repeat(np.arange(len(rows)), length)
                first = np.cumsum(length) - length
                offset = np.arange(total) - np.repeat(first, length) + 1
                pts = cur[rows][rep]
                pts[:, axis] = start[rep] + np.sign(tgt - start)[rep] * offset
                chunks.append((pair[rows][rep], pts))
            cur[rows, axis] = tgt

        chunks.append((pair, cur.copy()))
        move(np.ones(n, dtype=bool), i1, x[i2])
        for t in range(d):
            move((j1 != t) & (t != i1), t, ys[:, t])
        move(np.ones(n, dtype=bool), i1, ys[:, i1])
        for t in range(d):
            move((j1 == t) & (j1 != i1), t, ys[:, t])

        owners = np.concatenate([o for o, _ in chunks])
        pts = np.concatenate([p for _, p in chunks])
        ids = c.lookup(pts)
        if np.any(ids < 0):
            bad = int(np.argmax(ids < 0))
            raise PathConstructionError(
                f"path from {c.point(i)} to {c.point(int(owners[bad]))} leaves C_k at "
                f"{tuple(int(v) for v in pts[bad])}"
            )
        # the pair (i, i) takes the trivial path; a vertex counts once per
        # pair even if the walk revisits it
        keep = (owners != i) | (ids == i)
        keys = np.unique(owners[keep] * n + ids[keep])
        return np.bincount(keys % n, minlength=n)


def build_canonical_paths(c: LevelGraph, *, max_pairs: int = DEFAULT_MAX_PAIRS) -> PathSystem:
    """All-pairs canonical paths on the complete-lines subgraph of an m = 1 family."""
    if c.params.m != 1:
        raise ValueError(f"canonical paths need m = 1, got {c.params.label}")
    pairs = c.n * c.n
    if pairs > max_pairs:
        raise ValueError(f"{pairs} ordered pairs exceed the pair budget {max_pairs}")
    builder = _Builder(c)
    cong = np.zeros(c.n, dtype=np.int64)
    for i in range(c.n):
        cong += builder.source_congestion(i)
    return PathSystem(c.n, cong, pairs, c, builder.walk)


def recount_congestion(ps: PathSystem) -> np.ndarray:
    """Congestion recomputed pair by pair from the explicit walks."""
    cong = np.zeros(ps.n, dtype=np.int64)
    for i in range(ps.n):
        for j in range(ps.n):
            cong[np.unique(np.asarray(ps.path(i, j), dtype=np.int64))] += 1
    return cong


@dataclass(frozen=True)
class PathBound:
    value: int
    raw: float
    certified: bool
    witness: CutResult | None = None

    @property
    def conditional(self) -> bool:
        return not self.certified


def path_lower_bound(ps: PathSystem, witness: CutResult | None = None) -> PathBound:
    """ceil(n^2 / (8 * max congestion)) as a lower bound on cut^(1/2).

    The inequality needs a connected graph with cut^(1/2) <= n/4.  A valid
    cutset of at most n/4 vertices certifies that; without one (or without
    the graph) the bound is returned flagged conditional.
    """
    n, m = ps.n, ps.max_congestion
    if m == 0:
        raise ValueError("empty path system")
    raw = n * n / (8 * m)
    value = math.ceil(raw - 1e-12)
    g = ps.graph
    certified = False
    if g is not None and components(g) == [g.n]:
        if witness is None:
            witness = constructive_cut(g)
        certified = witness.valid and witness.epsilon == 0.5 and 4 * witness.cut_size <= n
    return PathBound(value, raw, certified, witness)


def congestion_bound(params: FractalParams, k: int) -> int:
    """Upper bound on the canonical paths' max congestion over C_k (m = 1).

    Fix a vertex z, the A-axes (i1, j1) of the endpoints and one of the at
    most d + 1 straight segments.  z then pins d - 1 of the 2d endpoint
    coordinates; of the d + 1 free ones only x_i1 and y_j1 may carry
    A-digits.  Summing over the d^2 (d + 1) choices gives the bound.
    """
    d, b, a = params.d, params.b, len(params.A)
    return d * d * (d + 1) * b ** (2 * k) * (b - a) ** ((d - 1) * k)
