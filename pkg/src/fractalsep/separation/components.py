"""Connected-component census for lattice graphs with vertices removed."""

from __future__ import annotations

from collections import deque
from typing import Iterable

import numpy as np
from scipy import ndimage, sparse
from scipy.sparse import csgraph

from ..fractal_core import LevelGraph

# dense labelling is used while the bounding box stays this small
_MAX_LABEL_CELLS = 60_000_000


def _as_mask(n: int, removed) -> np.ndarray:
    if removed is None:
        return np.zeros(n, dtype=bool)
    arr = np.asarray(removed)
    if arr.dtype == bool:
        if arr.shape != (n,):
            raise ValueError(f"removal mask has shape {arr.shape}, expected ({n},)")
        return arr
    mask = np.zeros(n, dtype=bool)
    ids = np.fromiter(removed, dtype=np.int64) if arr.ndim == 0 else arr.astype(np.int64).ravel()
    if ids.size and (ids.min() < 0 or ids.max() >= n):
        raise ValueError("removed ids outside the vertex range")
    mask[ids] = True
    return mask


def label_points(coords: np.ndarray) -> tuple[np.ndarray, int]:
    """Component label per point of an L1-adjacency point set (labels 0..count-1)."""
    n, d = coords.shape
    if n == 0:
        return np.zeros(0, dtype=np.int64), 0
    lo = coords.min(axis=0)
    ext = coords.max(axis=0) - lo + 1
    if int(np.prod(ext, dtype=np.float64)) <= _MAX_LABEL_CELLS:
        grid = np.zeros(tuple(int(e) for e in ext), dtype=bool)
        local = coords - lo
        grid[tuple(local.T)] = True
        structure = ndimage.generate_binary_structure(d, 1)
        labels, count = ndimage.label(grid, structure=structure)
        return labels[tuple(local.T)].astype(np.int64) - 1, int(count)
    # sparse fallback for spread-out point sets
    order = np.lexsort(coords.T[::-1])
    inv = np.empty(n, dtype=np.int64)
    inv[order] = np.arange(n)
    srt = coords[order]
    stride = np.cumprod(np.concatenate([[1], ext[::-1][:-1]]))[::-1].astype(np.int64)
    keys = (srt - lo) @ stride
    rows, cols = [], []
    for axis in range(d):
        nxt = (srt - lo).copy()
        nxt[:, axis] += 1
        ok = nxt[:, axis] < ext[axis]
        nk = nxt @ stride
        pos = np.minimum(np.searchsorted(keys, nk), n - 1)
        hit = ok & (keys[pos] == nk)
        rows.append(np.nonzero(hit)[0])
        cols.append(pos[hit])
    r = np.concatenate(rows)
    c = np.concatenate(cols)
    adj = sparse.csr_matrix((np.ones(len(r), dtype=np.int8), (r, c)), shape=(n, n))
    count, lab = csgraph.connected_components(adj, directed=False)
    return lab[inv].astype(np.int64), int(count)


def component_labels(g: LevelGraph, removed=None) -> tuple[np.ndarray, int]:
    """Labels for every vertex of ``g``; removed vertices get -1."""
    mask = _as_mask(g.n, removed)
    keep = np.nonzero(~mask)[0]
    labels = np.full(g.n, -1, dtype=np.int64)
    lab, count = label_points(g.coords[keep])
    labels[keep] = lab
    return labels, count


def components(g: LevelGraph, removed=None) -> list[int]:
    """Sizes of the components of ``g`` minus ``removed``, largest first.

    ``removed`` may be a boolean mask over vertex ids or an iterable of ids.
    """
    labels, count = component_labels(g, removed)
    if count == 0:
        return []
    sizes = np.bincount(labels[labels >= 0], minlength=count)
    return sorted(sizes.tolist(), reverse=True)


def components_adj(adj: list[list[int]], removed: Iterable[int] = ()) -> list[int]:
    """Same census for a small graph given as adjacency lists."""
    gone = set(removed)
    seen = [False] * len(adj)
    sizes = []
    for s in range(len(adj)):
        if seen[s] or s in gone:
            continue
        seen[s] = True
        q = deque([s])
        size = 0
        while q:
            u = q.popleft()
            size += 1
            for v in adj[u]:
                if not seen[v] and v not in gone:
                    seen[v] = True
                    q.append(v)
        sizes.append(size)
    return sorted(sizes, reverse=True)
