"""Verification campaigns: count cross-checks, bound sandwiches, exponent fits."""

from __future__ import annotations

import csv
import hashlib
import io
import json
import os
import time
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Callable, Iterable, Sequence

import numpy as np

from .fractal_core import (
    CARPET,
    DEFAULT_MAX_VERTICES,
    FractalParams,
    LevelGraph,
    build_complete_lines_subgraph,
    build_level_graph,
    complete_lines_count,
    exponent_E,
    lines_multiplicity,
    vertex_count_formula,
    vertex_mask,
)
from .separation import (
    build_canonical_paths,
    constructive_cut,
    cut_epsilon_exact,
    direct_line_lower_bound,
    naive_cut_ids,
    path_lower_bound,
)

CACHE_ENV = "FRACTALSEP_CACHE_DIR"

# the 4^k correction in |C_k| bends small-k slopes
SLOPE_TOLERANCE = {"lower_bound": 0.05, "constructive": 0.06}


class SandwichViolation(AssertionError):
    pass


# ---------------------------------------------------------------------------
# graph cache


def _cache_key(params: FractalParams, k: int, kind: str) -> str:
    blob = json.dumps({"params": params.to_dict(), "k": k, "kind": kind}, sort_keys=True)
    return hashlib.sha256(blob.encode()).hexdigest()[:24]


def load_graph(
    params: FractalParams,
    k: int,
    kind: str = "complete",
    *,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    cache_dir: str | Path | None = None,
) -> LevelGraph:
    """Gamma_k (``kind="level"``) or C_k (``kind="complete"``), cached on disk if asked.

    ``cache_dir`` defaults to $FRACTALSEP_CACHE_DIR; no caching when neither is set.
    """
    if kind not in ("level", "complete"):
        raise ValueError(f"unknown graph kind {kind!r}")
    build = build_level_graph if kind == "level" else build_complete_lines_subgraph
    cache_dir = cache_dir or os.environ.get(CACHE_ENV)
    if not cache_dir:
        return build(params, k, max_vertices=max_vertices)
    path = Path(cache_dir) / f"{_cache_key(params, k, kind)}.npy"
    name = f"Gamma_{k}" if kind == "level" else f"C_{k}"
    if path.exists():
        return LevelGraph(params, k, np.load(path), name)
    g = build(params, k, max_vertices=max_vertices)
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_suffix(".tmp.npy")
    np.save(tmp, g.coords)
    tmp.replace(path)
    return g


# ---------------------------------------------------------------------------
# counting


def complete_size_closed_form(params: FractalParams, k: int) -> int | None:
    """|C_k| in closed form where one is known (d = 2): 2 (Nb)^k - N^(2k)."""
    if params.d != 2:
        return None
    L = complete_lines_count(params, k)
    return 2 * L * params.b**k - L * L


def run_count_checks(
    params: FractalParams, k_max: int, *, max_vertices: int = DEFAULT_MAX_VERTICES
) -> list[dict]:
    """Enumerated vs closed-form counts for k = 0..k_max; each row carries ``ok``."""
    rows = []
    N = lines_multiplicity(params)
    for k in range(k_max + 1):
        mask = vertex_mask(params, k)
        n_enum = int(mask.sum())
        # a line is complete when every point on it is a vertex
        lines_enum = [int(mask.all(axis=axis).sum()) for axis in range(params.d)]
        c = build_complete_lines_subgraph(params, k, max_vertices=max_vertices)
        closed = complete_size_closed_form(params, k)
        scale = (N * params.b) ** k
        ratio = c.n / scale if scale else None
        row = {
            "k": k,
            "vertices": n_enum,
            "vertices_formula": vertex_count_formula(params, k),
            "lines_per_direction": lines_enum,
            "lines_formula": complete_lines_count(params, k),
            "complete_size": c.n,
            "complete_closed_form": closed,
            "complete_ratio": ratio,
        }
        ok = n_enum == row["vertices_formula"]
        ok &= all(x == row["lines_formula"] for x in lines_enum)
        if closed is not None:
            ok &= c.n == closed
        if ratio is not None:
            # one direction alone gives (Nb)^k points, d directions at most d times that
            ok &= 1 <= ratio <= params.d
        row["ok"] = bool(ok)
        rows.append(row)
    return rows


# ---------------------------------------------------------------------------
# sandwich rows


@dataclass
class Row:
    k: int
    n: int
    lower_bound: int | None
    lower_kind: str | None
    exact_or_incumbent: int | None
    exact_proved: bool | None
    constructive_size: int | None
    constructive_bound: int | None
    timings: dict = field(default_factory=dict)

    def canonical(self) -> dict:
        out = asdict(self)
        out.pop("timings")
        return out


def _lower_bound(params: FractalParams, g: LevelGraph, k: int, kind: str, max_pairs: int, witness):
    if kind != "complete":
        return None, None
    best, label = None, None
    if params == CARPET:
        best, label = direct_line_lower_bound(params, k), "direct-line"
    if params.m == 1 and g.n * g.n <= max_pairs:
        pb = path_lower_bound(build_canonical_paths(g, max_pairs=max_pairs), witness)
        if pb.certified and (best is None or pb.value > best):
            best, label = pb.value, "path-congestion"
    if best is None and params.m > 1:
        label = "conjectural"
    return best, label


def sandwich_row(
    params: FractalParams,
    k: int,
    epsilon: float = 0.5,
    *,
    kind: str = "complete",
    exact_max_vertices: int = 60,
    node_limit: int = 200_000,
    max_vertices: int = DEFAULT_MAX_VERTICES,
    max_pairs: int = 200_000,
    cache_dir=None,
) -> Row:
    timings = {}
    t0 = time.perf_counter()
    g = load_graph(params, k, kind, max_vertices=max_vertices, cache_dir=cache_dir)
    timings["build"] = time.perf_counter() - t0

    upper = None
    if epsilon >= 0.5:
        t0 = time.perf_counter()
        upper = constructive_cut(g, epsilon)
        timings["constructive"] = time.perf_counter() - t0

    lower, lower_kind = None, None
    if epsilon <= 0.5:
        # bounds on cut^(1/2) also bound cut^eps from below for eps <= 1/2
        t0 = time.perf_counter()
        lower, lower_kind = _lower_bound(params, g, k, kind, max_pairs, upper)
        timings["lower"] = time.perf_counter() - t0

    exact = None
    if g.n <= exact_max_vertices:
        t0 = time.perf_counter()
        exact = cut_epsilon_exact(g, epsilon, node_limit=node_limit, incumbent=upper)
        timings["exact"] = time.perf_counter() - t0

    row = Row(
        k=k,
        n=g.n,
        lower_bound=lower,
        lower_kind=lower_kind,
        exact_or_incumbent=exact.cut_size if exact else None,
        exact_proved=exact.proved_optimal if exact else None,
        constructive_size=upper.cut_size if upper else None,
        constructive_bound=upper.meta.get("bound") if upper else None,
        timings=timings,
    )
    check_sandwich(row)
    return row


def check_sandwich(row: Row) -> None:
    chain = [
        ("lower_bound", row.lower_bound),
        ("exact_or_incumbent", row.exact_or_incumbent if row.exact_proved else None),
        ("constructive_size", row.constructive_size),
        ("constructive_bound", row.constructive_bound),
    ]
    present = [(name, v) for name, v in chain if v is not None]
    for (a, va), (b, vb) in zip(present, present[1:]):
        if va > vb:
            raise SandwichViolation(f"k={row.k}: {a}={va} > {b}={vb}")
    if row.exact_or_incumbent is not None and row.lower_bound is not None:
        if row.lower_bound > row.exact_or_incumbent:
            raise SandwichViolation(
                f"k={row.k}: lower bound {row.lower_bound} exceeds incumbent {row.exact_or_incumbent}"
            )


def run_bound_sandwich(
    params: FractalParams, k_range: Iterable[int], epsilon: float = 0.5, **kwargs
) -> list[Row]:
    return [sandwich_row(params, k, epsilon, **kwargs) for k in sorted(k_range)]


# ---------------------------------------------------------------------------
# fitting


@dataclass(frozen=True)
class Fit:
    slope: float
    intercept: float
    max_residual: float
    points: int


def fit_exponent(rows: Sequence, column: str | Callable | None = None) -> Fit:
    """Least-squares slope of log(value) against log(n).

    ``rows`` are either ``(n, value)`` pairs or Row objects with ``column``
    naming the value attribute.
    """
    if column is None:
        pts = [(float(n), float(v)) for n, v in rows]
    else:
        get = column if callable(column) else (lambda r: getattr(r, column))
        pts = [(float(r.n), float(get(r))) for r in rows if get(r) is not None]
    if len(pts) < 3:
        raise ValueError(f"need at least 3 points to fit, got {len(pts)}")
    n = np.array([p[0] for p in pts])
    v = np.array([p[1] for p in pts])
    if np.any(n <= 0) or np.any(v <= 0):
        raise ValueError("fit needs positive sizes and values")
    x, y = np.log(n), np.log(v)
    if np.ptp(x) == 0:
        raise ValueError("all sizes are equal; slope undefined")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    return Fit(float(slope), float(intercept), float(np.abs(resid).max()), len(pts))


# ---------------------------------------------------------------------------
# reports


@dataclass
class ExperimentReport:
    params: FractalParams
    suite: str
    epsilon: float
    rows: list[Row]
    target_E: float | None
    fits: dict[str, Fit] = field(default_factory=dict)
    counts: list[dict] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)

    def to_dict(self, timings: bool = True) -> dict:
        rows = [asdict(r) if timings else r.canonical() for r in self.rows]
        return {
            "suite": self.suite,
            "params": self.params.to_dict(),
            "epsilon": self.epsilon,
            "target_E": self.target_E,
            "rows": rows,
            "fits": {k: asdict(v) for k, v in sorted(self.fits.items())},
            "slope_tolerance": SLOPE_TOLERANCE,
            "counts": self.counts,
            "notes": self.notes,
        }

    def canonical_json(self) -> str:
        return json.dumps(self.to_dict(timings=False), sort_keys=True, separators=(",", ":"))

    def digest(self) -> str:
        return hashlib.sha256(self.canonical_json().encode()).hexdigest()

    def to_json(self) -> str:
        out = self.to_dict()
        out["digest"] = self.digest()
        return json.dumps(out, sort_keys=True, indent=2)

    def to_csv(self) -> str:
        buf = io.StringIO()
        cols = [
            "k",
            "n",
            "lower_bound",
            "lower_kind",
            "exact_or_incumbent",
            "exact_proved",
            "constructive_size",
            "constructive_bound",
        ]
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(cols)
        for r in self.rows:
            w.writerow(["" if getattr(r, c) is None else getattr(r, c) for c in cols])
        return buf.getvalue()

    @property
    def ok(self) -> bool:
        return all(r["ok"] for r in self.counts)


def build_report(
    params: FractalParams,
    k_range: Iterable[int],
    epsilon: float = 0.5,
    *,
    suite: str = "sandwich",
    fit_k_min: int = 3,
    **kwargs,
) -> ExperimentReport:
    rows = run_bound_sandwich(params, k_range, epsilon, **kwargs)
    try:
        target = exponent_E(params)
    except ValueError:
        target = None
    report = ExperimentReport(params, suite, epsilon, rows, target)
    fit_rows = [r for r in rows if r.k >= fit_k_min]
    for column in ("lower_bound", "constructive_size"):
        usable = [r for r in fit_rows if getattr(r, column)]
        if len(usable) >= 3:
            report.fits[column] = fit_exponent(usable, column)
    if params.m > 1:
        report.notes.append("m > 1: no certified lower bound; lower column left empty")
    return report


def carpet_sandwich(k_max: int = 8, **kwargs) -> ExperimentReport:
    kwargs.setdefault("max_vertices", 4_000_000)
    return build_report(CARPET, range(1, k_max + 1), suite="carpet-sandwich", **kwargs)


def count_report(params: FractalParams, k_max: int, **kwargs) -> ExperimentReport:
    try:
        target = exponent_E(params)
    except ValueError:
        target = None
    counts = run_count_checks(params, k_max, **kwargs)
    return ExperimentReport(params, "counts", 0.5, [], target, counts=counts)


def oracle_check(samples: int = 200, max_size: int = 9, seed: int = 0, params: FractalParams = CARPET, k: int = 2):
    """Branch and bound vs subset enumeration on random connected induced subgraphs.

    Returns a list of discrepancy dicts (empty when everything agrees).
    """
    rng = np.random.default_rng(seed)
    host = build_level_graph(params, k)
    adj = host.adjacency_lists()
    bad = []
    for _ in range(samples):
        sub = random_connected_subgraph(host, adj, int(rng.integers(1, max_size + 1)), rng)
        sub_adj = sub.adjacency_lists()
        for eps in (0.25, 0.5, 0.75):
            got = cut_epsilon_exact(sub, eps)
            want = len(naive_cut_ids(sub_adj, eps))
            if got.cut_size != want or not got.proved_optimal or not got.valid:
                bad.append({"vertices": sub.vertices, "epsilon": eps, "bb": got.cut_size, "naive": want})
    return bad


def random_connected_subgraph(host: LevelGraph, adj, size: int, rng) -> LevelGraph:
    """Grow a connected vertex set from a random seed by random frontier picks."""
    start = int(rng.integers(host.n))
    chosen = [start]
    inside = {start}
    frontier = sorted(set(adj[start]))
    while len(chosen) < size and frontier:
        v = frontier.pop(int(rng.integers(len(frontier))))
        if v in inside:
            continue
        inside.add(v)
        chosen.append(v)
        frontier = sorted(set(frontier) | {w for w in adj[v] if w not in inside})
    return host.induced(chosen)
