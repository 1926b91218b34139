from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any

import numpy as np

from ..fractal_core import LevelGraph
from .components import components


def size_limit(epsilon: float, n: int) -> int:
    """Largest component size allowed by the balance condition |L| <= epsilon * n."""
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    # guard against 0.1 * 30 = 3.0000000000000004 style rounding
    return math.floor(epsilon * n + 1e-9)


@dataclass(frozen=True)
class CutResult:
    cutset: tuple[tuple[int, ...], ...]
    epsilon: float
    n: int
    component_sizes: tuple[int, ...]
    valid: bool
    proved_optimal: bool | None = None
    lower_bound: int | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    @property
    def cut_size(self) -> int:
        return len(self.cutset)

    @property
    def largest_component(self) -> int:
        return self.component_sizes[0] if self.component_sizes else 0

    @classmethod
    def evaluate(cls, g: LevelGraph, ids, epsilon: float, **kwargs) -> "CutResult":
        ids = np.unique(np.asarray(list(ids) if not isinstance(ids, np.ndarray) else ids, dtype=np.int64))
        sizes = components(g, ids)
        largest = sizes[0] if sizes else 0
        cutset = tuple(g.point(i) for i in ids)
        return cls(
            cutset=cutset,
            epsilon=epsilon,
            n=g.n,
            component_sizes=tuple(sizes),
            valid=largest <= size_limit(epsilon, g.n) if g.n else True,
            **kwargs,
        )

    def to_dict(self) -> dict[str, Any]:
        return {
            "epsilon": self.epsilon,
            "cut_size": self.cut_size,
            "cutset": [list(p) for p in self.cutset],
            "largest_component": self.largest_component,
            "proved_optimal": self.proved_optimal,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)
