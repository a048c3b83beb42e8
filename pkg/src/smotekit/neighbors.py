"""Brute-force k-nearest-neighbor search within the minority class.

Exact O(T^2) search with a fixed tie rule: candidates sort by ascending
distance, then ascending row index. No spatial index; the interface leaves
room for one later.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .data import Row


@dataclass(frozen=True)
class NeighborList:
    """Per-row neighbor indices, nearest first; a row never lists itself."""

    lists: tuple

    def __len__(self) -> int:
        return len(self.lists)


def knn_minority(
    minority_rows: Sequence[Row], k: int, metric: Callable[[Row, Row], float]
) -> NeighborList:
    """k nearest minority neighbors of every minority row.

    Args:
        minority_rows: the minority rows only; synthetic rows never join
            the candidate pool.
        k: neighbors requested; each list is clamped to ``min(k, T - 1)``.
        metric: pairwise distance. Objects exposing a vectorized
            ``pairwise(rows)`` method (the metric classes in
            :mod:`smotekit.distance`) are used as such; any plain callable
            ``metric(a, b) -> float`` also works.

    Ties resolve by ascending row index, so the output is deterministic for
    a fixed input order.
    """
    t = len(minority_rows)
    if t < 2:
        raise ValueError(f"need at least 2 rows for neighbor search, got {t}")
    if k < 1:
        raise ValueError(f"k must be at least 1, got {k}")
    if hasattr(metric, "pairwise"):
        dist = np.asarray(metric.pairwise(minority_rows), dtype=float)
    else:
        dist = np.empty((t, t))
        for i in range(t):
            dist[i, i] = 0.0
            for j in range(i + 1, t):
                dist[i, j] = dist[j, i] = metric(minority_rows[i], minority_rows[j])
    width = min(k, t - 1)
    indices = np.arange(t)
    lists = []
    for i in range(t):
        order = np.lexsort((indices, dist[i]))
        nearest = [int(j) for j in order if j != i][:width]
        lists.append(tuple(nearest))
    return NeighborList(tuple(lists))
