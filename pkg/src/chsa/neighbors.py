"""Exact K-nearest neighbors under the Euclidean metric.

Brute-force O(D p^2) pairwise distances; ties broken toward the smaller
point index so output is fully deterministic.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import KTooLarge
from .pointcloud import PointCloud


@dataclass(frozen=True)
class NeighborSet:
    """K nearest neighbors of point `owner`, nearest first."""

    owner: int
    indices: np.ndarray
    distances: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "indices", np.asarray(self.indices, dtype=np.intp))
        object.__setattr__(self, "distances", np.asarray(self.distances, dtype=np.float64))


def knn_all(cloud: PointCloud, k: int) -> list:
    """Exact K nearest neighbors for every point.

    Distances are compared on squared values; stored distances are rooted.
    """
    p = cloud.size
    if not 1 <= k <= p - 1:
        raise KTooLarge(f"K={k} must satisfy 1 <= K <= p-1 = {p - 1}")
    pts = cloud.points
    sq = np.sum(pts * pts, axis=1)
    # full squared-distance matrix; p is desk scale so dense is fine
    d2 = sq[:, None] + sq[None, :] - 2.0 * (pts @ pts.T)
    np.clip(d2, 0.0, None, out=d2)
    np.fill_diagonal(d2, np.inf)
    out = []
    idx_all = np.arange(p)
    for i in range(p):
        # lexsort: primary key squared distance, secondary key index
        order = np.lexsort((idx_all, d2[i]))[:k]
        out.append(NeighborSet(owner=i, indices=order,
                               distances=np.sqrt(d2[i, order])))
    return out
