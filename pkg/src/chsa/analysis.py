"""Validation oracles and projections.

These stay independent of the stratification path so they can serve as
ground truth in tests: an exact planar hull, a reconstruction-QP vertex
oracle for any dimension, the cube boundary distance, and a 2-D PCA
projection for plotting high-dimensional runs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import OutOfCube, WrongDimension
from .ipm import SolverConfig, solve
from .pointcloud import PointCloud
from .qp import ChsaParams, QpProblem, assemble_raw


@dataclass(frozen=True)
class HullResult:
    vertex_indices: frozenset
    method: str


def hull_2d(cloud: PointCloud) -> HullResult:
    """Exact planar convex hull vertices via the monotone-chain scan.

    Collinear boundary points are not vertices (strict turns only).
    """
    if cloud.dim != 2:
        raise WrongDimension(f"hull_2d needs D = 2, got D = {cloud.dim}")
    if cloud.size < 3:
        raise WrongDimension("hull_2d needs at least 3 points")
    pts = cloud.points
    order = np.lexsort((pts[:, 1], pts[:, 0]))

    def cross(o, a, b):
        return ((pts[a, 0] - pts[o, 0]) * (pts[b, 1] - pts[o, 1])
                - (pts[a, 1] - pts[o, 1]) * (pts[b, 0] - pts[o, 0]))

    def half(seq):
        chain = []
        for idx in seq:
            while len(chain) > 1 and cross(chain[-2], chain[-1], idx) <= 0:
                chain.pop()
            chain.append(idx)
        return chain

    upper = half(order)
    lower = half(order[::-1])
    hull = set(int(i) for i in upper[:-1] + lower[:-1])
    return HullResult(vertex_indices=frozenset(hull), method="graham-2d")


_ORACLE_PARAMS = ChsaParams(gamma=1e-10, lam=0.0)  # tiny gamma regularizes only
_ORACLE_CONFIG = SolverConfig(max_iters=200)


def lp_vertex_oracle(cloud: PointCloud, i: int,
                     residual_tol: float = 1e-6) -> bool:
    """True iff no convex combination of the other points reconstructs x_i.

    Minimizes the reconstruction error over the simplex (w >= 0 directly,
    so only the positive block of the split assembly is kept) with the
    interior-point solver; residual above the tolerance means x_i is a
    hull vertex.
    """
    x = cloud.points[i]
    others = np.delete(np.arange(cloud.size), i)
    G = cloud.points[others].T
    split = assemble_raw(x, G, _ORACLE_PARAMS)
    K = split.K
    problem = QpProblem(Q=split.Q[:K, :K], c=split.c[:K],
                        A=np.ones((1, K)), b=1.0, K=K,
                        constant_term=split.constant_term)
    sol = solve(problem, _ORACLE_CONFIG)
    residual = float(np.linalg.norm(x - G @ sol.u))
    return residual > residual_tol


def cube_boundary_distance(point: np.ndarray) -> float:
    """Distance from a point of the unit cube to the cube's boundary."""
    point = np.asarray(point, dtype=float)
    if np.any(point < 0) or np.any(point > 1):
        raise OutOfCube(f"point {point} outside the unit cube")
    return float(np.min(np.minimum(point, 1.0 - point)))


def pca_2d(cloud: PointCloud) -> np.ndarray:
    """Project onto the top two principal directions.

    Sign convention: the largest-magnitude loading of each axis is made
    positive, so output is deterministic.  Rank-1 data gets a zero second
    axis.
    """
    if cloud.size < 3:
        raise ValueError("pca_2d needs at least 3 points")
    centered = cloud.points - cloud.points.mean(axis=0)
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    axes = vt[:2]
    if axes.shape[0] < 2:
        axes = np.vstack([axes, np.zeros(cloud.dim)])
        s = np.concatenate([s, [0.0]])
    if s[1] <= s[0] * 1e-14:
        axes[1] = 0.0
    for row in range(2):
        j = int(np.argmax(np.abs(axes[row])))
        if axes[row, j] < 0:
            axes[row] = -axes[row]
    return centered @ axes.T


def explained_variance_2d(cloud: PointCloud) -> np.ndarray:
    """Fraction of total variance captured by each of the two axes."""
    centered = cloud.points - cloud.points.mean(axis=0)
    _, s, _ = np.linalg.svd(centered, full_matrices=False)
    var = s ** 2
    out = np.zeros(2)
    out[: min(2, var.shape[0])] = var[:2] / var.sum()
    return out
