"""Assemble the per-point standard-form QP in split variables.

For a point x with neighbor matrix G (D x K) the objective

    gamma * ||w||_2^2 + lambda * ||w||_1 + ||x - G w||_2^2,   1^T w = 1,

is rewritten with w = w+ - w-, |w_j| = w+_j + w-_j, giving

    minimize 1/2 u^T Q u + c^T u   s.t.  A u = 1,  u >= 0

over u = (w+, w-) in R^{2K}, with

    Q = [[M, -M], [-M, M]],  M = 2 (G^T G + gamma I)
    c = [lambda*1 - 2 G^T x ; lambda*1 + 2 G^T x]
    A = [1 ... 1, -1 ... -1]

The dropped constant ||x||^2 is kept on the record so reported objective
values match the un-reformulated objective exactly.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatch
from .neighbors import NeighborSet
from .pointcloud import PointCloud


@dataclass(frozen=True)
class ChsaParams:
    """Uniformity weight gamma and convexity weight lambda, both >= 0."""

    gamma: float
    lam: float

    def __post_init__(self):
        if self.gamma < 0 or self.lam < 0:
            raise ValueError("gamma and lambda must be non-negative")


@dataclass(frozen=True)
class QpProblem:
    Q: np.ndarray
    c: np.ndarray
    A: np.ndarray
    b: float
    K: int
    constant_term: float

    def objective(self, u: np.ndarray) -> float:
        """1/2 u^T Q u + c^T u + constant_term."""
        u = np.asarray(u, dtype=float)
        return float(0.5 * u @ self.Q @ u + self.c @ u + self.constant_term)


def assemble(x: np.ndarray, neighbors: NeighborSet, cloud: PointCloud,
             params: ChsaParams) -> QpProblem:
    """Build the split-variable QP for one point and its neighbor set."""
    x = np.asarray(x, dtype=float)
    G = cloud.points[neighbors.indices].T  # D x K
    if G.shape[0] != x.shape[0]:
        raise DimensionMismatch(
            f"point has dim {x.shape[0]}, cloud has dim {G.shape[0]}")
    return assemble_raw(x, G, params)


def assemble_raw(x: np.ndarray, G: np.ndarray, params: ChsaParams) -> QpProblem:
    """Same as `assemble` but from an explicit D x K neighbor matrix."""
    x = np.asarray(x, dtype=float)
    G = np.asarray(G, dtype=float)
    if G.shape[0] != x.shape[0]:
        raise DimensionMismatch(
            f"point has dim {x.shape[0]}, neighbor matrix has dim {G.shape[0]}")
    K = G.shape[1]
    M = 2.0 * (G.T @ G + params.gamma * np.eye(K))
    Q = np.block([[M, -M], [-M, M]])
    gx = 2.0 * (G.T @ x)
    c = np.concatenate([params.lam - gx, params.lam + gx])
    A = np.concatenate([np.ones(K), -np.ones(K)])[None, :]
    return QpProblem(Q=Q, c=c, A=A, b=1.0, K=K,
                     constant_term=float(x @ x))


def recover_weights(u: np.ndarray) -> np.ndarray:
    """w_j = u_j - u_{K+j} for the split vector u = (w+, w-)."""
    u = np.asarray(u, dtype=float)
    K = u.shape[0] // 2
    return u[:K] - u[K:]


def dump_csv(problem: QpProblem, path: str) -> None:
    """Debug dump of (Q, c, A, b) for cross-checking with external solvers."""
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["K", problem.K, "b", repr(problem.b),
                         "constant_term", repr(problem.constant_term)])
        for row in problem.Q:
            writer.writerow(["Q"] + [repr(v) for v in row])
        writer.writerow(["c"] + [repr(v) for v in problem.c])
        writer.writerow(["A"] + [repr(v) for v in problem.A[0]])
