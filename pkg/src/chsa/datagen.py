"""Seeded synthetic generators for the benchmark experiments.

All generators draw from a Philox 64-bit counter-based PRNG keyed only by
the spec's seed, so a spec reproduces the same cloud on any platform.
Draw order is documented per kind and is part of the interface contract.
"""

from __future__ import annotations

import itertools
import json
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import DegenerateVertices, UnknownKind
from .pointcloud import PointCloud

KINDS = ("square-with-boundary", "corners-plus-cluster",
         "offset-cluster-with-outlier", "logistic-plane",
         "cube-with-vertices", "simplex-mixture")


@dataclass(frozen=True)
class GenSpec:
    kind: str
    seed: int = 0
    n_random: Optional[int] = None   # count of random points (kind default if None)
    n_boundary: int = 10             # square-with-boundary only
    dim: int = 20                    # simplex-mixture ambient dimension
    n_vertices: int = 3              # simplex-mixture vertex count
    n_samples: int = 1000            # simplex-mixture sample count
    cluster_halfwidth: float = 0.25  # cluster kinds: half-width of the uniform box
    logistic_loc: float = 0.5
    logistic_scale: float = 0.1

    @staticmethod
    def from_json(path: str) -> "GenSpec":
        with open(path) as f:
            obj = json.load(f)
        return GenSpec(**obj)


@dataclass(frozen=True)
class SimplexMixtureSpec:
    vertices: np.ndarray  # N x D
    num_samples: int
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "vertices",
                           np.asarray(self.vertices, dtype=np.float64))
        if self.vertices.shape[0] < 2:
            raise ValueError("need at least 2 vertices")


def _rng(seed: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(seed))


def gen(spec: GenSpec) -> PointCloud:
    """Generate the named point distribution; see KINDS."""
    if spec.kind == "square-with-boundary":
        return _gen_square_with_boundary(spec)
    if spec.kind == "corners-plus-cluster":
        return _gen_corners_plus_cluster(spec)
    if spec.kind == "offset-cluster-with-outlier":
        return _gen_offset_cluster(spec)
    if spec.kind == "logistic-plane":
        return _gen_logistic(spec)
    if spec.kind == "cube-with-vertices":
        return _gen_cube(spec)
    if spec.kind == "simplex-mixture":
        cloud, _ = gen_simplex_mixture(default_simplex_spec(spec))
        return cloud
    raise UnknownKind(f"unknown generator kind {spec.kind!r}; options: {KINDS}")


def _gen_square_with_boundary(spec: GenSpec) -> PointCloud:
    """Uniform points in the unit square plus extra points on its edges."""
    rng = _rng(spec.seed)
    n = 50 if spec.n_random is None else spec.n_random
    interior = rng.random((n, 2))
    # each boundary point: pick an edge, then a uniform position along it
    edges = rng.integers(0, 4, size=spec.n_boundary)
    ts = rng.random(spec.n_boundary)
    boundary = np.empty((spec.n_boundary, 2))
    for i, (e, t) in enumerate(zip(edges, ts)):
        if e == 0:
            boundary[i] = (t, 0.0)
        elif e == 1:
            boundary[i] = (t, 1.0)
        elif e == 2:
            boundary[i] = (0.0, t)
        else:
            boundary[i] = (1.0, t)
    pts = np.vstack([interior, boundary])
    labels = ["interior"] * n + ["boundary"] * spec.n_boundary
    return PointCloud(pts, tuple(labels))


def _gen_corners_plus_cluster(spec: GenSpec) -> PointCloud:
    rng = _rng(spec.seed)
    n = 50 if spec.n_random is None else spec.n_random
    corners = np.array(list(itertools.product([0.0, 1.0], repeat=2)))
    h = spec.cluster_halfwidth
    cluster = 0.5 + (rng.random((n, 2)) - 0.5) * 2 * h
    pts = np.vstack([corners, cluster])
    labels = ["inserted-vertex"] * 4 + ["interior"] * n
    return PointCloud(pts, tuple(labels))


def _gen_offset_cluster(spec: GenSpec) -> PointCloud:
    rng = _rng(spec.seed)
    n = 50 if spec.n_random is None else spec.n_random
    h = spec.cluster_halfwidth
    cluster = 1.0 + (rng.random((n, 2)) - 0.5) * 2 * h
    pts = np.vstack([[[0.0, 0.0]], cluster])
    labels = ["outlier"] + ["interior"] * n
    return PointCloud(pts, tuple(labels))


def _gen_logistic(spec: GenSpec) -> PointCloud:
    """Coordinate-wise logistic samples min-max rescaled into [1e-8, 1]."""
    rng = _rng(spec.seed)
    n = 50 if spec.n_random is None else spec.n_random
    raw = rng.logistic(spec.logistic_loc, spec.logistic_scale, size=(n, 2))
    lo, hi = raw.min(axis=0), raw.max(axis=0)
    pts = 1e-8 + (raw - lo) / (hi - lo) * (1.0 - 1e-8)
    return PointCloud(pts)


def _gen_cube(spec: GenSpec) -> PointCloud:
    rng = _rng(spec.seed)
    n = 2000 if spec.n_random is None else spec.n_random
    interior = rng.random((n, 3))
    corners = np.array(list(itertools.product([0.0, 1.0], repeat=3)))
    pts = np.vstack([interior, corners])
    labels = ["interior"] * n + ["inserted-vertex"] * 8
    return PointCloud(pts, tuple(labels))


def default_simplex_spec(spec: GenSpec) -> SimplexMixtureSpec:
    """Seeded random vertices in [0,1]^D, stand-ins for measured spectral
    signatures.

    The raw uniform draws are pulled toward their centroid so the
    simplex has a moderate diameter (side ~0.6 for D=20) comparable to a
    rescaled cluster of measured signatures, rather than spanning the
    whole cube.  At that scale the usual parameter choices separate the
    vertices from the near-boundary mixtures cleanly.
    """
    rng = _rng(spec.seed)
    raw = rng.random((spec.n_vertices, spec.dim))
    centroid = raw.mean(axis=0)
    vertices = centroid + 0.35 * (raw - centroid)
    return SimplexMixtureSpec(vertices=vertices, num_samples=spec.n_samples,
                              seed=spec.seed + 1)


def gen_simplex_mixture(spec: SimplexMixtureSpec) -> tuple:
    """Vertices followed by convex mixtures with uniform-simplex abundances.

    Returns (cloud, abundances) where abundances has one row per cloud
    point (vertices get their one-hot rows).
    """
    verts = spec.vertices
    n_vert, dim = verts.shape
    if np.linalg.matrix_rank(verts[1:] - verts[0]) < n_vert - 1:
        warnings.warn("simplex vertices are affinely dependent",
                      DegenerateVertices)
    rng = _rng(spec.seed)
    # normalized-exponential construction: Exp(1) draws scaled to sum 1
    # give abundances uniform on the simplex
    expo = rng.exponential(1.0, size=(spec.num_samples, n_vert))
    ab = expo / expo.sum(axis=1, keepdims=True)
    mixtures = ab @ verts
    pts = np.vstack([verts, mixtures])
    labels = ["inserted-vertex"] * n_vert + ["mixture"] * spec.num_samples
    abundances = np.vstack([np.eye(n_vert), ab])
    return PointCloud(pts, tuple(labels)), abundances
