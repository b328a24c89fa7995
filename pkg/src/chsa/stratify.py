"""Run the stratification pipeline over a whole cloud.

Per point: assemble the split-variable QP over its K nearest neighbors,
solve it, recover the weight vector, record negativity / l2 norm /
residual diagnostics.  Points are independent, so the per-point work can
be farmed out to worker processes; results are always reassembled in
index order so reports are identical for any worker count.
"""

from __future__ import annotations

import csv
import json
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .errors import NotUnitScaled
from .ipm import SolverConfig, solve
from .neighbors import NeighborSet, knn_all
from .pointcloud import PointCloud, is_unit_scaled
from .qp import ChsaParams, assemble_raw, recover_weights

EPS_NEG_DEFAULT = 1e-7  # interior-point weights are never exactly zero

STRATA_LABELS = ("vertex-candidates", "near-boundary", "mid", "interior")


@dataclass
class WeightRecord:
    index: int
    neighbor_indices: np.ndarray
    weights: np.ndarray
    has_negative: bool
    l2_norm: float
    residual: float
    sum_dev: float
    iterations: int
    converged: bool
    rank: Optional[int] = None
    objective: float = 0.0


@dataclass
class StratificationReport:
    k: int
    params: ChsaParams
    solver: SolverConfig
    eps_neg: float
    records: list
    ranking: list = field(default_factory=list)
    strata: dict = field(default_factory=dict)
    seed: Optional[int] = None

    @property
    def flagged_indices(self) -> list:
        return [r.index for r in self.records if r.has_negative]


def _solve_one(points, x_idx, nbr_idx, params, solver_config, eps_neg):
    x = points[x_idx]
    G = points[nbr_idx].T
    problem = assemble_raw(x, G, params)
    sol = solve(problem, solver_config)
    w = recover_weights(sol.u)
    residual = float(np.linalg.norm(x - G @ w))
    return WeightRecord(
        index=int(x_idx),
        neighbor_indices=np.asarray(nbr_idx, dtype=np.intp),
        weights=w,
        has_negative=bool(np.min(w) < -eps_neg),
        l2_norm=float(np.linalg.norm(w)),
        residual=residual,
        sum_dev=abs(float(np.sum(w)) - 1.0),
        iterations=sol.iterations,
        converged=sol.converged,
        objective=problem.objective(sol.u),
    )


def _solve_chunk(args):
    points, indices, nbr_table, params, solver_config, eps_neg = args
    return [_solve_one(points, i, nbr_table[i], params, solver_config, eps_neg)
            for i in indices]


def run_chsa(cloud: PointCloud, k: int, params: ChsaParams,
             solver: SolverConfig = SolverConfig(),
             eps_neg: float = EPS_NEG_DEFAULT,
             workers: int = 1,
             allow_unscaled: bool = False,
             neighbor_sets: Optional[list] = None,
             seed: Optional[int] = None) -> StratificationReport:
    """Solve one QP per point and assemble the stratification report.

    The cloud is expected to be scaled into [0, 1]; pass allow_unscaled=True
    to proceed (with a warning) on raw data.
    """
    if not is_unit_scaled(cloud):
        if not allow_unscaled:
            raise NotUnitScaled(
                "cloud coordinates fall outside [0, 1]; apply scale_unit "
                "first or pass allow_unscaled=True")
        warnings.warn("running on data outside [0, 1]; parameter advice in "
                      "the docs assumes unit-scaled data")

    if neighbor_sets is None:
        neighbor_sets = knn_all(cloud, k)
    nbr_table = [ns.indices for ns in neighbor_sets]
    points = cloud.points
    p = cloud.size

    if workers <= 1:
        records = _solve_chunk((points, range(p), nbr_table, params, solver, eps_neg))
    else:
        chunks = np.array_split(np.arange(p), workers * 4)
        tasks = [(points, chunk, nbr_table, params, solver, eps_neg)
                 for chunk in chunks if len(chunk)]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_solve_chunk, tasks))
        records = [rec for part in parts for rec in part]
        records.sort(key=lambda r: r.index)

    report = StratificationReport(k=k, params=params, solver=solver,
                                  eps_neg=eps_neg, records=records, seed=seed)
    rank_by_norm(report)
    return report


def rank_by_norm(report: StratificationReport) -> list:
    """Sort indices by l2 norm descending (ties by ascending index)."""
    order = sorted(report.records, key=lambda r: (-r.l2_norm, r.index))
    report.ranking = [r.index for r in order]
    for pos, rec in enumerate(order):
        rec.rank = pos
    _label_strata(report)
    return report.ranking


def _label_strata(report: StratificationReport) -> None:
    """Quartiles of the norm ranking, largest norms first."""
    p = len(report.ranking)
    strata = {}
    for pos, idx in enumerate(report.ranking):
        strata[idx] = STRATA_LABELS[min(3, pos * 4 // p)]
    report.strata = strata


def negativity_sweep(cloud: PointCloud, k: int, param_list: list,
                     solver: SolverConfig = SolverConfig(),
                     **kwargs) -> list:
    """One CHSA run per (gamma, lambda) pair; neighbor sets computed once.

    Returns [(params, flagged_count, flagged_indices, report), ...].
    """
    if not param_list:
        raise ValueError("parameter list must be nonempty")
    neighbor_sets = knn_all(cloud, k)
    out = []
    for params in param_list:
        report = run_chsa(cloud, k, params, solver,
                          neighbor_sets=neighbor_sets, **kwargs)
        flagged = report.flagged_indices
        out.append((params, len(flagged), flagged, report))
    return out


# ---------------------------------------------------------------------------
# serialization
# ---------------------------------------------------------------------------

def report_to_json(report: StratificationReport) -> str:
    obj = {
        "schema": 1,
        "params": {
            "k": report.k,
            "gamma": report.params.gamma,
            "lambda": report.params.lam,
            "eps_neg": report.eps_neg,
            "seed": report.seed,
            "solver": {
                "tol_gap": report.solver.tol_gap,
                "tol_feas": report.solver.tol_feas,
                "max_iters": report.solver.max_iters,
                "step_fraction": report.solver.step_fraction,
                "centering_sigma": report.solver.centering_sigma,
            },
        },
        "records": [
            {
                "index": r.index,
                "weights": {int(j): float(w)
                            for j, w in zip(r.neighbor_indices, r.weights)},
                "has_negative": r.has_negative,
                "l2_norm": r.l2_norm,
                "residual": r.residual,
                "sum_dev": r.sum_dev,
                "iterations": r.iterations,
                "converged": r.converged,
                "rank": r.rank,
                "stratum": report.strata.get(r.index),
            }
            for r in report.records
        ],
        "ranking": report.ranking,
    }
    return json.dumps(obj, indent=1)


def write_report_json(report: StratificationReport, path: str) -> None:
    with open(path, "w") as f:
        f.write(report_to_json(report))


def write_report_csv(report: StratificationReport, path: str) -> None:
    with open(path, "w", newline="") as f:
        writer = csv.writer(f)
        writer.writerow(["index", "has_negative", "l2_norm", "residual",
                         "rank", "converged"])
        for r in report.records:
            writer.writerow([r.index, int(r.has_negative), repr(r.l2_norm),
                             repr(r.residual), r.rank, int(r.converged)])
