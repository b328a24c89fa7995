"""Primal-dual interior-point solver for the standard-form convex QP

    minimize 1/2 u^T Q u + c^T u   s.t.  A u = b,  u >= 0.

Infeasible-start long-step path following with a fixed centering
parameter.  Each Newton step solves the full unreduced KKT system

    [ Q   A^T  -I ] [du]     [ Q u + c + A^T y - z ]
    [ A   0    0  ] [dy] = - [ A u - b             ]
    [ Z   0    U  ] [dz]     [ U Z e - sigma mu e  ]

of size (2n + m).  Two equivalent backends compute the step:

  * "dense"    — factor the (4K+1) x (4K+1) matrix directly;
  * "woodbury" — exploit Q = B M B^T with B = [I; -I] and the constant
                 K x K block M = 2 (G^T G + gamma I): eliminate dz, apply
                 the Woodbury identity to (Q + U^{-1} Z), and solve one
                 K x K Cholesky per iteration.  Same step up to rounding,
                 O(K^2) instead of O(K^3) per iteration.

The default "auto" picks "woodbury" when the problem carries its block
structure and gamma is large enough to keep M comfortably invertible.
Everything is deterministic: no randomized pivoting, fixed start.

With ``polish=True`` a converged run is refined by an active-set
crossover (see _polish) that lands on an exact KKT point; useful when
coordinates are weakly active or the curvature along some direction is
of the order of the duality gap.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
import scipy.linalg

from .errors import KktSingular
from .qp import QpProblem

_REG = 1e-12  # static diagonal regularization floor


@dataclass(frozen=True)
class SolverConfig:
    tol_gap: float = 1e-9
    tol_feas: float = 1e-8
    max_iters: int = 100
    step_fraction: float = 0.99
    centering_sigma: float = 0.1
    newton_backend: str = "auto"  # auto | dense | woodbury
    start_scale: float = 1.0      # multiplier on the default interior start
    polish: bool = False          # active-set refinement after convergence

    def __post_init__(self):
        if self.start_scale <= 0:
            raise ValueError("start_scale must be positive")
        if not 0 < self.step_fraction < 1:
            raise ValueError("step_fraction must lie in (0, 1)")
        if self.tol_gap <= 0 or self.tol_feas <= 0:
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if self.newton_backend not in ("auto", "dense", "woodbury"):
            raise ValueError(f"unknown newton_backend {self.newton_backend!r}")


@dataclass
class SolverSolution:
    u: np.ndarray
    y: float
    z: np.ndarray
    iterations: int
    converged: bool
    final_gap: float
    final_residuals: tuple


def _max_step(v: np.ndarray, dv: np.ndarray, frac: float) -> float:
    """Longest alpha <= 1 keeping v + alpha dv >= (1 - frac) v."""
    neg = dv < 0
    if not np.any(neg):
        return 1.0
    return float(min(1.0, frac * np.min(-v[neg] / dv[neg])))


class _DenseStep:
    def __init__(self, problem: QpProblem):
        n = problem.c.shape[0]
        self.n = n
        kkt = np.zeros((2 * n + 1, 2 * n + 1))
        kkt[:n, :n] = problem.Q
        kkt[:n, n] = problem.A[0]
        kkt[:n, n + 1:] = -np.eye(n)
        kkt[n, :n] = problem.A[0]
        kkt[np.arange(2 * n + 1), np.arange(2 * n + 1)] += _REG
        self.kkt = kkt
        self.rows = np.arange(n + 1, 2 * n + 1)

    def __call__(self, u, z, r1, r2, r3, it):
        n = self.n
        self.kkt[self.rows, :n] = np.diag(z)
        self.kkt[self.rows, self.rows] = u + _REG
        rhs = np.concatenate([r1, [r2], r3])
        try:
            lu, piv = scipy.linalg.lu_factor(self.kkt.copy(), check_finite=False)
            step = scipy.linalg.lu_solve((lu, piv), rhs, check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            raise KktSingular(f"KKT system singular at iteration {it}") from exc
        if not np.all(np.isfinite(step)):
            raise KktSingular(f"non-finite KKT step at iteration {it}")
        return step[:n], float(step[n]), step[n + 1:]


class _WoodburyStep:
    """Reduced Newton step via block elimination + Woodbury identity.

    With H = Sigma + B M B^T, Sigma = diag(z/u), the inverse-free form

        H^{-1} v = S^{-1} v - S^{-1} B [(I + M D)^{-1} M] B^T S^{-1} v,
        D = B^T Sigma^{-1} B  (diagonal),

    avoids inverting M, so gamma ~ 0 (singular M) stays well defined:
    M D is similar to a PSD matrix, hence I + M D is nonsingular.
    """

    def __init__(self, problem: QpProblem):
        K = problem.K
        self.K = K
        self.a = problem.A[0]
        self.M = problem.Q[:K, :K]

    def _apply_hinv(self, lu_piv, sigma, v):
        K = self.K
        t = v / sigma
        g = self.M @ (t[:K] - t[K:])
        h = scipy.linalg.lu_solve(lu_piv, g, check_finite=False)
        corr = np.concatenate([h, -h]) / sigma
        return t - corr

    def __call__(self, u, z, r1, r2, r3, it):
        K = self.K
        sigma = z / u + _REG
        d = 1.0 / sigma[:K] + 1.0 / sigma[K:]
        inner = np.eye(K) + self.M * d[None, :]
        try:
            lu_piv = scipy.linalg.lu_factor(inner, check_finite=False)
        except scipy.linalg.LinAlgError as exc:
            raise KktSingular(f"reduced system singular at iteration {it}") from exc
        rbar = r1 + r3 / u
        hr = self._apply_hinv(lu_piv, sigma, rbar)
        ha = self._apply_hinv(lu_piv, sigma, self.a)
        denom = float(self.a @ ha)
        if denom <= 0 or not np.isfinite(denom):
            raise KktSingular(f"degenerate Schur complement at iteration {it}")
        dy = float((self.a @ hr - r2) / denom)
        du = hr - ha * dy
        dz = (r3 - z * du) / u
        if not (np.all(np.isfinite(du)) and np.all(np.isfinite(dz))):
            raise KktSingular(f"non-finite KKT step at iteration {it}")
        return du, dy, dz


def _make_stepper(problem: QpProblem, config: SolverConfig):
    backend = config.newton_backend
    if backend == "auto":
        backend = "woodbury" if _has_split_structure(problem) else "dense"
    if backend == "woodbury":
        return _WoodburyStep(problem)
    return _DenseStep(problem)


def _has_split_structure(problem: QpProblem) -> bool:
    """True if Q = [[M,-M],[-M,M]] with symmetric PSD-shaped M."""
    K = problem.K
    if problem.Q.shape != (2 * K, 2 * K):
        return False
    M = problem.Q[:K, :K]
    return bool(np.array_equal(problem.Q[K:, K:], M)
                and np.array_equal(problem.Q[:K, K:], -M)
                and np.array_equal(M, M.T))


def _polish(problem: QpProblem, u, y, z):
    """Active-set refinement after interior-point convergence.

    Starting from the active set the barrier suggests (z dominates u),
    solve the reduced equality KKT system exactly, then repair the set:
    drop the most negative free coordinate / free the most negative
    active multiplier, one swap at a time (the usual NNLS-style loop).
    Accept only a point passing the full KKT sign conditions; otherwise
    return the interior iterate unchanged.  This pins coordinates the
    barrier leaves slightly off their bounds, e.g. weakly active ones or
    directions of tiny curvature.
    """
    a = problem.A[0]
    n = u.shape[0]
    free = u > z
    tol = 1e-9 * (1.0 + float(np.max(np.abs(problem.c))))
    for _ in range(4 * n):
        idx = np.flatnonzero(free)
        m = idx.shape[0]
        if m == 0:
            return u, y, z
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = problem.Q[np.ix_(idx, idx)]
        kkt[:m, m] = a[idx]
        kkt[m, :m] = a[idx]
        rhs = np.concatenate([-problem.c[idx], [problem.b]])
        sol, _, _, _ = np.linalg.lstsq(kkt, rhs, rcond=None)
        u_new = np.zeros(n)
        u_new[idx] = sol[:m]
        y_new = float(sol[m])
        if float(u_new[idx].min()) < -tol:
            free[idx[int(np.argmin(u_new[idx]))]] = False
            continue
        z_new = problem.Q @ u_new + problem.c + a * y_new
        z_act = np.where(free, np.inf, z_new)
        if float(z_act.min()) < -tol:
            free[int(np.argmin(z_act))] = True
            continue
        if (float(np.max(np.abs(z_new[idx]))) > tol
                or abs(float(a @ u_new - problem.b)) > tol):
            break
        return np.maximum(u_new, 0.0), y_new, np.maximum(z_new, 0.0)
    return u, y, z


def solve(problem: QpProblem, config: SolverConfig = SolverConfig(),
          trace_path: Optional[str] = None) -> SolverSolution:
    """Solve the QP; non-convergence is reported via the flag, not raised."""
    Q, c, b = problem.Q, problem.c, problem.b
    A = problem.A[0]
    n = c.shape[0]

    # Normalize small-magnitude objectives so the gap tolerance is
    # effectively relative; u is unchanged, duals are rescaled back below.
    # Only scaling up (norm < 1) keeps the absolute convergence guarantees.
    norm = max(float(np.max(np.abs(Q))), float(np.max(np.abs(c))))
    if 0.0 < norm < 1.0:
        inner = QpProblem(Q=Q / norm, c=c / norm, A=problem.A, b=b,
                          K=problem.K, constant_term=0.0)
        sol = solve(inner, config, trace_path)
        return replace(sol, y=sol.y * norm, z=sol.z * norm,
                       final_gap=sol.final_gap * norm,
                       final_residuals=(sol.final_residuals[0],
                                        sol.final_residuals[1] * norm))

    cinf = float(np.max(np.abs(c)))
    scale = max(1.0, cinf)
    u = np.full(n, scale / n * config.start_scale)
    z = np.full(n, scale / n * config.start_scale)
    y = 0.0

    stepper = _make_stepper(problem, config)
    trace = [] if trace_path is not None else None
    converged = False
    r_dual = Q @ u + c + A * y - z
    r_pri = float(A @ u - b)
    gap = float(u @ z)
    it = 0
    for it in range(1, config.max_iters + 1):
        dual_norm = float(np.max(np.abs(r_dual)))
        if (abs(r_pri) <= config.tol_feas * (1 + abs(b))
                and dual_norm <= config.tol_feas * (1 + cinf)
                and gap <= config.tol_gap * n):
            converged = True
            it -= 1
            break
        if trace is not None:
            trace.append((it, gap, r_pri, dual_norm))

        mu = gap / n
        r3 = -(u * z - config.centering_sigma * mu)
        du, dy, dz = stepper(u, z, -r_dual, -r_pri, r3, it)

        alpha_p = _max_step(u, du, config.step_fraction)
        alpha_d = _max_step(z, dz, config.step_fraction)
        u = u + alpha_p * du
        y = y + alpha_d * dy
        z = z + alpha_d * dz

        r_dual = Q @ u + c + A * y - z
        r_pri = float(A @ u - b)
        gap = float(u @ z)
    if not converged:
        # iteration budget exhausted; the final iterate may still qualify
        converged = (abs(r_pri) <= config.tol_feas * (1 + abs(b))
                     and float(np.max(np.abs(r_dual))) <= config.tol_feas * (1 + cinf)
                     and gap <= config.tol_gap * n)

    if config.polish and converged:
        u, y, z = _polish(problem, u, y, z)
        r_dual = Q @ u + c + A * y - z
        r_pri = float(A @ u - b)
        gap = float(u @ z)

    if trace is not None:
        with open(trace_path, "w", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["iteration", "gap", "primal_residual", "dual_residual"])
            for row in trace:
                writer.writerow([row[0]] + [repr(v) for v in row[1:]])

    return SolverSolution(
        u=u, y=float(y), z=z, iterations=it, converged=converged,
        final_gap=gap,
        final_residuals=(abs(r_pri), float(np.max(np.abs(r_dual)))),
    )
