"""Shared test oracles, independent of the interior-point solve path."""

import numpy as np


def active_set_optimum(problem):
    """Global optimum by enumerating active nonnegativity subsets.

    For each subset of variables pinned to zero, solve the remaining
    equality-constrained QP through its KKT linear system directly and
    keep the best feasible candidate.  Exponential in 2K; only for small K.
    """
    n = problem.c.shape[0]
    best_val, best_u = np.inf, None
    for mask in range(1 << n):
        free = [j for j in range(n) if not (mask >> j) & 1]
        if not free:
            continue
        m = len(free)
        kkt = np.zeros((m + 1, m + 1))
        kkt[:m, :m] = problem.Q[np.ix_(free, free)]
        kkt[:m, m] = problem.A[0, free]
        kkt[m, :m] = problem.A[0, free]
        rhs = np.concatenate([-problem.c[free], [problem.b]])
        sol, *_ = np.linalg.lstsq(kkt, rhs, rcond=None)
        if np.max(np.abs(kkt @ sol - rhs)) > 1e-8:
            continue  # inconsistent system for this active set
        uf = sol[:m]
        if np.min(uf) < -1e-10:
            continue
        u = np.zeros(n)
        u[free] = np.maximum(uf, 0.0)
        val = problem.objective(u)
        if val < best_val:
            best_val, best_u = val, u
    return best_val, best_u


def direct_objective(w, x, G, gamma, lam):
    """Direct evaluation of the un-reformulated objective."""
    resid = x - G @ w
    return (gamma * float(w @ w) + lam * float(np.sum(np.abs(w)))
            + float(resid @ resid))


def random_chsa_instance(rng, k_max=6, d_max=5):
    from chsa.qp import ChsaParams, assemble_raw
    K = int(rng.integers(1, k_max + 1))
    D = int(rng.integers(1, d_max + 1))
    G = rng.random((D, K))
    x = rng.random(D)
    params = ChsaParams(gamma=10 ** rng.uniform(-6, -2),
                        lam=10 ** rng.uniform(-5, -1))
    return x, G, params, assemble_raw(x, G, params)
