"""Brute-force reference solutions, independent of the package solvers."""

import itertools

import numpy as np
from scipy import optimize


def penalized_objective(X, y, beta, lambda0, lam=0.0, a=1.0):
    n = X.shape[0]
    r = y - X @ beta
    t = np.abs(beta)
    return r @ r / (2 * n) + lambda0 * t.sum() + np.sum(lam * (a + 1) * t / (a + t))


def _refine(f, x0):
    res = optimize.minimize(f, x0, method="Nelder-Mead",
                            options={"xatol": 1e-12, "fatol": 1e-15, "maxiter": 20000})
    return res.x, res.fun


def _grid_search(f, center, half_width, points, levels):
    """Repeated zoom-in grid search around the current best point."""
    best = np.array(center, dtype=float)
    dim = best.size
    width = half_width
    for _ in range(levels):
        axes = [np.linspace(c - width, c + width, points) for c in best]
        pts = np.array(list(itertools.product(*axes)))
        vals = np.array([f(q) for q in pts])
        best = pts[int(np.argmin(vals))]
        width *= 4.0 / (points - 1)
        if dim and width < 1e-9:
            break
    return best


def brute_force_minimum(X, y, lambda0, lam=0.0, a=1.0, points=81, levels=8):
    """Global minimum over all supports of the L1 + SICA objective for small p.

    Every support is searched separately on a zooming grid followed by
    Nelder-Mead refinement; zeros outside the support are exact.
    """
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    p = X.shape[1]
    ols = np.linalg.lstsq(X, y, rcond=None)[0]
    half = 2.0 * float(np.max(np.abs(ols))) + 1.0
    best_val, best_beta = penalized_objective(X, y, np.zeros(p), lambda0, lam, a), np.zeros(p)
    for size in range(1, p + 1):
        for S in itertools.combinations(range(p), size):
            S = list(S)

            def f(b, S=S):
                beta = np.zeros(p)
                beta[S] = b
                return penalized_objective(X, y, beta, lambda0, lam, a)

            start = _grid_search(f, np.zeros(size), half, points if size == 1 else 41, levels)
            b, val = _refine(f, start)
            if val < best_val:
                best_val = val
                best_beta = np.zeros(p)
                best_beta[S] = b
    return best_beta, best_val


def scalar_oracle(z, lambda0, lam, a):
    """Minimizer of 0.5 (b - z)^2 + lambda0 |b| + sica(|b|) by grid + bounded refine."""
    def f(b):
        t = abs(b)
        return 0.5 * (b - z) ** 2 + lambda0 * t + (lam * (a + 1) * t / (a + t) if lam else 0.0)

    hi = abs(z) + 1.0
    grid = np.linspace(-hi, hi, 20001)
    vals = np.array([f(b) for b in grid])
    i = int(np.argmin(vals))
    lo, up = grid[max(i - 1, 0)], grid[min(i + 1, grid.size - 1)]
    res = optimize.minimize_scalar(f, bounds=(lo, up), method="bounded",
                                   options={"xatol": 1e-13})
    cands = [0.0, res.x]
    return min(cands, key=f)


def lasso_kkt_gap(X, y, beta, lam):
    n = X.shape[0]
    g = X.T @ (y - X @ beta) / n
    on = beta != 0
    return max(np.max(np.abs(g[on] - lam * np.sign(beta[on])), initial=0.0),
               np.max(np.maximum(np.abs(g[~on]) - lam, 0), initial=0.0))


def constrained_lasso_qp(X, y, support, lam):
    """Lasso on ``support`` via the smooth split b = u - v, u, v >= 0 (L-BFGS-B)."""
    X = np.asarray(X, float)
    y = np.asarray(y, float)
    n, p = X.shape
    S = list(support)
    beta = np.zeros(p)
    if not S:
        return beta
    XS = X[:, S]
    m = len(S)

    def f(w):
        b = w[:m] - w[m:]
        r = y - XS @ b
        g = -XS.T @ r / n
        return r @ r / (2 * n) + lam * w.sum(), np.concatenate([g + lam, -g + lam])

    res = optimize.minimize(f, np.zeros(2 * m), jac=True, method="L-BFGS-B",
                            bounds=[(0, None)] * (2 * m),
                            options={"ftol": 1e-16, "gtol": 1e-13, "maxiter": 10000})
    beta[S] = res.x[:m] - res.x[m:]
    return beta
