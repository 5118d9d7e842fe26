"""Fixed-lambda penalized least squares by cyclic coordinate descent.

Objective (n = number of rows)::

    (2n)^{-1} ||y - X b||^2 + lambda0 ||b||_1 + sum_j p_lam(|b_j|)

with the SICA penalty p_lam(t) = lam (a + 1) t / (a + t). The Lasso is the
case lam = 0. Every coordinate update is an exact global minimization of the
scalar subproblem, so the objective never increases.
"""

from __future__ import annotations

import dataclasses
import math

import numpy as np

from .data import SupportSet, support_of
from .errors import ConvergenceError, MonotonicityError, ParameterError

ZERO_SNAP = 1e-12
CERT_TOL = 1e-8


@dataclasses.dataclass(frozen=True, eq=False)
class CoefficientVector:
    values: np.ndarray
    support: SupportSet
    objective: float

    @classmethod
    def from_values(cls, values, objective=float("nan")):
        v = np.array(values, dtype=np.float64)
        v[np.abs(v) < ZERO_SNAP] = 0.0
        v.setflags(write=False)
        return cls(v, support_of(v), float(objective))

    def __len__(self):
        return self.values.shape[0]


@dataclasses.dataclass(frozen=True)
class PenaltySpec:
    lambda0: float
    lam: float = 0.0
    a: float = 1.0

    def __post_init__(self):
        for name in ("lambda0", "lam", "a"):
            v = getattr(self, name)
            if not math.isfinite(v):
                raise ParameterError(f"{name} must be finite, got {v}")
        if self.lambda0 < 0 or self.lam < 0:
            raise ParameterError("penalty levels must be non-negative")
        if self.a <= 0:
            raise ParameterError(f"SICA shape a must be positive, got {self.a}")

    def scaled(self, c):
        return PenaltySpec(c * self.lambda0, c * self.lam, self.a)


def sica(t, lam, a):
    """SICA penalty lam (a + 1) t / (a + t) for t >= 0."""
    if t < 0:
        raise ParameterError(f"SICA penalty is defined for t >= 0, got {t}")
    return lam * (a + 1.0) * t / (a + t)


def sica_derivative(t, lam, a):
    if t < 0:
        raise ParameterError(f"SICA penalty is defined for t >= 0, got {t}")
    return lam * (a + 1.0) * a / (a + t) ** 2


def soft_threshold(z, lam):
    return np.sign(z) * np.maximum(np.abs(z) - lam, 0.0)


def zero_threshold(lambda0, lam, a):
    """Largest |z| for which b = 0 minimizes 0.5 (b - z)^2 + lambda0 |b| + p_lam(|b|).

    For b > 0 the gain over b = 0 is b * (b/2 - w + lam (a+1)/(a+b)) with
    w = |z| - lambda0; the bracket is minimized at a + b = sqrt(2 lam (a+1)).
    """
    if lam == 0.0:
        return lambda0
    s = math.sqrt(2.0 * lam * (a + 1.0))
    if s > a:
        return lambda0 + s - 0.5 * a
    return lambda0 + lam * (a + 1.0) / a


def scalar_objective(b, z, lambda0, lam, a):
    t = abs(b)
    return 0.5 * (b - z) ** 2 + lambda0 * t + (lam * (a + 1.0) * t / (a + t) if lam else 0.0)


def scalar_minimizer(z, lambda0, lam, a):
    """Global minimizer of 0.5 (b - z)^2 + lambda0 |b| + p_lam(|b|).

    Candidates are 0 and the stationary points on the branch sign(b) =
    sign(z), where b - w + lam a (a+1)/(a+b)^2 = 0 (a cubic in b). That
    stationarity function is convex in b, so its larger root (the only local
    minimum) is reached by monotone Newton iterations started at b = w.
    """
    az = abs(z)
    if az <= zero_threshold(lambda0, lam, a):
        return 0.0
    w = az - lambda0
    if lam == 0.0:
        return math.copysign(w, z)
    kappa = lam * (a + 1.0) * a
    b = w
    for _ in range(200):
        u = a + b
        f = b - w + kappa / (u * u)
        fp = 1.0 - 2.0 * kappa / (u * u * u)
        if fp <= 0.0:
            break
        step = f / fp
        b -= step
        if abs(step) <= 4e-16 * max(1.0, b):
            break
    return math.copysign(max(b, 0.0), z)


class _Gram:
    """Cached sufficient statistics of (X, y) for coordinate descent."""

    def __init__(self, X, y):
        X = np.asarray(X, dtype=np.float64)
        y = np.asarray(y, dtype=np.float64)
        if X.ndim != 2 or y.shape != (X.shape[0],):
            raise ParameterError(f"X of shape {X.shape} and y of shape {y.shape} do not match")
        self.X = X
        self.y = y
        self.n = X.shape[0]
        self.G = X.T @ X / self.n
        self.c = X.T @ y / self.n
        self.diag = np.diag(self.G).copy()
        self.yy = float(y @ y) / (2 * self.n)
        if np.any(self.diag <= 0):
            raise ParameterError(f"column {int(np.argmin(self.diag))} of X is identically zero")

    def sub(self, idx):
        out = _Gram.__new__(_Gram)
        idx = np.asarray(idx, dtype=np.intp)
        out.X = self.X[:, idx]
        out.y = self.y
        out.n = self.n
        out.G = self.G[np.ix_(idx, idx)]
        out.c = self.c[idx]
        out.diag = self.diag[idx]
        out.yy = self.yy
        return out


def _penalty_sum(beta, lambda0, lam, a):
    t = np.abs(beta)
    total = lambda0 * float(t.sum())
    if lam:
        total += float(np.sum(lam * (a + 1.0) * t / (a + t)))
    return total


def objective(X, y, beta, penalty):
    X = np.asarray(X, dtype=np.float64)
    r = np.asarray(y, dtype=np.float64) - X @ np.asarray(beta, dtype=np.float64)
    return float(r @ r) / (2 * X.shape[0]) + _penalty_sum(beta, penalty.lambda0, penalty.lam, penalty.a)


def lasso_objective(X, y, beta, lam):
    return objective(X, y, beta, PenaltySpec(lam))


def _certificate(gram, beta, g, lambda0, lam, a):
    """Largest gap between a coordinate and its exact scalar minimizer."""
    worst = 0.0
    d = gram.diag
    for j in range(beta.shape[0]):
        dj = d[j]
        z = g[j] / dj + beta[j]
        l0, lj = lambda0 / dj, lam / dj
        best = scalar_minimizer(z, l0, lj, a)
        gap = abs(best - beta[j])
        if gap > worst:
            # exact ties between two scalar minimizers are not violations
            qb = scalar_objective(beta[j], z, l0, lj, a)
            qs = scalar_objective(best, z, l0, lj, a)
            if qb > qs + 1e-15 * max(1.0, abs(qs)):
                worst = gap
    return worst


def _coordinate_descent(gram, lambda0, lam, a, beta0=None, tol=1e-10, max_sweeps=100000):
    p = gram.G.shape[0]
    G, d = gram.G, gram.diag
    beta = np.zeros(p) if beta0 is None else np.array(beta0, dtype=np.float64)
    g = gram.c - G @ beta
    thresholds = np.array([zero_threshold(lambda0 / dj, lam / dj, a) for dj in d])

    def obj():
        return -0.5 * float(gram.c @ beta + g @ beta) + _penalty_sum(beta, lambda0, lam, a)

    prev = obj()
    sweeps = 0
    cur_tol = tol
    while True:
        viol = np.flatnonzero((beta == 0.0) & (np.abs(g) / d > thresholds))
        work = np.union1d(np.flatnonzero(beta != 0.0), viol)
        while True:
            if sweeps >= max_sweeps:
                res = _certificate(gram, beta, g, lambda0, lam, a)
                raise ConvergenceError(
                    f"coordinate descent did not converge in {max_sweeps} sweeps "
                    f"(certificate residual {res:.3e})", res)
            sweeps += 1
            biggest = 0.0
            for j in work:
                dj = d[j]
                bj = beta[j]
                new = scalar_minimizer(g[j] / dj + bj, lambda0 / dj, lam / dj, a)
                delta = new - bj
                if delta != 0.0:
                    beta[j] = new
                    g -= G[j] * delta
                    if abs(delta) > biggest:
                        biggest = abs(delta)
            cur = obj()
            if cur > prev + 1e-12 * max(1.0, abs(prev)):
                raise MonotonicityError(
                    f"objective increased from {prev!r} to {cur!r} in sweep {sweeps}")
            prev = cur
            if biggest < cur_tol:
                break
        viol = (beta == 0.0) & (np.abs(g) / d > thresholds)
        if viol.any():
            continue
        g = gram.c - G @ beta  # refresh accumulated rounding before certifying
        if _certificate(gram, beta, g, lambda0, lam, a) <= CERT_TOL:
            break
        cur_tol *= 1e-2
    beta[np.abs(beta) < ZERO_SNAP] = 0.0
    return beta


def _polish_lasso(gram, beta, lam):
    """Solve the Lasso stationarity equations on the support of ``beta`` with
    its signs fixed, G_SS b = c_S - lam s. The result replaces ``beta`` only
    if it keeps the signs and satisfies the optimality conditions at least as
    well, which removes the last digits of coordinate-descent error."""
    S = np.flatnonzero(beta)
    if S.size == 0:
        return beta
    s = np.sign(beta[S])
    try:
        b = np.linalg.solve(gram.G[np.ix_(S, S)], gram.c[S] - lam * s)
    except np.linalg.LinAlgError:
        return beta
    if not np.all(np.isfinite(b)) or np.any(np.sign(b) != s):
        return beta
    cand = np.zeros_like(beta)
    cand[S] = b

    def violation(v):
        g = gram.c - gram.G @ v
        off = np.ones(v.shape[0], dtype=bool)
        off[S] = False
        on_res = np.abs(g[S] - lam * s).max(initial=0.0)
        return max(on_res, np.maximum(np.abs(g[off]) - lam, 0.0).max(initial=0.0))

    if violation(cand) <= violation(beta):
        return cand
    return beta


def _finish(gram, beta, penalty):
    return CoefficientVector.from_values(beta, objective(gram.X, gram.y, beta, penalty))


def kkt_residual(X, y, beta, lam):
    """Max violation of the Lasso optimality conditions at ``beta``."""
    X = np.asarray(X, dtype=np.float64)
    beta = np.asarray(beta, dtype=np.float64)
    grad = X.T @ (np.asarray(y) - X @ beta) / X.shape[0]
    on = beta != 0
    res_on = np.abs(grad[on] - lam * np.sign(beta[on]))
    res_off = np.maximum(np.abs(grad[~on]) - lam, 0.0)
    return float(max(res_on.max(initial=0.0), res_off.max(initial=0.0)))


def local_certificate(X, y, beta, penalty):
    """Largest distance between a coordinate of ``beta`` and the exact
    minimizer of its scalar subproblem with the other coordinates fixed."""
    gram = _Gram(X, y)
    beta = np.asarray(beta, dtype=np.float64)
    g = gram.c - gram.G @ beta
    return _certificate(gram, beta, g, penalty.lambda0, penalty.lam, penalty.a)


def _values(init, p):
    if init is None:
        return None
    v = init.values if isinstance(init, CoefficientVector) else np.asarray(init, dtype=np.float64)
    if v.shape != (p,):
        raise ParameterError(f"initial vector has length {v.shape}, expected {p}")
    return v


def lasso_at(X, y, lam, warm_start=None, *, tol=1e-10, max_sweeps=100000, _gram=None):
    """Lasso solution at ``lam`` by cyclic coordinate descent."""
    if not (math.isfinite(lam) and lam >= 0):
        raise ParameterError(f"lambda must be finite and non-negative, got {lam}")
    gram = _gram or _Gram(X, y)
    beta0 = _values(warm_start, gram.G.shape[0])
    beta = _coordinate_descent(gram, lam, 0.0, 1.0, beta0, tol, max_sweeps)
    return _finish(gram, _polish_lasso(gram, beta, lam), PenaltySpec(lam))


def _embed(p, idx, sub_values):
    full = np.zeros(p)
    full[list(idx)] = sub_values
    return full


def _least_squares(gram):
    sol, *_ = np.linalg.lstsq(gram.X, gram.y, rcond=None)
    return sol


def constrained_lasso(X, y, support, lam, *, _gram=None):
    """Lasso at ``lam`` with every coordinate outside ``support`` held at 0.

    With ``lam == 0`` this is least squares on the support (minimum norm when
    the support columns are rank deficient).
    """
    gram = _gram or _Gram(X, y)
    p = gram.G.shape[0]
    support = support if isinstance(support, SupportSet) else SupportSet.of(support)
    support.check(p)
    pen = PenaltySpec(lam)
    if len(support) == 0:
        return _finish(gram, np.zeros(p), pen)
    sub = gram.sub(support.indices)
    if lam == 0:
        vals = _least_squares(sub)
    else:
        vals = _polish_lasso(sub, _coordinate_descent(sub, lam, 0.0, 1.0), lam)
    return _finish(gram, _embed(p, support.indices, vals), pen)


def combined_solve(X, y, penalty, init=None, *, tol=1e-10, max_sweeps=100000, _gram=None):
    """Local minimizer of the L1 + SICA objective.

    Starts from ``init`` or, by default, from the Lasso solution at
    ``penalty.lambda0``. On return each coordinate is certified to be the
    global minimizer of its scalar subproblem.
    """
    gram = _gram or _Gram(X, y)
    p = gram.G.shape[0]
    beta0 = _values(init, p)
    if beta0 is None:
        if penalty.lambda0 == 0 and penalty.lam == 0:
            return _finish(gram, _least_squares(gram), penalty)
        beta0 = _coordinate_descent(gram, penalty.lambda0, 0.0, 1.0, None, tol, max_sweeps)
    if penalty.lam == 0:
        beta = _coordinate_descent(gram, penalty.lambda0, 0.0, 1.0, beta0, tol, max_sweeps)
    else:
        beta = _coordinate_descent(gram, penalty.lambda0, penalty.lam, penalty.a, beta0,
                                   tol, max_sweeps)
    return _finish(gram, beta, penalty)


def constrained_combined(X, y, support, penalty, init=None, *, _gram=None):
    gram = _gram or _Gram(X, y)
    p = gram.G.shape[0]
    support = support if isinstance(support, SupportSet) else SupportSet.of(support)
    support.check(p)
    if len(support) == 0:
        return _finish(gram, np.zeros(p), penalty)
    idx = support.indices
    sub = gram.sub(idx)
    sub_init = None
    if init is not None:
        sub_init = _values(init, p)[list(idx)]
    sol = combined_solve(None, None, penalty, sub_init, _gram=sub)
    return _finish(gram, _embed(p, idx, sol.values), penalty)


# ---------------------------------------------------------------------------
# model sequence along a lambda grid

@dataclasses.dataclass(frozen=True)
class GridEvent:
    kind: str          # "add" or "drop"
    variable: int
    grid_index: int
    lam: float


@dataclasses.dataclass(frozen=True, eq=False)
class CombinedPath:
    """Warm-started L1 + SICA solutions along a descending grid of lam.

    Events at one grid point are ordered drops first (by index), then adds
    by decreasing |coefficient| and index.
    """

    grid: np.ndarray
    solutions: tuple
    events: tuple
    lambda0: float
    a: float

    def steps(self):
        by_point = [[] for _ in self.grid]
        for ev in self.events:
            by_point[ev.grid_index].append(ev)
        return [(float(l), s, tuple(e)) for l, s, e in zip(self.grid, self.solutions, by_point)]

    def entries(self):
        return [ev for ev in self.events if ev.kind == "add"]

    def entry_order(self):
        return [ev.variable for ev in self.entries()]


def lambda_max(X, y):
    X = np.asarray(X, dtype=np.float64)
    return float(np.max(np.abs(X.T @ np.asarray(y, dtype=np.float64)))) / X.shape[0]


def default_grid(X, y, size=100, min_ratio=1e-4):
    """``size`` geometric points from ||X^T y||_inf / n down to min_ratio of it."""
    if size < 1 or not 0 < min_ratio <= 1:
        raise ParameterError("grid needs size >= 1 and 0 < min_ratio <= 1")
    top = lambda_max(X, y)
    if size == 1:
        return np.array([top])
    return top * np.geomspace(1.0, min_ratio, size)


def combined_path(X, y, lambda0, lambda_grid=None, a=0.1, *, grid_size=100, min_ratio=1e-4,
                  stop_after_entry=None, _gram=None):
    """Solutions of the L1 + SICA problem along a descending ``lambda_grid``.

    The first grid point starts from the zero vector, later points warm-start
    from the previous solution. Support changes between consecutive points are
    recorded as add/drop events; a variable that drops and re-enters yields a
    new add event.

    With ``stop_after_entry=k`` the sweep ends at the first grid point after
    the k-th entry that either carries an event or is needed as the next
    knot, which is all the k-th covariance statistic uses.
    """
    gram = _gram or _Gram(X, y)
    p = gram.G.shape[0]
    if lambda_grid is None:
        lambda_grid = default_grid(gram.X, gram.y, grid_size, min_ratio)
    grid = np.asarray(lambda_grid, dtype=np.float64)
    if grid.ndim != 1 or grid.size == 0:
        raise ParameterError("lambda grid must be a nonempty 1-D sequence")
    if np.any(grid <= 0) or np.any(np.diff(grid) >= 0):
        raise ParameterError("lambda grid must be positive and strictly descending")

    beta = np.zeros(p)
    prev_support = set()
    solutions, events = [], []
    kth_point = None
    for i, lam in enumerate(grid):
        if kth_point is not None and i > kth_point + 1 and events[-1].grid_index > kth_point:
            break
        pen = PenaltySpec(lambda0, float(lam), a)
        try:
            beta = _coordinate_descent(gram, pen.lambda0, pen.lam, pen.a, beta)
        except (ConvergenceError, MonotonicityError) as exc:
            raise type(exc)(f"grid point {i} (lambda={lam!r}): {exc}") from exc
        sol = _finish(gram, beta, pen)
        solutions.append(sol)
        support = set(sol.support.indices)
        for v in sorted(prev_support - support):
            events.append(GridEvent("drop", v, i, float(lam)))
        for v in sorted(support - prev_support, key=lambda v: (-abs(sol.values[v]), v)):
            events.append(GridEvent("add", v, i, float(lam)))
        prev_support = support
        if (kth_point is None and stop_after_entry is not None
                and sum(ev.kind == "add" for ev in events) >= stop_after_entry):
            kth_point = i
    return CombinedPath(grid[: len(solutions)], tuple(solutions), tuple(events),
                        float(lambda0), float(a))
