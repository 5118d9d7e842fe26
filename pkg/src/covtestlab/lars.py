"""Exact Lasso solution path by least angle regression with the lasso
modification (active coefficients that hit zero are dropped).

Penalty scale: minimize (2n)^{-1} ||y - X b||^2 + lam ||b||_1, so the first
knot is ||X^T y||_inf / n. Each add or drop is one step.
"""

from __future__ import annotations

import csv
import dataclasses
import enum

import numpy as np
from scipy.linalg import LinAlgError, cho_factor, cho_solve

from .data import SupportSet, has_unit_scale
from .errors import ContractError, ParameterError, RankDeficiencyError
from .solvers import CoefficientVector, lasso_objective

TIE_TOL = 1e-12


class Kind(str, enum.Enum):
    ADD = "add"
    DROP = "drop"


@dataclasses.dataclass(frozen=True)
class PathEvent:
    step: int
    kind: Kind
    variable: int
    knot: float


@dataclasses.dataclass(frozen=True, eq=False)
class SolutionPath:
    """Breakpoints of the piecewise-linear path.

    ``lambdas[i]`` / ``coefs[i]`` for ``i < len(events)`` are the knot and
    solution of event ``i + 1``. When the path was followed all the way down,
    one extra breakpoint at lambda = 0 is appended (``reached_zero``).
    """

    events: tuple
    lambdas: np.ndarray
    coefs: np.ndarray
    n: int
    p: int
    reached_zero: bool = False

    @property
    def knots(self):
        return self.lambdas[: len(self.events)]

    def __len__(self):
        return len(self.events)

    def entry_order(self):
        return [e.variable for e in self.events if e.kind is Kind.ADD]


def _first_knot(xty):
    lam1 = float(np.max(np.abs(xty)))
    ties = np.flatnonzero(np.abs(xty) >= lam1 - TIE_TOL)
    return lam1, int(ties[0])


def lars_path(X, y, max_steps, max_distinct=None, check_scale=True):
    """Follow the Lasso path from lambda_1 = ||X^T y||_inf / n downward.

    Stops after ``max_steps`` events, when lambda reaches 0, or (optionally)
    once ``max_distinct`` different variables have entered. At most
    min(n - 1, p) variables are active at once.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n, p = X.shape
    if max_steps < 1:
        raise ParameterError("max_steps must be at least 1")
    if check_scale and not has_unit_scale(X):
        raise ContractError("lars_path needs columns scaled to squared norm n; standardize first")
    xty = X.T @ y / n

    events, lambdas, coefs = [], [], []
    lam, j = _first_knot(xty)
    if lam <= 0.0:
        return SolutionPath((), np.zeros(0), np.zeros((0, p)), n, p)

    events.append(PathEvent(1, Kind.ADD, j, lam))
    lambdas.append(lam)
    coefs.append(np.zeros(p))
    active = [j]
    signs = {j: float(np.sign(xty[j]))}
    entered = {j}
    last = (Kind.ADD, j)
    last_sign = 0.0
    cap = min(n - 1, p)
    beta = np.zeros(p)
    reached_zero = False

    while len(events) < max_steps:
        if max_distinct is not None and len(entered) >= max_distinct:
            break
        step = len(events) + 1
        XA = X[:, active]
        G = XA.T @ XA / n
        s = np.array([signs[v] for v in active])
        try:
            fac = cho_factor(G, lower=True, check_finite=False)
            b0 = cho_solve(fac, xty[active], check_finite=False)
            d = cho_solve(fac, s, check_finite=False)
        except LinAlgError:
            raise RankDeficiencyError(step) from None
        if not (np.all(np.isfinite(b0)) and np.all(np.isfinite(d))):
            raise RankDeficiencyError(step)
        # on this segment beta_A(l) = b0 - l d and X^T r / n = e + l a
        e = xty - X.T @ (XA @ b0) / n
        a = X.T @ (XA @ d) / n
        upper = lam * (1.0 - TIE_TOL)

        best = 0.0
        cands = []  # (lambda', priority, variable, kind)
        if len(active) < cap:
            inactive = np.ones(p, dtype=bool)
            inactive[active] = False
            idx = np.flatnonzero(inactive)
            with np.errstate(divide="ignore", invalid="ignore"):
                r_pos = e[idx] / (1.0 - a[idx])
                r_neg = -e[idx] / (1.0 + a[idx])
            if last[0] is Kind.DROP:
                # the same-sign crossing of a just-dropped variable is the
                # current knot itself; only the opposite sign can re-enter
                at = int(np.searchsorted(idx, last[1]))
                if last_sign > 0:
                    r_pos[at] = 0.0
                else:
                    r_neg[at] = 0.0
            r_pos = np.where((r_pos > 0) & (r_pos < upper), r_pos, 0.0)
            r_neg = np.where((r_neg > 0) & (r_neg < upper), r_neg, 0.0)
            roots = np.maximum(r_pos, r_neg)
            if roots.size and roots.max() > 0:
                top = roots.max()
                best = max(best, top)
                for pos in np.flatnonzero(roots >= top - TIE_TOL):
                    cands.append((float(roots[pos]), 1, int(idx[pos]), Kind.ADD))
        with np.errstate(divide="ignore", invalid="ignore"):
            hits = b0 / d
        for pos, v in enumerate(active):
            if last == (Kind.ADD, v):
                continue
            h = hits[pos]
            if np.isfinite(h) and 0 < h < upper:
                cands.append((float(h), 0, v, Kind.DROP))
                best = max(best, float(h))

        if best <= 0.0:
            beta = np.zeros(p)
            beta[active] = b0
            lambdas.append(0.0)
            coefs.append(beta)
            reached_zero = True
            break

        tied = [c for c in cands if c[0] >= best - TIE_TOL]
        tied.sort(key=lambda c: (c[1], c[2]))
        _, _, v, kind = tied[0]
        lam_next = best
        beta = np.zeros(p)
        beta[active] = b0 - lam_next * d
        if kind is Kind.DROP:
            beta[v] = 0.0
            active.remove(v)
            last_sign = signs.pop(v)
        else:
            active.append(v)
            signs[v] = float(np.sign(e[v] + lam_next * a[v]))
            entered.add(v)
        events.append(PathEvent(step, kind, v, lam_next))
        lambdas.append(lam_next)
        coefs.append(beta)
        lam = lam_next
        last = (kind, v)

    return SolutionPath(tuple(events), np.array(lambdas), np.array(coefs).reshape(-1, p),
                        n, p, reached_zero)


def support_at_step(path, k):
    """Active set immediately after event ``k`` (1-based)."""
    if not 1 <= k <= len(path.events):
        raise ParameterError(f"step {k} out of range 1..{len(path.events)}")
    active = set()
    for ev in path.events[:k]:
        if ev.kind is Kind.ADD:
            active.add(ev.variable)
        else:
            active.discard(ev.variable)
    return SupportSet.of(active)


def support_before_step(path, k):
    if k == 1:
        return SupportSet(())
    return support_at_step(path, k - 1)


def coefficients_at(path, lam, X=None, y=None):
    """Path solution at ``lam`` by interpolation inside the containing segment.

    Above the first knot the zero vector is returned. If ``X`` and ``y`` are
    given the objective is filled in, otherwise it is NaN.
    """
    p = path.p
    lambdas = path.lambdas
    if len(lambdas) == 0 or lam >= lambdas[0]:
        beta = np.zeros(p)
    else:
        if lam < lambdas[-1]:
            raise ParameterError(
                f"lambda={lam} lies below the last computed breakpoint {lambdas[-1]}")
        # lambdas is strictly decreasing
        i = int(np.searchsorted(-lambdas, -lam, side="right")) - 1
        i = min(i, len(lambdas) - 2)
        hi, lo = lambdas[i], lambdas[i + 1]
        w = (lam - lo) / (hi - lo) if hi > lo else 1.0
        beta = w * path.coefs[i] + (1.0 - w) * path.coefs[i + 1]
        beta[np.abs(beta) < 1e-12] = 0.0
    obj = lasso_objective(X, y, beta, lam) if X is not None else float("nan")
    return CoefficientVector.from_values(beta, obj)


def screened_at_size(path, true_support, s):
    """Whether the first ``s`` distinct variables to enter cover ``true_support``."""
    first = []
    seen = set()
    for v in path.entry_order():
        if len(first) >= s:
            break
        if v not in seen:
            seen.add(v)
            first.append(v)
    return set(true_support) <= seen


def screening_sizes(path, true_support):
    """Smallest model size s at which screened_at_size becomes true (None if never)."""
    need = set(true_support)
    if not need:
        return 0
    seen = []
    for v in path.entry_order():
        if v not in seen:
            seen.append(v)
            need.discard(v)
            if not need:
                return len(seen)
    return None


def write_path_csv(path, fh, coef_fh=None):
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(["step", "kind", "variable", "knot"])
    for ev in path.events:
        w.writerow([ev.step, ev.kind.value, ev.variable, format(ev.knot, ".17g")])
    if coef_fh is not None:
        cw = csv.writer(coef_fh, lineterminator="\n")
        cw.writerow(["step", "knot"] + [f"b{j + 1}" for j in range(path.p)])
        for i, lam in enumerate(path.lambdas):
            step = i + 1 if i < len(path.events) else "end"
            cw.writerow([step, format(lam, ".17g")] + [format(v, ".17g") for v in path.coefs[i]])
