"""Covariance test statistics for the Lasso path and the L1 + SICA path.

For a variable j entering after active set A, with refits at c * lambda_next:

    T = (<y, X b_hat> - <y, X_A b_tilde_A>) / sigma^2

where b_hat is fitted on A + {j} and b_tilde_A on A only.
"""

from __future__ import annotations

import csv
import dataclasses

import numpy as np

from .data import SupportSet
from .distributions import Null, p_value
from .errors import NeedsNextKnotError, NotApplicableError, ParameterError
from .lars import Kind, support_before_step
from .solvers import PenaltySpec, _Gram, constrained_combined, constrained_lasso

CSV_COLUMNS = ("replicate", "k", "variable", "c", "lambda_next", "statistic", "p_exp1", "p_chisq1")


@dataclasses.dataclass(frozen=True)
class CovTestResult:
    k: int
    variable: int
    c: float
    lambda_next: float
    statistic: float
    p_exp1: float
    p_chisq1: float
    sigma2: float

    @property
    def negative(self):
        return self.statistic < 0

    def csv_row(self, replicate=0):
        f = lambda x: format(float(x), ".17g")  # noqa: E731
        return [replicate, self.k, self.variable, f(self.c), f(self.lambda_next),
                f(self.statistic), f(self.p_exp1), f(self.p_chisq1)]


def _check(c, sigma2):
    if not 0.0 <= c <= 1.0:
        raise ParameterError(f"c must lie in [0, 1], got {c}")
    if not sigma2 > 0:
        raise ParameterError(f"sigma2 must be positive, got {sigma2}")


def _result(k, j, c, lam_next, stat, sigma2):
    stat = float(stat)
    return CovTestResult(k, int(j), float(c), float(lam_next), stat,
                         p_value(stat, Null.EXP1), p_value(stat, Null.CHISQ1), float(sigma2))


def fitted_inner(y, X, beta):
    """<y, X beta>."""
    return float(np.asarray(y) @ (np.asarray(X) @ beta))


def statistic_from_fits(y, X, big, small, sigma2):
    return (fitted_inner(y, X, big.values) - fitted_inner(y, X, small.values)) / sigma2


def _lasso_next_knot(path, k):
    if not 1 <= k <= len(path.events):
        raise ParameterError(f"step {k} out of range 1..{len(path.events)}")
    if k + 1 > len(path.events):
        raise NeedsNextKnotError(
            f"step {k} needs the knot of step {k + 1}, but the path has {len(path.events)} steps")
    return path.events[k].knot


def covariance_statistic(dataset, path, k, c=1.0, sigma2=None, *, _gram=None):
    """T_{k,c} for the variable added at event ``k`` of a Lasso path."""
    sigma2 = dataset.sigma ** 2 if sigma2 is None else sigma2
    _check(c, sigma2)
    if not 1 <= k <= len(path.events):
        raise ParameterError(f"step {k} out of range 1..{len(path.events)}")
    ev = path.events[k - 1]
    if ev.kind is not Kind.ADD:
        raise NotApplicableError(f"step {k} drops variable {ev.variable}; no statistic")
    lam_next = _lasso_next_knot(path, k)
    A = support_before_step(path, k)
    return _lasso_test(dataset, A, ev.variable, k, c, lam_next, sigma2, _gram)


def _lasso_test(dataset, A, tested, k, c, lam_next, sigma2, gram):
    gram = gram or _Gram(dataset.X, dataset.y)
    full = SupportSet.of(set(A) | {tested})
    null = SupportSet.of(set(full) - {tested})
    big = constrained_lasso(None, None, full, c * lam_next, _gram=gram)
    small = constrained_lasso(None, None, null, c * lam_next, _gram=gram)
    stat = statistic_from_fits(dataset.y, dataset.X, big, small, sigma2)
    return _result(k, tested, c, lam_next, stat, sigma2)


def conditional_covariance_statistic(dataset, path, k, ell, c=1.0, sigma2=None, *, _gram=None):
    """Test active variable ``ell`` given the rest of A + {j} at step ``k``."""
    sigma2 = dataset.sigma ** 2 if sigma2 is None else sigma2
    _check(c, sigma2)
    if not 1 <= k <= len(path.events):
        raise ParameterError(f"step {k} out of range 1..{len(path.events)}")
    ev = path.events[k - 1]
    if ev.kind is not Kind.ADD:
        raise NotApplicableError(f"step {k} drops variable {ev.variable}; no statistic")
    lam_next = _lasso_next_knot(path, k)
    A = support_before_step(path, k)
    model = set(A) | {ev.variable}
    if ell not in model:
        raise ParameterError(f"variable {ell} is not active at step {k}: {sorted(model)}")
    return _lasso_test(dataset, set(model) - {ell}, ell, k, c, lam_next, sigma2, _gram)


def _combined_entry(cpath, k):
    entries = [i for i, ev in enumerate(cpath.events) if ev.kind == "add"]
    if not 1 <= k <= len(entries):
        raise ParameterError(f"requested entry {k}, but only {len(entries)} entries on the path")
    pos = entries[k - 1]
    ev = cpath.events[pos]
    active = set()
    for prior in cpath.events[:pos]:
        if prior.kind == "add":
            active.add(prior.variable)
        else:
            active.discard(prior.variable)
    # next event at a strictly smaller grid value; otherwise the next grid point
    lam_next = None
    for later in cpath.events[pos + 1:]:
        if later.grid_index > ev.grid_index:
            lam_next = later.lam
            break
    if lam_next is None:
        if ev.grid_index + 1 >= len(cpath.grid):
            raise NeedsNextKnotError(f"entry {k} occurs at the last grid point")
        lam_next = float(cpath.grid[ev.grid_index + 1])
    return ev, SupportSet.of(active), lam_next


def combined_covariance_statistic(dataset, cpath, k, c=1.0, sigma2=None, *, _gram=None):
    """Generalized T_{k,c} for the k-th variable to enter an L1 + SICA path.

    Both refits use the penalty (c * lambda0, c * lambda_next, a).
    """
    sigma2 = dataset.sigma ** 2 if sigma2 is None else sigma2
    _check(c, sigma2)
    ev, A, lam_next = _combined_entry(cpath, k)
    gram = _gram or _Gram(dataset.X, dataset.y)
    pen = PenaltySpec(c * cpath.lambda0, c * lam_next, cpath.a)
    big = constrained_combined(None, None, SupportSet.of(set(A) | {ev.variable}), pen, _gram=gram)
    small = constrained_combined(None, None, A, pen, _gram=gram)
    stat = statistic_from_fits(dataset.y, dataset.X, big, small, sigma2)
    return _result(k, ev.variable, c, lam_next, stat, sigma2)


def write_results_csv(rows, fh):
    """``rows`` is an iterable of (replicate, CovTestResult)."""
    w = csv.writer(fh, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for rep, res in rows:
        w.writerow(res.csv_row(rep))
