import io

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from covtestlab import data
from covtestlab.covtest import (CSV_COLUMNS, combined_covariance_statistic,
                                conditional_covariance_statistic, covariance_statistic,
                                write_results_csv)
from covtestlab.errors import NeedsNextKnotError, NotApplicableError, ParameterError
from covtestlab.lars import Kind, lars_path
from covtestlab.solvers import combined_path

from oracles import constrained_lasso_qp


def definitional_statistic(ds, path, k, c, sigma2):
    """T_{k,c} straight from its definition, with independent refits."""
    active = []
    for ev in path.events[: k - 1]:
        if ev.kind is Kind.ADD:
            active.append(ev.variable)
        else:
            active.remove(ev.variable)
    j = path.events[k - 1].variable
    lam = c * path.events[k].knot
    big = constrained_lasso_qp(ds.X, ds.y, active + [j], lam)
    small = constrained_lasso_qp(ds.X, ds.y, active, lam)
    return (ds.y @ ds.X @ big - ds.y @ ds.X @ small) / sigma2


@pytest.mark.parametrize("seed", range(6))
def test_matches_definition_p3(seed):
    ds = data.simulate(25, 3, beta_star=np.array([0.8, -0.3, 0.1]), sigma=0.7, rho=0.4,
                       seed=seed)
    path = lars_path(ds.X, ds.y, max_steps=10)
    for k in range(1, len(path.events)):
        if path.events[k - 1].kind is not Kind.ADD:
            continue
        for c in (1.0, 0.5, 0.0):
            ours = covariance_statistic(ds, path, k, c).statistic
            ref = definitional_statistic(ds, path, k, c, ds.sigma ** 2)
            assert ours == pytest.approx(ref, abs=1e-6 * max(1.0, abs(ref)))


def test_orthonormal_closed_form():
    for seed in range(5):
        ds = data.simulate(80, 15, sigma=0.8, seed=seed, orthonormal=True)
        path = lars_path(ds.X, ds.y, max_steps=15)
        kn = path.knots
        for k in range(1, len(kn)):
            T = covariance_statistic(ds, path, k).statistic
            assert T == pytest.approx(ds.n * kn[k - 1] * (kn[k - 1] - kn[k]) / ds.sigma ** 2,
                                      rel=1e-9, abs=1e-9)


def test_default_c_is_one(small_dataset):
    path = lars_path(small_dataset.X, small_dataset.y, max_steps=6)
    assert (covariance_statistic(small_dataset, path, 2)
            == covariance_statistic(small_dataset, path, 2, c=1.0))


def test_conditional_reductions(small_dataset):
    path = lars_path(small_dataset.X, small_dataset.y, max_steps=6)
    for k in range(1, 5):
        j = path.events[k - 1].variable
        assert conditional_covariance_statistic(small_dataset, path, k, j).statistic == \
            pytest.approx(covariance_statistic(small_dataset, path, k).statistic, abs=1e-12)
    first = path.events[0].variable
    r = conditional_covariance_statistic(small_dataset, path, 1, first)
    direct = constrained_lasso_qp(small_dataset.X, small_dataset.y, [first],
                                  path.events[1].knot)
    assert r.statistic == pytest.approx(
        small_dataset.y @ small_dataset.X @ direct / small_dataset.sigma ** 2, rel=1e-6)
    inactive = next(v for v in range(small_dataset.p) if v not in
                    {e.variable for e in path.events[:3]})
    with pytest.raises(ParameterError):
        conditional_covariance_statistic(small_dataset, path, 3, inactive)


def test_conditional_p3_oracle():
    ds = data.simulate(30, 3, beta_star=np.array([1.0, 0.5, -0.5]), sigma=0.5, seed=2)
    path = lars_path(ds.X, ds.y, max_steps=5)
    assert [e.kind for e in path.events[:3]] == [Kind.ADD] * 3
    model = [e.variable for e in path.events[:2]]
    lam = path.events[2].knot
    for ell in model:
        rest = [v for v in model if v != ell]
        big = constrained_lasso_qp(ds.X, ds.y, model, lam)
        small = constrained_lasso_qp(ds.X, ds.y, rest, lam)
        ref = (ds.y @ ds.X @ big - ds.y @ ds.X @ small) / ds.sigma ** 2
        got = conditional_covariance_statistic(ds, path, 2, ell).statistic
        assert got == pytest.approx(ref, rel=1e-6)


def test_errors(small_dataset):
    path = lars_path(small_dataset.X, small_dataset.y, max_steps=3)
    with pytest.raises(NeedsNextKnotError):
        covariance_statistic(small_dataset, path, 3)
    with pytest.raises(ParameterError):
        covariance_statistic(small_dataset, path, 4)
    with pytest.raises(ParameterError):
        covariance_statistic(small_dataset, path, 1, c=1.5)
    with pytest.raises(ParameterError):
        covariance_statistic(small_dataset, path, 1, sigma2=0.0)


def _path_with_drop():
    for seed in range(200):
        ds = data.simulate(20, 10, sigma=1.0, rho=0.8, seed=seed)
        path = lars_path(ds.X, ds.y, max_steps=40)
        drops = [e.step for e in path.events if e.kind is Kind.DROP and e.step < len(path.events)]
        if drops:
            return ds, path, drops[0]
    pytest.skip("no drop found")


def test_drop_step_is_not_applicable():
    ds, path, k = _path_with_drop()
    with pytest.raises(NotApplicableError):
        covariance_statistic(ds, path, k)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 2**32), st.floats(0, 1))
def test_c_monotone_in_orthonormal_case(seed, c):
    # for XtX = nI both refits are soft thresholds, and T_{k,c} grows as c shrinks
    ds = data.simulate(40, 6, beta_star=np.zeros(6), sigma=1.0, seed=seed, orthonormal=True)
    path = lars_path(ds.X, ds.y, max_steps=6)
    t_c = covariance_statistic(ds, path, 1, c).statistic
    t_1 = covariance_statistic(ds, path, 1, 1.0).statistic
    assert t_c >= t_1 - 1e-9 and t_1 >= 0


def test_combined_statistic(small_dataset):
    cp = combined_path(small_dataset.X, small_dataset.y, 0.02, a=0.1, grid_size=60,
                       min_ratio=1e-3)
    r1 = combined_covariance_statistic(small_dataset, cp, 3, 1.0)
    r2 = combined_covariance_statistic(small_dataset, cp, 3, 0.1)
    assert r1.variable == r2.variable == cp.entry_order()[2]
    assert r1.lambda_next == r2.lambda_next
    with pytest.raises(ParameterError):
        combined_covariance_statistic(small_dataset, cp, len(cp.entries()) + 1)


def test_results_csv(small_dataset):
    path = lars_path(small_dataset.X, small_dataset.y, max_steps=4)
    out = io.StringIO()
    write_results_csv([(0, covariance_statistic(small_dataset, path, k)) for k in (1, 2)], out)
    lines = out.getvalue().splitlines()
    assert lines[0] == ",".join(CSV_COLUMNS) and len(lines) == 3
    res = covariance_statistic(small_dataset, path, 1)
    assert float(lines[1].split(",")[5]) == res.statistic
