"""Monte Carlo studies: Lasso sure-screening curves and null distributions
of the covariance statistic on the L1 + SICA path.

Replicates are independent work items. Each one derives its own seed from
``(base_seed, purpose, replicate)``, so results do not depend on scheduling
or on the number of workers.
"""

from __future__ import annotations

import dataclasses
import math
import os
from concurrent.futures import ProcessPoolExecutor

import numpy as np
from threadpoolctl import threadpool_limits

from . import data, rng
from .config import ExperimentConfig
from .covtest import combined_covariance_statistic
from .distributions import Null, ks_distance, null_quantiles
from .errors import CovTestLabError, ParameterError
from .lars import lars_path, screening_sizes
from .solvers import _Gram, combined_path

THREADS_ENV = "COVTESTLAB_THREADS"


class ReplicateError(CovTestLabError, RuntimeError):
    """A replicate failed; carries the (n, sigma, replicate) context."""


@dataclasses.dataclass(frozen=True)
class ScreeningRecord:
    n: int
    sigma: float
    replicate: int
    screen_size: int | None  # smallest model size covering the true support
    steps: int


@dataclasses.dataclass(frozen=True)
class QQRecord:
    c0: float
    c: float
    replicate: int
    entries: int
    variable: int | None
    lambda_next: float | None
    statistic: float | None

    @property
    def skipped(self):
        return self.statistic is None


@dataclasses.dataclass(frozen=True, eq=False)
class ExperimentReport:
    config: ExperimentConfig
    records: tuple
    aggregates: dict
    gof: dict
    skipped: dict = dataclasses.field(default_factory=dict)


def resolve_threads(threads=None):
    if threads is None:
        env = os.environ.get(THREADS_ENV)
        threads = int(env) if env else 1
    if threads < 1:
        raise ParameterError(f"thread count must be >= 1, got {threads}")
    return threads


def _init_worker():
    threadpool_limits(1)


def _run_all(fn, items, threads):
    threads = resolve_threads(threads)
    if threads == 1 or len(items) <= 1:
        with threadpool_limits(1):
            return [fn(it) for it in items]
    chunk = max(1, len(items) // (4 * threads))
    with ProcessPoolExecutor(max_workers=threads, initializer=_init_worker) as ex:
        return list(ex.map(fn, items, chunksize=chunk))


# ---------------------------------------------------------------------------
# sure screening

def _screening_item(item):
    cfg, n, sigma, r = item
    seed = rng.derive_seed(cfg.base_seed, f"screening/n={n}", r)
    try:
        ds = data.simulate(n, cfg.p, sigma=sigma, rho=cfg.rho, seed=seed)
        size = max(cfg.max_model_size, 1)
        path = lars_path(ds.X, ds.y, max_steps=20 * size + 20, max_distinct=size)
        s = screening_sizes(path, ds.true_support)
    except CovTestLabError as exc:
        raise ReplicateError(f"screening n={n} sigma={sigma} replicate={r}: {exc}") from exc
    return ScreeningRecord(n, sigma, r, s, len(path.events))


def screening_curve(records, max_model_size):
    """Fraction of replicates screened at each model size 0..max_model_size."""
    sizes = np.array([np.inf if r.screen_size is None else r.screen_size for r in records])
    s = np.arange(max_model_size + 1)
    return (sizes[None, :] <= s[:, None]).mean(axis=1)


def run_screening(config, threads=None):
    """Sure-screening frequency of the Lasso path versus model size per (n, sigma).

    The design and the standard-normal noise vector of replicate r depend only
    on (base_seed, n, r); sigma merely rescales the noise.
    """
    if config.kind != "screening":
        raise ParameterError(f"run_screening needs kind=screening, got {config.kind}")
    items = [(config, n, s, r) for n in config.n for s in config.sigma
             for r in range(config.replicates)]
    records = _run_all(_screening_item, items, threads)
    records.sort(key=lambda rec: (config.n.index(rec.n), config.sigma.index(rec.sigma),
                                  rec.replicate))
    aggregates = {}
    for n in config.n:
        for s in config.sigma:
            group = [r for r in records if r.n == n and r.sigma == s]
            aggregates[(n, s)] = screening_curve(group, config.max_model_size)
    return ExperimentReport(config, tuple(records), aggregates, gof={})


# ---------------------------------------------------------------------------
# null distribution of the k-th entry statistic

def _qq_item(item):
    cfg, r = item
    n, sigma = cfg.n[0], cfg.sigma[0]
    seed = rng.derive_seed(cfg.base_seed, "qq", r)
    out = []
    try:
        ds = data.simulate(n, cfg.p, sigma=sigma, rho=cfg.rho, seed=seed)
        gram = _Gram(ds.X, ds.y)
        for c0 in cfg.c0:
            lam0 = cfg.lambda0(c0)
            cp = combined_path(ds.X, ds.y, lam0, a=cfg.a, grid_size=cfg.grid_size,
                               min_ratio=cfg.grid_min_ratio, stop_after_entry=cfg.k,
                               _gram=gram)
            entries = len(cp.entries())
            for c in cfg.c:
                if entries < cfg.k:
                    out.append(QQRecord(c0, c, r, entries, None, None, None))
                    continue
                res = combined_covariance_statistic(ds, cp, cfg.k, c, sigma ** 2, _gram=gram)
                out.append(QQRecord(c0, c, r, entries, res.variable, res.lambda_next,
                                    res.statistic))
    except CovTestLabError as exc:
        raise ReplicateError(f"qq n={n} sigma={sigma} replicate={r}: {exc}") from exc
    return out


def qq_table(statistics):
    """Sorted statistics next to Exp(1) and chi2_1 quantiles at (i - 0.5)/m."""
    x = np.sort(np.asarray(statistics, dtype=np.float64))
    m = x.size
    if m == 0:
        return x, np.zeros(0), np.zeros(0)
    return x, null_quantiles(m, Null.EXP1), null_quantiles(m, Null.CHISQ1)


def fit_summary(statistics):
    x = np.asarray(statistics, dtype=np.float64)
    if x.size == 0:
        return {"m": 0, "mean": math.nan, "var": math.nan,
                "ks_exp1": math.nan, "ks_chisq1": math.nan}
    return {
        "m": int(x.size),
        "mean": float(np.mean(x)),
        "var": float(np.var(x, ddof=1)) if x.size > 1 else 0.0,
        "ks_exp1": ks_distance(x, Null.EXP1),
        "ks_chisq1": ks_distance(x, Null.CHISQ1),
    }


def run_qq(config, threads=None):
    """Statistic of the k-th entering covariate for every (c0, c) pair.

    Replicates whose path has fewer than k entries are skipped and counted.
    """
    if config.kind != "qq":
        raise ParameterError(f"run_qq needs kind=qq, got {config.kind}")
    items = [(config, r) for r in range(config.replicates)]
    nested = _run_all(_qq_item, items, threads)
    records = [rec for group in nested for rec in group]
    records.sort(key=lambda rec: (config.c0.index(rec.c0), config.c.index(rec.c), rec.replicate))
    aggregates, gof, skipped = {}, {}, {}
    for c0 in config.c0:
        for c in config.c:
            group = [r for r in records if r.c0 == c0 and r.c == c]
            stats = [r.statistic for r in group if not r.skipped]
            aggregates[(c0, c)] = qq_table(stats)
            gof[(c0, c)] = fit_summary(stats)
            skipped[(c0, c)] = sum(r.skipped for r in group)
    return ExperimentReport(config, tuple(records), aggregates, gof, skipped)


def run(config, threads=None):
    if config.kind == "screening":
        return run_screening(config, threads)
    return run_qq(config, threads)
