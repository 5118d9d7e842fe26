import numpy as np
import pytest

from covtestlab.config import ExperimentConfig
from covtestlab.errors import ParameterError
from covtestlab.experiments import resolve_threads, run_qq, run_screening


def _screening(**kw):
    base = dict(kind="screening", n=(60,), sigma=(0.3,), p=40, replicates=6,
                max_model_size=20)
    base.update(kw)
    return ExperimentConfig(**base)


def test_noiseless_single_replicate_reaches_one():
    rep = run_screening(_screening(sigma=(0.0,), replicates=1, n=(80,)))
    curve = rep.aggregates[(80, 0.0)]
    s = rep.records[0].screen_size
    assert s is not None and s >= 7
    assert np.all(curve[:s] == 0) and np.all(curve[s:] == 1)


def test_zero_model_size_curve():
    rep = run_screening(_screening(max_model_size=0))
    assert list(rep.aggregates[(60, 0.3)]) == [0.0]


def test_screening_report_shape():
    cfg = _screening(n=(50, 70), sigma=(0.15, 0.3))
    rep = run_screening(cfg)
    assert len(rep.records) == 2 * 2 * cfg.replicates
    for curve in rep.aggregates.values():
        assert curve.shape == (cfg.max_model_size + 1,)
        assert np.all(np.diff(curve) >= 0) and np.all((curve >= 0) & (curve <= 1))


def test_qq_small_run():
    cfg = ExperimentConfig(kind="qq", n=(60,), sigma=(0.3,), p=30, replicates=5,
                           c0=(0.25, 0.6), c=(1.0, 0.1), k=3, grid_size=40)
    rep = run_qq(cfg)
    assert len(rep.records) == 5 * 4
    for key, (x, qe, qc) in rep.aggregates.items():
        assert x.size + rep.skipped[key] == cfg.replicates
        assert np.all(np.diff(x) >= 0) and np.all(np.diff(qe) > 0)
        assert rep.gof[key]["m"] == x.size
    # the same replicate path serves both values of c
    recs = {(r.c0, r.c, r.replicate): r for r in rep.records}
    for r in range(5):
        a, b = recs[(0.25, 1.0, r)], recs[(0.25, 0.1, r)]
        assert a.variable == b.variable and a.lambda_next == b.lambda_next


def test_qq_skips_short_paths():
    cfg = ExperimentConfig(kind="qq", n=(60,), sigma=(0.3,), p=30, replicates=3,
                           c0=(0.6,), c=(1.0,), k=8, grid_size=2, grid_min_ratio=0.9)
    rep = run_qq(cfg)
    assert rep.skipped[(0.6, 1.0)] == 3
    assert rep.aggregates[(0.6, 1.0)][0].size == 0


def test_kind_mismatch_and_threads(monkeypatch):
    with pytest.raises(ParameterError):
        run_qq(_screening())
    monkeypatch.setenv("COVTESTLAB_THREADS", "3")
    assert resolve_threads() == 3
    assert resolve_threads(2) == 2
    with pytest.raises(ParameterError):
        resolve_threads(0)


def test_parallel_matches_serial():
    cfg = _screening(replicates=8)
    a, b = run_screening(cfg, threads=1), run_screening(cfg, threads=2)
    assert a.records == b.records
