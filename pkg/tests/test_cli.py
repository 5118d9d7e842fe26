import json
import math

import numpy as np
import pytest

from covtestlab import data
from covtestlab.cli import main
from covtestlab.reporting import read_csv_rows, summarize_qq, summarize_screening


def _write(path, text):
    path.write_text(text)
    return path


SCREENING = "kind = screening\nn = 50, 70\nsigma = 0.2\np = 30\nreplicates = 4\nmax_model_size = 15\n"
QQ = ("kind = qq\nn = 60\nsigma = 0.3\np = 30\nreplicates = 4\nc0 = 0.6\nc = 1, 0.1\n"
      "k = 3\ngrid_size = 40\n")


def test_screening_outputs(tmp_path):
    cfg = _write(tmp_path / "s.cfg", SCREENING)
    out = tmp_path / "out"
    assert main(["screening", str(cfg), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert set(manifest["outputs"]) == {"screening.csv", "screening.svg"}
    assert all((out / f).exists() for f in manifest["outputs"])
    assert manifest["base_seed"] == 20131201 and manifest["command"] == "screening"
    assert summarize_screening(read_csv_rows(out / "screening.csv")) == manifest["summary"]
    svg = (out / "screening.svg").read_text()
    assert svg.startswith("<svg") and "href" not in svg and svg.count("<polyline") >= 2


def test_qq_outputs(tmp_path):
    cfg = _write(tmp_path / "q.cfg", QQ)
    out = tmp_path / "out"
    assert main(["qq", str(cfg), "--out", str(out)]) == 0
    manifest = json.loads((out / "manifest.json").read_text())
    assert {"qq_c0-0.6_c-1.svg", "qq_c0-0.6_c-0.1.svg", "qq.csv"} <= set(manifest["outputs"])
    assert summarize_qq(read_csv_rows(out / "qq.csv")) == manifest["summary"]
    assert set(manifest["skipped"]) == {"c0=0.6,c=1", "c0=0.6,c=0.1"}


def test_missing_config_exit_2_without_outputs(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["screening", str(tmp_path / "missing.cfg"), "--out", str(out)]) == 2
    assert not out.exists()
    assert "cannot read config" in capsys.readouterr().err


def test_invalid_config_exit_2_with_line(tmp_path, capsys):
    cfg = _write(tmp_path / "bad.cfg", "kind = screening\nreplicates = 0\n")
    assert main(["screening", str(cfg), "--out", str(tmp_path / "o")]) == 2
    assert "bad.cfg:2:" in capsys.readouterr().err
    assert not (tmp_path / "o").exists()


def test_wrong_kind_exit_2(tmp_path):
    cfg = _write(tmp_path / "s.cfg", SCREENING)
    assert main(["qq", str(cfg), "--out", str(tmp_path / "o")]) == 2


def test_empty_qq_exit_1(tmp_path, capsys):
    cfg = _write(tmp_path / "q.cfg", QQ.replace("k = 3", "k = 8").replace(
        "grid_size = 40", "grid_size = 2\ngrid_min_ratio = 0.9"))
    out = tmp_path / "out"
    assert main(["qq", str(cfg), "--out", str(out)]) == 1
    assert "fewer than 8 entries" in capsys.readouterr().err
    assert not (out / "manifest.json").exists()


def _orthonormal_fixture(tmp_path):
    ds = data.simulate(40, 8, beta_star=np.r_[1.0, -0.5, np.zeros(6)], sigma=0.5, seed=3,
                       orthonormal=True)
    data.write_csv_pair(ds, tmp_path / "X.csv", tmp_path / "y.csv")
    return ds


def _rows(text):
    lines = text.strip().splitlines()
    return [dict(zip(lines[0].split(","), l.split(","))) for l in lines[1:]]


def test_cli_test_orthonormal_closed_form(tmp_path, capsys):
    ds = _orthonormal_fixture(tmp_path)
    args = ["test", str(tmp_path / "X.csv"), str(tmp_path / "y.csv"), "--k", "4",
            "--sigma2", "0.25", "--no-standardize"]
    assert main(args) == 0
    rows = _rows(capsys.readouterr().out)
    knots = np.sort(np.abs(ds.X.T @ ds.y) / ds.n)[::-1]
    assert [int(r["k"]) for r in rows] == [1, 2, 3, 4]
    for r in rows:
        k = int(r["k"])
        expect = ds.n * knots[k - 1] * (knots[k - 1] - knots[k]) / 0.25
        assert float(r["statistic"]) == pytest.approx(expect, rel=1e-9)
        assert float(r["p_exp1"]) == pytest.approx(math.exp(-float(r["statistic"])))
    assert main(args + ["--c", "1"]) == 0
    with_c = capsys.readouterr().out
    assert main(args) == 0
    assert capsys.readouterr().out == with_c


def test_cli_test_beyond_path(tmp_path, capsys):
    _orthonormal_fixture(tmp_path)
    rc = main(["test", str(tmp_path / "X.csv"), str(tmp_path / "y.csv"), "--k", "8",
               "--sigma2", "1", "--no-standardize"])
    assert rc == 1
    assert "needs next knot" in capsys.readouterr().err


def test_cli_test_combined_and_bad_data(tmp_path, capsys):
    ds = data.simulate(60, 20, sigma=0.3, rho=0.5, seed=1)
    data.write_csv_pair(ds, tmp_path / "X.csv", tmp_path / "y.csv")
    assert main(["test", str(tmp_path / "X.csv"), str(tmp_path / "y.csv"), "--k", "3",
                 "--sigma2", "0.09", "--method", "combined"]) == 0
    assert len(_rows(capsys.readouterr().out)) == 3
    (tmp_path / "y.csv").write_text("1\n2\n")
    assert main(["test", str(tmp_path / "X.csv"), str(tmp_path / "y.csv"), "--k", "3",
                 "--sigma2", "0.09"]) == 2
    assert main(["test", str(tmp_path / "nope.csv"), str(tmp_path / "y.csv"), "--k", "3",
                 "--sigma2", "0.09"]) == 2


def test_simulate_and_path(tmp_path, capsys):
    out = tmp_path / "sim"
    assert main(["simulate", "--n", "30", "--p", "12", "--seed", "5", "--out", str(out)]) == 0
    assert main(["path", str(out / "X.csv"), str(out / "y.csv"), "--max-steps", "5",
                 "--coef-out", str(tmp_path / "coef.csv")]) == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[1].startswith("step") and len(lines) == 7
    assert (tmp_path / "coef.csv").exists()
    assert main(["simulate", "--n", "5", "--p", "12", "--orthonormal", "--out", str(out)]) == 2


def test_threads_flag_determinism(tmp_path):
    cfg = _write(tmp_path / "s.cfg", SCREENING)
    main(["screening", str(cfg), "--out", str(tmp_path / "a"), "--threads", "1"])
    main(["screening", str(cfg), "--out", str(tmp_path / "b"), "--threads", "2"])
    for f in ("screening.csv", "screening.svg"):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()
    assert main(["screening", str(cfg), "--threads", "0", "--out", str(tmp_path / "c")]) == 2
