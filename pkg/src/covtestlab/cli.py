"""Command-line front end.

Exit codes: 0 success, 1 runtime or numerical failure, 2 usage/config error.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from pathlib import Path

from . import __version__, data
from .config import FULL_SCALE, ConfigError, load_config
from .covtest import combined_covariance_statistic, covariance_statistic, write_results_csv
from .errors import CovTestLabError, NeedsNextKnotError, ParameterError
from .experiments import THREADS_ENV, resolve_threads, run_qq, run_screening
from .lars import Kind, lars_path, write_path_csv
from .reporting import (parse_csv_rows, qq_csv, qq_replicates_csv, screening_csv,
                        summarize_qq, summarize_screening, write_manifest, write_text)
from .svgplot import qq_svg, screening_svg


class UsageError(Exception):
    pass


def _load(args, kind):
    cfg = load_config(args.config)
    if cfg.kind != kind:
        raise ConfigError(f"config kind is '{cfg.kind}', expected '{kind}'", None, args.config)
    if args.full_scale:
        cfg = cfg.replace(**FULL_SCALE)
    return cfg


def _manifest(args, cfg, outputs, started, summary, extra=None):
    m = {
        "command": args.command,
        "config_path": str(args.config),
        "config": cfg.to_dict(),
        "base_seed": cfg.base_seed,
        "tool_version": __version__,
        "wall_time_s": round(time.perf_counter() - started, 3),
        "outputs": sorted(outputs),
        "summary": summary,
    }
    if extra:
        m.update(extra)
    return m


def cmd_screening(args):
    cfg = _load(args, "screening")
    started = time.perf_counter()
    report = run_screening(cfg, args.threads)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = screening_csv(report)
    write_text(out / "screening.csv", table)
    write_text(out / "screening.svg", screening_svg(report.aggregates, cfg.n, cfg.sigma))
    summary = summarize_screening(parse_csv_rows(table))
    write_manifest(out / "manifest.json",
                   _manifest(args, cfg, ["screening.csv", "screening.svg"], started, summary))
    for key, s in summary.items():
        print(f"{key}: screened fraction at size {s['sizes'] - 1} = {s['final']:.3f}")
    return 0


def qq_svg_name(c0, c):
    return f"qq_c0-{c0:g}_c-{c:g}.svg"


def cmd_qq(args):
    cfg = _load(args, "qq")
    started = time.perf_counter()
    report = run_qq(cfg, args.threads)
    empty = [key for key, (x, _, _) in report.aggregates.items() if x.size == 0]
    if empty:
        pairs = ", ".join(f"(c0={c0:g}, c={c:g})" for c0, c in empty)
        print(f"error: every replicate had fewer than {cfg.k} entries for {pairs}; "
              "nothing to plot (lower grid_min_ratio or increase grid_size)", file=sys.stderr)
        return 1
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    table = qq_csv(report)
    outputs = ["qq.csv", "qq_replicates.csv"]
    write_text(out / "qq.csv", table)
    write_text(out / "qq_replicates.csv", qq_replicates_csv(report))
    for (c0, c), (x, qe, qc) in report.aggregates.items():
        name = qq_svg_name(c0, c)
        write_text(out / name, qq_svg(x, qe, qc, c0, c))
        outputs.append(name)
    summary = summarize_qq(parse_csv_rows(table))
    skipped = {f"c0={c0:g},c={c:g}": v for (c0, c), v in report.skipped.items()}
    write_manifest(out / "manifest.json",
                   _manifest(args, cfg, outputs, started, summary, {"skipped": skipped}))
    for key, s in summary.items():
        print(f"{key}: m={s['m']} mean={s['mean']:.3f} "
              f"KS(Exp1)={s['ks_exp1']:.3f} KS(chi2_1)={s['ks_chisq1']:.3f}")
    return 0


def _read_data(args, sigma=0.0):
    try:
        ds = data.read_csv_pair(args.x, args.y, sigma=sigma)
    except OSError as exc:
        raise UsageError(f"cannot read data: {exc}") from None
    except ParameterError as exc:
        raise UsageError(str(exc)) from None
    if args.standardize:
        ds = data.standardize(ds)
    return ds


def cmd_test(args):
    if not args.sigma2 > 0:
        raise UsageError("--sigma2 must be positive")
    if not 0 <= args.c <= 1:
        raise UsageError("--c must lie in [0, 1]")
    if args.k < 1:
        raise UsageError("--k must be at least 1")
    ds = _read_data(args, math.sqrt(args.sigma2))
    rows = []
    if args.method == "lasso":
        path = lars_path(ds.X, ds.y, max_steps=args.k + 1)
        if len(path.events) < args.k + 1:
            raise NeedsNextKnotError(
                f"step {args.k} needs the knot of step {args.k + 1}, "
                f"but the path has only {len(path.events)} steps")
        for k in range(1, args.k + 1):
            if path.events[k - 1].kind is Kind.ADD:
                rows.append((0, covariance_statistic(ds, path, k, args.c, args.sigma2)))
    else:
        from .solvers import combined_path

        lam0 = args.lambda0
        if lam0 is None:
            lam0 = args.c0 * math.sqrt(args.sigma2) * math.sqrt(math.log(ds.p) / ds.n)
        cp = combined_path(ds.X, ds.y, lam0, a=args.a, grid_size=args.grid_size,
                           min_ratio=args.grid_min_ratio, stop_after_entry=args.k)
        for k in range(1, args.k + 1):
            rows.append((0, combined_covariance_statistic(ds, cp, k, args.c, args.sigma2)))
    write_results_csv(rows, sys.stdout)
    return 0


def cmd_path(args):
    ds = _read_data(args)
    path = lars_path(ds.X, ds.y, max_steps=args.max_steps)
    coef_fh = open(args.coef_out, "w", newline="") if args.coef_out else None
    try:
        write_path_csv(path, sys.stdout, coef_fh)
    finally:
        if coef_fh:
            coef_fh.close()
    return 0


def cmd_simulate(args):
    if args.beta == "signal":
        beta = data.signal_beta_star(args.p)
    else:
        import numpy as np

        beta = np.zeros(args.p)
    ds = data.simulate(args.n, args.p, beta_star=beta, sigma=args.sigma, rho=args.rho,
                       seed=args.seed, orthonormal=args.orthonormal,
                       standardize_data=args.standardize)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    data.write_csv_pair(ds, out / "X.csv", out / "y.csv")
    print(f"wrote {out / 'X.csv'} and {out / 'y.csv'} (n={ds.n}, p={ds.p})")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="covtestlab", description="Lasso covariance tests and L1+SICA experiments")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def experiment(name, help_):
        p = sub.add_parser(name, help=help_)
        p.add_argument("config", help="key = value config file")
        p.add_argument("--out", default=f"out/{name}", help="output directory")
        p.add_argument("--threads", type=int, default=None,
                       help=f"worker processes (default ${THREADS_ENV} or 1)")
        p.add_argument("--full-scale", action="store_true",
                       help="override p=1000 and replicates=200")
        return p

    experiment("screening", "sure-screening curves of the Lasso path")
    experiment("qq", "null distribution of the covariance statistic on the L1+SICA path")

    def data_args(p):
        p.add_argument("x", help="X.csv (header x1..xp)")
        p.add_argument("y", help="y.csv (single column)")
        p.add_argument("--no-standardize", dest="standardize", action="store_false",
                       help="use columns as given (they must have squared norm n)")

    t = sub.add_parser("test", help="covariance statistics for steps 1..k on user data")
    data_args(t)
    t.add_argument("--k", type=int, required=True)
    t.add_argument("--c", type=float, default=1.0)
    t.add_argument("--sigma2", type=float, required=True)
    t.add_argument("--method", choices=("lasso", "combined"), default="lasso")
    t.add_argument("--lambda0", type=float, default=None)
    t.add_argument("--c0", type=float, default=0.6,
                   help="sets lambda0 = c0 sigma sqrt(log p / n) when --lambda0 is absent")
    t.add_argument("--a", type=float, default=0.1)
    t.add_argument("--grid-size", type=int, default=100)
    t.add_argument("--grid-min-ratio", type=float, default=1e-4)

    pth = sub.add_parser("path", help="print the Lasso path events as CSV")
    data_args(pth)
    pth.add_argument("--max-steps", type=int, default=1000)
    pth.add_argument("--coef-out", default=None, help="also write per-knot coefficients")

    sim = sub.add_parser("simulate", help="write a simulated X.csv / y.csv pair")
    sim.add_argument("--n", type=int, required=True)
    sim.add_argument("--p", type=int, required=True)
    sim.add_argument("--rho", type=float, default=0.5)
    sim.add_argument("--sigma", type=float, default=0.3)
    sim.add_argument("--seed", type=int, default=0)
    sim.add_argument("--beta", choices=("signal", "zero"), default="signal")
    sim.add_argument("--orthonormal", action="store_true")
    sim.add_argument("--no-standardize", dest="standardize", action="store_false")
    sim.add_argument("--out", required=True)
    return parser


COMMANDS = {"screening": cmd_screening, "qq": cmd_qq, "test": cmd_test, "path": cmd_path,
            "simulate": cmd_simulate}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("screening", "qq"):
            try:
                args.threads = resolve_threads(args.threads)
            except (ParameterError, ValueError) as exc:
                raise UsageError(f"invalid thread count: {exc}") from None
        return COMMANDS[args.command](args)
    except (UsageError, ConfigError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NeedsNextKnotError as exc:
        print(f"error: needs next knot: {exc}", file=sys.stderr)
        return 1
    except ParameterError as exc:
        code = 2 if args.command == "simulate" else 1
        print(f"error: {exc}", file=sys.stderr)
        return code
    except (CovTestLabError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
