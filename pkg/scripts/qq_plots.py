"""QQ plots of the eighth-entry covariance statistic on the L1 + SICA path.

Writes qq.csv, qq_replicates.csv, one SVG per (c0, c) pair and a manifest,
then prints the KS distances to Exp(1) and chi-squared(1) per pair.

    python3 scripts/qq_plots.py
    python3 scripts/qq_plots.py --full-scale --threads 4
"""

import argparse
import sys
from pathlib import Path

from covtestlab.cli import main

ROOT = Path(__file__).resolve().parents[1]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "qq_desk.cfg"))
    ap.add_argument("--out", default=str(ROOT / "out" / "qq"))
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--full-scale", action="store_true")
    args = ap.parse_args()
    argv = ["qq", args.config, "--out", args.out]
    if args.threads:
        argv += ["--threads", str(args.threads)]
    if args.full_scale:
        argv.append("--full-scale")
    sys.exit(main(argv))
