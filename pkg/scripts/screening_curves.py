"""Sure-screening frequency of the Lasso path against sparse model size.

Runs the screening experiment from a config file and writes screening.csv,
screening.svg and manifest.json, exactly as ``covtestlab screening`` does.

    python3 scripts/screening_curves.py                  # desk profile
    python3 scripts/screening_curves.py --full-scale    # p=1000, 200 replicates
"""

import argparse
import sys
from pathlib import Path

from covtestlab.cli import main

ROOT = Path(__file__).resolve().parents[1]


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--config", default=str(ROOT / "configs" / "screening_desk.cfg"))
    ap.add_argument("--out", default=str(ROOT / "out" / "screening"))
    ap.add_argument("--threads", type=int, default=None)
    ap.add_argument("--full-scale", action="store_true")
    args = ap.parse_args()
    argv = ["screening", args.config, "--out", args.out]
    if args.threads:
        argv += ["--threads", str(args.threads)]
    if args.full_scale:
        argv.append("--full-scale")
    sys.exit(main(argv))
