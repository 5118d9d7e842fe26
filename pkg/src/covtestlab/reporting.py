"""CSV tables, summary digests and the run manifest."""

from __future__ import annotations

import csv
import io
import json
import os
from pathlib import Path

import numpy as np

from .covtest import CSV_COLUMNS
from .distributions import Null, ks_distance

SCREENING_COLUMNS = ("n", "sigma", "model_size", "probability")
QQ_COLUMNS = ("c0", "c", "rank", "statistic", "q_exp1", "q_chisq1")
QQ_REPLICATE_COLUMNS = ("c0",) + CSV_COLUMNS


def fmt(x):
    return format(float(x), ".17g")


def _csv_text(columns, rows):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    w.writerows(rows)
    return buf.getvalue()


def screening_csv(report):
    cfg = report.config
    rows = []
    for n in cfg.n:
        for s in cfg.sigma:
            for size, prob in enumerate(report.aggregates[(n, s)]):
                rows.append([n, fmt(s), size, fmt(prob)])
    return _csv_text(SCREENING_COLUMNS, rows)


def qq_csv(report):
    cfg = report.config
    rows = []
    for c0 in cfg.c0:
        for c in cfg.c:
            x, qe, qc = report.aggregates[(c0, c)]
            for i in range(x.size):
                rows.append([fmt(c0), fmt(c), i + 1, fmt(x[i]), fmt(qe[i]), fmt(qc[i])])
    return _csv_text(QQ_COLUMNS, rows)


def qq_replicates_csv(report):
    from .distributions import p_value

    rows = []
    for rec in report.records:
        if rec.skipped:
            continue
        t = rec.statistic
        rows.append([fmt(rec.c0), rec.replicate, report.config.k, rec.variable, fmt(rec.c),
                     fmt(rec.lambda_next), fmt(t), fmt(p_value(t, Null.EXP1)),
                     fmt(p_value(t, Null.CHISQ1))])
    return _csv_text(QQ_REPLICATE_COLUMNS, rows)


def parse_csv_rows(text):
    """Rows of CSV text as dicts of strings."""
    return list(csv.DictReader(io.StringIO(text)))


def read_csv_rows(path):
    return parse_csv_rows(Path(path).read_text(encoding="utf-8"))


def summarize_screening(rows):
    """Per (n, sigma): area under the curve and final probability."""
    groups = {}
    for r in rows:
        groups.setdefault(f"n={int(r['n'])},sigma={float(r['sigma']):g}", []).append(
            (int(r["model_size"]), float(r["probability"])))
    out = {}
    for key, pts in groups.items():
        pts.sort()
        probs = [p for _, p in pts]
        out[key] = {"sizes": len(probs), "area": float(np.sum(probs)), "final": probs[-1]}
    return out


def summarize_qq(rows):
    """Per (c0, c): sample size, mean and KS distances of the sorted statistics."""
    groups = {}
    for r in rows:
        groups.setdefault(f"c0={float(r['c0']):g},c={float(r['c']):g}", []).append(
            (int(r["rank"]), float(r["statistic"])))
    out = {}
    for key, pts in groups.items():
        pts.sort()
        x = np.array([v for _, v in pts])
        out[key] = {"m": int(x.size), "mean": float(np.mean(x)),
                    "ks_exp1": ks_distance(x, Null.EXP1),
                    "ks_chisq1": ks_distance(x, Null.CHISQ1)}
    return out


def write_text(path, text):
    Path(path).write_text(text, encoding="utf-8", newline="")


def write_manifest(path, manifest):
    """Write JSON atomically; the manifest marks a completed run."""
    path = Path(path)
    tmp = path.with_suffix(path.suffix + ".tmp")
    tmp.write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    os.replace(tmp, path)
