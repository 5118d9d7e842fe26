"""Experiment configuration and the flat ``key = value`` file format.

Lists are comma separated, optionally wrapped in brackets::

    # screening curves, desk scale
    kind = screening
    n = 80, 120
    sigma = [0.15, 0.3]
    p = 200

``#`` starts a comment. Unknown keys and malformed values are rejected with
the offending line number.
"""

from __future__ import annotations

import dataclasses
import math
from pathlib import Path

from .errors import ParameterError


class ConfigError(ParameterError):
    def __init__(self, message, line=None, path=None):
        self.line = line
        self.path = path
        where = ""
        if path is not None:
            where = f"{path}:"
        if line is not None:
            where += f"{line}:"
        super().__init__(f"{where} {message}" if where else message)


@dataclasses.dataclass(frozen=True)
class ExperimentConfig:
    kind: str
    n: tuple = (100,)
    p: int = 200
    rho: float = 0.5
    sigma: tuple = (0.3,)
    replicates: int = 100
    base_seed: int = 20131201
    c0: tuple = (0.1, 0.25, 0.6)
    a: float = 0.1
    c: tuple = (1.0, 0.1)
    max_model_size: int = 50
    grid_size: int = 100
    grid_min_ratio: float = 1e-4
    k: int = 8

    def __post_init__(self):
        if self.kind not in ("screening", "qq"):
            err = ParameterError(f"kind must be 'screening' or 'qq', got {self.kind!r}")
            err.field = "kind"
            raise err
        for name in ("n", "sigma", "c0", "c"):
            v = getattr(self, name)
            if not isinstance(v, tuple):
                object.__setattr__(self, name, tuple(v) if isinstance(v, (list, tuple)) else (v,))
        checks = [
            ("replicates", self.replicates >= 1, "replicates must be at least 1"),
            ("p", self.p >= 7, "p must be at least 7 (seven true signals)"),
            ("n", all(int(n) == n and n >= 2 for n in self.n),
             f"n values must be integers >= 2, got {self.n}"),
            ("rho", 0 <= self.rho < 1, f"rho must be in [0, 1), got {self.rho}"),
            ("sigma", all(math.isfinite(s) and s >= 0 for s in self.sigma),
             f"sigma values must be finite and >= 0, got {self.sigma}"),
            ("c0", all(c0 > 0 for c0 in self.c0), f"c0 values must be positive, got {self.c0}"),
            ("c", all(0 <= c <= 1 for c in self.c), f"c values must lie in [0, 1], got {self.c}"),
            ("a", self.a > 0, f"a must be positive, got {self.a}"),
            ("max_model_size", self.max_model_size >= 0, "max_model_size must be non-negative"),
            ("grid_size", self.grid_size >= 2, "grid_size must be at least 2"),
            ("grid_min_ratio", 0 < self.grid_min_ratio < 1, "grid_min_ratio must lie in (0, 1)"),
            ("k", self.k >= 1, "k must be at least 1"),
        ]
        if self.kind == "qq":
            checks += [
                ("n", len(self.n) == 1, "qq experiments take a single n"),
                ("sigma", len(self.sigma) == 1, "qq experiments take a single sigma"),
                ("sigma", min(self.sigma) > 0,
                 "qq experiments need sigma > 0 (statistics divide by sigma^2)"),
            ]
        for field, ok, message in checks:
            if not ok:
                err = ParameterError(message)
                err.field = field
                raise err

    def lambda0(self, c0, n=None, sigma=None):
        """L1 level c0 * sigma * sqrt(log(p) / n); always recomputed."""
        n = self.n[0] if n is None else n
        sigma = self.sigma[0] if sigma is None else sigma
        return c0 * sigma * math.sqrt(math.log(self.p) / n)

    def to_dict(self):
        return {f.name: (list(v) if isinstance(v := getattr(self, f.name), tuple) else v)
                for f in dataclasses.fields(self)}

    def replace(self, **changes):
        return dataclasses.replace(self, **changes)


_LIST_KEYS = {"n": int, "sigma": float, "c0": float, "c": float}
_SCALAR_KEYS = {
    "kind": str, "p": int, "rho": float, "replicates": int, "base_seed": int, "a": float,
    "max_model_size": int, "grid_size": int, "grid_min_ratio": float, "k": int,
}

FULL_SCALE = {"p": 1000, "replicates": 200}


def _convert(raw, typ, key, line, path):
    raw = raw.strip()
    try:
        if typ is int:
            f = float(raw)
            if not f.is_integer():
                raise ValueError
            return int(f)
        if typ is float:
            v = float(raw)
            if not math.isfinite(v):
                raise ValueError
            return v
        return raw.lower()
    except ValueError:
        raise ConfigError(f"invalid {typ.__name__} for '{key}': {raw!r}", line, path) from None


def parse_config(text, path=None):
    values = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"expected 'key = value', got {raw.strip()!r}", lineno, path)
        key, value = (s.strip() for s in line.split("=", 1))
        key = key.lower()
        if key in values:
            raise ConfigError(f"duplicate key '{key}'", lineno, path)
        if key in _LIST_KEYS:
            body = value.strip()
            if body.startswith("[") != body.endswith("]"):
                raise ConfigError(f"unbalanced brackets for '{key}'", lineno, path)
            body = body.strip("[]")
            items = [s for s in body.split(",")]
            if not body.strip() or any(not s.strip() for s in items):
                raise ConfigError(f"empty list item for '{key}'", lineno, path)
            values[key] = (tuple(_convert(s, _LIST_KEYS[key], key, lineno, path) for s in items),
                           lineno)
        elif key in _SCALAR_KEYS:
            values[key] = (_convert(value, _SCALAR_KEYS[key], key, lineno, path), lineno)
        else:
            raise ConfigError(f"unknown key '{key}'", lineno, path)
    if "kind" not in values:
        raise ConfigError("missing required key 'kind'", None, path)
    kwargs = {k: v for k, (v, _) in values.items()}
    try:
        return ExperimentConfig(**kwargs)
    except ParameterError as exc:
        field = getattr(exc, "field", None)
        line = values[field][1] if field in values else None
        raise ConfigError(str(exc), line, path) from None


def load_config(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc.strerror}", None, path) from None
    return parse_config(text, path)


def format_config(cfg):
    lines = []
    for key, value in cfg.to_dict().items():
        if isinstance(value, list):
            value = ", ".join(repr(v) if not isinstance(v, str) else v for v in value)
        lines.append(f"{key} = {value}")
    return "\n".join(lines) + "\n"
