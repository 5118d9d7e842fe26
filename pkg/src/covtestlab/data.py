"""Simulated regression instances: AR(1) Gaussian designs, sparse signals,
column standardization and CSV interchange."""

from __future__ import annotations

import csv
import dataclasses
import math
from pathlib import Path

import numpy as np

from . import rng
from .errors import DegenerateColumnError, ParameterError

SIGNAL_COEFFICIENTS = (1.0, -0.5, 0.7, -1.2, -0.9, 0.3, 0.55)


def _frozen(a):
    a = np.array(a, dtype=np.float64)
    a.setflags(write=False)
    return a


@dataclasses.dataclass(frozen=True, eq=False)
class SupportSet:
    """Strictly increasing tuple of column indices."""

    indices: tuple

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if any(b <= a for a, b in zip(idx, idx[1:])):
            raise ParameterError(f"support indices must be strictly increasing: {idx}")
        if idx and idx[0] < 0:
            raise ParameterError("support indices must be non-negative")
        object.__setattr__(self, "indices", idx)

    @classmethod
    def of(cls, items):
        return cls(tuple(sorted({int(i) for i in items})))

    def check(self, p):
        if self.indices and self.indices[-1] >= p:
            raise ParameterError(f"support index {self.indices[-1]} out of range for p={p}")
        return self

    def __iter__(self):
        return iter(self.indices)

    def __len__(self):
        return len(self.indices)

    def __contains__(self, j):
        return int(j) in self.indices

    def __eq__(self, other):
        if isinstance(other, SupportSet):
            return self.indices == other.indices
        try:
            return self.indices == tuple(sorted(int(i) for i in other))
        except TypeError:
            return NotImplemented

    def __hash__(self):
        return hash(self.indices)

    def __le__(self, other):
        return set(self.indices) <= set(other)

    def __repr__(self):
        return f"SupportSet({list(self.indices)})"


def support_of(values, tol=0.0):
    return SupportSet(tuple(int(i) for i in np.flatnonzero(np.abs(values) > tol)))


@dataclasses.dataclass(frozen=True, eq=False)
class Dataset:
    """One regression instance ``y = X beta_star + eps``.

    ``col_means``/``col_scales``/``y_mean`` record the transform applied by
    :func:`standardize` so coefficients can be mapped back to raw units via
    :meth:`to_original_scale`.
    """

    X: np.ndarray
    y: np.ndarray
    beta_star: np.ndarray
    sigma: float
    rho: float = 0.0
    seed: int = 0
    standardized: bool = False
    orthonormal: bool = False
    col_means: np.ndarray | None = None
    col_scales: np.ndarray | None = None
    y_mean: float = 0.0

    def __post_init__(self):
        X = _frozen(self.X)
        y = _frozen(self.y)
        beta = _frozen(self.beta_star)
        if X.ndim != 2 or y.ndim != 1:
            raise ParameterError("X must be 2-D and y 1-D")
        n, p = X.shape
        if n < 2 or p < 1:
            raise ParameterError(f"need n >= 2 and p >= 1, got n={n}, p={p}")
        if y.shape[0] != n:
            raise ParameterError(f"y has length {y.shape[0]}, expected {n}")
        if beta.shape != (p,):
            raise ParameterError(f"beta_star has shape {beta.shape}, expected ({p},)")
        if not (np.all(np.isfinite(X)) and np.all(np.isfinite(y)) and np.all(np.isfinite(beta))):
            raise ParameterError("dataset contains non-finite entries")
        if not (math.isfinite(self.sigma) and self.sigma >= 0):
            raise ParameterError(f"sigma must be finite and non-negative, got {self.sigma}")
        object.__setattr__(self, "X", X)
        object.__setattr__(self, "y", y)
        object.__setattr__(self, "beta_star", beta)
        for name in ("col_means", "col_scales"):
            v = getattr(self, name)
            if v is not None:
                object.__setattr__(self, name, _frozen(v))

    @property
    def n(self):
        return self.X.shape[0]

    @property
    def p(self):
        return self.X.shape[1]

    @property
    def true_support(self):
        return support_of(self.beta_star)

    def to_original_scale(self, beta):
        """Map coefficients fitted on the standardized design back to raw columns."""
        if self.col_scales is None:
            return np.asarray(beta, dtype=np.float64).copy()
        return np.asarray(beta, dtype=np.float64) / self.col_scales


def signal_beta_star(p):
    """(1, -0.5, 0.7, -1.2, -0.9, 0.3, 0.55) padded with p - 7 zeros."""
    if p < len(SIGNAL_COEFFICIENTS):
        raise ParameterError(f"signal coefficient vector needs p >= 7, got {p}")
    beta = np.zeros(p)
    beta[: len(SIGNAL_COEFFICIENTS)] = SIGNAL_COEFFICIENTS
    return beta


def _check_dims(n, p):
    if int(n) != n or int(p) != p or n < 2 or p < 1:
        raise ParameterError(f"need integer n >= 2 and p >= 1, got n={n}, p={p}")


def generate_design(n, p, rho, seed):
    """Rows i.i.d. N(0, Sigma) with Sigma_ij = rho^|i-j|, built column by
    column through the stationary AR(1) recursion."""
    _check_dims(n, p)
    if not (math.isfinite(rho) and 0.0 <= rho < 1.0):
        raise ParameterError(f"rho must lie in [0, 1), got {rho}")
    z = rng.standard_normals(rng.stream(seed, "design"), (n, p))
    X = np.empty((n, p))
    X[:, 0] = z[:, 0]
    if rho == 0.0:
        X[:, 1:] = z[:, 1:]
        return X
    innov = math.sqrt(1.0 - rho * rho)
    for j in range(1, p):
        X[:, j] = rho * X[:, j - 1] + innov * z[:, j]
    return X


def generate_response(X, beta_star, sigma, seed):
    X = np.asarray(X, dtype=np.float64)
    beta_star = np.asarray(beta_star, dtype=np.float64)
    if X.ndim != 2 or beta_star.shape != (X.shape[1],):
        raise ParameterError(
            f"beta_star of shape {beta_star.shape} does not match X of shape {X.shape}")
    if not (math.isfinite(sigma) and sigma >= 0):
        raise ParameterError(f"sigma must be finite and non-negative, got {sigma}")
    mean = X @ beta_star
    if sigma == 0:
        return mean
    eps = rng.standard_normals(rng.stream(seed, "noise"), X.shape[0])
    return mean + sigma * eps


def orthonormalize(X, center=True):
    """Gram-Schmidt orthonormalization (via Householder QR with the sign of
    R's diagonal fixed positive), rescaled so that X^T X = n I.

    Columns are centered first when ``center`` and n > p; with n == p a
    centered orthonormal basis does not exist and ``center`` is ignored.
    """
    X = np.asarray(X, dtype=np.float64)
    n, p = X.shape
    if n < p:
        raise ParameterError(f"orthonormal mode needs n >= p, got n={n}, p={p}")
    if center and n > p:
        X = X - X.mean(axis=0)
    Q, R = np.linalg.qr(X)
    d = np.sign(np.diag(R))
    d[d == 0] = 1.0
    return Q * d * math.sqrt(n)


def simulate(n, p, beta_star=None, sigma=1.0, rho=0.0, seed=0, orthonormal=False,
             standardize_data=True):
    """Generate a dataset; ``beta_star`` defaults to the seven-signal vector."""
    if beta_star is None:
        beta_star = signal_beta_star(p)
    X = generate_design(n, p, rho, seed)
    if orthonormal:
        X = orthonormalize(X, center=True)
    y = generate_response(X, beta_star, sigma, seed)
    ds = Dataset(X=X, y=y, beta_star=beta_star, sigma=sigma, rho=rho, seed=seed,
                 orthonormal=orthonormal)
    if standardize_data and not (orthonormal and n == p):
        ds = standardize(ds)
    return ds


def standardize(dataset):
    """Center columns and y, and rescale every column to squared norm n."""
    X = dataset.X
    n = X.shape[0]
    means = X.mean(axis=0)
    Xc = X - means
    scales = np.sqrt(np.einsum("ij,ij->j", Xc, Xc) / n)
    magnitude = np.maximum(np.max(np.abs(X), axis=0), 1.0)
    bad = np.flatnonzero(scales <= 1e-12 * magnitude)
    if bad.size:
        raise DegenerateColumnError(int(bad[0]))
    Xs = Xc / scales
    # second pass removes rounding left by the first
    Xs -= Xs.mean(axis=0)
    Xs *= math.sqrt(n) / np.linalg.norm(Xs, axis=0)
    y_mean = float(dataset.y.mean())
    ys = dataset.y - y_mean

    prev_scales = dataset.col_scales if dataset.col_scales is not None else np.ones(X.shape[1])
    prev_means = dataset.col_means if dataset.col_means is not None else np.zeros(X.shape[1])
    return dataclasses.replace(
        dataset, X=Xs, y=ys, standardized=True,
        col_means=prev_means + means * prev_scales,
        col_scales=prev_scales * scales,
        y_mean=dataset.y_mean + y_mean,
        beta_star=dataset.beta_star * scales,
    )


def has_unit_scale(X, tol=1e-8):
    """True when every column satisfies ||x_j||^2 = n to relative ``tol``."""
    X = np.asarray(X)
    n = X.shape[0]
    sq = np.einsum("ij,ij->j", X, X)
    return bool(np.all(np.abs(sq - n) <= tol * n))


def _fmt(x):
    return format(float(x), ".17g")


def write_csv_pair(dataset, x_path, y_path):
    x_path, y_path = Path(x_path), Path(y_path)
    with x_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow([f"x{j + 1}" for j in range(dataset.p)])
        for row in dataset.X:
            w.writerow([_fmt(v) for v in row])
    with y_path.open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["y"])
        for v in dataset.y:
            w.writerow([_fmt(v)])


def _read_numeric(path, label):
    with Path(path).open(newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows:
        raise ParameterError(f"{label}: empty file")
    header, body = rows[0], [r for r in rows[1:] if r]
    try:
        values = [[float(v) for v in r] for r in body]
    except ValueError as exc:
        raise ParameterError(f"{label}: unparseable number ({exc})") from None
    widths = {len(r) for r in values}
    if len(widths) > 1 or (widths and widths.pop() != len(header)):
        raise ParameterError(f"{label}: ragged rows")
    return header, np.array(values, dtype=np.float64).reshape(len(values), len(header))


def read_csv_pair(x_path, y_path, sigma=0.0):
    """Load X.csv / y.csv into an (unstandardized) Dataset with unknown beta_star."""
    _, X = _read_numeric(x_path, str(x_path))
    _, Y = _read_numeric(y_path, str(y_path))
    if Y.shape[1] != 1:
        raise ParameterError(f"{y_path}: expected a single column, got {Y.shape[1]}")
    if Y.shape[0] != X.shape[0]:
        raise ParameterError(f"X has {X.shape[0]} rows but y has {Y.shape[0]}")
    return Dataset(X=X, y=Y[:, 0], beta_star=np.zeros(X.shape[1]), sigma=sigma)
