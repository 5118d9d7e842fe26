"""Reference null distributions, p-values, quantiles and KS distance."""

import enum
import math

import numpy as np
from scipy.special import erfc

from .errors import ParameterError


class Null(str, enum.Enum):
    EXP1 = "exp1"
    CHISQ1 = "chisq1"


# Acklam's rational approximation, followed by one Halley step.
_A = (-3.969683028665376e01, 2.209460984245205e02, -2.759285104469687e02,
      1.383577518672690e02, -3.066479806614716e01, 2.506628277459239e00)
_B = (-5.447609879822406e01, 1.615858368580409e02, -1.556989798598866e02,
      6.680131188771972e01, -1.328068155288572e01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e00,
      -2.549732539343734e00, 4.374664141464968e00, 2.938163982698783e00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e00,
      3.754408661907416e00)
_P_LOW = 0.02425
_SQRT2 = math.sqrt(2.0)
_SQRT2PI = math.sqrt(2.0 * math.pi)


def _tail(q):
    return ((((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5])
            / ((((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0))


def norm_ppf(p):
    """Inverse standard normal CDF for ``p`` in (0, 1).

    The rational approximation has relative error below 1.2e-9; a single
    Halley correction against ``erfc`` brings it to near machine precision.
    Accepts scalars or arrays; raises :class:`ParameterError` outside (0, 1).
    """
    arr = np.asarray(p, dtype=np.float64)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ParameterError("norm_ppf requires probabilities strictly inside (0, 1)")
    x = np.empty_like(arr)

    lo = arr < _P_LOW
    hi = arr > 1.0 - _P_LOW
    mid = ~(lo | hi)
    if np.any(lo):
        x[lo] = _tail(np.sqrt(-2.0 * np.log(arr[lo])))
    if np.any(hi):
        x[hi] = -_tail(np.sqrt(-2.0 * np.log1p(-arr[hi])))
    if np.any(mid):
        q = arr[mid] - 0.5
        r = q * q
        x[mid] = ((((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]) * q
                  / (((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0))

    # Halley refinement; upper tail is refined through the survival function
    # to avoid cancellation in 1 - p.
    up = x > 0
    e = np.where(up,
                 -(0.5 * erfc(x / _SQRT2) - (1.0 - arr)),
                 0.5 * erfc(-x / _SQRT2) - arr)
    u = e * _SQRT2PI * np.exp(0.5 * x * x)
    x = x - u / (1.0 + 0.5 * x * u)
    if x.ndim == 0:
        return float(x)
    return x


def norm_cdf(x):
    return 0.5 * math.erfc(-x / _SQRT2)


def null_cdf(x, null):
    """CDF of the reference null at ``x`` (vectorized)."""
    null = Null(null)
    t = np.maximum(np.asarray(x, dtype=np.float64), 0.0)
    if null is Null.EXP1:
        return -np.expm1(-t)
    # P(Z^2 <= t) = 1 - erfc(sqrt(t/2))
    return 1.0 - erfc(np.sqrt(t / 2.0))


def p_value(statistic, null=Null.EXP1):
    """Upper-tail p-value of a covariance statistic under Exp(1) or chi-squared(1).

    Negative statistics are clipped at zero, so they map to p = 1.
    """
    if not math.isfinite(statistic):
        raise ParameterError("statistic must be finite")
    t = max(float(statistic), 0.0)
    null = Null(null)
    if null is Null.EXP1:
        return math.exp(-t)
    return min(1.0, math.erfc(math.sqrt(t / 2.0)))


def null_quantile(q, null=Null.EXP1):
    if not 0.0 < q < 1.0:
        raise ParameterError(f"quantile level must be in (0, 1), got {q}")
    null = Null(null)
    if null is Null.EXP1:
        return -math.log1p(-q)
    return norm_ppf((1.0 + q) / 2.0) ** 2


def null_quantiles(m, null=Null.EXP1):
    """Theoretical quantiles at plotting positions (i - 0.5)/m, i = 1..m."""
    return np.array([null_quantile((i - 0.5) / m, null) for i in range(1, m + 1)])


def ks_distance(sample, null=Null.EXP1):
    """Two-sided Kolmogorov-Smirnov distance between a sample and a null CDF."""
    x = np.sort(np.asarray(sample, dtype=np.float64).ravel())
    m = x.size
    if m == 0:
        raise ParameterError("ks_distance needs a nonempty sample")
    if not np.all(np.isfinite(x)):
        raise ParameterError("sample contains non-finite values")
    f = null_cdf(x, null)
    i = np.arange(1, m + 1, dtype=np.float64)
    d_plus = np.max(i / m - f)
    d_minus = np.max(f - (i - 1.0) / m)
    return float(min(1.0, max(d_plus, d_minus, 0.0)))
