"""Standard normal CDF and a high-accuracy inverse.

The inverse is Acklam's rational approximation (relative error ~1.15e-9)
refined by a single Newton step against the erf-based CDF, which brings the
absolute error down to a few ulps. The same function drives the deterministic
path sampler, so the algorithm is fixed and must not be swapped for a
platform-dependent one.
"""

from __future__ import annotations

import numpy as np
from scipy.special import ndtr

__all__ = ["normal_cdf", "normal_pdf", "inverse_normal_cdf", "QUANTILE_TEST_GRID"]

_SQRT_2PI = np.sqrt(2.0 * np.pi)

# Acklam coefficients.
_A = (-3.969683028665376e+01, 2.209460984245205e+02, -2.759285104469687e+02,
      1.383577518672690e+02, -3.066479806614716e+01, 2.506628277459239e+00)
_B = (-5.447609879822406e+01, 1.615858368580409e+02, -1.556989798598866e+02,
      6.680131188771972e+01, -1.328068155288572e+01)
_C = (-7.784894002430293e-03, -3.223964580411365e-01, -2.400758277161838e+00,
      -2.549732539343734e+00, 4.374664141464968e+00, 2.938163982698783e+00)
_D = (7.784695709041462e-03, 3.224671290700398e-01, 2.445134137142996e+00,
      3.754408661907416e+00)
_P_LOW = 0.02425


def normal_cdf(x):
    return ndtr(x)


def normal_pdf(x):
    x = np.asarray(x, dtype=float)
    return np.exp(-0.5 * x * x) / _SQRT_2PI


def _acklam(p: np.ndarray) -> np.ndarray:
    x = np.empty_like(p)

    lo = p < _P_LOW
    hi = p > 1.0 - _P_LOW
    mid = ~(lo | hi)

    if np.any(mid):
        q = p[mid] - 0.5
        r = q * q
        num = ((((_A[0] * r + _A[1]) * r + _A[2]) * r + _A[3]) * r + _A[4]) * r + _A[5]
        den = ((((_B[0] * r + _B[1]) * r + _B[2]) * r + _B[3]) * r + _B[4]) * r + 1.0
        x[mid] = q * num / den
    if np.any(lo):
        q = np.sqrt(-2.0 * np.log(p[lo]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[lo] = num / den
    if np.any(hi):
        q = np.sqrt(-2.0 * np.log(1.0 - p[hi]))
        num = ((((_C[0] * q + _C[1]) * q + _C[2]) * q + _C[3]) * q + _C[4]) * q + _C[5]
        den = (((_D[0] * q + _D[1]) * q + _D[2]) * q + _D[3]) * q + 1.0
        x[hi] = -num / den
    return x


def inverse_normal_cdf(p):
    """Quantile of the standard normal: returns x with Phi(x) = p.

    Accepts scalars or arrays; p must lie strictly inside (0, 1).
    Guaranteed |Phi(result) - p| <= 1e-9 on the documented test grid.
    """
    arr = np.asarray(p, dtype=float)
    if arr.size == 0:
        return arr.copy()
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError("inverse_normal_cdf requires 0 < p < 1")
    x = _acklam(np.atleast_1d(arr).astype(float))
    x -= (ndtr(x) - np.atleast_1d(arr)) / normal_pdf(x)
    if np.isscalar(p) or arr.ndim == 0:
        return float(x[0])
    return x.reshape(arr.shape)


def _build_test_grid() -> np.ndarray:
    lower = np.logspace(-6, np.log10(0.5), 25)
    return np.unique(np.concatenate([lower, 1.0 - lower]))


# Documented p-grid for the round-trip quality gate: log-spaced from 1e-6 to
# 0.5 plus the mirror image, 49 points total.
QUANTILE_TEST_GRID = _build_test_grid()
