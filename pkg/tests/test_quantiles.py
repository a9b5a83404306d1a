import numpy as np
import pytest
from hypothesis import given, strategies as st
from scipy.special import ndtr

from indexbeat.quantiles import (QUANTILE_TEST_GRID, inverse_normal_cdf,
                                 normal_cdf)


def bisect_quantile(p: float, lo=-10.0, hi=10.0, iters=80) -> float:
    """Independent oracle: bisection on the erf-based CDF."""
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if ndtr(mid) < p:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


def test_median_is_zero():
    assert inverse_normal_cdf(0.5) == pytest.approx(0.0, abs=1e-12)


@pytest.mark.parametrize("p,expected", [
    (0.975, 1.959964),        # frozen from bisect_quantile(0.975)
    (0.841344746, 1.000000),  # frozen from bisect_quantile(0.841344746)
])
def test_frozen_quantiles(p, expected):
    assert inverse_normal_cdf(p) == pytest.approx(expected, abs=1e-5)
    assert bisect_quantile(p) == pytest.approx(expected, abs=1e-5)


@pytest.mark.parametrize("p", [1e-6, 1e-3, 0.1, 0.3, 0.7, 0.9, 1 - 1e-4])
def test_against_bisection_oracle(p):
    assert inverse_normal_cdf(p) == pytest.approx(bisect_quantile(p), abs=1e-8)


def test_roundtrip_on_documented_grid():
    x = inverse_normal_cdf(QUANTILE_TEST_GRID)
    assert np.max(np.abs(normal_cdf(x) - QUANTILE_TEST_GRID)) <= 1e-9


@pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5, np.nan])
def test_domain_errors(p):
    with pytest.raises(ValueError):
        inverse_normal_cdf(p)


def test_array_input_shape():
    p = np.array([[0.2, 0.5], [0.8, 0.99]])
    x = inverse_normal_cdf(p)
    assert x.shape == p.shape
    assert np.allclose(normal_cdf(x), p, atol=1e-12)


@given(st.floats(min_value=1e-6, max_value=1 - 1e-6))
def test_roundtrip_property(p):
    assert abs(normal_cdf(inverse_normal_cdf(p)) - p) <= 1e-9


def test_symmetry():
    p = np.linspace(0.01, 0.49, 25)
    assert np.allclose(inverse_normal_cdf(p), -inverse_normal_cdf(1 - p),
                       atol=1e-12)
