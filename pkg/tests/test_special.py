import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from numpy.testing import assert_allclose
from scipy import special as sp

from crelay.errors import ConvergenceError, DomainError
from crelay.special import digamma, erf, regularized_lower_gamma, trigamma


def test_unit_shape_is_exponential_cdf():
    x = np.linspace(0.0, 50.0, 1000)
    assert_allclose(regularized_lower_gamma(1.0, x), -np.expm1(-x), rtol=0, atol=1e-12)


@pytest.mark.parametrize("m", [0.5, 0.98, 1.13, 1.28, 2.5, 10.0, 50.0])
def test_matches_scipy_gammainc(m):
    x = np.concatenate([np.linspace(0.0, 4.0 * m + 20.0, 400), [1e-8, m + 1.0, 3.0 * m]])
    assert_allclose(regularized_lower_gamma(m, x), sp.gammainc(m, x), rtol=0, atol=1e-12)


def test_endpoints_and_shapes():
    assert regularized_lower_gamma(1.2, 0.0) == 0.0
    assert regularized_lower_gamma(1.2, math.inf) == 1.0
    assert isinstance(regularized_lower_gamma(1.2, 0.3), float)
    grid = np.ones((3, 4))
    assert regularized_lower_gamma(1.2, grid).shape == (3, 4)


@given(
    st.floats(0.5, 20.0),
    st.floats(0.0, 100.0),
    st.floats(0.0, 100.0),
)
def test_monotone_in_x(m, a, b):
    lo, hi = sorted((a, b))
    assert regularized_lower_gamma(m, lo) <= regularized_lower_gamma(m, hi) + 1e-15


@pytest.mark.parametrize("m, x", [(0.0, 1.0), (-1.0, 1.0), (1.0, -0.5)])
def test_domain_errors(m, x):
    with pytest.raises(DomainError):
        regularized_lower_gamma(m, x)


@pytest.mark.parametrize("x", [1.5, 30.0])
def test_iteration_cap(x):
    # 1.5 takes the series branch, 30 the continued fraction
    with pytest.raises(ConvergenceError):
        regularized_lower_gamma(2.0, x, max_iter=1)


def test_erf_matches_scipy():
    x = np.linspace(-4.0, 4.0, 801)
    assert_allclose(erf(x), sp.erf(x), rtol=0, atol=1e-13)
    assert erf(0.0) == 0.0


@pytest.mark.parametrize("x", [0.1, 0.5, 1.0, 1.2, 1.4616, 3.7, 9.99, 10.0, 50.0, 1e3])
def test_digamma_trigamma_match_scipy(x):
    assert digamma(x) == pytest.approx(sp.digamma(x), rel=1e-12, abs=1e-12)
    assert trigamma(x) == pytest.approx(sp.polygamma(1, x), rel=1e-12)


@pytest.mark.parametrize("fn", [digamma, trigamma])
def test_polygamma_domain(fn):
    with pytest.raises(DomainError):
        fn(0.0)
