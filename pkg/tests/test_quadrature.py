import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from gamow_decay.errors import QuadratureFailure
from gamow_decay.quadrature import adaptive_gauss_legendre, gauss_legendre_nodes


def test_polynomial_exact():
    val = adaptive_gauss_legendre(lambda x: 5 * x ** 4 - 3 * x ** 2 + 1, 0.0, 2.0)
    assert val == pytest.approx(32 - 8 + 2, rel=1e-14)


def test_oscillatory_integrand():
    w = 200.0
    val = adaptive_gauss_legendre(lambda x: np.cos(w * x), 0.0, 1.0, abs_tol=1e-13)
    assert abs(val - np.sin(w) / w) < 1e-13


@settings(max_examples=30, deadline=None)
@given(st.floats(0.1, 60.0), st.floats(-3.0, 0.0))
def test_complex_exponential(kr, ki):
    k = complex(kr, ki)
    val = adaptive_gauss_legendre(lambda x: np.exp(1j * k * x), 0.0, 1.0, abs_tol=1e-12)
    exact = (np.exp(1j * k) - 1) / (1j * k)
    assert abs(val - exact) < 1e-11


def test_vector_valued():
    ks = np.arange(1, 6)
    val = adaptive_gauss_legendre(lambda x: np.sin(np.multiply.outer(x, ks)), 0.0, np.pi)
    exact = (1 - np.cos(ks * np.pi)) / ks
    assert np.allclose(val, exact, atol=1e-12, rtol=0)


def test_failure_reported():
    with pytest.raises(QuadratureFailure):
        adaptive_gauss_legendre(lambda x: np.abs(x - 0.3) ** -0.9, 0.0, 1.0, abs_tol=1e-14,
                                max_depth=4)


def test_fixed_nodes_weights():
    x, w = gauss_legendre_nodes(0.0, 2.0, panels=3, order=8)
    assert x.shape == w.shape == (24,)
    assert np.sum(w) == pytest.approx(2.0, rel=1e-14)
    assert np.sum(w * x ** 3) == pytest.approx(4.0, rel=1e-13)
