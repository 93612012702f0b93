#!/usr/bin/env python3
"""Tests for the Bessel, sinc and Gauss-Legendre helpers."""

from pathlib import Path

import numpy as np
import pytest
import scipy.special

from errors import InvalidParameterError
from specfun import bessel_i0, bessel_i0e, gauss_legendre, sinc


@pytest.mark.parametrize(
    "x,expected",
    [
        (0.0, 1.0),
        (1.0, 1.2660658777520082),
        (10.0, 2815.716628466254),
    ],
)
def test_i0_known_values(x, expected):
    assert bessel_i0(x) == pytest.approx(expected, rel=1e-13)


def test_i0_matches_scipy_across_the_series_switch():
    x = np.concatenate([np.linspace(0, 30, 301), np.logspace(1.5, 2.8, 50)])
    np.testing.assert_allclose(bessel_i0(x), scipy.special.i0(x), rtol=1e-12)
    np.testing.assert_allclose(bessel_i0e(x), scipy.special.i0e(x), rtol=1e-12)


def test_i0_is_even():
    x = np.array([0.5, 3.0, 17.0, 120.0])
    np.testing.assert_array_equal(bessel_i0(-x), bessel_i0(x))


def test_i0_large_argument_is_finite_then_overflows():
    assert np.isfinite(bessel_i0(700.0))
    with pytest.raises(OverflowError):
        bessel_i0(800.0)
    # the scaled form never overflows
    assert bessel_i0e(800.0) == pytest.approx(scipy.special.i0e(800.0), rel=1e-12)


def test_sinc():
    assert sinc(0.0) == 1.0
    assert sinc(1e-6) == pytest.approx(np.sin(1e-6) / 1e-6, rel=1e-15)
    assert abs(sinc(np.pi)) < 1e-16
    x = np.linspace(-20, 20, 401)
    x = x[x != 0]
    np.testing.assert_allclose(sinc(x), np.sin(x) / x, rtol=1e-14, atol=1e-16)


@pytest.mark.parametrize("order", [1, 2, 3, 5, 20, 101, 400])
def test_gauss_legendre_matches_numpy(order):
    rule = gauss_legendre(order)
    nodes, weights = np.polynomial.legendre.leggauss(order)
    np.testing.assert_allclose(rule.nodes, nodes, atol=1e-14)
    np.testing.assert_allclose(rule.weights, weights, rtol=1e-11, atol=1e-15)
    assert np.all(np.diff(rule.nodes) > 0)


@pytest.mark.parametrize("order", [1, 4, 9, 30])
def test_gauss_legendre_integrates_polynomials_exactly(order):
    rule = gauss_legendre(order)
    for degree in range(0, 2 * order):
        exact = 0.0 if degree % 2 else 2.0 / (degree + 1)
        assert rule.integrate(rule.nodes ** degree) == pytest.approx(exact, abs=1e-13)


def test_gauss_legendre_large_order():
    rule = gauss_legendre(5000)
    assert rule.weights.sum() == pytest.approx(2.0, abs=1e-12)
    assert np.all(rule.weights > 0)
    # cos is entire; the rule is essentially exact
    assert rule.integrate(np.cos(3 * rule.nodes)) == pytest.approx(2 * np.sin(3.0) / 3.0, abs=1e-13)


def test_gauss_legendre_is_cached_and_read_only():
    assert gauss_legendre(12) is gauss_legendre(12)
    with pytest.raises(ValueError):
        gauss_legendre(12).nodes[0] = 0.0


def test_gauss_legendre_rejects_order_zero():
    with pytest.raises(InvalidParameterError):
        gauss_legendre(0)


if __name__ == "__main__":
    pytest.main([str(Path(__file__)), "--tb=auto"])
