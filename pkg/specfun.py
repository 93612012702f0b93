"""
Scalar special functions and Gauss-Legendre quadrature.

Everything here is vectorised over numpy arrays and pure; quadrature rules are
cached per order and returned read-only.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from errors import ConvergenceError, InvalidParameterError

logger = logging.getLogger(__name__)

# I0 switches from the power series to the large-argument expansion here
I0_SERIES_LIMIT = 15.0
_I0_SERIES_TERMS = 60
_I0_ASYMPTOTIC_TERMS = 30
_NEWTON_MAX_ITER = 100


@dataclass(frozen=True)
class QuadratureRule:
    """Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes: np.ndarray
    weights: np.ndarray
    order: int

    def integrate(self, values: np.ndarray) -> np.ndarray:
        """Apply the rule to samples taken at ``nodes`` (last axis)."""
        return values @ self.weights


def _i0_series(x: np.ndarray) -> np.ndarray:
    q = 0.25 * x * x
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _I0_SERIES_TERMS):
        term = term * q / (k * k)
        total = total + term
    return total


def _i0e_asymptotic(x: np.ndarray) -> np.ndarray:
    """e^{-x} I0(x) from the large-argument expansion (x > I0_SERIES_LIMIT)."""
    term = np.ones_like(x)
    total = np.ones_like(x)
    for k in range(1, _I0_ASYMPTOTIC_TERMS + 1):
        term = term * (2 * k - 1) ** 2 / (8.0 * k * x)
        total = total + term
    return total / np.sqrt(2.0 * np.pi * x)


def bessel_i0e(x):
    """Exponentially scaled modified Bessel function e^{-|x|} I0(x)."""
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x <= I0_SERIES_LIMIT
    out[small] = _i0_series(x[small]) * np.exp(-x[small])
    out[~small] = _i0e_asymptotic(x[~small])
    return out if out.ndim else float(out)


def bessel_i0(x):
    """
    Modified Bessel function of the first kind, order zero.

    Power series up to x = 15, large-argument expansion beyond. I0 is even,
    so negative arguments are folded.

    Args:
        x: Real scalar or array

    Returns:
        I0(x), same shape as x

    Raises:
        OverflowError: if I0(x) exceeds the double range (x beyond ~713)
    """
    x = np.abs(np.asarray(x, dtype=float))
    out = np.empty_like(x)
    small = x <= I0_SERIES_LIMIT
    out[small] = _i0_series(x[small])
    big = x[~small]
    if big.size:
        # split e^x so the product can reach the top of the double range
        half = np.exp(0.5 * big)
        with np.errstate(over='ignore'):
            out[~small] = (half * _i0e_asymptotic(big)) * half
        if not np.all(np.isfinite(out[~small])):
            raise OverflowError(f"bessel_i0 overflows for x = {big.max():g}")
    return out if out.ndim else float(out)


def sinc(x):
    """sin(x)/x, with sinc(0) = 1 and a Taylor expansion near zero."""
    a = np.abs(np.asarray(x, dtype=float))
    tiny = a < 1e-4
    with np.errstate(invalid='ignore', divide='ignore'):
        out = np.where(tiny, 1.0 - a * a / 6.0 + a ** 4 / 120.0, np.sin(a) / a)
    return out if out.ndim else float(out)


def legendre_with_derivative(order: int, x: np.ndarray):
    """P_order(x) and its derivative by the three-term recurrence."""
    p_prev = np.ones_like(x)
    p = x.copy()
    if order == 0:
        return p_prev, np.zeros_like(x)
    for k in range(2, order + 1):
        p_prev, p = p, ((2 * k - 1) * x * p - (k - 1) * p_prev) / k
    dp = order * (x * p - p_prev) / (x * x - 1.0)
    return p, dp


@lru_cache(maxsize=256)
def gauss_legendre(order: int) -> QuadratureRule:
    """
    Gauss-Legendre rule of the given order on [-1, 1].

    Nodes come from Newton iteration on the Legendre recurrence started at the
    Chebyshev-like guess cos(pi (i - 1/4) / (order + 1/2)); only the positive
    half is iterated and the rule is mirrored.

    Raises:
        InvalidParameterError: order < 1
        ConvergenceError: Newton fails within 100 iterations
    """
    if order < 1:
        raise InvalidParameterError(f"quadrature order must be >= 1, got {order}")

    half = (order + 1) // 2
    i = np.arange(1, half + 1)
    x = np.cos(np.pi * (i - 0.25) / (order + 0.5))
    for iteration in range(_NEWTON_MAX_ITER):
        p, dp = legendre_with_derivative(order, x)
        dx = p / dp
        x = x - dx
        if np.max(np.abs(dx)) < 1e-14:
            break
    else:
        raise ConvergenceError(f"Gauss-Legendre Newton iteration did not converge for order {order}")

    _, dp = legendre_with_derivative(order, x)
    w = 2.0 / ((1.0 - x * x) * dp * dp)

    # x is decreasing from near +1; mirror into an increasing rule
    if order % 2:
        x[-1] = 0.0
        nodes = np.concatenate([-x[:-1], x[::-1]])
        weights = np.concatenate([w[:-1], w[::-1]])
    else:
        nodes = np.concatenate([-x, x[::-1]])
        weights = np.concatenate([w, w[::-1]])
    nodes.setflags(write=False)
    weights.setflags(write=False)
    logger.debug(f"Gauss-Legendre order {order}: {iteration + 1} Newton steps")
    return QuadratureRule(nodes=nodes, weights=weights, order=order)
