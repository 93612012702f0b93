"""
Fourier transforms of the unscaled kernels.

Convention: phi_hat(xi) = int_{-1}^{1} phi(z) e^{i xi z} dz.

Quadrature is the ground truth.  The ES kernel has a square-root endpoint
singularity in its derivative, so integrals are taken in the angular variable
z = sin(pi t / 2), where the integrand becomes entire and Gauss-Legendre in t
converges geometrically.

Above cutoff a transform is of size e^{-beta} while the integrand is of size
1, so on the real line it drowns in rounding.  There the path [0, 1] is moved
into the upper half plane (up the imaginary axis, across at infinity, down the
line Re z = 1); the first leg contributes nothing to the real part and the
last one has no cancellation of that order.  Just below cutoff the same
trouble is milder but real, and the path is pushed up only as far as the
saddle point of the integrand instead.  Both kernels extend to entire (KB) or
cut-plane analytic (ES) functions, so the same paths serve both families.

The analytic KB pair, the ES saddle-point forms above and below cutoff, the
sinc tail and the tail bounds live alongside.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from errors import DomainError, FrequencyTooLargeError
from kernels import KernelFamily, KernelSpec, kernel_eval
from specfun import bessel_i0e, gauss_legendre, sinc

logger = logging.getLogger(__name__)

MAX_QUADRATURE_ORDER = 20000
# log-magnitude below the e^{beta/2} envelope at which the contour integral is cut
CONTOUR_DEPTH = 45.0
# log-ratio of integrand to transform above which the saddle path is used
SADDLE_DEPTH = 8.0
# rho used to place the saddle path for frequencies at or past the cutoff
SADDLE_MAX_RHO = 0.95
# complex entries per chunk of the (frequency x node) phase matrix
_CHUNK_ENTRIES = 1 << 22


@dataclass(frozen=True)
class SpectrumSample:
    """One kernel-transform value at unscaled frequency xi (rho = xi / beta)."""
    xi: float
    rho: float
    value: complex

    @classmethod
    def at(cls, spec: KernelSpec, xi: float) -> "SpectrumSample":
        return cls(xi=xi, rho=xi / spec.beta, value=complex(ft_quadrature(spec, xi)))


def quadrature_order(beta: float, xi) -> np.ndarray:
    """
    Gauss-Legendre order resolving oscillation (~|xi|) and growth (~beta).

    The base rule ceil((|xi| + beta)/2) + 40 counts nodes in z; the angular
    substitution stretches the centre of the interval by pi/2, so the
    frequency-dependent part is scaled by the same factor.
    """
    xi = np.abs(np.asarray(xi, dtype=float))
    return np.ceil(0.5 * math.pi * (xi + beta) / 2.0).astype(int) + 40


def _angular_rule(order: int):
    """Nodes z = sin(pi t/2) and weights including the Jacobian."""
    rule = gauss_legendre(order)
    theta = 0.5 * math.pi * rule.nodes
    z = np.sin(theta)
    jac = rule.weights * 0.5 * math.pi * np.cos(theta)
    return z, jac


def _transform_by_order(xi: np.ndarray, integrand, beta: float, order_scale: int = 1) -> np.ndarray:
    """
    Sum integrand(z) * e^{i xi z} over the angular rule, grouping frequencies
    that share a quadrature order.
    """
    orders = quadrature_order(beta, xi) * order_scale
    if orders.size and orders.max() > MAX_QUADRATURE_ORDER:
        raise FrequencyTooLargeError(
            f"quadrature order {orders.max()} exceeds cap {MAX_QUADRATURE_ORDER} "
            f"(|xi| = {np.abs(xi).max():g}); use the asymptotic or tail-bound formulas")
    out = np.empty(xi.shape, dtype=complex)
    for order in np.unique(orders):
        sel = np.nonzero(orders == order)[0]
        z, jac = _angular_rule(int(order))
        weighted = jac * integrand(z)
        step = max(1, _CHUNK_ENTRIES // z.size)
        for start in range(0, sel.size, step):
            idx = sel[start:start + step]
            out[idx] = np.exp(1j * np.outer(xi[idx], z)) @ weighted
    return out


def contour_threshold(beta: float) -> float:
    """|xi| from which the transform is taken on the path down Re z = 1."""
    return beta + max(0.02 * beta, 1.0)


def _saddle_depth(beta: float, xi: np.ndarray) -> np.ndarray:
    # log of (real-line integrand size / transform size), from the saddle-point form
    rho2 = np.minimum((xi / beta) ** 2, 1.0)
    return beta * (1.0 - np.sqrt(1.0 - rho2))


def _contour_length_and_order(beta: float, xi: np.ndarray):
    # |integrand| <= e^{beta/2 - (xi - beta) t^2}; cut where that falls below e^{-CONTOUR_DEPTH}
    length = np.sqrt((0.5 * beta + CONTOUR_DEPTH) / (xi - beta))
    order = np.ceil(length * (beta + 4.0 * np.sqrt(xi))).astype(int) + 60
    return length, order


def _kernel_wave(spec: KernelSpec, s, z, xi):
    """phi(z) e^{i xi z} for complex z with s = sqrt(1 - z^2), growth folded into one exponent."""
    if spec.family is KernelFamily.ES:
        return np.exp(spec.beta * (s - 1.0) + 1j * xi * z)
    w = spec.beta * s
    return (special.ive(0, w) * np.exp(np.abs(w.real) - spec.beta + 1j * xi * z)
            / bessel_i0e(spec.beta))


def _edge_leg(spec: KernelSpec, xi: np.ndarray, length: np.ndarray, orders: np.ndarray) -> np.ndarray:
    """int_0^length phi(1 + i t^2) e^{i xi (1 + i t^2)} 2t dt, grouped by order."""
    out = np.empty(xi.shape, dtype=complex)
    for order in np.unique(orders):
        sel = np.nonzero(orders == order)[0]
        rule = gauss_legendre(int(order))
        step = max(1, _CHUNK_ENTRIES // rule.order)
        for start in range(0, sel.size, step):
            idx = sel[start:start + step]
            half = 0.5 * length[idx, None]
            t = half * (rule.nodes[None, :] + 1.0)
            vals = _kernel_wave(spec, t * np.sqrt(t * t - 2j), 1.0 + 1j * t * t, xi[idx, None]) * 2.0 * t
            out[idx] = (vals * half) @ rule.weights
    return out


def ft_contour(spec: KernelSpec, xi, order_scale: int = 1):
    """
    Transform above cutoff along Re z = 1.

    phi_hat(xi) = 2 Im L,  L = int_0^inf phi(1 + i t^2) e^{i xi (1 + i t^2)} 2t dt.

    Raises:
        DomainError: |xi| <= beta (the leg across at infinity does not vanish)
    """
    xi_arr = np.abs(np.atleast_1d(np.asarray(xi, dtype=float)))
    if np.any(xi_arr <= spec.beta):
        raise DomainError("the contour route needs |xi| > beta")
    length, orders = _contour_length_and_order(spec.beta, xi_arr)
    out = 2.0 * np.imag(_edge_leg(spec, xi_arr, length, orders * order_scale))
    return out if np.ndim(xi) else float(out[0])


def es_ft_contour(beta: float, xi, order_scale: int = 1):
    """ES transform above cutoff along Re z = 1 (see ft_contour)."""
    return ft_contour(KernelSpec(KernelFamily.ES, beta), xi, order_scale)


def ft_saddle_path(spec: KernelSpec, xi, order_scale: int = 1):
    """
    Transform near and just above cutoff on a path through the saddle.

    [0, 1] is replaced by 0 -> ic -> 1 + ic -> 1 with c = rho / sqrt(1 - rho^2)
    clipped to [0.5, 3].  The first leg is purely imaginary; on the other two
    the integrand is no larger than the result by more than e^{0.3 beta}.
    """
    xi_arr = np.abs(np.atleast_1d(np.asarray(xi, dtype=float)))
    beta = spec.beta
    rho = np.minimum(xi_arr / beta, SADDLE_MAX_RHO)
    height = np.clip(rho / np.sqrt(1.0 - rho * rho), 0.5, 3.0)

    across = np.empty(xi_arr.shape, dtype=complex)
    orders = quadrature_order(beta, xi_arr) * order_scale
    for order in np.unique(orders):
        sel = np.nonzero(orders == order)[0]
        rule = gauss_legendre(int(order))
        x = 0.5 * (rule.nodes + 1.0)
        z = x[None, :] + 1j * height[sel, None]
        vals = _kernel_wave(spec, np.sqrt(1.0 - z * z), z, xi_arr[sel, None])
        across[sel] = 0.5 * (vals @ rule.weights)

    length = np.sqrt(height)
    down = np.ceil(length * (beta + 4.0 * np.sqrt(xi_arr))).astype(int) + 60
    edge = _edge_leg(spec, xi_arr, length, down * order_scale)
    out = 2.0 * np.real(across) + 2.0 * np.imag(edge)
    return out if np.ndim(xi) else float(out[0])


def ft_quadrature(spec: KernelSpec, xi, order_scale: int = 1):
    """
    Fourier transform of the unscaled kernel by Gauss-Legendre quadrature.

    Frequencies at or beyond contour_threshold(beta) use the path down
    Re z = 1.  Below it, frequencies whose transform is more than e^{-8}
    smaller than the integrand go through the saddle; the rest are
    integrated on [-1, 1].

    Args:
        spec: Kernel family and beta
        xi: Unscaled frequency (scalar or array)
        order_scale: Multiplier on the quadrature order (2 gives the
            doubled-order self-check)

    Returns:
        Complex phi_hat(xi), same shape as xi

    Raises:
        FrequencyTooLargeError: if the required real-line order exceeds 20000
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty(xi_arr.shape, dtype=complex)
    mag = np.abs(xi_arr)
    far = mag >= contour_threshold(spec.beta)
    saddle = ~far & (_saddle_depth(spec.beta, mag) > SADDLE_DEPTH)
    line = ~far & ~saddle
    if np.any(far):
        out[far] = ft_contour(spec, mag[far], order_scale)
    if np.any(saddle):
        out[saddle] = ft_saddle_path(spec, mag[saddle], order_scale)
    if np.any(line):
        out[line] = _transform_by_order(xi_arr[line], lambda z: kernel_eval(spec, z),
                                        spec.beta, order_scale)
    return out if np.ndim(xi) else complex(out[0])


def ft_real(spec: KernelSpec, xi):
    """Real part of ft_quadrature (the transform of an even real kernel is real)."""
    out = np.real(ft_quadrature(spec, xi))
    return out if np.ndim(out) else float(out)


def kb_ft_analytic(beta: float, xi):
    """
    Closed-form KB transform (2/I0(beta)) sinh(sqrt(beta^2 - xi^2)) / sqrt(beta^2 - xi^2),
    continued as sin(sqrt(xi^2 - beta^2)) / sqrt(xi^2 - beta^2) above cutoff.
    """
    xi = np.asarray(xi, dtype=float)
    t = beta * beta - xi * xi
    i0e_beta = bessel_i0e(beta)
    out = np.empty_like(t)

    near = np.abs(t) < 1e-2
    # sinh(r)/r = sum t^k / (2k+1)!, valid for either sign of t = r^2
    tn = t[near]
    term = np.ones_like(tn)
    series = np.ones_like(tn)
    for k in range(1, 8):
        term = term * tn / ((2 * k) * (2 * k + 1))
        series = series + term
    out[near] = 2.0 * series * math.exp(-beta) / i0e_beta

    below = (t > 0) & ~near
    r = np.sqrt(t[below])
    out[below] = (np.exp(r - beta) - np.exp(-r - beta)) / (r * i0e_beta)

    above = (t < 0) & ~near
    r = np.sqrt(-t[above])
    out[above] = 2.0 * np.sin(r) / r * math.exp(-beta) / i0e_beta
    return out if out.ndim else float(out)


def es_ft_below_cutoff(beta: float, rho):
    """Leading saddle-point term of phi_hat_ES(rho beta) for |rho| < 1."""
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) >= 1.0):
        raise DomainError("es_ft_below_cutoff needs |rho| < 1")
    q = 1.0 - rho * rho
    out = math.sqrt(2 * math.pi / beta) * q ** -0.75 * np.exp(beta * (np.sqrt(q) - 1.0))
    return out if out.ndim else float(out)


def es_ft_above_cutoff(beta: float, rho):
    """Leading saddle-point term of phi_hat_ES(rho beta) for |rho| > 1."""
    rho = np.asarray(rho, dtype=float)
    if np.any(np.abs(rho) <= 1.0):
        raise DomainError("es_ft_above_cutoff needs |rho| > 1")
    q = rho * rho - 1.0
    out = (2.0 * math.sqrt(2 * math.pi / beta) * math.exp(-beta)
           * np.sin(beta * np.sqrt(q) - math.pi / 4) / q ** 0.75)
    return out if out.ndim else float(out)


def es_ft_sinc_tail(beta: float, xi):
    """Fixed-beta large-|xi| form 2 e^{-beta} sin(xi)/xi from the endpoint jumps."""
    out = 2.0 * math.exp(-beta) * np.asarray(sinc(xi))
    return out if np.ndim(out) else float(out)


def es_ft_deviation(beta: float, xi):
    """
    D_hat(beta, xi) = e^beta phi_hat_ES(xi) - 2 sin(xi)/xi.

    Integrated directly as int (e^{beta sqrt(1-z^2)} - 1) e^{i xi z} dz so the
    top-hat part never has to be subtracted numerically.
    """
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    integrand = lambda z: np.expm1(beta * np.sqrt(np.clip(1.0 - z * z, 0.0, None)))
    out = _transform_by_order(xi_arr, integrand, beta)
    return out if np.ndim(xi) else complex(out[0])


def es_ft_tail_bound(beta: float, xi):
    """Upper bound 9 e^{-beta} (beta^2/xi^2 + 1/|xi|) on |phi_hat_ES(xi)|, valid for |xi| >= 3 beta."""
    xi = np.abs(np.asarray(xi, dtype=float))
    if np.any(xi < 3.0 * beta):
        raise DomainError("es_ft_tail_bound holds only for |xi| >= 3 beta")
    out = 9.0 * math.exp(-beta) * (beta * beta / (xi * xi) + 1.0 / xi)
    return out if out.ndim else float(out)
