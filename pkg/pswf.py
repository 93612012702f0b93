"""
Order-zero prolate spheroidal wave function psi0 with bandwidth c = beta.

psi0 is expanded in orthonormal even Legendre polynomials
Pbar_k = sqrt(k + 1/2) P_k; the prolate operator
-(d/dz)(1 - z^2)(d/dz) + beta^2 z^2 is symmetric tridiagonal in that basis and
its lowest eigenvector gives the expansion coefficients.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import legendre
from scipy.linalg import eigh_tridiagonal
from scipy.special import spherical_jn

from errors import DomainError, InvalidParameterError, NumericalInconsistencyError, TruncationError
from specfun import gauss_legendre

logger = logging.getLogger(__name__)

MAX_BETA = 60.0
DECAY_TOLERANCE = 1e-13
RESIDUAL_TOLERANCE = 1e-12
MU0_CROSSCHECK_TOLERANCE = 1e-4


@dataclass(frozen=True)
class PswfResult:
    """
    psi0 at one bandwidth, normalised to unit L2 norm on [-1, 1] with psi0(0) > 0.

    ``legendre_coeffs[j]`` multiplies Pbar_{2j}.
    """
    beta: float
    legendre_coeffs: np.ndarray
    chi0: float
    lambda0: float
    mu0: float
    residual: float

    @property
    def basis_size(self) -> int:
        return self.legendre_coeffs.size

    def series(self) -> np.ndarray:
        """Coefficients of psi0 in the standard (unnormalised) Legendre basis, odd degrees zero."""
        return _standard_series(self.legendre_coeffs)

    @property
    def value_at_zero(self) -> float:
        return float(legendre.legval(0.0, self.series()))


def _standard_series(coeffs: np.ndarray) -> np.ndarray:
    k = 2 * np.arange(coeffs.size)
    full = np.zeros(k[-1] + 1)
    full[k] = coeffs * np.sqrt(k + 0.5)
    return full


def prolate_tridiagonal(beta: float, basis_size: int):
    """Diagonal and off-diagonal of the prolate operator on Pbar_0, Pbar_2, ..."""
    k = 2.0 * np.arange(basis_size)
    c2 = beta * beta
    diag = k * (k + 1) + c2 * (2 * k * (k + 1) - 1) / ((2 * k + 3) * (2 * k - 1))
    kk = k[:-1]
    off = c2 * (kk + 2) * (kk + 1) / ((2 * kk + 3) * np.sqrt((2 * kk + 1) * (2 * kk + 5)))
    return diag, off


def _tridiagonal_residual(diag, off, vec, value) -> float:
    tv = diag * vec
    tv[:-1] += off * vec[1:]
    tv[1:] += off * vec[:-1]
    scale = max(np.max(np.abs(diag)), 1.0)
    return float(np.max(np.abs(tv - value * vec)) / scale)


def pswf_solve(beta: float, basis_size: int = None) -> PswfResult:
    """
    Solve for psi0 at bandwidth beta.

    Args:
        beta: Bandwidth parameter, 0 < beta <= 60
        basis_size: Number of even Legendre terms (default int(2 beta) + 30)

    Returns:
        PswfResult with lambda0 = int psi0 / psi0(0) and mu0 = beta lambda0^2 / (2 pi)

    Raises:
        InvalidParameterError: beta or basis_size out of range
        TruncationError: trailing coefficient not below 1e-13 of the largest
        NumericalInconsistencyError: eigen-residual above 1e-12
    """
    if not 0 < beta <= MAX_BETA:
        raise InvalidParameterError(f"beta must be in (0, {MAX_BETA:g}], got {beta}")
    if basis_size is None:
        basis_size = int(2 * beta) + 30
    if basis_size < 2:
        raise InvalidParameterError(f"basis_size must be >= 2, got {basis_size}")

    diag, off = prolate_tridiagonal(beta, basis_size)
    values, vectors = eigh_tridiagonal(diag, off, select='i', select_range=(0, 0))
    chi0 = float(values[0])
    coeffs = vectors[:, 0].copy()

    if np.abs(coeffs[-1]) > DECAY_TOLERANCE * np.max(np.abs(coeffs)):
        raise TruncationError(f"Legendre coefficients of psi0 at beta={beta} have not decayed "
                              f"with basis_size={basis_size}")
    residual = _tridiagonal_residual(diag, off, coeffs, chi0)
    if residual > RESIDUAL_TOLERANCE:
        raise NumericalInconsistencyError(f"prolate eigen-residual {residual:.3g} at beta={beta}")

    at_zero = float(legendre.legval(0.0, _standard_series(coeffs)))
    if at_zero < 0:
        coeffs = -coeffs
        at_zero = -at_zero
    coeffs.setflags(write=False)

    # int Pbar_0 = sqrt(2); higher even Pbar_k integrate to zero
    lambda0 = math.sqrt(2.0) * coeffs[0] / at_zero
    mu0 = beta * lambda0 * lambda0 / (2 * math.pi)
    logger.debug(f"psi0 at beta={beta}: chi0={chi0:.10g}, 1-mu0={1 - mu0:.4g}, basis={basis_size}")
    return PswfResult(beta=beta, legendre_coeffs=coeffs, chi0=chi0, lambda0=lambda0,
                      mu0=mu0, residual=residual)


def pswf_eval(result: PswfResult, z, normalize_center: bool = False):
    """
    psi0(z) by Clenshaw summation of the Legendre series.

    Args:
        result: Output of pswf_solve
        z: Point(s) in [-1, 1]
        normalize_center: Divide by psi0(0) so the value at 0 is 1

    Raises:
        DomainError: |z| > 1
    """
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 1.0):
        raise DomainError("psi0 is evaluated only on its support [-1, 1]")
    out = legendre.legval(z, result.series())
    if normalize_center:
        out = out / result.value_at_zero
    return out if np.ndim(out) else float(out)


def pswf_ft(result: PswfResult, xi) -> np.ndarray:
    """psi0_hat(xi) = sum_k a_k sqrt(k + 1/2) 2 i^k j_k(xi) (real, since only even k occur)."""
    xi = np.asarray(xi, dtype=float)
    k = 2 * np.arange(result.basis_size)
    weights = result.legendre_coeffs * np.sqrt(k + 0.5) * 2.0 * (-1.0) ** (k // 2)
    jk = spherical_jn(k[:, None], np.abs(np.atleast_1d(xi))[None, :])
    out = weights @ jk
    return out if xi.ndim else float(out[0])


def mu0_by_energy(result: PswfResult) -> float:
    """mu0 as the fraction of psi0_hat energy inside [-beta, beta] (total energy 2 pi)."""
    beta = result.beta
    rule = gauss_legendre(int(2 * beta) + 80)
    vals = pswf_ft(result, beta * rule.nodes)
    return float(beta * rule.integrate(vals * vals) / (2 * math.pi))


def pswf_mu0(result: PswfResult) -> float:
    """
    Energy concentration eigenvalue mu0, cross-checked by two routes.

    The primary value beta lambda0^2 / (2 pi) is compared against the in-band
    energy fraction of psi0_hat.

    Raises:
        NumericalInconsistencyError: the routes disagree by more than 1e-4 relative
    """
    direct = mu0_by_energy(result)
    gap = abs(direct - result.mu0) / result.mu0
    if gap > MU0_CROSSCHECK_TOLERANCE:
        raise NumericalInconsistencyError(
            f"mu0 routes disagree at beta={result.beta}: {result.mu0:.12g} vs {direct:.12g}")
    logger.debug(f"mu0 at beta={result.beta}: {result.mu0:.15g} (energy route {direct:.15g})")
    return result.mu0


def fuchs_ratio(result: PswfResult) -> float:
    """(1 - mu0) / (4 sqrt(pi beta) e^{-2 beta}); tends to 1 as beta grows."""
    beta = result.beta
    return (1.0 - result.mu0) / (4.0 * math.sqrt(math.pi * beta) * math.exp(-2.0 * beta))


def gaussian_limit(beta: float, z):
    """Central-region limit e^{-beta z^2 / 2} of psi0(z) / psi0(0)."""
    z = np.asarray(z, dtype=float)
    out = np.exp(-0.5 * beta * z * z)
    return out if out.ndim else float(out)
