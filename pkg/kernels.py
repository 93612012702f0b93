"""
Spreading kernels on [-1, 1] and the fine-grid sizing they are used with.

Covers the exponential-of-semicircle (ES) and Kaiser-Bessel (KB) kernels, their
dilation/periodisation onto a fine grid of size n, and the large-beta
asymptotic forms that link them to the order-zero prolate function.
"""

import logging
import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from errors import DomainError, InvalidParameterError
from specfun import bessel_i0e

logger = logging.getLogger(__name__)


class KernelFamily(Enum):
    ES = "es"
    KB = "kb"

    @classmethod
    def parse(cls, name) -> "KernelFamily":
        """Accept a KernelFamily or its (case-insensitive) name."""
        if isinstance(name, cls):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise InvalidParameterError(f"unknown kernel family '{name}' (expected es or kb)")


@dataclass(frozen=True)
class KernelSpec:
    """Kernel family plus shape parameter beta."""
    family: KernelFamily
    beta: float

    def __post_init__(self):
        if not self.beta > 0:
            raise InvalidParameterError(f"kernel beta must be > 0, got {self.beta}")

    def __call__(self, z):
        return kernel_eval(self, z)


def is_five_smooth(n: int) -> bool:
    """True if n > 0 has no prime factor larger than 5."""
    if n < 1:
        return False
    for p in (2, 3, 5):
        while n % p == 0:
            n //= p
    return n == 1


def next_smooth_even(target: float) -> int:
    """Smallest even 5-smooth integer >= target."""
    n = max(2, math.ceil(target - 1e-9))
    n += n % 2
    while not is_five_smooth(n):
        n += 2
    return n


@dataclass(frozen=True)
class GridParams:
    """
    Sizing of one transform.

    ``sigma`` is the effective upsampling n/N after n has been rounded up to an
    even 5-smooth size; ``alpha`` is the scaled kernel half-width pi w / n and
    ``h`` the fine-grid spacing 2 pi / n.
    """
    N: int
    sigma: float
    n: int
    w: int
    gamma: float
    alpha: float = field(init=False)
    h: float = field(init=False)

    def __post_init__(self):
        if self.N < 2 or self.N % 2:
            raise InvalidParameterError(f"number of modes N must be even and >= 2, got {self.N}")
        if self.w < 2:
            raise InvalidParameterError(f"kernel width w must be >= 2, got {self.w}")
        if not 0 < self.gamma <= 1:
            raise InvalidParameterError(f"safety factor gamma must be in (0, 1], got {self.gamma}")
        if self.n % 2 or not is_five_smooth(self.n):
            raise InvalidParameterError(f"fine grid size n={self.n} must be even and 5-smooth")
        if self.n <= self.N:
            raise InvalidParameterError(f"fine grid size n={self.n} must exceed N={self.N}")
        if 2 * self.w >= self.n:
            raise InvalidParameterError(f"kernel width w={self.w} must be below n/2={self.n // 2}")
        object.__setattr__(self, 'alpha', math.pi * self.w / self.n)
        object.__setattr__(self, 'h', 2 * math.pi / self.n)

    @classmethod
    def create(cls, N: int, sigma: float, w: int, gamma: float = 0.98) -> "GridParams":
        """Pick n as the smallest even 5-smooth integer >= sigma N."""
        if not sigma > 1:
            raise InvalidParameterError(f"upsampling factor sigma must be > 1, got {sigma}")
        n = next_smooth_even(sigma * N)
        return cls(N=N, sigma=n / N, n=n, w=w, gamma=gamma)

    @property
    def beta(self) -> float:
        return beta_from(self.gamma, self.w, self.sigma)


def beta_from(gamma: float, w: int, sigma: float) -> float:
    """Kernel shape parameter gamma * pi * w * (1 - 1/(2 sigma))."""
    if not 0 < gamma <= 1:
        raise InvalidParameterError(f"gamma must be in (0, 1], got {gamma}")
    if w < 2:
        raise InvalidParameterError(f"w must be >= 2, got {w}")
    if not sigma > 1:
        raise InvalidParameterError(f"sigma must be > 1, got {sigma}")
    return gamma * math.pi * w * (1.0 - 1.0 / (2.0 * sigma))


def _semicircle(z: np.ndarray) -> np.ndarray:
    """sqrt(1 - z^2) on the closed support, NaN-free (0 outside)."""
    return np.sqrt(np.clip(1.0 - z * z, 0.0, None))


def kernel_eval(spec: KernelSpec, z):
    """
    Unscaled kernel phi(z), zero outside the closed support [-1, 1].

    ES: exp(beta (sqrt(1 - z^2) - 1)); KB: I0(beta sqrt(1 - z^2)) / I0(beta).
    """
    z = np.asarray(z, dtype=float)
    s = _semicircle(z)
    inside = np.abs(z) <= 1.0
    if spec.family is KernelFamily.ES:
        vals = np.exp(spec.beta * (s - 1.0))
    else:
        vals = bessel_i0e(spec.beta * s) / bessel_i0e(spec.beta) * np.exp(spec.beta * (s - 1.0))
    out = np.where(inside, vals, 0.0)
    return out if out.ndim else float(out)


def scaled_eval(spec: KernelSpec, grid: GridParams, x):
    """Dilated kernel psi(x) = phi(n x / (pi w)) = phi(x / alpha)."""
    return kernel_eval(spec, np.asarray(x, dtype=float) / grid.alpha)


def periodized_scaled_eval(spec: KernelSpec, grid: GridParams, x):
    """
    2 pi-periodisation of psi.

    The support 2 alpha is shorter than 2 pi, so after folding x into
    [-pi, pi) only the images at 0 and +-2 pi can overlap it.
    """
    y = np.mod(np.asarray(x, dtype=float) + np.pi, 2 * np.pi) - np.pi
    out = (scaled_eval(spec, grid, y)
           + scaled_eval(spec, grid, y - 2 * np.pi)
           + scaled_eval(spec, grid, y + 2 * np.pi))
    return out


def kb_asymptotic_eval(beta: float, z):
    """KB kernel with I0 replaced by its large-argument form (the ES kernel times (1-z^2)^{-1/4})."""
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) >= 1.0):
        raise DomainError("kb_asymptotic_eval needs |z| < 1 (prefactor singular at the endpoints)")
    out = np.exp(beta * (np.sqrt(1.0 - z * z) - 1.0)) / (1.0 - z * z) ** 0.25
    return out if out.ndim else float(out)


def _slepian_outer(beta: float, s: np.ndarray) -> np.ndarray:
    # normalised so the outer form tends to 1 as z -> 0
    return math.sqrt(2.0) * np.exp(beta * (s - 1.0)) / np.sqrt(s) / np.sqrt(1.0 + s)


def slepian_inner_constant(beta: float) -> float:
    """Constant of the near-endpoint I0 branch, fixed by continuity at |z| = 1 - 1/beta."""
    z_seam = 1.0 - 1.0 / beta
    s = math.sqrt(1.0 - z_seam * z_seam)
    outer = float(_slepian_outer(beta, np.array(s)))
    i0_seam = float(bessel_i0e(beta * s)) * math.exp(beta * s)
    return outer / i0_seam


def slepian_asymptotic_eval(beta: float, z, branch: str = "auto"):
    """
    Large-beta asymptotic form of psi0 away from the central region.

    ``branch`` selects "outer" (exponential-of-semicircle form),
    "inner" (I0 form near the endpoints) or "auto" (by |z| against 1 - 1/beta).

    Raises:
        InvalidParameterError: beta < 1
        DomainError: |z| < beta^{-1/2} (central region, use sleph_eval) or |z| > 1
    """
    if beta < 1:
        raise InvalidParameterError(f"slepian_asymptotic_eval needs beta >= 1, got {beta}")
    z = np.abs(np.asarray(z, dtype=float))
    if np.any(z > 1.0):
        raise DomainError("slepian_asymptotic_eval is defined on [-1, 1]")
    if np.any(z < beta ** -0.5):
        raise DomainError(f"|z| < beta^(-1/2) = {beta ** -0.5:.4g} is outside both branches")
    s = np.sqrt(1.0 - z * z)
    seam = 1.0 - 1.0 / beta
    if branch == "auto":
        use_inner = z >= seam
    elif branch in ("inner", "outer"):
        use_inner = np.full(z.shape, branch == "inner")
    else:
        raise InvalidParameterError(f"unknown branch '{branch}'")
    with np.errstate(divide='ignore'):
        outer = _slepian_outer(beta, s)
    inner = slepian_inner_constant(beta) * bessel_i0e(beta * s) * np.exp(beta * s)
    out = np.where(use_inner, inner, outer)
    return out if out.ndim else float(out)


def sleph_eval(beta: float, z):
    """Hybrid form sqrt(2) I0(beta sqrt(1-z^2)) / I0(beta) / sqrt(1 + sqrt(1-z^2)), equal to 1 at z = 0."""
    z = np.asarray(z, dtype=float)
    if np.any(np.abs(z) > 1.0):
        raise DomainError("sleph_eval is defined on [-1, 1]")
    s = np.sqrt(1.0 - z * z)
    ratio = bessel_i0e(beta * s) / bessel_i0e(beta) * np.exp(beta * (s - 1.0))
    out = math.sqrt(2.0) * ratio / np.sqrt(1.0 + s)
    return out if out.ndim else float(out)
