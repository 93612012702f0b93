"""
In-order complex DFTs of 5-smooth length.

Sign convention: the forward transform uses e^{+2 pi i l k / n}, matching the
fine-grid sum of the type-1 pipeline; the inverse carries the 1/n factor.
scipy.fft does the work; this module fixes the contract around it.
"""

import logging

import numpy as np
import scipy.fft

from errors import InvalidInputError, UnsupportedSizeError
from kernels import is_five_smooth

logger = logging.getLogger(__name__)

ComplexVector = np.ndarray


def as_complex_vector(data, name: str = "vector") -> ComplexVector:
    """Validate and copy-if-needed into a contiguous 1-D complex128 array."""
    v = np.ascontiguousarray(np.asarray(data, dtype=np.complex128))
    if v.ndim != 1 or v.size == 0:
        raise InvalidInputError(f"{name} must be a non-empty 1-D array, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise InvalidInputError(f"{name} contains non-finite entries")
    return v


def _check_size(n: int):
    if not is_five_smooth(n):
        raise UnsupportedSizeError(f"DFT length {n} is not 5-smooth")


def dft_forward(v, workers: int = 1) -> ComplexVector:
    """F_k = sum_l v_l e^{+2 pi i l k / n}."""
    v = as_complex_vector(v, "dft input")
    _check_size(v.size)
    return scipy.fft.ifft(v, norm="forward", workers=workers)


def dft_inverse(v, workers: int = 1) -> ComplexVector:
    """Inverse of dft_forward: (1/n) sum_k v_k e^{-2 pi i l k / n}."""
    v = as_complex_vector(v, "dft input")
    _check_size(v.size)
    return scipy.fft.fft(v, norm="forward", workers=workers)


def dft_direct(v) -> ComplexVector:
    """O(n^2) reference for dft_forward (any length)."""
    v = as_complex_vector(v, "dft input")
    n = v.size
    lk = np.outer(np.arange(n), np.arange(n)) % n
    return np.exp(2j * np.pi * lk / n) @ v
