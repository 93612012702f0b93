"""
1D type-1 and type-2 nonuniform FFTs.

Type 1:  f_k = sum_j c_j e^{i k x_j},          -N/2 <= k < N/2
Type 2:  c_j = sum_k f_k e^{-i k x_j},         j = 1..M

Both are computed by spreading/interpolating with the periodised scaled kernel
on a fine grid of size n, one size-n DFT, and diagonal deconvolution by p_k.
The exact O(NM) sums are provided as oracles.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from errors import InvalidInputError, InvalidParameterError
from fftcore import as_complex_vector, dft_forward, dft_inverse
from kernels import GridParams, KernelFamily, KernelSpec, kernel_eval, next_smooth_even
from ktransform import ft_real

logger = logging.getLogger(__name__)

DEFAULT_GAMMA = 0.98
MIN_WIDTH = 2
MAX_WIDTH = 16
# relative tolerance in z for a grid point on the support edge
EDGE_TOL = 1e-9
# points per spreading chunk; chunk buffers are merged in chunk order
_SPREAD_CHUNK = 1 << 16
# complex entries per block of the direct-sum phase matrix
_DIRECT_BLOCK = 1 << 21


@dataclass(frozen=True)
class NuPoints:
    """Nonuniform points, folded into [-pi, pi) at construction."""
    x: np.ndarray

    def __post_init__(self):
        x = np.asarray(self.x, dtype=float).ravel()
        if x.size == 0:
            raise InvalidInputError("at least one nonuniform point is required")
        if not np.all(np.isfinite(x)):
            raise InvalidInputError("nonuniform points must be finite")
        folded = np.mod(x + np.pi, 2 * np.pi) - np.pi
        folded[folded >= np.pi] -= 2 * np.pi
        folded.setflags(write=False)
        object.__setattr__(self, 'x', folded)

    def __len__(self):
        return self.x.size


@dataclass(frozen=True)
class Plan:
    """
    Precomputed state of one transform size.

    ``p`` holds the deconvolution factors for k = -N/2 .. N/2-1 in ascending
    order; ``width_clamped`` is set when a tolerance asked for a width outside
    [2, 16].
    """
    grid: GridParams
    kernel: KernelSpec
    p: np.ndarray
    width_clamped: bool = False
    tol: Optional[float] = None

    @property
    def N(self) -> int:
        return self.grid.N

    @property
    def n(self) -> int:
        return self.grid.n

    @property
    def w(self) -> int:
        return self.grid.w

    @property
    def beta(self) -> float:
        return self.kernel.beta

    def modes(self) -> np.ndarray:
        """Mode indices k = -N/2 .. N/2-1."""
        return np.arange(-self.N // 2, self.N // 2)

    def summary(self) -> str:
        return (f"N={self.N} n={self.n} sigma={self.grid.sigma:.6g} w={self.w} "
                f"beta={self.beta:.6g} gamma={self.grid.gamma} kernel={self.kernel.family.value}")


def width_for_tolerance(tol: float, sigma: float, gamma: float):
    """
    Kernel width reaching ``tol`` from the exponential rate pi gamma sqrt(1 - 1/sigma),
    ignoring the algebraic prefactor.

    Returns:
        (w, clamped) with w in [2, 16]
    """
    if not 1e-15 < tol < 1e-1:
        raise InvalidParameterError(f"tolerance must be in (1e-15, 1e-1), got {tol}")
    raw = math.ceil(math.log(1.0 / tol) / (math.pi * gamma * math.sqrt(1.0 - 1.0 / sigma))) + 1
    w = min(max(raw, MIN_WIDTH), MAX_WIDTH)
    return w, w != raw


def deconvolution_factors(kernel: KernelSpec, grid: GridParams) -> np.ndarray:
    """p_k = 2 / (w phi_hat(pi w k / n)) for k = -N/2 .. N/2-1, from quadrature."""
    half = np.arange(grid.N // 2 + 1)
    phihat = ft_real(kernel, grid.alpha * half)
    p_half = 2.0 / (grid.w * phihat)
    # mirror so p_{-k} = p_k exactly
    return np.concatenate([p_half[:0:-1], p_half[:-1]])


def make_plan(N: int, sigma: float = 2.0, w: Optional[int] = None, tol: Optional[float] = None,
              gamma: float = DEFAULT_GAMMA, kernel_family="es") -> Plan:
    """
    Build an immutable plan.

    Exactly one of ``w`` (kernel width in fine-grid points) or ``tol`` must be
    given.  n is the smallest even 5-smooth size >= sigma N, enlarged if needed
    so that w < n/2; beta then follows from the effective sigma = n/N.

    Raises:
        InvalidParameterError: on any domain violation
    """
    if (w is None) == (tol is None):
        raise InvalidParameterError("give exactly one of w or tol")
    if not isinstance(N, (int, np.integer)) or N < 2 or N % 2:
        raise InvalidParameterError(f"N must be an even integer >= 2, got {N}")
    if not sigma > 1:
        raise InvalidParameterError(f"sigma must be > 1, got {sigma}")
    if not 0 < gamma <= 1:
        raise InvalidParameterError(f"gamma must be in (0, 1], got {gamma}")
    family = KernelFamily.parse(kernel_family)

    clamped = False
    if tol is not None:
        w, clamped = width_for_tolerance(tol, sigma, gamma)
        if clamped:
            logger.warning(f"Kernel width for tol={tol:g} clamped to w={w}")
    elif w < MIN_WIDTH:
        raise InvalidParameterError(f"w must be >= {MIN_WIDTH}, got {w}")

    n = next_smooth_even(max(sigma * N, 2 * w + 1))
    grid = GridParams(N=int(N), sigma=n / N, n=n, w=int(w), gamma=gamma)
    spec = KernelSpec(family, grid.beta)
    p = deconvolution_factors(spec, grid)
    if not np.all(np.isfinite(p)) or np.any(p <= 0):
        raise InvalidParameterError("deconvolution factors are not finite and positive")
    p.setflags(write=False)

    plan = Plan(grid=grid, kernel=spec, p=p, width_clamped=clamped, tol=tol)
    logger.info(f"Created plan: {plan.summary()}")
    return plan


def _as_points(pts) -> NuPoints:
    return pts if isinstance(pts, NuPoints) else NuPoints(pts)


def spreading_stencil(plan: Plan, x: np.ndarray):
    """
    Fine-grid indices and kernel weights touched by each point.

    Each point x hits the grid points l with l h - x in [-alpha, alpha];
    indices wrap mod n.  A grid point landing on the support edge (|z| = 1
    to within EDGE_TOL) gets half the edge value, so the two jumps of the
    kernel are sampled at their midpoints.  Away from such hits the last
    column is outside the support and carries weight 0.

    Returns:
        (idx, vals), both of shape (len(x), w + 1)
    """
    grid = plan.grid
    l0 = np.ceil(x / grid.h - 0.5 * grid.w * (1.0 + EDGE_TOL))
    l = l0[:, None] + np.arange(grid.w + 1)[None, :]
    z = (l * grid.h - x[:, None]) / grid.alpha
    edge = np.abs(np.abs(z) - 1.0) <= EDGE_TOL
    weight = np.where(edge, 0.5, np.where(np.abs(z) < 1.0, 1.0, 0.0))
    vals = weight * kernel_eval(plan.kernel, np.clip(z, -1.0, 1.0))
    idx = np.mod(l.astype(np.int64), grid.n)
    return idx, vals


def _run_chunks(func, count: int, workers: int):
    starts = range(0, count, _SPREAD_CHUNK)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(func, starts))
    return [func(s) for s in starts]


def spread(plan: Plan, pts, c, workers: int = 1) -> np.ndarray:
    """
    b_l = sum_j c_j psi_tilde(2 pi l / n - x_j), l = 0..n-1.

    A grid point exactly alpha from x_j takes half the kernel edge value
    e^{-beta} (see spreading_stencil).

    Points are processed in fixed chunks with private fine-grid buffers that
    are summed in chunk order, so the result does not depend on ``workers``.
    """
    pts = _as_points(pts)
    c = as_complex_vector(c, "strengths")
    if c.size != len(pts):
        raise InvalidInputError(f"{c.size} strengths for {len(pts)} points")
    n = plan.n

    def chunk(start):
        x = pts.x[start:start + _SPREAD_CHUNK]
        idx, vals = spreading_stencil(plan, x)
        weighted = vals * c[start:start + _SPREAD_CHUNK, None]
        flat = idx.ravel()
        return (np.bincount(flat, weights=weighted.real.ravel(), minlength=n)
                + 1j * np.bincount(flat, weights=weighted.imag.ravel(), minlength=n))

    b = np.zeros(n, dtype=complex)
    for part in _run_chunks(chunk, len(pts), workers):
        b += part
    return b


def interp(plan: Plan, pts, b, workers: int = 1) -> np.ndarray:
    """out_j = sum_l b_l psi_tilde(2 pi l / n - x_j); the adjoint of spread."""
    pts = _as_points(pts)
    b = as_complex_vector(b, "fine-grid data")
    if b.size != plan.n:
        raise InvalidInputError(f"fine-grid data has length {b.size}, plan expects n={plan.n}")

    def chunk(start):
        idx, vals = spreading_stencil(plan, pts.x[start:start + _SPREAD_CHUNK])
        return np.sum(b[idx] * vals, axis=1)

    return np.concatenate(_run_chunks(chunk, len(pts), workers))


def type1(plan: Plan, pts, c, workers: int = 1) -> np.ndarray:
    """Approximate f_k = sum_j c_j e^{i k x_j} for k = -N/2 .. N/2-1."""
    b = spread(plan, pts, c, workers)
    fine = dft_forward(b, workers=workers)
    return plan.p * fine[np.mod(plan.modes(), plan.n)]


def type2(plan: Plan, pts, f, workers: int = 1) -> np.ndarray:
    """Approximate c_j = sum_k f_k e^{-i k x_j}; the exact adjoint of type1."""
    f = as_complex_vector(f, "coefficients")
    if f.size != plan.N:
        raise InvalidInputError(f"{f.size} coefficients for a plan with N={plan.N}")
    padded = np.zeros(plan.n, dtype=complex)
    padded[np.mod(plan.modes(), plan.n)] = np.conj(plan.p) * f
    b = plan.n * dft_inverse(padded, workers=workers)
    return interp(plan, pts, b, workers)


def direct_type1(pts, c, N: int, modes: Optional[np.ndarray] = None) -> np.ndarray:
    """
    Exact type-1 sum, O(NM).

    Rows of the phase matrix are reduced with numpy's pairwise summation.
    ``modes`` restricts the output to a subset of k (default: all of -N/2..N/2-1).
    """
    pts = _as_points(pts)
    c = as_complex_vector(c, "strengths")
    if c.size != len(pts):
        raise InvalidInputError(f"{c.size} strengths for {len(pts)} points")
    if N < 2 or N % 2:
        raise InvalidParameterError(f"N must be even and >= 2, got {N}")
    k = np.arange(-N // 2, N // 2) if modes is None else np.asarray(modes)
    out = np.empty(k.size, dtype=complex)
    step = max(1, _DIRECT_BLOCK // len(pts))
    for start in range(0, k.size, step):
        kk = k[start:start + step]
        out[start:start + step] = np.sum(np.exp(1j * np.outer(kk, pts.x)) * c[None, :], axis=1)
    return out


def direct_type2(pts, f) -> np.ndarray:
    """Exact type-2 sum c_j = sum_k f_k e^{-i k x_j}, O(NM)."""
    pts = _as_points(pts)
    f = as_complex_vector(f, "coefficients")
    N = f.size
    if N % 2:
        raise InvalidInputError(f"coefficient count must be even, got {N}")
    k = np.arange(-N // 2, N // 2)
    out = np.empty(len(pts), dtype=complex)
    step = max(1, _DIRECT_BLOCK // N)
    for start in range(0, len(pts), step):
        x = pts.x[start:start + step]
        out[start:start + step] = np.sum(np.exp(-1j * np.outer(x, k)) * f[None, :], axis=1)
    return out
