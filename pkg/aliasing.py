"""
Aliasing error of the spreading pipeline.

For a point at x the type-1 output at mode k carries the error

    g_k(x) = p_k sum_l e^{i l h k} psi_tilde(l h - x) - e^{i k x}
           = (1/psi_hat(k)) sum_{m != 0} psi_hat(k + m n) e^{i (k + m n) x}

(spatial form and its Poisson-summed spectral form).  eps_inf bounds |g_k(x)|
over the band and controls the l1 -> linf error of both transform types.
The module also carries the exponential rate formulas and the sinc-sum
quantities whose boundedness the convergence argument rests on.
"""

import logging
import math
from dataclasses import dataclass, replace
from typing import Optional, Sequence

import numpy as np
from scipy import integrate, special

from errors import ConsistencyError, InvalidParameterError, TruncationError
from kernels import KernelFamily
from ktransform import ft_real, kb_ft_analytic
from nufft import EDGE_TOL, NuPoints, Plan, direct_type1, direct_type2, spreading_stencil, type1, type2
from specfun import bessel_i0e, sinc

logger = logging.getLogger(__name__)

DEFAULT_TAIL_TERMS = 1 << 15
# eps_inf_estimate doubles m_max up to this before giving up
MAX_TAIL_TERMS = 1 << 20
# tail remainder allowed relative to eps_inf
TAIL_FRACTION = 1e-3
_PAIR_CHUNK = 1 << 16


@dataclass(frozen=True)
class AliasingReport:
    """
    Sampled eps_inf for one plan plus diagnostics.

    All error fields are in the units of ``eps_inf_est``.
    ``tail_remainder_bound`` is the analytic estimate of the spectral sum's
    terms beyond ``tail_terms_used`` images; ``spectral_gap`` is the measured
    difference between that truncated sum and the exact spatial form at the
    maximiser.  ``empirical_max_rel_err`` stays NaN until random trials are
    attached with with_empirical.
    """
    w: int
    beta: float
    sigma: float
    gamma: float
    eps_inf_est: float
    tail_terms_used: int
    tail_remainder_bound: float
    spectral_gap: float
    theory_exponent: float
    dynamic_range: float
    k_max: int
    x_max: float
    empirical_max_rel_err: float = float('nan')


def es_rate(sigma: float, gamma: float) -> float:
    """
    Exponential convergence rate per unit w of the ES kernel,
    pi gamma sqrt(1 - 1/sigma - (gamma^-2 - 1) / (4 sigma^2)).
    """
    if not sigma > 1:
        raise InvalidParameterError(f"sigma must be > 1, got {sigma}")
    if not 0 < gamma < 1:
        raise InvalidParameterError(f"gamma must be in (0, 1), got {gamma}")
    radicand = 1.0 - 1.0 / sigma - (gamma ** -2 - 1.0) / (4.0 * sigma * sigma)
    if radicand < 0:
        raise InvalidParameterError(f"gamma={gamma} is too small for sigma={sigma}")
    return math.pi * gamma * math.sqrt(radicand)


def optimal_rate(sigma: float) -> float:
    """pi sqrt(1 - 1/sigma): the KB rate, and the gamma -> 1 limit of es_rate."""
    if not sigma > 1:
        raise InvalidParameterError(f"sigma must be > 1, got {sigma}")
    return math.pi * math.sqrt(1.0 - 1.0 / sigma)


def kb_error_bound(w: int, sigma: float) -> float:
    """Rigorous KB estimate 4 pi (1-1/sigma)^{1/4} (sqrt((w-1)/2) + (w-1)/2) e^{-pi (w-1) sqrt(1-1/sigma)}."""
    if w < 2:
        raise InvalidParameterError(f"w must be >= 2, got {w}")
    if not sigma > 1:
        raise InvalidParameterError(f"sigma must be > 1, got {sigma}")
    q = 1.0 - 1.0 / sigma
    half = 0.5 * (w - 1)
    return 4 * math.pi * q ** 0.25 * (math.sqrt(half) + half) * math.exp(-math.pi * (w - 1) * math.sqrt(q))


def _band_phihat(plan: Plan) -> np.ndarray:
    """phi_hat(alpha k) for k = 0..N/2, recovered from the plan's p_k."""
    half = plan.N // 2
    p = np.append(plan.p[half:], plan.p[0])
    return 2.0 / (plan.w * p)


def _psihat_in_band(plan: Plan, k) -> np.ndarray:
    """psi_hat(k) = alpha phi_hat(alpha k) = 2 pi / (n p_k) for |k| <= N/2."""
    return plan.grid.alpha * _band_phihat(plan)[np.abs(np.asarray(k))]


def dynamic_range(plan: Plan) -> float:
    """psi_hat(0) / psi_hat(N/2)."""
    phihat = _band_phihat(plan)
    return float(phihat[0] / phihat[-1])


def _sinc_amplitude(plan: Plan) -> float:
    """A in the large-|xi| form A sin(xi)/xi of the unscaled kernel transform."""
    if plan.kernel.family is KernelFamily.KB:
        return 2.0 * math.exp(-plan.beta) / float(bessel_i0e(plan.beta))
    return 2.0 * math.exp(-plan.beta)


def _far_deviation(plan: Plan, u: np.ndarray) -> np.ndarray:
    """phi_hat(u) - A sin(u)/u at aliased frequencies."""
    if plan.kernel.family is KernelFamily.KB:
        full = kb_ft_analytic(plan.beta, u)
    else:
        full = ft_real(plan.kernel, u)
    return full - _sinc_amplitude(plan) * sinc(u)


def sinc_lattice_sum(plan: Plan, k: int, x):
    """
    sum_{m != 0} A sin(u_m)/u_m e^{i (k + m n) x}, u_m = alpha (k + m n), in closed form.

    alpha n = pi w, so sin(u_m) = (-1)^{wm} sin(alpha k) and the sum reduces to
    sum_m e^{i m theta} / (m + a) = pi e^{i a (pi - theta)} / sin(pi a) with
    a = k/n and theta = n x + pi w in (0, 2 pi).  At theta = 0 the symmetric
    partial sums converge to pi cot(pi a), the mean of the two one-sided limits.
    """
    n, w = plan.n, plan.w
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if k == 0:
        out = np.zeros(xs.shape, dtype=complex)
        return out if np.ndim(x) else complex(out[0])
    a = k / n
    theta = np.mod(n * xs + math.pi * w, 2 * math.pi)
    tol = math.pi * w * EDGE_TOL
    on_jump = (theta <= tol) | (theta >= 2 * math.pi - tol)
    lattice = np.where(on_jump, math.pi / math.tan(math.pi * a),
                       math.pi * np.exp(1j * a * (math.pi - theta)) / math.sin(math.pi * a))
    amp = _sinc_amplitude(plan) * math.sin(plan.grid.alpha * k) / (plan.grid.alpha * n)
    out = amp * np.exp(1j * k * xs) * (lattice - 1.0 / a)
    return out if np.ndim(x) else complex(out[0])


def _endpoint_series(plan: Plan):
    """
    Large-|xi| expansion of phi_hat(xi) - A sin(xi)/xi from the kernel's ends.

    phi(1 - t) = scale sum_nu g_nu t^nu near z = 1 gives the deviation
    sum_p d_p |xi|^{-p} cos(|xi| - pi p / 2) with p = nu + 1 and
    d_p = 2 scale g_nu Gamma(p).  ES has half-integer nu (square-root ends),
    KB integer nu.

    Returns:
        (terms, bounds): (p, d_p) summed in closed form by g_k, and (p, |d_p|)
        upper bounds for the next two orders.
    """
    beta = plan.beta
    r2 = math.sqrt(2.0)
    if plan.kernel.family is KernelFamily.KB:
        scale = math.exp(-beta) / float(bessel_i0e(beta))
        terms = [(2.0, beta ** 2 / 2), (3.0, beta ** 4 / 16 - beta ** 2 / 4)]
        bounds = [(4.0, beta ** 6 / 288 + beta ** 4 / 16),
                  (5.0, beta ** 8 / 9216 + beta ** 6 / 192 + beta ** 4 / 64)]
    else:
        scale = math.exp(-beta)
        terms = [(1.5, beta * r2), (2.0, beta ** 2),
                 (2.5, beta ** 3 * 2 * r2 / 6 - beta * r2 / 4)]
        bounds = [(3.0, beta ** 4 / 6 + beta ** 2 / 2),
                  (3.5, beta ** 5 * 4 * r2 / 120 + beta ** 3 * 2 * r2 / 8 + beta * r2 / 32)]

    def coeff(p, g):
        return 2.0 * scale * g * math.gamma(p)

    return ([(p, coeff(p, g)) for p, g in terms],
            [(p, abs(coeff(p, g))) for p, g in bounds])


def _oscillating_tail(theta: float, b: float, p: float, start: int) -> complex:
    """
    sum_{j >= start} e^{i j theta} (j + b)^{-p} for p > 1 and start + b > 0.

    From (j + b)^{-p} = Gamma(p)^{-1} int t^{p-1} e^{-(j+b) t} dt, summed as a
    geometric series under the integral and rescaled by q = start + b.
    """
    q = start + b
    theta = math.remainder(theta, 2 * math.pi)
    if q * abs(theta) < 1e-12:
        return complex(special.zeta(p, q))

    def integrand(s, part):
        val = s ** (p - 1) * math.exp(-s) / -np.expm1(1j * theta - s / q)
        return val.real if part == 0 else val.imag

    # the integrand peaks near s = q |theta| when theta is small
    peak = [q * abs(theta)] if q * abs(theta) < 40 else None
    re, _ = integrate.quad(integrand, 0, 60, args=(0,), points=peak, limit=200, epsrel=1e-10)
    im, _ = integrate.quad(integrand, 0, 60, args=(1,), points=peak, limit=200, epsrel=1e-10)
    return complex(re, im) * np.exp(1j * start * theta) * q ** -p / math.gamma(p)


def _endpoint_tail(plan: Plan, k: int, xs: np.ndarray, m_max: int) -> np.ndarray:
    """Leading endpoint terms of sum_{|m| > m_max} D_hat(u_m) e^{i (k + m n) x}."""
    n, w, alpha = plan.n, plan.w, plan.grid.alpha
    a = k / n
    terms, _ = _endpoint_series(plan)
    out = np.zeros(xs.shape, dtype=complex)
    for i, xv in enumerate(xs):
        theta = n * xv + math.pi * w
        total = 0j
        for p, d in terms:
            up = math.cos(alpha * k - math.pi * p / 2) * _oscillating_tail(theta, a, p, m_max + 1)
            down = math.cos(alpha * k + math.pi * p / 2) * _oscillating_tail(-theta, -a, p, m_max + 1)
            total += d * (math.pi * w) ** -p * (up + down)
        out[i] = np.exp(1j * k * xv) * total
    return out


def tail_remainder_estimate(plan: Plan, m_max: int) -> float:
    """
    Estimate of what g_k leaves out beyond m_max images (unscaled units).

    g_k adds the leading endpoint terms of the far tail in closed form, so the
    remainder is the absolute sum of the next two orders of the expansion.
    |u_m| >= pi w (|m| - 1/2) and each power sum is closed with its integral.
    """
    if m_max < 1:
        raise InvalidParameterError(f"m_max must be >= 1, got {m_max}")
    step = math.pi * plan.w
    q = m_max - 0.5
    _, bounds = _endpoint_series(plan)
    return sum(2.0 * d * step ** -p * q ** (1.0 - p) / (p - 1.0) for p, d in bounds)


def g_k(plan: Plan, k: int, x, m_max: int = DEFAULT_TAIL_TERMS):
    """
    Spectral aliasing error (1/psi_hat(k)) sum_{m != 0} psi_hat(k+mn) e^{i(k+mn)x}.

    Each far transform is split as A sin(u)/u plus a deviation.  The sinc part
    is summed over all m in closed form (sinc_lattice_sum); the deviation is
    absolutely summable and is added in symmetric pairs for 0 < |m| <= m_max,
    with the leading endpoint terms of the rest added in closed form.
    ES transforms come from quadrature, KB transforms are analytic.

    Args:
        plan: Transform plan
        k: Mode index in [-N/2, N/2]
        x: Point (scalar or array)
        m_max: Number of aliased images on each side

    Returns:
        Complex g_k(x), same shape as x
    """
    if m_max < 1:
        raise InvalidParameterError(f"m_max must be >= 1, got {m_max}")
    if abs(k) > plan.N // 2:
        raise InvalidParameterError(f"mode {k} is outside the band |k| <= {plan.N // 2}")
    n, alpha = plan.n, plan.grid.alpha
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    total = sinc_lattice_sum(plan, k, xs)
    for start in range(1, m_max + 1, _PAIR_CHUNK):
        m = np.arange(start, min(start + _PAIR_CHUNK, m_max + 1))
        freq_p = k + m * n
        freq_m = k - m * n
        dev_p = _far_deviation(plan, alpha * freq_p.astype(float))
        dev_m = _far_deviation(plan, alpha * freq_m.astype(float))
        for i, xv in enumerate(xs):
            pairs = dev_p * np.exp(1j * freq_p * xv) + dev_m * np.exp(1j * freq_m * xv)
            total[i] += np.sum(pairs)
    total += _endpoint_tail(plan, k, xs, m_max)
    out = alpha * total / _psihat_in_band(plan, k)
    return out if np.ndim(x) else complex(out[0])


def g_k_direct(plan: Plan, k, x):
    """
    Aliasing error from the spatial form p_k sum_l e^{i l h k} psi_tilde(l h - x) - e^{i k x}.

    This is exactly the type-1 error of a unit source at x, evaluated with the
    same stencil as spreading.  |g_k(x)| is h-periodic in x.

    Returns:
        Array of shape (len(k), len(x)); a complex scalar when both are scalars
    """
    ks = np.atleast_1d(np.asarray(k))
    if np.any(np.abs(ks) > plan.N // 2):
        raise InvalidParameterError(f"modes must satisfy |k| <= {plan.N // 2}")
    xs = NuPoints(np.atleast_1d(x)).x
    idx, vals = spreading_stencil(plan, xs)
    phase = np.exp(1j * plan.grid.h * ks[:, None, None] * idx[None, :, :])
    fine = np.sum(phase * vals[None, :, :], axis=2)
    p = 2 * math.pi / (plan.n * _psihat_in_band(plan, ks))
    out = p[:, None] * fine - np.exp(1j * np.outer(ks, xs))
    if np.ndim(k) == 0 and np.ndim(x) == 0:
        return complex(out[0, 0])
    return out


def error_matrix(plan: Plan, pts) -> np.ndarray:
    """E_kj = g_k(x_j); type-1 error is E c and type-2 error is E^* f."""
    pts = pts if isinstance(pts, NuPoints) else NuPoints(pts)
    return g_k_direct(plan, plan.modes(), pts.x)


def _sample_modes(N: int, k_samples: int) -> np.ndarray:
    if N <= 256:
        return np.arange(-N // 2, N // 2 + 1)
    return np.unique(np.round(np.linspace(-N / 2, N / 2, k_samples)).astype(int))


def eps_inf_estimate(plan: Plan, k_samples: int = 33, x_samples: int = 64,
                     m_max: int = DEFAULT_TAIL_TERMS) -> AliasingReport:
    """
    Sampled estimate of eps_inf = max |numerator| / min |psi_hat(k)|.

    The numerator psi_hat(k) g_k(x) is evaluated from the spatial form over
    one fine-grid cell [0, h] (x_samples interior points plus both ends) and
    over every band mode when N <= 256, else ``k_samples`` equispaced modes
    including 0 and +-N/2.  The denominator is psi_hat(N/2), after checking
    that psi_hat decreases across the band.

    The spectral sum at the maximiser is the cross-check.  m_max is doubled
    until its analytic tail estimate is within TAIL_FRACTION of eps_inf.

    Raises:
        InvalidParameterError: fewer than 16 samples requested
        ConsistencyError: psi_hat is not monotone on [0, N/2]
        TruncationError: the tail estimate stays too large at MAX_TAIL_TERMS
    """
    if k_samples < 16 or x_samples < 16:
        raise InvalidParameterError("eps_inf_estimate needs at least 16 samples in k and in x")
    phihat = _band_phihat(plan)
    if np.any(np.diff(phihat) > 1e-12 * phihat[0]):
        raise ConsistencyError("kernel transform is not decreasing across the output band")

    ks = _sample_modes(plan.N, k_samples)
    xs = np.linspace(0.0, plan.grid.h, x_samples + 2)
    numer = np.abs(g_k_direct(plan, ks, xs)) * _psihat_in_band(plan, ks)[:, None]
    ik, ix = np.unravel_index(np.argmax(numer), numer.shape)
    denom = plan.grid.alpha * phihat[-1]
    eps = float(numer[ik, ix] / denom)

    terms = m_max
    remainder = tail_remainder_estimate(plan, terms) / phihat[-1]
    while remainder > TAIL_FRACTION * eps and terms < MAX_TAIL_TERMS:
        terms = min(2 * terms, MAX_TAIL_TERMS)
        remainder = tail_remainder_estimate(plan, terms) / phihat[-1]
    if remainder > TAIL_FRACTION * eps:
        raise TruncationError(f"tail estimate {remainder:.3g} exceeds {TAIL_FRACTION:g} x eps_inf "
                              f"({eps:.3g}) with m_max={terms}")
    if terms != m_max:
        logger.info(f"Raised m_max from {m_max} to {terms} for w={plan.w}")

    k_star, x_star = int(ks[ik]), float(xs[ix])
    spectral = g_k(plan, k_star, x_star, terms)
    exact = g_k_direct(plan, k_star, x_star)
    gap = abs(spectral - exact) * float(_psihat_in_band(plan, k_star)) / denom
    logger.debug(f"Spectral sum with m_max={terms}: gap {gap:.3g}, tail estimate {remainder:.3g}, "
                 f"eps_inf {eps:.3g} at k={k_star}")

    gamma = plan.grid.gamma
    rate = es_rate(plan.grid.sigma, gamma) if gamma < 1 else optimal_rate(plan.grid.sigma)
    report = AliasingReport(
        w=plan.w, beta=plan.beta, sigma=plan.grid.sigma, gamma=gamma,
        eps_inf_est=eps, tail_terms_used=terms, tail_remainder_bound=float(remainder),
        spectral_gap=float(gap), theory_exponent=rate, dynamic_range=dynamic_range(plan),
        k_max=k_star, x_max=x_star)
    logger.debug(f"eps_inf estimate for w={plan.w}: {eps:.4g} at k={k_star}, x={x_star:.4g}")
    return report


def with_empirical(report: AliasingReport, trials: Sequence[dict]) -> AliasingReport:
    """Copy of ``report`` carrying the worst l1 -> linf error over empirical_errors results."""
    if not trials:
        raise InvalidParameterError("with_empirical needs at least one trial")
    worst = max(max(t['max_t1'], t['max_t2']) for t in trials)
    return replace(report, empirical_max_rel_err=float(worst))


def phased_sinc_sum(n: float, k: float, x: float, alpha: float, b: float, m_max: int) -> complex:
    """
    sum_{b<|m|<=m_max} sin(alpha (mn + k)) / (mn + k) e^{i (mn + k) x}, in symmetric pairs.

    The series converges only conditionally; symmetric partial sums are used.
    """
    if not n > 0 or not alpha > 0 or b < 1:
        raise InvalidParameterError("phased_sinc_sum needs n > 0, alpha > 0 and b >= 1")
    if abs(k) > n / 2:
        raise InvalidParameterError(f"|k| must be <= n/2, got k={k}")
    m_lo = math.floor(b) + 1
    if m_max < m_lo:
        raise InvalidParameterError(f"m_max={m_max} must exceed b={b}")
    m = np.arange(m_lo, m_max + 1, dtype=float)
    fp = m * n + k
    fm = -m * n + k
    pairs = (np.sin(alpha * fp) / fp * np.exp(1j * fp * x)
             + np.sin(alpha * fm) / fm * np.exp(1j * fm * x))
    return complex(np.sum(pairs))


def quadrature_sinc_gap(n: float, k: float, x: float, alpha: float) -> float:
    """
    |h sum'_{|x - lh| <= alpha} e^{ikhl} - 2 alpha sinc(alpha k) e^{ikx}|, h = 2 pi / n.

    Grid points exactly at distance alpha get half weight (trapezoid-style
    endpoint convention).
    """
    if not n > 0 or not alpha > 0:
        raise InvalidParameterError("quadrature_sinc_gap needs n > 0 and alpha > 0")
    h = 2 * math.pi / n
    lo = math.ceil((x - alpha) / h - 1e-12)
    hi = math.floor((x + alpha) / h + 1e-12)
    l = np.arange(lo, hi + 1)
    weights = np.ones(l.size)
    on_edge = np.isclose(np.abs(x - l * h), alpha, rtol=0.0, atol=1e-12 * max(h, alpha))
    weights[on_edge] = 0.5
    discrete = h * np.sum(weights * np.exp(1j * k * h * l))
    exact = 2 * alpha * sinc(alpha * k) * np.exp(1j * k * x)
    return float(abs(discrete - exact))


def dirichlet_gap(N: int, theta):
    """
    |D_N(theta) - 2 (N + 1/2) sinc((N + 1/2) theta)| with D_N the Dirichlet kernel
    sum_{|k|<=N} e^{ik theta}; uniformly bounded in N for |theta| <= pi/2.
    """
    if N < 0:
        raise InvalidParameterError(f"N must be >= 0, got {N}")
    theta = np.asarray(theta, dtype=float)
    if np.any(np.abs(theta) > math.pi / 2):
        raise InvalidParameterError("dirichlet_gap is bounded only for |theta| <= pi/2")
    a = N + 0.5
    t = np.abs(theta)
    # sin(a t) (1/sin(t/2) - 2/t), with the bracket ~ t/12 near zero
    with np.errstate(divide='ignore', invalid='ignore'):
        bracket = np.where(t < 1e-4, t / 12.0 + 7.0 * t ** 3 / 2880.0,
                           1.0 / np.sin(0.5 * t) - 2.0 / t)
    out = np.abs(np.sin(a * t) * bracket)
    return out if out.ndim else float(out)


def empirical_errors(plan: Plan, pts, c, f, workers: int = 1):
    """
    Relative l1 -> linf and l2 errors of both transform types against the direct sums.

    Returns:
        dict with keys max_t1, max_t2, l2_t1, l2_t2
    """
    exact1 = direct_type1(pts, c, plan.N)
    approx1 = type1(plan, pts, c, workers)
    exact2 = direct_type2(pts, f)
    approx2 = type2(plan, pts, f, workers)
    return {
        'max_t1': float(np.max(np.abs(approx1 - exact1)) / np.sum(np.abs(c))),
        'max_t2': float(np.max(np.abs(approx2 - exact2)) / np.sum(np.abs(f))),
        'l2_t1': float(np.linalg.norm(approx1 - exact1) / np.linalg.norm(exact1)),
        'l2_t2': float(np.linalg.norm(approx2 - exact2) / np.linalg.norm(exact2)),
    }


def theory_rate_bound(report: AliasingReport, reference: Optional[AliasingReport] = None) -> float:
    """
    e^{-rate (w - w_ref)} scaled to the reference estimate, or e^{-rate w} without one.
    """
    if reference is None:
        return math.exp(-report.theory_exponent * report.w)
    return reference.eps_inf_est * math.exp(-report.theory_exponent * (report.w - reference.w))
