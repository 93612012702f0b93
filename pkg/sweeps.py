"""
Table, sweep and check drivers behind the command-line tools.

Everything here returns plain rows (header + lists of values) so the same
code feeds the CSV writers and the tests.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Dict, List, Sequence

import numpy as np

import aliasing
import pswf
from errors import DomainError, InvalidParameterError
from kernels import (KernelFamily, KernelSpec, kb_asymptotic_eval, kernel_eval,
                     slepian_asymptotic_eval, sleph_eval)
from ktransform import (es_ft_above_cutoff, es_ft_below_cutoff, es_ft_deviation, es_ft_sinc_tail,
                        es_ft_tail_bound, ft_quadrature, ft_real, kb_ft_analytic)
from nufft import NuPoints, make_plan

logger = logging.getLogger(__name__)

KERNEL_COLUMNS = ("es", "kb", "kba", "slep", "sleph", "pswf")
FT_COLUMNS = ("quad", "asym", "kb", "sinc")
CHECK_SUITES = ("tails", "sincs", "pswf")
CHECK_HEADER = ["suite", "check", "measured", "target", "pass"]
# the saddle-point forms are not tabulated within this distance of rho = 1
CUTOFF_GAP = 0.02


@dataclass(frozen=True)
class CheckResult:
    suite: str
    name: str
    measured: float
    target: float
    passed: bool

    def row(self) -> list:
        return [self.suite, self.name, self.measured, self.target, self.passed]


def parse_list(text: str, allowed: Sequence[str], what: str) -> List[str]:
    """Split a comma list and validate each entry."""
    items = [item.strip().lower() for item in text.split(",") if item.strip()]
    if not items:
        raise InvalidParameterError(f"empty {what} list")
    for item in items:
        if item not in allowed:
            raise InvalidParameterError(f"unknown {what} '{item}' (expected one of {', '.join(allowed)})")
    return items


def random_instance(rng: np.random.Generator, N: int, M: int):
    """
    Points uniform on [-pi, pi), strengths and coefficients uniform in the unit square.

    Returns:
        (NuPoints, c of length M, f of length N)
    """
    x = rng.uniform(-np.pi, np.pi, M)
    c = rng.random(M) + 1j * rng.random(M)
    f = rng.random(N) + 1j * rng.random(N)
    return NuPoints(x), c, f


def _nan_where_invalid(func, z: np.ndarray) -> np.ndarray:
    """Evaluate func pointwise, leaving NaN (a blank cell) where it is undefined."""
    out = np.full(z.shape, np.nan)
    for i, zi in enumerate(z):
        try:
            out[i] = func(zi)
        except DomainError:
            pass
    return out


def kernel_table(beta: float, grid: int = 1000, which: Sequence[str] = ("es", "kb", "pswf"),
                 normalize: str = "center", ratio_to: str = None):
    """
    Unscaled kernels sampled on grid + 1 equispaced points of [-1, 1].

    Returns:
        (header, rows)
    """
    if grid < 2:
        raise InvalidParameterError(f"grid must be >= 2, got {grid}")
    if normalize not in ("center", "none"):
        raise InvalidParameterError(f"normalize must be center or none, got '{normalize}'")
    if ratio_to not in (None, "pswf"):
        raise InvalidParameterError(f"ratio_to supports only pswf, got '{ratio_to}'")
    z = np.linspace(-1.0, 1.0, grid + 1)
    need_pswf = "pswf" in which or ratio_to == "pswf"
    solved = pswf.pswf_solve(beta) if need_pswf else None

    columns: Dict[str, np.ndarray] = {}
    for name in which:
        if name == "es":
            columns[name] = kernel_eval(KernelSpec(KernelFamily.ES, beta), z)
        elif name == "kb":
            columns[name] = kernel_eval(KernelSpec(KernelFamily.KB, beta), z)
        elif name == "kba":
            columns[name] = _nan_where_invalid(lambda v: kb_asymptotic_eval(beta, v), z)
        elif name == "slep":
            columns[name] = _nan_where_invalid(lambda v: slepian_asymptotic_eval(beta, v), z)
        elif name == "sleph":
            columns[name] = sleph_eval(beta, z)
        elif name == "pswf":
            columns[name] = pswf.pswf_eval(solved, z, normalize_center=(normalize == "center"))
    if ratio_to == "pswf":
        reference = pswf.pswf_eval(solved, z, normalize_center=(normalize == "center"))
        columns = {name: col / reference for name, col in columns.items()}

    header = ["z"] + list(which)
    rows = [[z[i]] + [columns[name][i] for name in which] for i in range(z.size)]
    return header, rows


def es_asymptotic(beta: float, rho: np.ndarray) -> np.ndarray:
    """Saddle-point form picked by |rho| against 1, NaN within CUTOFF_GAP of the cutoff."""
    out = np.full(rho.shape, np.nan)
    r = np.abs(rho)
    below = r < 1.0 - CUTOFF_GAP
    above = r > 1.0 + CUTOFF_GAP
    if np.any(below):
        out[below] = es_ft_below_cutoff(beta, r[below])
    if np.any(above):
        out[above] = es_ft_above_cutoff(beta, r[above])
    return out


def ft_table(beta: float, xi_max: float, samples: int = 201, which: Sequence[str] = FT_COLUMNS):
    """
    ES transform against its asymptotic forms on equispaced xi in [0, xi_max].

    Columns carry signed values; ``absdiff`` = |quad - asym| is added when both
    are requested.
    """
    if not xi_max > 0 or samples < 2:
        raise InvalidParameterError("ft table needs xi_max > 0 and at least 2 samples")
    xi = np.linspace(0.0, xi_max, samples)
    rho = xi / beta
    spec = KernelSpec(KernelFamily.ES, beta)
    columns: Dict[str, np.ndarray] = {}
    for name in which:
        if name == "quad":
            columns[name] = ft_real(spec, xi)
        elif name == "asym":
            columns[name] = es_asymptotic(beta, rho)
        elif name == "kb":
            columns[name] = kb_ft_analytic(beta, xi)
        elif name == "sinc":
            columns[name] = es_ft_sinc_tail(beta, xi)
    names = list(which)
    if "quad" in columns and "asym" in columns:
        columns["absdiff"] = np.abs(columns["quad"] - columns["asym"])
        names.append("absdiff")
    header = ["xi", "rho"] + names
    rows = [[xi[i], rho[i]] + [columns[name][i] for name in names] for i in range(xi.size)]
    return header, rows


ERROR_SWEEP_HEADER = ["w", "beta", "eps_inf_est", "emp_max_err_t1", "emp_max_err_t2",
                      "theory_rate_bound", "emp_l2_rel_t1", "emp_l2_rel_t2"]


def _trial(plan, seed: int, w: int, trial: int, N: int, M: int):
    rng = np.random.default_rng([seed, w, trial])
    pts, c, f = random_instance(rng, N, M)
    return aliasing.empirical_errors(plan, pts, c, f)


def error_sweep(sigma: float = 2.0, gamma: float = 0.98, w_min: int = 4, w_max: int = 14,
                N: int = 128, M: int = 1000, trials: int = 5, seed: int = 0,
                kernel: str = "es", threads: int = 1):
    """
    Empirical l1 -> linf errors against eps_inf, one row per kernel width.

    Each (w, trial) draws from default_rng([seed, w, trial]), so the rows do
    not depend on ``threads``.
    """
    if w_min < 2 or w_max < w_min:
        raise InvalidParameterError(f"need 2 <= w_min <= w_max, got {w_min}..{w_max}")
    if trials < 1:
        raise InvalidParameterError(f"trials must be >= 1, got {trials}")
    family = KernelFamily.parse(kernel)
    header = list(ERROR_SWEEP_HEADER)
    if family is KernelFamily.KB:
        header.append("kb_error_bound")

    rows = []
    reference = None
    for w in range(w_min, w_max + 1):
        plan = make_plan(N, sigma=sigma, w=w, gamma=gamma, kernel_family=family)
        report = aliasing.eps_inf_estimate(plan)
        if reference is None:
            reference = report
        run = lambda t: _trial(plan, seed, w, t, N, M)
        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                results = list(pool.map(run, range(trials)))
        else:
            results = [run(t) for t in range(trials)]
        report = aliasing.with_empirical(report, results)
        worst = {key: max(r[key] for r in results) for key in results[0]}
        row = [w, plan.beta, report.eps_inf_est, worst['max_t1'], worst['max_t2'],
               aliasing.theory_rate_bound(report, reference), worst['l2_t1'], worst['l2_t2']]
        if family is KernelFamily.KB:
            row.append(aliasing.kb_error_bound(w, plan.grid.sigma))
        rows.append(row)
        logger.info(f"w={w}: eps_inf={report.eps_inf_est:.3e}, type1 {worst['max_t1']:.3e}, "
                    f"type2 {worst['max_t2']:.3e}, worst/eps_inf {report.empirical_max_rel_err / report.eps_inf_est:.3g}")
    return header, rows


def fit_log_slope(w: Sequence[float], values: Sequence[float]) -> float:
    """Least-squares slope of ln(values) against w."""
    return float(np.polyfit(np.asarray(w, dtype=float), np.log(np.asarray(values, dtype=float)), 1)[0])


def _check(suite, name, measured, target, passed) -> CheckResult:
    result = CheckResult(suite, name, float(measured), float(target), bool(passed))
    if not result.passed:
        logger.warning(f"Check failed: {suite}/{name}: measured {measured:.6g}, target {target:.6g}")
    return result


def envelope_above_cutoff(beta: float, rho: np.ndarray) -> np.ndarray:
    """Amplitude 2 sqrt(2 pi / beta) e^{-beta} (rho^2 - 1)^{-3/4} of the above-cutoff form."""
    return 2.0 * math.sqrt(2 * math.pi / beta) * math.exp(-beta) * (rho * rho - 1.0) ** -0.75


def check_tails() -> List[CheckResult]:
    """Kernel-transform tail bounds and the accuracy of the saddle-point forms."""
    suite = "tails"
    results = []
    for beta in (2.0, 5.0, 10.0, 20.0):
        xi = np.logspace(math.log10(3 * beta), math.log10(100 * beta), 50)
        spec = KernelSpec(KernelFamily.ES, beta)
        ratio = np.abs(ft_quadrature(spec, xi)) / es_ft_tail_bound(beta, xi)
        results.append(_check(suite, f"es_tail_bound beta={beta:g}", ratio.max(), 1.0, ratio.max() <= 1.0))

    maxima = []
    for beta in (2.0, 3.0):
        xi = np.logspace(math.log10(beta ** 4), math.log10(10 * beta ** 4), 20)
        stat = np.abs(es_ft_deviation(beta, xi)) * xi ** 1.25 / beta
        maxima.append(stat.max())
    spread = max(maxima) / min(maxima)
    results.append(_check(suite, "es_deviation_decay beta=2,3", spread, 3.0,
                          np.all(np.isfinite(maxima)) and spread <= 3.0))

    beta = 30.0
    spec = KernelSpec(KernelFamily.ES, beta)
    rho = np.linspace(0.0, 0.9, 33)
    quad = ft_real(spec, rho * beta)
    err = np.max(np.abs(es_ft_below_cutoff(beta, rho) / quad - 1.0))
    results.append(_check(suite, "es_below_cutoff beta=30", err, 0.05, err <= 0.05))

    rho = np.linspace(1.1, 2.0, 33)
    keep = np.abs(np.sin(beta * np.sqrt(rho * rho - 1.0) - math.pi / 4)) >= 0.1
    rho = rho[keep]
    quad = ft_real(spec, rho * beta)
    model = es_ft_above_cutoff(beta, rho) + es_ft_sinc_tail(beta, rho * beta)
    err = np.max(np.abs(model - quad) / envelope_above_cutoff(beta, rho))
    results.append(_check(suite, "es_above_cutoff beta=30", err, 0.10, err <= 0.10))

    beta = 10.0
    xi = np.linspace(0.0, 50.0, 101)
    gap = np.max(np.abs(ft_real(KernelSpec(KernelFamily.KB, beta), xi) - kb_ft_analytic(beta, xi)))
    results.append(_check(suite, "kb_quadrature_vs_analytic beta=10", gap, 1e-12, gap <= 1e-12))
    return results


def check_sincs(seed: int = 0) -> List[CheckResult]:
    """Uniform boundedness of the phased sinc sum and of the equispaced quadrature gap."""
    suite = "sincs"
    rng = np.random.default_rng(seed)
    results = []

    n = 100
    draws = [(rng.uniform(-n / 2, n / 2), rng.uniform(-np.pi, np.pi), rng.uniform(0.05, np.pi))
             for _ in range(64)]
    constants = {}
    for b in (2, 8, 32, 128):
        worst = max(abs(aliasing.phased_sinc_sum(n, k, x, alpha, b, 100000)) for k, x, alpha in draws)
        constants[b] = worst * n / math.log(b)
    for b, const in constants.items():
        target = 2.0 * constants[2]
        results.append(_check(suite, f"phased_sinc_sum b={b}", const, target, const <= target))

    gaps = {}
    for n in (50, 500, 5000):
        worst = 0.0
        for _ in range(1000):
            k = rng.uniform(-n / 4, n / 4)
            x = rng.uniform(-np.pi, np.pi)
            alpha = rng.uniform(0.01, np.pi / 2)
            worst = max(worst, aliasing.quadrature_sinc_gap(n, k, x, alpha))
        gaps[n] = worst * n / (2 * math.pi)
    for n, const in gaps.items():
        target = 2.0 * gaps[50]
        results.append(_check(suite, f"quadrature_sinc_gap n={n}", const, target, const <= target))

    bound = 1.0 / math.sin(math.pi / 4) - 4.0 / math.pi
    theta = np.linspace(-math.pi / 2, math.pi / 2, 2001)
    for N in (10, 100, 1000, 10000):
        worst = float(np.max(aliasing.dirichlet_gap(N, theta)))
        results.append(_check(suite, f"dirichlet_gap N={N}", worst, bound, worst <= bound + 1e-12))
    return results


def check_pswf() -> List[CheckResult]:
    """Prolate function against its hybrid approximation, the Fuchs asymptotic and the kernels."""
    suite = "pswf"
    results = []
    z = np.linspace(-1.0, 1.0, 401)
    for beta in (10.0, 30.0):
        solved = pswf.pswf_solve(beta)
        psi = pswf.pswf_eval(solved, z, normalize_center=True)
        err = np.max(np.abs(sleph_eval(beta, z) / psi - 1.0))
        results.append(_check(suite, f"sleph_vs_psi0 beta={beta:g}", err, 0.2 / beta, err < 0.2 / beta))
        zo = np.linspace(beta ** -0.5, 1.0 - 1.0 / beta, 201)
        pso = pswf.pswf_eval(solved, zo, normalize_center=True)
        hybrid = np.max(np.abs(sleph_eval(beta, zo) / pso - 1.0))
        outer = np.max(np.abs(slepian_asymptotic_eval(beta, zo, branch="outer") / pso - 1.0))
        results.append(_check(suite, f"sleph_beats_outer beta={beta:g}", hybrid, outer, hybrid < outer))

    beta = 30.0
    solved = pswf.pswf_solve(beta)
    gap = abs(slepian_asymptotic_eval(beta, 0.5) / pswf.pswf_eval(solved, 0.5, normalize_center=True) - 1.0)
    results.append(_check(suite, "slep_at_half beta=30", gap, 0.05, gap <= 0.05))

    zg = np.linspace(-beta ** -0.5, beta ** -0.5, 41)
    psg = pswf.pswf_eval(solved, zg, normalize_center=True)
    gap = np.max(np.abs(pswf.gaussian_limit(beta, zg) / psg - 1.0))
    results.append(_check(suite, "gaussian_centre beta=30", gap, 0.05, gap <= 0.05))

    zk = np.linspace(0.2, 0.9, 36)
    sk = np.sqrt(1.0 - zk * zk)
    kb_ratio = kernel_eval(KernelSpec(KernelFamily.KB, beta), zk) / pswf.pswf_eval(solved, zk, normalize_center=True)
    gap = np.max(np.abs(kb_ratio / np.sqrt(0.5 * (1.0 + sk)) - 1.0))
    results.append(_check(suite, "kb_over_psi0 beta=30", gap, 0.05, gap <= 0.05))

    ratio = pswf.fuchs_ratio(pswf.pswf_solve(10.0))
    results.append(_check(suite, "fuchs_ratio beta=10", ratio, 1.0, 0.85 <= ratio <= 1.15))

    solved = pswf.pswf_solve(8.0)
    gap = abs(pswf.mu0_by_energy(solved) - solved.mu0) / solved.mu0
    results.append(_check(suite, "mu0_routes beta=8", gap, 1e-6, gap <= 1e-6))

    beta = 30.0
    curves = [kernel_eval(KernelSpec(KernelFamily.ES, beta), z),
              kernel_eval(KernelSpec(KernelFamily.KB, beta), z),
              pswf.pswf_eval(pswf.pswf_solve(beta), z, normalize_center=True)]
    spread = max(np.max(np.abs(a - b)) for i, a in enumerate(curves) for b in curves[i + 1:])
    results.append(_check(suite, "kernels_indistinguishable beta=30", spread, 0.02, spread <= 0.02))
    return results


def run_checks(suite: str = "all") -> List[CheckResult]:
    if suite == "all":
        suites = CHECK_SUITES
    elif suite in CHECK_SUITES:
        suites = (suite,)
    else:
        raise InvalidParameterError(f"unknown suite '{suite}' (expected tails, sincs, pswf or all)")
    runners = {"tails": check_tails, "sincs": check_sincs, "pswf": check_pswf}
    results = []
    for name in suites:
        logger.info(f"Running {name} checks")
        results.extend(runners[name]())
    return results
