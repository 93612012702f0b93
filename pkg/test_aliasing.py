#!/usr/bin/env python3
"""Tests for the aliasing-error kernels, eps_inf and the rate formulas."""

import math
from pathlib import Path

import numpy as np
import pytest
from scipy import special

import aliasing
from aliasing import (dirichlet_gap, dynamic_range, empirical_errors, eps_inf_estimate, error_matrix,
                      es_rate, g_k, g_k_direct, kb_error_bound, optimal_rate, phased_sinc_sum,
                      quadrature_sinc_gap, tail_remainder_estimate, theory_rate_bound, with_empirical)
from errors import InvalidParameterError, TruncationError
from nufft import NuPoints, direct_type1, direct_type2, make_plan, type1, type2
from sweeps import fit_log_slope, random_instance


def test_es_rate_values():
    expected = math.pi * 0.98 * math.sqrt(0.5 - (0.98 ** -2 - 1) / 16)
    assert es_rate(2.0, 0.98) == pytest.approx(expected, rel=1e-14)
    assert es_rate(2.0, 0.98) == pytest.approx(2.1714, abs=1e-4)
    assert es_rate(1.25, 0.98) == pytest.approx(1.354, abs=1e-3)
    # gamma -> 1 recovers the optimal rate and about 0.965 digits per unit width
    assert es_rate(2.0, 1 - 1e-12) == pytest.approx(optimal_rate(2.0), rel=1e-9)
    assert optimal_rate(2.0) / math.log(10) == pytest.approx(0.9648, abs=1e-4)


@pytest.mark.parametrize("sigma,gamma", [(2.0, 1.0), (2.0, 0.0), (1.0, 0.98), (1.01, 0.5)])
def test_es_rate_domain(sigma, gamma):
    with pytest.raises(InvalidParameterError):
        es_rate(sigma, gamma)


def test_kb_error_bound():
    expected = 4 * math.pi * 0.5 ** 0.25 * (math.sqrt(0.5) + 0.5) * math.exp(-math.pi * math.sqrt(0.5))
    assert kb_error_bound(2, 2.0) == pytest.approx(expected, rel=1e-14)
    values = [kb_error_bound(w, 2.0) for w in range(3, 13)]
    assert all(b < a for a, b in zip(values, values[1:]))
    with pytest.raises(InvalidParameterError):
        kb_error_bound(1, 2.0)


def test_band_transform_is_decreasing():
    plan = make_plan(128, w=8)
    assert dynamic_range(plan) > 1.0
    report = eps_inf_estimate(plan)
    assert report.dynamic_range == dynamic_range(plan)


def test_direct_error_kernel_is_the_pipeline_error():
    plan = make_plan(12, w=5)
    x = np.array([-2.2, -0.4, 0.3, 1.7])
    E = g_k_direct(plan, plan.modes(), x)
    assert E.shape == (12, 4)
    for j, xj in enumerate(x):
        err = type1(plan, NuPoints([xj]), [1.0]) - direct_type1(NuPoints([xj]), [1.0], 12)
        np.testing.assert_allclose(E[:, j], err, rtol=0, atol=1e-14)
    assert isinstance(g_k_direct(plan, 3, 0.3), complex)


def test_error_matrix_reproduces_both_transform_errors():
    plan = make_plan(12, w=5)
    rng = np.random.default_rng(0)
    pts, c, f = random_instance(rng, 12, 7)
    E = error_matrix(plan, pts)
    np.testing.assert_allclose(type1(plan, pts, c) - direct_type1(pts, c, 12), E @ c, rtol=0, atol=1e-13)
    np.testing.assert_allclose(type2(plan, pts, f) - direct_type2(pts, f), E.conj().T @ f, rtol=0, atol=1e-13)


def test_error_kernel_modulus_is_cell_periodic():
    plan = make_plan(16, w=6)
    x = np.linspace(-1.0, 1.0, 9)
    a = np.abs(g_k_direct(plan, plan.modes(), x))
    b = np.abs(g_k_direct(plan, plan.modes(), x + plan.grid.h))
    np.testing.assert_allclose(a, b, rtol=1e-9, atol=1e-15)


def test_spectral_error_kernel_matches_direct_for_kb():
    plan = make_plan(12, w=5, kernel_family="kb")
    for k in (-6, -3, 0, 5, 6):
        for x in (0.3, -1.1):
            spectral = g_k(plan, k, x, m_max=2_000_000)
            assert abs(spectral - g_k_direct(plan, k, x)) <= 1e-10


def test_spectral_error_kernel_matches_direct_for_es():
    plan = make_plan(12, w=5)
    eps = eps_inf_estimate(plan).eps_inf_est
    # h/2 puts two grid points on the support edge
    x = np.array([0.3, -1.1, 2.0, 0.5 * plan.grid.h])
    for k in (-6, 0, 4):
        spectral = g_k(plan, k, x)
        exact = g_k_direct(plan, k, x)[0]
        assert np.max(np.abs(spectral - exact)) <= 0.05 * eps


def test_more_tail_terms_change_kb_sum_only_slightly():
    plan = make_plan(24, w=6, kernel_family="kb")
    eps = eps_inf_estimate(plan).eps_inf_est
    once = g_k(plan, 12, 0.2, m_max=4096)
    twice = g_k(plan, 12, 0.2, m_max=8192)
    assert abs(once - twice) <= 1e-3 * eps


def test_spectral_error_kernel_is_two_pi_periodic():
    plan = make_plan(12, w=5)
    x = np.array([0.3, 1.9])
    np.testing.assert_allclose(g_k(plan, 4, x + 2 * np.pi), g_k(plan, 4, x), rtol=0, atol=1e-12)


def test_error_kernel_arguments():
    plan = make_plan(12, w=5)
    with pytest.raises(InvalidParameterError):
        g_k(plan, 7, 0.1)
    with pytest.raises(InvalidParameterError):
        g_k(plan, 0, 0.1, m_max=0)
    with pytest.raises(InvalidParameterError):
        g_k_direct(plan, [0, 9], 0.1)
    with pytest.raises(InvalidParameterError):
        eps_inf_estimate(plan, x_samples=8)


def test_eps_inf_report_fields():
    plan = make_plan(64, w=8)
    report = eps_inf_estimate(plan)
    assert report.w == 8
    assert report.beta == plan.beta
    assert report.theory_exponent == pytest.approx(es_rate(2.0, 0.98))
    assert abs(report.k_max) <= 32
    assert 0.0 <= report.x_max <= plan.grid.h
    assert report.tail_terms_used >= aliasing.DEFAULT_TAIL_TERMS
    assert report.tail_remainder_bound <= aliasing.TAIL_FRACTION * report.eps_inf_est
    assert 0 <= report.spectral_gap <= 0.05 * report.eps_inf_est


def test_empirical_error_attached_to_report():
    plan = make_plan(64, w=8)
    report = eps_inf_estimate(plan)
    assert math.isnan(report.empirical_max_rel_err)
    rng = np.random.default_rng(4)
    trials = [empirical_errors(plan, *random_instance(rng, 64, 200)) for _ in range(10)]
    report = with_empirical(report, trials)
    assert 0 < report.empirical_max_rel_err <= report.eps_inf_est
    assert report.empirical_max_rel_err == max(max(t['max_t1'], t['max_t2']) for t in trials)
    with pytest.raises(InvalidParameterError):
        with_empirical(report, [])


def test_tail_terms_grow_until_the_estimate_is_small():
    plan = make_plan(32, w=6)
    report = eps_inf_estimate(plan, m_max=1)
    assert report.tail_terms_used > 1
    assert report.tail_remainder_bound <= aliasing.TAIL_FRACTION * report.eps_inf_est
    assert tail_remainder_estimate(plan, 1) / tail_remainder_estimate(plan, 4096) > 10


def test_tail_terms_cap_raises(monkeypatch):
    monkeypatch.setattr(aliasing, "MAX_TAIL_TERMS", 2)
    with pytest.raises(TruncationError):
        eps_inf_estimate(make_plan(32, w=6), m_max=1)


def test_tail_estimate_decay_orders():
    plan = make_plan(64, w=10)
    ratio = tail_remainder_estimate(plan, 1 << 18) / tail_remainder_estimate(plan, 1 << 16)
    assert ratio == pytest.approx(1 / 16, rel=0.02)
    kb = make_plan(64, w=10, kernel_family="kb")
    ratio = tail_remainder_estimate(kb, 1 << 18) / tail_remainder_estimate(kb, 1 << 16)
    assert ratio == pytest.approx(1 / 64, rel=0.02)


def test_oscillating_tail_sums():
    hurwitz = special.zeta(1.5, 10.25)
    assert aliasing._oscillating_tail(2 * np.pi, 0.25, 1.5, 10) == pytest.approx(hurwitz, rel=1e-12)
    assert aliasing._oscillating_tail(1e-9, 0.25, 1.5, 10) == pytest.approx(hurwitz, rel=1e-3)
    j = np.arange(5, 1_000_001)
    direct = np.sum(np.exp(1j * j) * (j + 0.1) ** -2.0)
    assert abs(aliasing._oscillating_tail(1.0, 0.1, 2.0, 5) - direct) <= 1e-9
    j = np.arange(10, 1_000_001)
    direct = np.sum(np.exp(-0.5j * j) * (j - 0.25) ** -1.5)
    assert abs(aliasing._oscillating_tail(-0.5, -0.25, 1.5, 10) - direct) <= 1e-8


@pytest.mark.parametrize("family", ["es", "kb"])
def test_closed_form_tail_makes_few_images_enough(family):
    plan = make_plan(12, w=5, kernel_family=family)
    eps = eps_inf_estimate(plan).eps_inf_est
    # h/2 puts two grid points on the support edge
    for x in (0.3, 0.5 * plan.grid.h):
        few = g_k(plan, 6, x, m_max=256)
        many = g_k(plan, 6, x, m_max=16384)
        assert abs(few - many) <= 1e-3 * eps


@pytest.mark.parametrize("family", ["es", "kb"])
def test_sinc_lattice_closed_form_matches_partial_sums(family):
    plan = make_plan(12, w=5, kernel_family=family)
    n, alpha = plan.n, plan.grid.alpha
    amp = (2 * math.exp(-plan.beta) if family == "es"
           else 2 / float(np.i0(plan.beta)))
    m = np.arange(1, 200001)
    # the last x sits on a jump of the lattice (theta = 0 mod 2 pi)
    for k in (-6, 1, 4):
        for x in (0.3, -1.1, 0.5 * plan.grid.h):
            total = 0j
            for f in (k + m * n, k - m * n):
                u = alpha * f
                total += np.sum(amp * np.sin(u) / u * np.exp(1j * f * x))
            assert abs(aliasing.sinc_lattice_sum(plan, k, x) - total) <= 1e-5 * amp
    assert aliasing.sinc_lattice_sum(plan, 0, 0.3) == 0


@pytest.mark.parametrize("sigma", [2.0, 1.25])
def test_empirical_error_rate_matches_theory(sigma):
    widths = list(range(6, 15))
    worst = []
    for w in widths:
        plan = make_plan(128, sigma=sigma, w=w)
        rng = np.random.default_rng([5, w])
        errors = [empirical_errors(plan, *random_instance(rng, 128, 1000)) for _ in range(5)]
        worst.append(max(max(e['max_t1'], e['max_t2']) for e in errors))
    assert fit_log_slope(widths, worst) == pytest.approx(-es_rate(sigma, 0.98), rel=0.10)


def test_eps_inf_decreases_with_width():
    values = [eps_inf_estimate(make_plan(128, w=w)).eps_inf_est for w in range(4, 15)]
    assert all(b < a for a, b in zip(values, values[1:]))


@pytest.mark.parametrize("sigma", [2.0, 1.25])
def test_eps_inf_rate_matches_theory(sigma):
    widths = list(range(6, 15))
    values = [eps_inf_estimate(make_plan(128, sigma=sigma, w=w)).eps_inf_est for w in widths]
    slope = fit_log_slope(widths, values)
    assert slope == pytest.approx(-es_rate(sigma, 0.98), rel=0.10)


def test_digits_per_width():
    widths = list(range(6, 15))
    values = [eps_inf_estimate(make_plan(128, w=w)).eps_inf_est for w in widths]
    digits = -fit_log_slope(widths, values) / math.log(10)
    assert 0.85 <= digits <= 1.05


def test_kb_pipeline_within_rigorous_bound():
    rng = np.random.default_rng(1)
    for w in range(3, 13):
        plan = make_plan(64, w=w, kernel_family="kb")
        bound = kb_error_bound(w, plan.grid.sigma)
        for _ in range(20):
            pts, c, f = random_instance(rng, 64, 100)
            errors = empirical_errors(plan, pts, c, f)
            assert errors['max_t1'] <= bound
            assert errors['max_t2'] <= bound


def test_es_and_kb_are_comparable():
    for w in range(6, 13):
        es = eps_inf_estimate(make_plan(64, w=w)).eps_inf_est
        kb = eps_inf_estimate(make_plan(64, w=w, kernel_family="kb")).eps_inf_est
        assert 0.1 <= kb / es <= 10.0


def test_theory_rate_bound_scales_from_reference():
    ref = eps_inf_estimate(make_plan(64, w=6))
    rep = eps_inf_estimate(make_plan(64, w=9))
    assert theory_rate_bound(ref, ref) == ref.eps_inf_est
    assert theory_rate_bound(rep, ref) == pytest.approx(ref.eps_inf_est * math.exp(-3 * rep.theory_exponent))
    assert theory_rate_bound(rep) == pytest.approx(math.exp(-9 * rep.theory_exponent))


def test_phased_sinc_sum_small_case_by_hand():
    n, k, x, alpha = 10.0, 2.0, 0.7, 0.9
    expected = 0j
    for m in (2, 3, -2, -3):
        f = m * n + k
        expected += math.sin(alpha * f) / f * complex(math.cos(f * x), math.sin(f * x))
    assert phased_sinc_sum(n, k, x, alpha, 1, 3) == pytest.approx(expected, abs=1e-15)


def test_phased_sinc_sum_arguments():
    with pytest.raises(InvalidParameterError):
        phased_sinc_sum(10.0, 6.0, 0.0, 0.5, 2, 100)
    with pytest.raises(InvalidParameterError):
        phased_sinc_sum(10.0, 1.0, 0.0, 0.5, 5, 4)


def test_phased_sinc_sum_stays_small_as_the_offset_grows():
    rng = np.random.default_rng(2)
    n = 100
    draws = [(rng.uniform(-n / 2, n / 2), rng.uniform(-np.pi, np.pi), rng.uniform(0.05, np.pi))
             for _ in range(16)]
    worst = {b: max(abs(phased_sinc_sum(n, k, x, a, b, 50000)) for k, x, a in draws) for b in (2, 8, 32)}
    scaled = {b: v * n / math.log(b) for b, v in worst.items()}
    assert max(scaled.values()) <= 2.0 * scaled[2]


def test_quadrature_sinc_gap_examples():
    # k = 0 on a grid commensurate with alpha: the trapezoid sum is exact
    n = 8
    h = 2 * math.pi / n
    assert quadrature_sinc_gap(n, 0.0, 0.0, 2 * h) == pytest.approx(0.0, abs=1e-14)
    # one interior point only: h e^{ikx0} against the exact 2 alpha sinc
    alpha = 0.4 * h
    got = quadrature_sinc_gap(n, 0.0, 0.0, alpha)
    assert got == pytest.approx(abs(h - 2 * alpha), rel=1e-12)


def test_quadrature_sinc_gap_scales_like_one_over_n():
    rng = np.random.default_rng(3)
    scaled = []
    for n in (50, 500, 5000):
        worst = max(quadrature_sinc_gap(n, rng.uniform(-n / 4, n / 4), rng.uniform(-np.pi, np.pi),
                                        rng.uniform(0.01, np.pi / 2)) for _ in range(300))
        scaled.append(worst * n / (2 * math.pi))
    assert max(scaled) <= 2.0 * scaled[0]


def test_dirichlet_gap():
    theta = np.linspace(-math.pi / 2, math.pi / 2, 2001)
    bound = 1 / math.sin(math.pi / 4) - 4 / math.pi
    assert bound == pytest.approx(0.1409, abs=1e-4)
    for N in (10, 100, 1000, 10000):
        assert np.max(dirichlet_gap(N, theta)) <= bound + 1e-12
    # against the explicit Dirichlet sum
    N, t = 5, 0.3
    D = sum(math.cos(k * t) for k in range(-N, N + 1))
    assert dirichlet_gap(N, t) == pytest.approx(abs(D - 2 * math.sin((N + 0.5) * t) / t), rel=1e-12)
    assert dirichlet_gap(N, 0.0) == 0.0
    with pytest.raises(InvalidParameterError):
        dirichlet_gap(N, 2.0)


if __name__ == "__main__":
    pytest.main([str(Path(__file__)), "--tb=auto"])
