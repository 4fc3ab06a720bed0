import math

import numpy as np
import pytest
from scipy.integrate import quad
from scipy.special import ellipj

from hamlag.profile import build_profile
from hamlag.quadrature import fixed_gauss_legendre

# phase advances G_i(T) for alpha = (0, -1, 3), a1 = 2, a2 = 1, computed with
# scipy.integrate.quad on scipy's ellipj (independent of this package)
LAMBDA_MINUS = (-2.816621271505294, 2.7833382426843922, 2.783338242684392)
LAMBDA_PLUS = (0.34806132029701137, 0.009670728135757728, 0.009670728135757672)


def test_h_at_special_points(example_profile):
    p = example_profile
    assert p.h(0.0) == 2.0
    assert p.h(p.T / 2) == pytest.approx(1.0, abs=1e-12)
    assert p.h(p.T) == pytest.approx(2.0, abs=1e-10)


def test_h_prime_zero_at_turning_points(example_profile):
    p = example_profile
    assert p.h_prime(0.0) == 0.0
    assert abs(p.h_prime(p.T / 2)) < 1e-7


def test_h_prime_matches_finite_difference(example_profile):
    p = example_profile
    x = np.random.default_rng(3).uniform(0, 3 * p.T, 200)
    eps = 1e-6
    fd = (p.h(x + eps) - p.h(x - eps)) / (2 * eps)
    np.testing.assert_allclose(p.h_prime(x), fd, atol=1e-7)


def test_h_second_matches_finite_difference(example_profile):
    p = example_profile
    x = np.linspace(0.1, 2 * p.T, 50)
    eps = 1e-5
    fd = (p.h_prime(x + eps) - p.h_prime(x - eps)) / (2 * eps)
    np.testing.assert_allclose(p.h_second(x), fd, atol=1e-7)


def test_h_matches_scipy_elliptic(example_profile):
    k = example_profile.constants
    x = np.linspace(0, 3 * k.T, 301)
    sn = ellipj(x * math.sqrt(k.a1 + k.a3), k.m)[0]
    np.testing.assert_allclose(example_profile.h(x), k.a1 * (1 - (k.a1 - k.a2) / k.a1 * sn**2), atol=1e-13)


def test_ode_residual_and_bounds(branch_profile):
    p, k = branch_profile, branch_profile.constants
    x = np.linspace(0, 2 * p.T, 1000)
    h, hp = p.h(x), p.h_prime(x)
    assert np.all((h >= k.a2 - 1e-12) & (h <= k.a1 + 1e-12))
    res = hp**2 + 4 * (h - k.a1) * (h - k.a2) * (h + k.a3)
    assert np.abs(res).max() <= 1e-9 * max(1, k.a1**3)


def test_h_periodicity(branch_profile):
    p = branch_profile
    x = np.random.default_rng(5).uniform(-5, 5, 100)
    assert np.abs(p.h(x + p.T) - p.h(x)).max() <= 1e-10


def test_amplitudes_at_turning_points(example_profile):
    p = example_profile
    np.testing.assert_allclose(p.amplitude_squared(0.0), [1 / 3, 1 / 2, 1 / 6], atol=1e-15)
    np.testing.assert_allclose(p.amplitude_squared(p.T / 2), [2 / 3, 1 / 4, 1 / 12], atol=1e-12)


def test_amplitude_partition(branch_profile):
    x = np.random.default_rng(11).uniform(0, 10, 1000)
    assert np.abs(branch_profile.amplitude_squared(x).sum(axis=0) - 1).max() <= 1e-12


def test_lambda_regression():
    from hamlag.params import SeedParameters, resolve

    for branch, ref in (("minus", LAMBDA_MINUS), ("plus", LAMBDA_PLUS)):
        p = build_profile(resolve(SeedParameters((0, -1, 3), 2, 1, branch)))
        np.testing.assert_allclose(p.Lambda, ref, atol=1e-11)


def test_lambda_against_fixed_rule(branch_profile):
    p = branch_profile
    fixed = fixed_gauss_legendre(p.phase_rate, 0.0, p.T, order=20, panels=100)
    np.testing.assert_allclose(fixed, p.Lambda, atol=1e-11)


def test_phase_starts_at_zero_and_is_additive(branch_profile):
    p = branch_profile
    assert np.all(p.phases(0.0) == 0.0)
    x = np.random.default_rng(8).uniform(-2 * p.T, 3 * p.T, 100)
    assert np.abs(p.phases(x + p.T) - p.phases(x) - p.Lambda[:, None]).max() <= 2 * p.quadrature_tolerance


def test_phase_rate_is_cancelled_form(example_profile):
    """For alpha_i != 0 the rate equals alpha_i (2c2 - a h) / (2 (alpha_i h - c1))."""
    p, k = example_profile, example_profile.constants
    x = np.linspace(0, p.T, 40)
    h = p.h(x)
    rate = p.phase_rate(x)
    for i in (1, 2):
        al = k.alpha[i]
        np.testing.assert_allclose(rate[i], al / 2 * (2 * k.c2 - k.a * h) / (al * h - k.c1), rtol=1e-14)
    # alpha_1 = 0 (and c1 = 0): the removable 0/0 takes its limiting value, not zero
    np.testing.assert_allclose(rate[0], (2 * k.c2 - k.a * h) / (2 * (h - 3.0)), rtol=1e-14)


def test_phase_against_scipy_quad(example_profile):
    p = example_profile
    rate = lambda z, i: p.phase_rate(z)[i]
    for x in (0.3, 1.7, 4.0):
        got = p.phases(x)
        for i in range(3):
            ref = quad(rate, 0, x, args=(i,), epsabs=1e-13, epsrel=1e-13)[0]
            assert got[i] == pytest.approx(ref, abs=1e-11)
