import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import quad
from scipy.special import ellipj, ellipk

from hamlag.elliptic import complete_K, jacobi_sn_cn_dn
from hamlag.errors import DomainError


def _rk4_jacobi(m, u_end, n=4000):
    """Integrate sn' = cn dn, cn' = -sn dn, dn' = -m sn cn from u = 0."""
    def rhs(y):
        s, c, d = y
        return np.array([c * d, -s * d, -m * s * c])

    y, h = np.array([0.0, 1.0, 1.0]), u_end / n
    for _ in range(n):
        k1 = rhs(y)
        k2 = rhs(y + 0.5 * h * k1)
        k3 = rhs(y + 0.5 * h * k2)
        k4 = rhs(y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


def test_K_at_zero_is_half_pi():
    assert complete_K(0.0) == pytest.approx(math.pi / 2, abs=1e-16)


def test_K_matches_quadrature_of_definition():
    # 1.8540746773013719 from scipy.integrate.quad of 1/sqrt(1 - m sin^2 t), m = 0.5
    assert complete_K(0.5) == pytest.approx(1.8540746773013719, rel=1e-15)
    for m in (0.1, 0.7, 0.99):
        ref = quad(lambda t: 1 / math.sqrt(1 - m * math.sin(t) ** 2), 0, math.pi / 2,
                   epsabs=1e-13, epsrel=1e-13, limit=200)[0]
        assert complete_K(m) == pytest.approx(ref, rel=1e-12)
    assert complete_K(0.999999) == pytest.approx(ellipk(0.999999), rel=1e-14)


@pytest.mark.parametrize("m", [1.0, 1.5, -0.1])
def test_domain_errors(m):
    with pytest.raises(DomainError):
        complete_K(m)
    with pytest.raises(DomainError):
        jacobi_sn_cn_dn(0.3, m)


def test_initial_values():
    for m in (0.0, 0.3, 0.9):
        sn, cn, dn = jacobi_sn_cn_dn(0.0, m)
        assert (sn, cn, dn) == (0.0, 1.0, 1.0)


def test_trigonometric_degeneration():
    u = np.linspace(-20, 20, 101)
    sn, cn, dn = jacobi_sn_cn_dn(u, 0.0)
    np.testing.assert_array_equal(sn, np.sin(u))
    np.testing.assert_array_equal(cn, np.cos(u))
    np.testing.assert_array_equal(dn, 1.0)


def test_sn_at_quarter_period_against_rk4():
    m = 0.4268
    K = complete_K(m)
    s_rk, c_rk, d_rk = _rk4_jacobi(m, K)
    sn, cn, dn = jacobi_sn_cn_dn(K, m)
    assert sn == pytest.approx(1.0, abs=1e-12)
    assert s_rk == pytest.approx(1.0, abs=1e-12)
    assert abs(cn) < 1e-8 and abs(c_rk) < 1e-8
    assert dn == pytest.approx(d_rk, abs=1e-12)


def test_pythagorean_identities_random():
    rng = np.random.default_rng(2024)
    u = rng.uniform(-50, 50, 1000)
    m = rng.uniform(0, 0.99, 1000)
    for ui, mi in zip(u, m):
        sn, cn, dn = jacobi_sn_cn_dn(ui, mi)
        assert abs(sn**2 + cn**2 - 1) <= 1e-12
        assert abs(dn**2 + mi * sn**2 - 1) <= 1e-12


def test_agrees_with_scipy():
    u = np.linspace(-30, 30, 2001)
    for m in (0.05, 0.5, 0.95, 0.99999):
        ours = jacobi_sn_cn_dn(u, m)
        ref = ellipj(u, m)
        for a, b in zip(ours, ref[:3]):
            np.testing.assert_allclose(a, b, atol=1e-12)


@settings(max_examples=200, deadline=None)
@given(u=st.floats(-20, 20), m=st.floats(0, 0.99))
def test_derivative_identity(u, m):
    eps = 1e-5
    fd = (jacobi_sn_cn_dn(u + eps, m).sn - jacobi_sn_cn_dn(u - eps, m).sn) / (2 * eps)
    sn, cn, dn = jacobi_sn_cn_dn(u, m)
    assert abs(fd - cn * dn) <= 1e-8


@settings(max_examples=200, deadline=None)
@given(u=st.floats(-20, 20), m=st.floats(0, 0.99))
def test_periodicity(u, m):
    K = complete_K(m)
    assert abs(jacobi_sn_cn_dn(u + 4 * K, m).sn - jacobi_sn_cn_dn(u, m).sn) <= 1e-10
