import math

import numpy as np
import pytest
from scipy import integrate

from critical_dipole.profile import (
    angular_quadrature,
    coefficient_decay_rate,
    evaluate_psi,
    ode_residual,
    rayleigh_quotient,
    reconstruct_psi,
    spectral_residual,
)
from critical_dipole.solve import critical_gamma_via_k


@pytest.fixture(scope="module")
def n3_gamma1():
    return reconstruct_psi(3, 1.0, 32, 512)


def test_zero_coupling_profile_is_constant():
    for n in (3, 4, 7):
        s = reconstruct_psi(n, 0.0, 16, 128)
        assert np.ptp(s.psi) == 0.0
        assert s.lam == 0.0
        assert s.ode_residual_linf == 0.0
        assert spectral_residual(s) == 0.0
        assert s.weighted_norm == pytest.approx(1.0, abs=1e-14)


def test_profile_residuals(n3_gamma1):
    s = n3_gamma1
    assert spectral_residual(s) <= 1e-12
    assert s.ode_residual_linf <= 1e-6
    assert ode_residual(s) == s.ode_residual_linf
    assert rayleigh_quotient(s) == pytest.approx(s.lam, abs=1e-8)
    assert s.weighted_norm == pytest.approx(1.0, abs=1e-13)


def test_fd_residual_fourth_order():
    # doubling the grid cuts the residual by about 2^4
    r = [reconstruct_psi(3, 1.0, 32, g).ode_residual_linf for g in (128, 256)]
    assert 8 < r[0] / r[1] < 32


def test_profile_sign_definite_and_increasing_toward_pi(n3_gamma1):
    psi = n3_gamma1.psi
    assert np.all(psi > 0)
    # the dipole potential gamma cos(theta) is lowest at theta = pi
    assert psi[-1] > psi[0]
    assert np.all(np.diff(psi) > 0)


@pytest.mark.parametrize("n", [3, 4, 6, 10])
def test_profile_at_critical_coupling(n):
    g = critical_gamma_via_k(n).gamma_c
    s = reconstruct_psi(n, g, 32, 256)
    assert s.lam == pytest.approx(-((n - 2) ** 2) / 4, abs=1e-9 * g)
    assert np.all(s.psi > 0)
    assert spectral_residual(s) <= 1e-10 * g
    assert rayleigh_quotient(s) == pytest.approx(s.lam, abs=1e-8 * max(1.0, g))


def test_normalization_against_scipy_quad():
    s = reconstruct_psi(4, 2.5, 24, 64)

    def integrand(t):
        return evaluate_psi(4, s.coefficients, np.array([t]))[0] ** 2 * math.sin(t) ** 2

    val, _ = integrate.quad(integrand, 0, math.pi, epsabs=1e-13)
    assert val == pytest.approx(1.0, abs=1e-10)


def test_angular_quadrature_integrates_measure():
    for n in (3, 4, 5, 8):
        _, w = angular_quadrature(n)
        expected = math.sqrt(math.pi) * math.gamma((n - 1) / 2) / math.gamma(n / 2)
        assert w.sum() == pytest.approx(expected, rel=1e-13)


def test_coefficient_decay():
    s = reconstruct_psi(3, 1.0, 32, 64)
    rho = coefficient_decay_rate(s)
    assert 0 < rho < 0.5
    strong = reconstruct_psi(3, 20.0, 32, 64)
    assert rho < coefficient_decay_rate(strong) < 1
    assert coefficient_decay_rate(reconstruct_psi(3, 0.0, 8, 64)) == 0.0


def test_small_grid_skips_fd_residual():
    s = reconstruct_psi(3, 1.0, 16, 32)
    assert math.isnan(s.ode_residual_linf)
    with pytest.raises(ValueError):
        reconstruct_psi(3, 1.0, 16, 8)


def test_grid_layout():
    s = reconstruct_psi(5, 1.0, 16, 100)
    np.testing.assert_allclose(s.theta, np.pi * (np.arange(100) + 0.5) / 100, rtol=0, atol=0)
    assert s.coefficients[0] > 0
