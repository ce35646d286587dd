import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from critical_dipole.operators import (
    CriticalOperatorSpec,
    DipoleProblem,
    atilde,
    atilde_decay_check,
    build_critical_k,
    build_direct,
    coupling_matrix,
    critical_lambda,
    norm_bound,
    norm_bound_radius,
    offdiag_a,
    weight_w,
)
from critical_dipole.specfun import gegenbauer_norm_const, gegenbauer_table
from critical_dipole.tridiag import eigenvalues, extreme_eigenvalue


@pytest.mark.parametrize("ell, n, expected", [
    (1, 3, 1 / math.sqrt(3)),
    (1, 4, 0.5),
    (2, 3, math.sqrt(4 / 15)),
    (3, 5, math.sqrt(3 * 5 / (7 * 9))),
])
def test_offdiag_a_examples(ell, n, expected):
    assert offdiag_a(ell, n) == pytest.approx(expected, rel=1e-15)


def test_offdiag_a_domain():
    with pytest.raises(ValueError):
        offdiag_a(0, 3)
    with pytest.raises(ValueError):
        offdiag_a(1, 2)


@pytest.mark.parametrize("n", [3, 4, 5, 10, 40])
def test_offdiag_a_tends_to_one_half(n):
    assert offdiag_a(10 ** 6, n) == pytest.approx(0.5, abs=1e-5)


@pytest.mark.parametrize("n", range(3, 9))
def test_offdiag_a_matches_cos_matrix_elements(n):
    # <l-1| cos theta |l> in the orthonormal basis, by quadrature
    x, w = np.polynomial.legendre.leggauss(200)
    t = 0.5 * np.pi * (x + 1)
    w = 0.5 * np.pi * w * np.sin(t) ** (n - 2)
    tab = gegenbauer_table(10, 0.5 * (n - 2), np.cos(t))
    basis = tab * np.array([gegenbauer_norm_const(ell, n) for ell in range(11)])[:, None]
    cos_matrix = (basis * w * np.cos(t)) @ basis.T
    for ell in range(1, 11):
        assert cos_matrix[ell - 1, ell] == pytest.approx(offdiag_a(ell, n), abs=1e-10)
    np.testing.assert_allclose(np.diag(cos_matrix), 0.0, atol=1e-10)


def test_weight_and_critical_lambda():
    assert critical_lambda(3) == -0.25
    assert critical_lambda(6) == -4.0
    assert weight_w(0, 3, critical_lambda(3)) == 0.25
    assert weight_w(2, 5, critical_lambda(5)) == 10 + 2.25
    for n in range(3, 20):
        assert all(weight_w(ell, n, critical_lambda(n)) > 0 for ell in range(30))


def test_problem_validation():
    with pytest.raises(ValueError):
        DipoleProblem(2, 1.0)
    with pytest.raises(ValueError):
        DipoleProblem(3, -0.1)
    with pytest.raises(ValueError):
        DipoleProblem(3, math.nan)
    with pytest.raises(ValueError):
        CriticalOperatorSpec(3, 1)
    assert CriticalOperatorSpec(5).lambda_pinned == -2.25


def test_build_direct_example():
    T = build_direct(DipoleProblem(3, 2.0), 3)
    np.testing.assert_array_equal(T.diag, [0.0, 2.0, 6.0])
    np.testing.assert_allclose(T.offdiag, [2 / math.sqrt(3), 2 * offdiag_a(2, 3)], rtol=1e-15)
    with pytest.raises(ValueError):
        build_direct(DipoleProblem(3, 1.0), 1)


def test_direct_two_by_two_closed_form():
    # D + gamma J at m = 2 for n = 3: eigenvalues 1 -+ sqrt(1 + gamma^2 / 3)
    for gamma in (0.1, 1.0, 4.0):
        lam = extreme_eigenvalue(build_direct(DipoleProblem(3, gamma), 2), "min", 1e-16)
        assert lam == pytest.approx(1 - math.sqrt(1 + gamma * gamma / 3), abs=1e-13)


def test_coupling_matrix_spectrum_in_unit_interval():
    for n in (3, 4, 7):
        ev = eigenvalues(coupling_matrix(n, 40))
        assert ev[0] > -1 and ev[-1] < 1
        np.testing.assert_allclose(ev, -ev[::-1], atol=1e-12)


@pytest.mark.parametrize("n, expected", [(3, 4 / 3 ** 1.5), (4, 0.25)])
def test_atilde_first_entry(n, expected):
    assert atilde(1, n) == pytest.approx(expected, rel=1e-15)
    assert build_critical_k(CriticalOperatorSpec(n, 4)).offdiag[0] == pytest.approx(expected, rel=1e-15)


def test_atilde_custom_lambda():
    assert atilde(1, 3, 0.0 - 1.0) == pytest.approx(offdiag_a(1, 3) / math.sqrt(3 * 1), rel=1e-15)


@pytest.mark.parametrize("n", [3, 4, 5, 8, 20, 60])
def test_atilde_decays_like_inverse_square(n):
    seq = atilde_decay_check(n, 400)
    assert np.all(np.isfinite(seq)) and np.all(seq > 0)
    # l^2 atilde_l -> 1/2
    assert seq[-1] == pytest.approx(0.5, rel=0.05 if n < 20 else 0.5)
    with pytest.raises(ValueError):
        atilde_decay_check(n, 9)


def test_norm_bound_examples():
    bound, ell = norm_bound(3)
    assert bound == pytest.approx(8 / 3 ** 1.5, rel=1e-15)
    assert ell == 1
    assert norm_bound_radius(4) == 0.0
    assert norm_bound_radius(5) == pytest.approx(0.25 * (-4 + math.sqrt(22)), rel=1e-14)
    assert norm_bound_radius(5) == pytest.approx(0.1726, abs=1e-4)


def test_norm_bound_radius_real_from_n4():
    # radicand 2(3n^2 - 18n + 26) is -2 at n = 3 and positive from n = 4 on
    assert norm_bound_radius(3) is None
    assert all(norm_bound_radius(n) is not None for n in range(4, 300))


@pytest.mark.parametrize("n", [3, 4, 5, 6, 10, 30, 100])
def test_norm_bound_dominates_spectrum(n):
    bound, ell = norm_bound(n)
    assert ell >= 1
    K = build_critical_k(CriticalOperatorSpec(n, 48))
    ev = eigenvalues(K)
    assert max(abs(ev[0]), abs(ev[-1])) <= bound + 1e-14


@pytest.mark.parametrize("n", [3, 4, 5, 9])
def test_k_spectrum_symmetric(n):
    ev = eigenvalues(build_critical_k(CriticalOperatorSpec(n, 21)), 1e-17)
    np.testing.assert_allclose(ev, -ev[::-1], atol=1e-14)


@settings(max_examples=40, deadline=None)
@given(st.integers(3, 30), st.integers(2, 30))
def test_k_eigenvalues_interlace(n, m):
    small = eigenvalues(build_critical_k(CriticalOperatorSpec(n, m)), 1e-16)
    big = eigenvalues(build_critical_k(CriticalOperatorSpec(n, m + 1)), 1e-16)
    slack = 1e-12
    assert np.all(big[:-1] <= small + slack)
    assert np.all(small <= big[1:] + slack)


@pytest.mark.parametrize("n", [3, 4, 5, 7, 10])
def test_identity_plus_gamma_k_is_positive_below_critical(n):
    K = build_critical_k(CriticalOperatorSpec(n, 32))
    gamma_c = -1.0 / extreme_eigenvalue(K, "min", 1e-17)
    for frac in (0.5, 0.9, 0.999):
        assert 1.0 + frac * gamma_c * extreme_eigenvalue(K, "min") > 0
    assert 1.0 + gamma_c * extreme_eigenvalue(K, "min", 1e-17) == pytest.approx(0.0, abs=1e-14)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_direct_matrix_hits_critical_energy_at_gamma_c(n):
    K = build_critical_k(CriticalOperatorSpec(n, 32))
    gamma_c = -1.0 / extreme_eigenvalue(K, "min", 1e-17)
    lam = extreme_eigenvalue(build_direct(DipoleProblem(n, gamma_c), 32), "min")
    assert lam == pytest.approx(critical_lambda(n), abs=1e-10 * max(1.0, gamma_c))
