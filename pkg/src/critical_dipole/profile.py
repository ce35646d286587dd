"""Angular ground-state profile Psi(theta) rebuilt from its Gegenbauer coefficients."""

from dataclasses import dataclass
import math

import numpy as np

from .operators import DEFAULT_TRUNCATION, offdiag_a
from .solve import lambda_min
from .specfun import gegenbauer_norm_const, gegenbauer_table

__all__ = [
    "ProfileSamples",
    "QUAD_NODES",
    "FD_MARGIN",
    "angular_quadrature",
    "basis_coefficients",
    "evaluate_psi",
    "reconstruct_psi",
    "ode_residual",
    "spectral_residual",
    "rayleigh_quotient",
    "coefficient_decay_rate",
]

QUAD_NODES = 256
FD_MARGIN = 0.15


@dataclass(frozen=True, eq=False)
class ProfileSamples:
    n: int
    gamma: float
    m: int
    theta: np.ndarray
    psi: np.ndarray
    lam: float
    weighted_norm: float
    ode_residual_linf: float
    coefficients: np.ndarray  # d_l, in the orthonormal basis, sign-fixed with psi


def angular_quadrature(n, nodes=QUAD_NODES):
    """Gauss-Legendre nodes on (0, pi) with the sin^{n-2} measure folded into the weights."""
    x, w = np.polynomial.legendre.leggauss(nodes)
    theta = 0.5 * math.pi * (x + 1.0)
    return theta, 0.5 * math.pi * w * np.sin(theta) ** (n - 2)


def basis_coefficients(n, d):
    """Coefficients c_l = d_l N_l multiplying raw Gegenbauer polynomials."""
    return np.array([d[ell] * gegenbauer_norm_const(ell, n) for ell in range(len(d))])


def evaluate_psi(n, d, theta):
    c = basis_coefficients(n, d)
    table = gegenbauer_table(len(d) - 1, 0.5 * (n - 2), np.cos(theta))
    return np.tensordot(c, table, axes=1)


def _evaluate_dpsi_dxi(n, d, xi):
    # d/dx C_l^a(x) = 2a C_{l-1}^{a+1}(x)
    c = basis_coefficients(n, d)
    a = 0.5 * (n - 2)
    if len(d) < 2:
        return np.zeros_like(xi)
    table = gegenbauer_table(len(d) - 2, a + 1.0, xi)
    return 2.0 * a * np.tensordot(c[1:], table, axes=1)


def reconstruct_psi(n, gamma, m=DEFAULT_TRUNCATION, grid_size=512):
    """Sample the normalized, positive ground state on theta_k = pi (k + 1/2) / grid_size."""
    if grid_size < 16:
        raise ValueError(f"grid_size must be >= 16, got {grid_size}")
    res = lambda_min(n, gamma, m)
    d = res.vector.copy()
    theta = math.pi * (np.arange(grid_size) + 0.5) / grid_size
    qt, qw = angular_quadrature(n)
    norm = math.sqrt(float(qw @ evaluate_psi(n, d, qt) ** 2))
    d /= norm
    psi = evaluate_psi(n, d, theta)
    if psi[grid_size // 2] < 0:
        d, psi = -d, -psi
    weighted_norm = float(qw @ evaluate_psi(n, d, qt) ** 2)
    samples = ProfileSamples(n, float(gamma), m, theta, psi, res.lam, weighted_norm, math.nan, d)
    resid = ode_residual(samples) if grid_size >= 64 else math.nan
    return ProfileSamples(n, float(gamma), m, theta, psi, res.lam, weighted_norm, resid, d)


def ode_residual(samples):
    """Max of |-Psi'' - (n-2) cot Psi' + gamma cos Psi - lambda Psi| / max|Psi| on [0.15, pi-0.15].

    Derivatives are fourth-order central differences on the (uniform) sample grid.
    """
    theta, f = samples.theta, samples.psi
    h = theta[1] - theta[0]
    k = np.arange(2, theta.size - 2)
    k = k[(theta[k] >= FD_MARGIN) & (theta[k] <= math.pi - FD_MARGIN)]
    # symmetric grouping so that a constant profile differentiates to exactly zero
    d1 = (8.0 * (f[k + 1] - f[k - 1]) - (f[k + 2] - f[k - 2])) / (12.0 * h)
    d2 = (16.0 * (f[k + 1] + f[k - 1]) - (f[k + 2] + f[k - 2]) - 30.0 * f[k]) / (12.0 * h * h)
    t = theta[k]
    r = -d2 - (samples.n - 2) * np.cos(t) / np.sin(t) * d1 + (samples.gamma * np.cos(t) - samples.lam) * f[k]
    return float(np.max(np.abs(r)) / np.max(np.abs(f)))


def spectral_residual(samples):
    """l2 norm of the operator residual, applied term by term to the Gegenbauer expansion.

    Each degree l contributes l(l+n-2) d_l (Laplace-Beltrami eigenvalue) and
    cos(theta) shifts it to degrees l +- 1 with weights a_l.  The residual
    includes the leak into degree m, just past the truncation.
    """
    n, gamma, lam = samples.n, samples.gamma, samples.lam
    d = samples.coefficients / np.linalg.norm(samples.coefficients)
    m = d.size
    out = np.zeros(m + 1)
    for ell in range(m):
        out[ell] += (ell * (ell + n - 2) - lam) * d[ell]
        out[ell + 1] += gamma * offdiag_a(ell + 1, n) * d[ell]
        if ell > 0:
            out[ell - 1] += gamma * offdiag_a(ell, n) * d[ell]
    return float(np.linalg.norm(out))


def rayleigh_quotient(samples):
    """Weighted-quadrature Rayleigh quotient of Psi, evaluated in xi = cos(theta).

    (int (1-xi^2) |Psi'|^2 + gamma xi |Psi|^2) / int |Psi|^2, all against the
    sin^{n-2} measure, with Gauss-Legendre nodes placed in theta.
    """
    n, d = samples.n, samples.coefficients
    qt, qw = angular_quadrature(n)
    xi = np.cos(qt)
    psi = evaluate_psi(n, d, qt)
    dpsi = _evaluate_dpsi_dxi(n, d, xi)
    energy = float(qw @ ((1.0 - xi * xi) * dpsi * dpsi + samples.gamma * xi * psi * psi))
    return energy / float(qw @ (psi * psi))


def coefficient_decay_rate(samples, floor=1e-14):
    """Geometric rate rho from a log-linear fit |d_l| ~ C rho^l over coefficients above ``floor``."""
    d = np.abs(samples.coefficients)
    idx = np.nonzero(d > floor)[0]
    if idx.size < 3:
        return 0.0
    slope = np.polyfit(idx, np.log(d[idx]), 1)[0]
    return float(math.exp(slope))
