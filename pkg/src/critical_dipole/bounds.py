"""Closed-form bounds on the angular ground state and the critical coupling."""

from dataclasses import dataclass
import math

import numpy as np

from .specfun import bessel_i

__all__ = [
    "BoundsReport",
    "hardy_floor",
    "gamma_c_bounds",
    "lambda_lower_bound",
    "lambda_upper_bound",
    "lambda_upper_bound_or_none",
    "small_gamma_upper",
    "trial_function_integrals",
    "TrialIntegrals",
]

QUAD_NODES = 128


@dataclass(frozen=True)
class BoundsReport:
    n: int
    gamma_lower: float
    gamma_upper: float
    hardy_floor: float

    def contains(self, gamma_c):
        return self.gamma_lower <= gamma_c <= self.gamma_upper


def hardy_floor(n):
    return (n - 2) ** 2 / 4.0


def gamma_c_bounds(n):
    """Two-sided bracket for the critical coupling in dimension n >= 3."""
    if n < 3:
        raise ValueError(f"dimension must be >= 3, got {n}")
    p = (n - 2) * (n - 4)
    upper = 15.0 * math.pi * (p + 4) / 32.0
    if n == 3:
        lower = 0.25
    elif n == 4:
        lower = 1.0
    else:
        lower = 3.0 ** 1.5 * (p + 1) / 8.0
    return BoundsReport(n=n, gamma_lower=lower, gamma_upper=upper, hardy_floor=hardy_floor(n))


def lambda_lower_bound(n, gamma):
    """max(-gamma, -gamma^2/(n-1)^2)."""
    if gamma < 0:
        raise ValueError(f"coupling must be >= 0, got {gamma}")
    if gamma == 0:
        return 0.0
    return max(-gamma, -gamma * gamma / (n - 1) ** 2)


def lambda_upper_bound(n, gamma):
    """Exponential trial-function bound -(gamma/2) I_{n/2}(x) / I_{(n-2)/2}(x), x = 2 gamma/(n-1)."""
    if not gamma > 0:
        raise ValueError(f"the Bessel upper bound needs gamma > 0, got {gamma}")
    x = 2.0 * gamma / (n - 1)
    return -0.5 * gamma * bessel_i(0.5 * n, x) / bessel_i(0.5 * (n - 2), x)


def lambda_upper_bound_or_none(n, gamma):
    """Upper bound when the Bessel series can be evaluated, else None.

    0 at gamma = 0.  The series is restricted to 2 gamma / (n - 1) <= 50, so
    very strong couplings get no upper bound rather than an error.
    """
    if gamma == 0:
        return 0.0
    try:
        return lambda_upper_bound(n, gamma)
    except ValueError:
        return None


def small_gamma_upper(n, gamma):
    """Leading term -gamma^2 / (n (n-1)) of the upper bound as gamma -> 0."""
    return -gamma * gamma / (n * (n - 1))


@dataclass(frozen=True)
class TrialIntegrals:
    numerator: float
    denominator: float
    implied_upper: float


def _gauss_legendre(a, b, nodes=QUAD_NODES):
    x, w = np.polynomial.legendre.leggauss(nodes)
    half = 0.5 * (b - a)
    return half * x + 0.5 * (a + b), half * w


def trial_function_integrals(n):
    """Quadrature of the two integrals of the sin(2 theta) trial function on [pi/2, pi].

    The trial function is zero on [0, pi/2] and sin(2 theta) on [pi/2, pi].
    Both integrals are checked against their closed forms 8/15 and
    pi (4 + (n-2)(n-4)) / 4.
    """
    if n < 3:
        raise ValueError(f"dimension must be >= 3, got {n}")
    theta, w = _gauss_legendre(0.5 * math.pi, math.pi)
    phi = np.sin(2.0 * theta)
    dphi = 2.0 * np.cos(2.0 * theta)
    p = (n - 2) * (n - 4)
    numerator = float(w @ (-np.cos(theta) * phi * phi))
    denominator = float(w @ (dphi * dphi + 0.25 * p * phi * phi / np.sin(theta) ** 2))
    closed_num = 8.0 / 15.0
    closed_den = math.pi * (4 + p) / 4.0
    if abs(numerator - closed_num) > 1e-10 or abs(denominator - closed_den) > 1e-10 * max(1.0, closed_den):
        raise ArithmeticError(
            f"trial-function quadrature disagrees with closed form for n={n}: "
            f"{numerator!r} vs {closed_num!r}, {denominator!r} vs {closed_den!r}"
        )
    return TrialIntegrals(numerator, denominator, denominator / numerator)
