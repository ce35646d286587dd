"""Special functions used by the dipole solver.

Everything here is written out by hand (Lanczos log-gamma, ascending series for
the modified Bessel function, three-term recurrence for Gegenbauer
polynomials) so that the numerical stack has no hidden dependency on a
special-function library.
"""

from dataclasses import dataclass
from fractions import Fraction
import math

import numpy as np

__all__ = [
    "GegenbauerParams",
    "ln_gamma",
    "pochhammer",
    "gegenbauer",
    "gegenbauer_table",
    "gegenbauer_norm_const",
    "bessel_i",
    "sphere_area",
    "harmonic_dim",
]

# Lanczos approximation, g = 7, nine terms.
_LANCZOS_G = 7.0
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LN_2PI = 0.5 * math.log(2.0 * math.pi)
_MAX_EXACT_FACTORIAL = 170


@dataclass(frozen=True)
class GegenbauerParams:
    """Degree ``order``, index ``index`` (> 0) and argument ``x`` in [-1, 1]."""

    order: int
    index: float
    x: float

    def __post_init__(self):
        if self.order < 0:
            raise ValueError(f"Gegenbauer degree must be >= 0, got {self.order}")
        if not self.index > 0:
            raise ValueError(f"Gegenbauer index must be > 0, got {self.index}")
        if abs(self.x) > 1.0:
            raise ValueError(f"Gegenbauer argument must lie in [-1, 1], got {self.x}")


def ln_gamma(x):
    """Natural log of the Gamma function for x > 0."""
    x = float(x)
    if not x > 0.0 or math.isinf(x):
        raise ValueError(f"ln_gamma requires a finite x > 0, got {x}")
    if x == int(x) and x <= _MAX_EXACT_FACTORIAL + 1:
        return math.log(math.factorial(int(x) - 1))
    if x < 0.5:
        # shift up, the Lanczos sum is tuned for Re(x) >= 1/2
        return ln_gamma(x + 1.0) - math.log(x)
    z = x - 1.0
    acc = _LANCZOS_COEF[0]
    for k in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[k] / (z + k)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LN_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def pochhammer(x, k):
    """Rising factorial (x)_k = x (x+1) ... (x+k-1), as a direct product."""
    if k < 0:
        raise ValueError(f"pochhammer needs k >= 0, got {k}")
    out = 1.0
    for j in range(k):
        out *= x + j
    return out


def gegenbauer(params):
    """Evaluate C_l^lambda(x) by forward three-term recurrence in the degree."""
    return float(gegenbauer_table(params.order, params.index, params.x)[-1])


def gegenbauer_table(max_order, index, x):
    """All of C_0 .. C_max_order at ``x`` (scalar or array).

    Returns an array of shape ``(max_order + 1,) + np.shape(x)``.
    """
    x = np.asarray(x, dtype=float)
    table = np.empty((max_order + 1,) + x.shape)
    table[0] = 1.0
    if max_order >= 1:
        table[1] = 2.0 * index * x
    for ell in range(1, max_order):
        table[ell + 1] = (
            2.0 * (ell + index) * x * table[ell] - (ell + 2.0 * index - 1.0) * table[ell - 1]
        ) / (ell + 1.0)
    return table


def gegenbauer_norm_const(ell, n):
    """Factor N_l making N_l C_l^{(n-2)/2}(cos t) unit-norm in L^2((0, pi); sin^{n-2} t dt).

    N_l = [l! (2l+n-2) / (2^{4-n} pi Gamma(l+n-2))]^{1/2} Gamma((n-2)/2),
    evaluated in log space.
    """
    if n < 3:
        raise ValueError(f"dimension must be >= 3, got {n}")
    if ell < 0:
        raise ValueError(f"degree must be >= 0, got {ell}")
    log_sq = (
        ln_gamma(ell + 1.0)
        + math.log(2.0 * ell + n - 2.0)
        - (4.0 - n) * math.log(2.0)
        - math.log(math.pi)
        - ln_gamma(ell + n - 2.0)
    )
    log_val = 0.5 * log_sq + ln_gamma((n - 2.0) / 2.0)
    if log_val > 709.0:
        raise OverflowError(f"normalization constant overflows for l={ell}, n={n}")
    return math.exp(log_val)


def bessel_i(nu, x):
    """Modified Bessel function I_nu(x) of the first kind, ascending power series.

    Valid for nu >= 0 and 0 <= x <= 50.
    """
    nu = float(nu)
    x = float(x)
    if nu < 0.0 or x < 0.0 or x > 50.0:
        raise ValueError(f"bessel_i domain is nu >= 0, 0 <= x <= 50; got nu={nu}, x={x}")
    if x == 0.0:
        return 1.0 if nu == 0.0 else 0.0
    half = 0.5 * x
    term = math.exp(nu * math.log(half) - ln_gamma(nu + 1.0))
    total = term
    quarter_sq = half * half
    k = 0
    while True:
        k += 1
        term *= quarter_sq / (k * (k + nu))
        total += term
        if term < 1e-17 * total:
            return total


def sphere_area(n):
    """Surface area 2 pi^{n/2} / Gamma(n/2) of the unit sphere in R^n."""
    if n < 2:
        raise ValueError(f"sphere_area needs n >= 2, got {n}")
    return 2.0 * math.exp(0.5 * n * math.log(math.pi) - ln_gamma(0.5 * n))


def harmonic_dim(ell, n):
    """Dimension of the degree-``ell`` spherical harmonics on S^{n-1}, n >= 3 (exact)."""
    if n < 3:
        raise ValueError(f"harmonic_dim is defined here for n >= 3, got {n}")
    if ell < 0:
        raise ValueError(f"degree must be >= 0, got {ell}")
    val = Fraction(2 * ell + n - 2, ell + n - 2) * math.comb(ell + n - 2, n - 2)
    assert val.denominator == 1
    return int(val)
