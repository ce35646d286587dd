"""Angular ground-state energy and critical dipole coupling.

The ground-state energy lambda(gamma) of the angular operator is the lowest
eigenvalue of the direct matrix D + gamma J.  The critical coupling is where
lambda(gamma) = -(n-2)^2/4.  It is computed two ways: bisection on gamma
(``critical_gamma_direct``) and as -1/lambda_min(K) for the compact operator
K at criticality (``critical_gamma_via_k``).  At equal truncation both routes
solve the same truncated pencil, so they must agree to rounding.
"""

from dataclasses import dataclass, field
import math

import numpy as np

from . import bounds
from .operators import (
    DEFAULT_TRUNCATION,
    CriticalOperatorSpec,
    DipoleProblem,
    build_critical_k,
    build_direct,
    coupling_matrix,
    critical_lambda,
)
from .tridiag import NonConvergence, eigenvector_for, extreme_eigenvalue

__all__ = [
    "EIG_TOL",
    "GAMMA_TOL",
    "BracketFailure",
    "LambdaResult",
    "CriticalResult",
    "NotAttained",
    "ConvergenceRow",
    "AsymptoticRow",
    "AsymptoticStudy",
    "ground_energy",
    "lambda_min",
    "critical_gamma_direct",
    "critical_gamma_via_k",
    "critical_gamma_general",
    "self_adjointness_threshold",
    "feynman_hellmann",
    "convergence_study",
    "asymptotic_ratio",
]

EIG_TOL = 1e-13
GAMMA_TOL = 1e-12
# K has spectrum inside [-2, 2]: bisect until the bracket cannot be split
K_EIG_TOL = 1e-17
MIN_ROOTFIND_TRUNCATION = 8
MAX_WIDENINGS = 10
DIRECT = "direct-rootfind"
CRITICAL_K = "critical-k"


class BracketFailure(RuntimeError):
    """No sign change of lambda(gamma) - target could be established."""


@dataclass(frozen=True, eq=False)
class LambdaResult:
    n: int
    gamma: float
    m: int
    lam: float
    vector: np.ndarray
    residual: float
    lower: float
    upper: float | None  # None when the Bessel series is out of range

    @property
    def sandwich(self):
        return (self.lower, self.upper)


@dataclass(frozen=True)
class CriticalResult:
    n: int
    method: str
    m: int
    gamma_c: float
    bracket: tuple | None = None
    iterations: int = 0
    bounds_ok: bool = True


@dataclass(frozen=True)
class NotAttained:
    """The requested angular energy is not reached for any gamma >= 0."""

    n: int
    target_lambda: float
    reason: str


def ground_energy(n, gamma, m=DEFAULT_TRUNCATION, tol=EIG_TOL):
    """Lowest eigenvalue of the truncated direct matrix (bisection only, no eigenvector)."""
    if gamma == 0:
        return 0.0
    return extreme_eigenvalue(build_direct(DipoleProblem(n, gamma), m), "min", tol)


def lambda_min(n, gamma, m=DEFAULT_TRUNCATION, tol=EIG_TOL):
    """Ground state of the angular operator at coupling ``gamma``, truncated to m degrees."""
    problem = DipoleProblem(n, gamma)
    if gamma == 0:
        vec = np.zeros(m)
        vec[0] = 1.0
        return LambdaResult(n, 0.0, m, 0.0, vec, 0.0, 0.0, 0.0)
    T = build_direct(problem, m)
    estimate = extreme_eigenvalue(T, "min", tol)
    pair = eigenvector_for(T, estimate)
    if abs(pair.value - estimate) > 1e-8 * T.scale():
        raise NonConvergence(
            f"inverse iteration locked onto {pair.value!r}, not the ground state {estimate!r}"
        )
    return LambdaResult(
        n=n,
        gamma=float(gamma),
        m=m,
        lam=pair.value,
        vector=pair.vector,
        residual=pair.residual,
        lower=bounds.lambda_lower_bound(n, gamma),
        upper=bounds.lambda_upper_bound_or_none(n, gamma),
    )


def _bisect_gamma(n, target, lo, hi, m, tol, eig_tol):
    def excess(g):
        return ground_energy(n, g, m, eig_tol) - target

    for _ in range(MAX_WIDENINGS + 1):
        f_lo, f_hi = excess(lo), excess(hi)
        if f_lo > 0 > f_hi:
            break
        if f_lo <= 0:
            lo /= 1.5
        if f_hi >= 0:
            hi *= 1.5
    else:
        raise BracketFailure(
            f"no sign change for n={n}, target={target!r} after {MAX_WIDENINGS} widenings"
        )
    iterations = 0
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        iterations += 1
        if excess(mid) > 0:
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi), (lo, hi), iterations


def _bounds_ok(n, gamma_c):
    rep = bounds.gamma_c_bounds(n)
    return rep.contains(gamma_c) and gamma_c >= rep.hardy_floor


def critical_gamma_direct(n, m=DEFAULT_TRUNCATION, tol=GAMMA_TOL, eig_tol=EIG_TOL):
    """Bisection on gamma for lambda(gamma) = -(n-2)^2/4, started from the analytic bracket."""
    if m < MIN_ROOTFIND_TRUNCATION:
        raise ValueError(f"root finding needs m >= {MIN_ROOTFIND_TRUNCATION}, got {m}")
    rep = bounds.gamma_c_bounds(n)
    gamma, bracket, its = _bisect_gamma(
        n, critical_lambda(n), rep.gamma_lower, rep.gamma_upper, m, tol, eig_tol
    )
    return CriticalResult(n, DIRECT, m, gamma, bracket, its, _bounds_ok(n, gamma))


def critical_gamma_via_k(n, m=DEFAULT_TRUNCATION, tol=K_EIG_TOL):
    """gamma_c = -1 / lambda_min(K_m)."""
    K = build_critical_k(CriticalOperatorSpec(n, m))
    lam = extreme_eigenvalue(K, "min", tol)
    gamma = -1.0 / lam
    return CriticalResult(n, CRITICAL_K, m, gamma, None, 0, _bounds_ok(n, gamma))


def critical_gamma_general(n, target_lambda, m=DEFAULT_TRUNCATION, tol=GAMMA_TOL, eig_tol=EIG_TOL):
    """Coupling at which the angular ground energy equals ``target_lambda``.

    lambda(gamma) decreases strictly from lambda(0) = 0, so negative targets
    have a unique solution, 0 is hit only at gamma = 0, and positive targets
    give ``NotAttained``.
    """
    if m < MIN_ROOTFIND_TRUNCATION:
        raise ValueError(f"root finding needs m >= {MIN_ROOTFIND_TRUNCATION}, got {m}")
    if target_lambda > 0:
        return NotAttained(n, target_lambda, "ground energy is <= 0 for every gamma >= 0")
    if target_lambda == 0:
        return CriticalResult(n, DIRECT, m, 0.0, (0.0, 0.0), 0, True)
    t = -target_lambda
    # lambda >= max(-gamma, -gamma^2/(n-1)^2) forces the root above this
    lo = max(t, (n - 1) * math.sqrt(t)) * (1.0 - 1e-12)
    gamma, bracket, its = _bisect_gamma(n, target_lambda, lo, 2.0 * lo, m, tol, eig_tol)
    return CriticalResult(n, DIRECT, m, gamma, bracket, its, True)


def self_adjointness_threshold(n, m=DEFAULT_TRUNCATION, tol=GAMMA_TOL):
    """Largest coupling keeping the dipole Hamiltonian essentially self-adjoint on C_0^inf(R^n minus 0).

    That is the gamma with lambda(gamma) = -n(n-4)/4; ``NotAttained`` for
    n = 3 (never essentially self-adjoint), and 0 for n = 4.
    """
    return critical_gamma_general(n, -n * (n - 4) / 4.0, m, tol)


def feynman_hellmann(n, gamma, m=DEFAULT_TRUNCATION, h=1e-4):
    """Derivative d lambda / d gamma two ways: (central difference, d^T J d)."""
    if not gamma > 0:
        raise ValueError(f"gamma must be > 0, got {gamma}")
    if not 0 < h <= 0.5 * gamma:
        raise ValueError(f"step must lie in (0, gamma/2], got {h}")
    fd = (lambda_min(n, gamma + h, m).lam - lambda_min(n, gamma - h, m).lam) / (2.0 * h)
    d = lambda_min(n, gamma, m).vector
    fh = float(d @ coupling_matrix(n, m).matvec(d))
    return fd, fh


@dataclass(frozen=True)
class ConvergenceRow:
    m: int
    gamma_c: float
    delta: float | None


def convergence_study(n, m_list, tol=K_EIG_TOL):
    """critical_gamma_via_k over increasing truncations, with successive differences."""
    ms = list(m_list)
    if not ms or any(b <= a for a, b in zip(ms, ms[1:])) or ms[0] < 2:
        raise ValueError(f"m_list must be strictly increasing and >= 2, got {ms}")
    rows = []
    prev = None
    for m in ms:
        g = critical_gamma_via_k(n, m, tol).gamma_c
        rows.append(ConvergenceRow(m, g, None if prev is None else abs(g - prev)))
        prev = g
    return rows


@dataclass(frozen=True)
class AsymptoticRow:
    n: int
    gamma_c: float
    ratio: float  # gamma_c / ((n-2)(n-4))
    reciprocal: float  # (n-2)(n-4) / (4 gamma_c)


@dataclass(frozen=True)
class AsymptoticStudy:
    rows: list = field(default_factory=list)

    @property
    def c0_estimate(self):
        """ESTIMATE of the large-n constant: the last computed ratio."""
        return self.rows[-1].ratio

    @property
    def ratio_decreasing(self):
        r = [row.ratio for row in self.rows]
        return all(b < a for a, b in zip(r, r[1:]))

    @property
    def reciprocal_decreasing(self):
        r = [row.reciprocal for row in self.rows]
        return all(b < a for a, b in zip(r, r[1:]))


def asymptotic_ratio(n_list, m=DEFAULT_TRUNCATION, tol=K_EIG_TOL):
    """gamma_c / ((n-2)(n-4)) and its scaled reciprocal for n >= 5."""
    rows = []
    for n in n_list:
        if n < 5:
            raise ValueError(f"asymptotic ratio needs n >= 5, got {n}")
        g = critical_gamma_via_k(n, m, tol).gamma_c
        p = (n - 2) * (n - 4)
        rows.append(AsymptoticRow(n, g, g / p, p / (4.0 * g)))
    return AsymptoticStudy(rows)
