"""Jacobi matrices of the dipole problem in the normalized Gegenbauer basis.

Row/column ``l`` is Gegenbauer degree ``l`` (starting from 0) and
``offdiag[k]`` couples degrees ``k`` and ``k + 1``, so ``offdiag[l - 1]``
holds the coupling a_l.

Two matrices are built:

* ``build_direct``: D + gamma J, with D = diag(l (l + n - 2)).  Its lowest
  eigenvalue is the angular ground-state energy at coupling gamma.
* ``build_critical_k``: K = w^{-1/2} J w^{-1/2} with the weights w_l pinned at
  the critical energy -(n-2)^2/4.  Its lowest eigenvalue is -1/gamma_c.
"""

from dataclasses import dataclass
import math

import numpy as np

from .tridiag import SymTridiag

__all__ = [
    "DipoleProblem",
    "CriticalOperatorSpec",
    "critical_lambda",
    "offdiag_a",
    "weight_w",
    "build_direct",
    "coupling_matrix",
    "atilde",
    "build_critical_k",
    "atilde_decay_check",
    "norm_bound_radius",
    "norm_bound",
]

DEFAULT_TRUNCATION = 32


def critical_lambda(n):
    """Angular eigenvalue -(n-2)^2/4 reached exactly at the critical coupling."""
    return -((n - 2) ** 2) / 4.0


@dataclass(frozen=True)
class DipoleProblem:
    n: int
    gamma: float

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"dimension must be >= 3, got {self.n}")
        if not self.gamma >= 0:
            raise ValueError(f"coupling must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class CriticalOperatorSpec:
    n: int
    m: int = DEFAULT_TRUNCATION

    def __post_init__(self):
        if self.n < 3:
            raise ValueError(f"dimension must be >= 3, got {self.n}")
        if self.m < 2:
            raise ValueError(f"truncation must be >= 2, got {self.m}")

    @property
    def lambda_pinned(self):
        return critical_lambda(self.n)


def offdiag_a(ell, n):
    """Coupling a_l = sqrt(l (l+n-3) / ((2l+n-4)(2l+n-2))) of cos(theta) between degrees l-1 and l."""
    if ell < 1:
        raise ValueError(f"a_l is defined for l >= 1, got {ell}")
    if n < 3:
        raise ValueError(f"dimension must be >= 3, got {n}")
    return math.sqrt(ell * (ell + n - 3) / ((2 * ell + n - 4) * (2 * ell + n - 2)))


def weight_w(ell, n, lam):
    return ell * (ell + n - 2) - lam


def _a_array(n, m):
    return np.array([offdiag_a(ell, n) for ell in range(1, m)])


def coupling_matrix(n, m):
    """Truncated cos(theta) multiplication matrix J (zero diagonal, entries a_l)."""
    return SymTridiag(np.zeros(m), _a_array(n, m))


def build_direct(problem, m=DEFAULT_TRUNCATION):
    """m x m truncation of D + gamma J."""
    if m < 2:
        raise ValueError(f"truncation must be >= 2, got {m}")
    n = problem.n
    diag = np.array([ell * (ell + n - 2) for ell in range(m)], dtype=float)
    return SymTridiag(diag, problem.gamma * _a_array(n, m))


def atilde(ell, n, lam=None):
    """Entry a_l / sqrt(w_l w_{l-1}) of K; ``lam`` defaults to the critical energy."""
    if lam is None:
        lam = critical_lambda(n)
    return offdiag_a(ell, n) / math.sqrt(weight_w(ell, n, lam) * weight_w(ell - 1, n, lam))


def build_critical_k(spec):
    """m x m truncation K_m of the compact operator K at criticality."""
    n, m = spec.n, spec.m
    lam = spec.lambda_pinned
    off = np.array([atilde(ell, n, lam) for ell in range(1, m)])
    return SymTridiag(np.zeros(m), off)


def atilde_decay_check(n, ell_max):
    """Sequence l^2 * atilde_l for l = 1..ell_max; bounded because atilde_l = O(l^-2)."""
    if ell_max < 10:
        raise ValueError(f"ell_max must be >= 10, got {ell_max}")
    return np.array([ell * ell * atilde(ell, n) for ell in range(1, ell_max + 1)])


def norm_bound_radius(n):
    """Stationary point r(n) of l -> atilde_l treated as continuous; None when complex."""
    radicand = 2.0 * (26 - 18 * n + 3 * n * n)
    if radicand < 0:
        return None
    return 0.25 * (6 - 2 * n + math.sqrt(radicand))


def norm_bound(n):
    """Operator-norm bound 2 max_l atilde_l for K, and the maximizing degree.

    The maximizer is found by scanning l = 1 .. max(64, 4 ceil(r(n))) rather
    than trusting ceil(r(n)): r(4) is exactly 0, which is not a valid degree.
    """
    r = norm_bound_radius(n)
    upper = 64 if r is None else max(64, 4 * math.ceil(r))
    best_ell, best = 1, atilde(1, n)
    for ell in range(2, upper + 1):
        val = atilde(ell, n)
        if val > best:
            best_ell, best = ell, val
    return 2.0 * best, best_ell
