"""Symmetric tridiagonal eigensolver.

Sturm-sequence counting drives bisection for eigenvalues, inverse iteration
supplies eigenvectors, and ``charpoly_eval`` is a determinant recursion kept
around as an oracle for small matrices.  No QR: everything is deterministic
and needs nothing beyond the two arrays of the matrix.
"""

from dataclasses import dataclass
import math

import numpy as np

__all__ = [
    "SymTridiag",
    "EigenPair",
    "NonConvergence",
    "gershgorin_bounds",
    "sturm_count",
    "extreme_eigenvalue",
    "kth_eigenvalue",
    "eigenvalues",
    "eigenvector_for",
    "charpoly_eval",
]


class NonConvergence(RuntimeError):
    """Inverse iteration did not reach the requested residual."""


@dataclass(frozen=True, eq=False)
class SymTridiag:
    """Real symmetric tridiagonal matrix.

    ``offdiag[k]`` couples rows ``k`` and ``k + 1``.
    """

    diag: np.ndarray
    offdiag: np.ndarray

    def __post_init__(self):
        d = np.array(self.diag, dtype=float).reshape(-1)
        e = np.array(self.offdiag, dtype=float).reshape(-1)
        if d.size < 1:
            raise ValueError("tridiagonal matrix needs at least one row")
        if e.size != d.size - 1:
            raise ValueError(f"offdiag has length {e.size}, expected {d.size - 1}")
        if not (np.all(np.isfinite(d)) and np.all(np.isfinite(e))):
            raise ValueError("matrix entries must be finite")
        d.flags.writeable = False
        e.flags.writeable = False
        object.__setattr__(self, "diag", d)
        object.__setattr__(self, "offdiag", e)

    @property
    def size(self):
        return self.diag.size

    def matvec(self, v):
        v = np.asarray(v, dtype=float)
        out = self.diag * v
        out[:-1] += self.offdiag * v[1:]
        out[1:] += self.offdiag * v[:-1]
        return out

    def to_dense(self):
        return np.diag(self.diag) + np.diag(self.offdiag, 1) + np.diag(self.offdiag, -1)

    def scale(self):
        """max(1, max |entry|), the reference magnitude for tolerances."""
        m = float(np.max(np.abs(self.diag)))
        if self.offdiag.size:
            m = max(m, float(np.max(np.abs(self.offdiag))))
        return max(1.0, m)


@dataclass(frozen=True, eq=False)
class EigenPair:
    value: float
    vector: np.ndarray
    residual: float


def gershgorin_bounds(T):
    """Interval (lo, hi) containing the whole spectrum of ``T``."""
    radius = np.zeros(T.size)
    a = np.abs(T.offdiag)
    radius[:-1] += a
    radius[1:] += a
    return float(np.min(T.diag - radius)), float(np.max(T.diag + radius))


def sturm_count(T, x):
    """Number of eigenvalues of ``T`` strictly below ``x``."""
    d = T.diag.tolist()
    e2 = (T.offdiag * T.offdiag).tolist()
    tiny = -1e-300 * T.scale()
    count = 0
    q = d[0] - x
    if q == 0.0:
        q = tiny
    if q < 0.0:
        count += 1
    for k in range(1, len(d)):
        q = (d[k] - x) - e2[k - 1] / q
        if q == 0.0:
            q = tiny
        if q < 0.0:
            count += 1
    return count


def _default_tol(lo, hi):
    return 1e-13 * max(1.0, abs(lo), abs(hi))


def kth_eigenvalue(T, k, tol=None, bracket=None):
    """The k-th smallest eigenvalue (k = 0 is the minimum) by Sturm bisection.

    Bisection stops once the bracket is narrower than ``tol`` or can no
    longer be split in floating point.
    """
    if not 0 <= k < T.size:
        raise IndexError(f"eigenvalue index {k} out of range for size {T.size}")
    lo, hi = gershgorin_bounds(T) if bracket is None else bracket
    if tol is None:
        tol = _default_tol(lo, hi)
    if tol <= 0:
        raise ValueError("tol must be positive")
    # widen by a hair so that eigenvalues sitting on the Gershgorin edge are bracketed
    pad = 1e-15 * max(1.0, abs(lo), abs(hi))
    lo -= pad
    hi += pad
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if sturm_count(T, mid) > k:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def extreme_eigenvalue(T, side="min", tol=None):
    """Smallest (``side="min"``) or largest (``side="max"``) eigenvalue of ``T``."""
    if side == "min":
        return kth_eigenvalue(T, 0, tol)
    if side == "max":
        return kth_eigenvalue(T, T.size - 1, tol)
    raise ValueError(f"side must be 'min' or 'max', got {side!r}")


def eigenvalues(T, tol=None):
    """All eigenvalues, ascending, one bisection per index."""
    lo, hi = gershgorin_bounds(T)
    return np.array([kth_eigenvalue(T, k, tol, (lo, hi)) for k in range(T.size)])


def _solve_shifted(T, shift, rhs):
    # Gaussian elimination with partial pivoting on T - shift*I (LAPACK dgtsv layout).
    n = T.size
    if n == 1:
        piv = T.diag[0] - shift
        if piv == 0.0:
            piv = np.finfo(float).eps * T.scale()
        return rhs / piv
    dl = T.offdiag.copy()
    d = T.diag - shift
    du = T.offdiag.copy()
    du2 = np.zeros(n)
    b = rhs.astype(float).copy()
    tiny = np.finfo(float).eps * T.scale()
    for i in range(n - 1):
        if abs(d[i]) >= abs(dl[i]):
            if d[i] == 0.0:
                d[i] = tiny
            f = dl[i] / d[i]
            d[i + 1] -= f * du[i]
            b[i + 1] -= f * b[i]
            dl[i] = 0.0
        else:
            f = d[i] / dl[i]
            d[i] = dl[i]
            tmp = d[i + 1]
            d[i + 1] = du[i] - f * tmp
            if i < n - 2:
                du2[i] = du[i + 1]
                du[i + 1] = -f * du2[i]
            du[i] = tmp
            b[i], b[i + 1] = b[i + 1], b[i] - f * b[i + 1]
    if d[n - 1] == 0.0:
        d[n - 1] = tiny
    x = np.empty(n)
    x[n - 1] = b[n - 1] / d[n - 1]
    x[n - 2] = (b[n - 2] - du[n - 2] * x[n - 1]) / d[n - 2]
    for i in range(n - 3, -1, -1):
        x[i] = (b[i] - du[i] * x[i + 1] - du2[i] * x[i + 2]) / d[i]
    return x


def eigenvector_for(T, lam, tol=None, max_iter=50):
    """Unit eigenvector for the eigenvalue estimate ``lam`` by inverse iteration.

    The returned ``value`` is the Rayleigh quotient of the final vector, which
    is at least as accurate as ``lam``.  The default residual tolerance is
    ``1e-12 * scale``.
    """
    scale = T.scale()
    if tol is None:
        tol = 1e-12 * scale
    shift = lam + 1e-13 * scale
    v = np.full(T.size, 1.0 / math.sqrt(T.size))
    residual = math.inf
    value = lam
    for _ in range(max_iter):
        w = _solve_shifted(T, shift, v)
        norm = float(np.linalg.norm(w))
        if not math.isfinite(norm) or norm == 0.0:
            raise NonConvergence("inverse iteration produced a degenerate iterate")
        v = w / norm
        tv = T.matvec(v)
        value = float(v @ tv)
        residual = float(np.linalg.norm(tv - value * v))
        if residual <= tol:
            break
    else:
        raise NonConvergence(
            f"inverse iteration stalled at residual {residual:.3e} > {tol:.3e} near {lam!r}"
        )
    # one polishing step; inverse iteration usually drops to rounding level here
    w = _solve_shifted(T, shift, v)
    norm = float(np.linalg.norm(w))
    if math.isfinite(norm) and norm > 0.0:
        w /= norm
        tw = T.matvec(w)
        w_value = float(w @ tw)
        w_residual = float(np.linalg.norm(tw - w_value * w))
        if w_residual < residual:
            v, value, residual = w, w_value, w_residual
    # deterministic sign: largest-magnitude component positive
    if v[int(np.argmax(np.abs(v)))] < 0:
        v = -v
    return EigenPair(value=value, vector=v, residual=residual)


def charpoly_eval(T, z):
    """det(z I - T) by the three-term determinant recursion (N <= 64 only)."""
    if T.size > 64:
        raise ValueError(f"charpoly_eval is limited to N <= 64, got {T.size}")
    p_prev = 1.0
    p = z - T.diag[0]
    for k in range(1, T.size):
        p, p_prev = (z - T.diag[k]) * p - T.offdiag[k - 1] ** 2 * p_prev, p
    return float(p)
