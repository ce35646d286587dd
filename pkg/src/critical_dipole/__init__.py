"""Critical dipole coupling constants for point-dipole Schroedinger operators in n >= 3 dimensions."""

__version__ = "0.1.0"

from .bounds import gamma_c_bounds, lambda_lower_bound, lambda_upper_bound
from .solve import (
    critical_gamma_direct,
    critical_gamma_general,
    critical_gamma_via_k,
    lambda_min,
)

__all__ = [
    "__version__",
    "gamma_c_bounds",
    "lambda_lower_bound",
    "lambda_upper_bound",
    "critical_gamma_direct",
    "critical_gamma_general",
    "critical_gamma_via_k",
    "lambda_min",
]
