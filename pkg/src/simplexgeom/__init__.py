"""Random simplices in ellipsoids: exact moments, integral-geometry constants
and seeded Monte Carlo checks of the identities linking them."""

__version__ = "0.1.0"

from .errors import DegenerateInputError, DomainError, SamplingError, ValidationError
from .exact import IdentityId, ball_simplex_moment, identity_constant, kappa, mean_volume_coeff
from .geometry import Ellipsoid, ellipsoid_from_semiaxes, ellipsoid_from_shape
from .montecarlo import IdentityParams, Policy, verify_identity
from .sampling import RandomStream

__all__ = [
    "DegenerateInputError",
    "DomainError",
    "Ellipsoid",
    "IdentityId",
    "IdentityParams",
    "Policy",
    "RandomStream",
    "SamplingError",
    "ValidationError",
    "ball_simplex_moment",
    "ellipsoid_from_semiaxes",
    "ellipsoid_from_shape",
    "identity_constant",
    "kappa",
    "mean_volume_coeff",
    "verify_identity",
]
