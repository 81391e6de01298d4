"""Closed-form constants and moments.

Everything here is a deterministic function of its arguments.  Gamma-ratio
expressions are assembled in log space and exponentiated once, since terms
such as kappa((k+1)(d+p)) under/overflow long before the ratios do.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

from .errors import DomainError

_LOG_PI = math.log(math.pi)


@dataclass(frozen=True)
class Dims:
    """Ambient dimension ``d`` and simplex/subspace dimension ``k``."""

    d: int
    k: int

    def __post_init__(self):
        if self.d < 1:
            raise DomainError(f"ambient dimension must be >= 1, got d={self.d}")
        if not 0 <= self.k <= self.d:
            raise DomainError(f"need 0 <= k <= d, got k={self.k}, d={self.d}")


class IdentityId(enum.Enum):
    FT_LINEAR = "ft_linear"
    FT_AFFINE = "ft_affine"
    SECTION_PROJECTION = "section_projection"
    AFFINE_BP_MOMENT = "affine_bp_moment"
    LINEAR_BP_MOMENT = "linear_bp_moment"


def log_kappa(p: float) -> float:
    if p < 0:
        raise DomainError(f"kappa needs p >= 0, got {p}")
    return 0.5 * p * _LOG_PI - math.lgamma(0.5 * p + 1.0)


def kappa(p: float) -> float:
    """pi^(p/2) / Gamma(p/2 + 1); the volume of the unit p-ball for integer p."""
    return math.exp(log_kappa(p))


def log_omega(p: float) -> float:
    if p <= 0:
        raise DomainError(f"omega needs p > 0, got {p}")
    return math.log(p) + log_kappa(p)


def omega(p: float) -> float:
    """p * kappa(p); the surface area of the unit sphere in R^p for integer p."""
    return math.exp(log_omega(p))


def log_subspace_coeff(q: float, k: int) -> float:
    if k < 0:
        raise DomainError(f"k must be >= 0, got {k}")
    if q <= k - 1:
        raise DomainError(f"subspace_coeff needs q > k - 1, got q={q}, k={k}")
    return sum(log_omega(q - k + j) - log_omega(j) for j in range(1, k + 1))


def subspace_coeff(q: float, k: int) -> float:
    """omega_{q-k+1} ... omega_q / (omega_1 ... omega_k), with the empty product 1 at k=0."""
    return math.exp(log_subspace_coeff(q, k))


def _check_dims(d: int, k: int, kmin: int = 1) -> None:
    if d < 1 or not kmin <= k <= d:
        raise DomainError(f"need {kmin} <= k <= d, got d={d}, k={k}")


def _log_ball_moment(d: int, k: int, p: float) -> float:
    q = d + p
    return (
        -p * math.lgamma(k + 1)
        + (k + 1) * (log_kappa(q) - log_kappa(d))
        + log_kappa(k * q + d)
        - log_kappa((k + 1) * q)
        + log_subspace_coeff(d, k)
        - log_subspace_coeff(q, k)
    )


def ball_simplex_moment(d: int, k: int, p: float) -> float:
    """E|conv(X_0..X_k)|^p for k+1 i.i.d. uniform points in the unit d-ball.

    Valid for every real p > -1.
    """
    _check_dims(d, k)
    if p <= -1:
        raise DomainError(f"ball moment needs p > -1, got {p}")
    if p == 0:
        return 1.0
    return math.exp(_log_ball_moment(d, k, p))


def origin_ball_integral(k: int, m: float) -> float:
    """Integral of |conv(0, y_1..y_k)|^m over (B^k)^k.

    This is an integral, not an expectation: divide by kappa(k)**k for the mean.
    Only m >= 0 is accepted.
    """
    if k < 1:
        raise DomainError(f"k must be >= 1, got {k}")
    if m < 0:
        raise DomainError(f"exponent must be >= 0, got m={m}")
    q = k + m
    return math.exp(
        -m * math.lgamma(k + 1)
        + k * log_kappa(q)
        + log_subspace_coeff(k, k)
        - log_subspace_coeff(q, k)
    )


def mean_volume_coeff(d: int, k: int) -> float:
    """Coefficient alpha_{d,k} with E|conv(X_0..X_k)| = alpha_{d,k} V_k(E).

    Points are i.i.d. uniform in any non-degenerate ellipsoid E in R^d.
    """
    _check_dims(d, k)
    n = (d + 1) * (k + 1)
    log_alpha = (
        -k * math.log(2.0)
        + (k + 1) * math.lgamma(d + 2)
        - math.lgamma(n + 1)
        + 2.0 * ((k + 1) * log_kappa(d + 1) - log_kappa(n))
    )
    return math.exp(log_alpha)


def ball_intrinsic_volume(d: int, k: int) -> float:
    """V_k(B^d) = C(d, k) kappa_d / kappa_{d-k}."""
    _check_dims(d, k, kmin=0)
    return math.comb(d, k) * math.exp(log_kappa(d) - log_kappa(d - k))


def identity_constant(identity: IdentityId | str, d: int, k: int, p: float = 0.0) -> float:
    """Scalar constant of one of the integral-geometry identities.

    ``p`` is ignored for the two Furstenberg-Tzkoni forms.  The admissible p
    range is enforced per identity:

    * SECTION_PROJECTION: p > -1
    * AFFINE_BP_MOMENT: p > -d + k - 1
    * LINEAR_BP_MOMENT: p > -d + k
    """
    ident = IdentityId(identity) if isinstance(identity, str) else identity
    _check_dims(d, k, kmin=0)
    lk = log_kappa

    if ident is IdentityId.FT_LINEAR:
        return math.exp(d * lk(k) - k * lk(d))

    if ident is IdentityId.FT_AFFINE:
        return math.exp((d + 1) * lk(k) - (k + 1) * lk(d) + lk(d * (k + 1)) - lk(k * (d + 1)))

    if ident is IdentityId.SECTION_PROJECTION:
        if p <= -1:
            raise DomainError(f"SECTION_PROJECTION needs p > -1, got {p}")
        q = d + p
        return math.exp((k + 1) * lk(d) - (d + 1) * lk(k) + lk(k * q + k) - lk(k * q + d))

    if ident is IdentityId.AFFINE_BP_MOMENT:
        if p <= -d + k - 1:
            raise DomainError(f"AFFINE_BP_MOMENT needs p > {-d + k - 1}, got {p}")
        q = d + p
        return math.exp(
            -p * math.lgamma(k + 1)
            + (k + 1) * lk(q)
            - (p + d + 1) * lk(k)
            + lk(k * q + k)
            - lk((k + 1) * q)
            + log_subspace_coeff(d, k)
            - log_subspace_coeff(q, k)
        )

    if ident is IdentityId.LINEAR_BP_MOMENT:
        if p <= -d + k:
            raise DomainError(f"LINEAR_BP_MOMENT needs p > {-d + k}, got {p}")
        q = d + p
        return math.exp(
            -p * math.lgamma(k + 1)
            + k * lk(q)
            - (p + d) * lk(k)
            + log_subspace_coeff(d, k)
            - log_subspace_coeff(q, k)
        )

    raise DomainError(f"unknown identity {identity!r}")  # pragma: no cover
