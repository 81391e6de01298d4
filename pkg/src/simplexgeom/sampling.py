"""Seeded random generation of every random object used by the estimators.

All samplers take a :class:`RandomStream` first and an optional ``size``.
With ``size=None`` they return a single typed object (or scalar); with an
integer ``size`` they return stacked numpy arrays, which is what the Monte
Carlo code uses.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import NamedTuple, Sequence

import numpy as np

from . import exact
from .errors import DomainError, SamplingError, ValidationError
from .geometry import AffineSubspace, Ellipsoid, LinearSubspace, gram_roots

MAX_REDRAWS = 100
_QR_DEGENERACY = 1e-12


@dataclass
class RandomStream:
    """Deterministic random source addressed by ``(seed, path)``.

    Children made with :meth:`split` get their own ``SeedSequence`` spawn key,
    so sibling streams are independent and a stream can be re-created at any
    time from its address alone.  The generator is created lazily on first use
    and then advances as samples are drawn.
    """

    seed: int
    path: tuple[int, ...] = ()
    _rng: np.random.Generator | None = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        if not 0 <= int(self.seed) < 2**64:
            raise ValidationError(f"seed must be an unsigned 64-bit integer, got {self.seed}")
        self.seed = int(self.seed)
        self.path = tuple(int(i) for i in self.path)

    def split(self, index: int) -> "RandomStream":
        if index < 0:
            raise ValidationError(f"split index must be >= 0, got {index}")
        return RandomStream(self.seed, self.path + (index,))

    @property
    def rng(self) -> np.random.Generator:
        if self._rng is None:
            ss = np.random.SeedSequence(self.seed, spawn_key=self.path)
            self._rng = np.random.Generator(np.random.PCG64(ss))
        return self._rng


@dataclass(frozen=True)
class BetaSpec:
    alpha1: float
    alpha2: float

    def __post_init__(self):
        if not (self.alpha1 > 0 and self.alpha2 > 0):
            raise DomainError(f"Beta parameters must be positive, got ({self.alpha1}, {self.alpha2})")

    @property
    def mean(self) -> float:
        return self.alpha1 / (self.alpha1 + self.alpha2)

    @property
    def variance(self) -> float:
        s = self.alpha1 + self.alpha2
        return self.alpha1 * self.alpha2 / (s * s * (s + 1.0))


def eta_spec(d: int, k: int) -> BetaSpec:
    """B(d/2 + 1, kd/2): the law of both eta and eta' in the Beta factorisation."""
    return BetaSpec(d / 2 + 1, k * d / 2)


def eta_i_spec(d: int, k: int, i: int) -> BetaSpec:
    """B((d-k+i)/2, (k-i)/2 + 1) for i = 1..k."""
    if not 1 <= i <= k:
        raise DomainError(f"need 1 <= i <= k, got i={i}, k={k}")
    return BetaSpec((d - k + i) / 2, (k - i) / 2 + 1)


@dataclass(frozen=True)
class WeightedAffineSample:
    subspace: AffineSubspace
    weight: float


class AffineBatch(NamedTuple):
    frames: np.ndarray  # (n, d, k)
    offsets: np.ndarray  # (n, d), orthogonal to the frames
    weight: float


def _check_dk(d: int, k: int, kmin: int = 1) -> None:
    if d < 1 or not kmin <= k <= d:
        raise DomainError(f"need {kmin} <= k <= d, got d={d}, k={k}")


def gaussian_matrix(stream: RandomStream, d: int, k: int, size: int | None = None) -> np.ndarray:
    """d x k matrix (or an (size, d, k) stack) of i.i.d. standard normals."""
    if d < 1 or k < 1:
        raise DomainError(f"need d, k >= 1, got d={d}, k={k}")
    shape = (d, k) if size is None else (size, d, k)
    return stream.rng.standard_normal(shape)


def uniform_in_ball(stream: RandomStream, d: int, size: int | None = None, radius: float = 1.0) -> np.ndarray:
    """Uniform points in the d-ball: normalised Gaussian direction times U^(1/d)."""
    n = 1 if size is None else size
    rng = stream.rng
    z = rng.standard_normal((n, d))
    norms = np.linalg.norm(z, axis=1)
    # a zero Gaussian vector has probability zero; redraw to keep the contract total
    for _ in range(MAX_REDRAWS):
        bad = norms == 0.0
        if not bad.any():
            break
        z[bad] = rng.standard_normal((int(bad.sum()), d))
        norms = np.linalg.norm(z, axis=1)
    else:
        raise SamplingError("could not draw a non-zero Gaussian direction")
    r = radius * rng.random(n) ** (1.0 / d)
    x = z * (r / norms)[:, None]
    return x[0] if size is None else x


def uniform_in_ellipsoid(stream: RandomStream, e: Ellipsoid, size: int | None = None) -> np.ndarray:
    """Uniform points in E, obtained as A_sym z with z uniform in the unit ball."""
    z = uniform_in_ball(stream, e.dim, size)
    return z @ e.sym_root.T


def _sign_fixed_qr(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    q, r = np.linalg.qr(g)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    signs = np.where(diag < 0, -1.0, 1.0)
    return q * signs[..., None, :], np.abs(diag)


def _haar_columns(stream: RandomStream, d: int, k: int, n: int) -> np.ndarray:
    rng = stream.rng
    g = rng.standard_normal((n, d, k))
    q, diag = _sign_fixed_qr(g)
    for _ in range(MAX_REDRAWS):
        scale = np.max(np.linalg.norm(g, axis=-2), axis=-1)
        bad = np.min(diag, axis=-1) <= _QR_DEGENERACY * scale
        if not bad.any():
            return q
        g[bad] = rng.standard_normal((int(bad.sum()), d, k))
        q[bad], diag[bad] = _sign_fixed_qr(g[bad])
    raise SamplingError(f"Gaussian {d}x{k} matrix stayed rank deficient after {MAX_REDRAWS} redraws")


def haar_frames(stream: RandomStream, d: int, k: int, size: int) -> np.ndarray:
    """(size, d, k) orthonormal frames of Haar-distributed k-subspaces of R^d."""
    _check_dk(d, k)
    return _haar_columns(stream, d, k, size)


def haar_subspace(stream: RandomStream, d: int, k: int) -> LinearSubspace:
    """A k-subspace of R^d drawn from the rotation-invariant probability measure."""
    return LinearSubspace(haar_frames(stream, d, k, 1)[0])


def haar_rotation(stream: RandomStream, d: int) -> np.ndarray:
    """Haar-distributed orthogonal d x d matrix (QR of a Gaussian, positive diagonal R)."""
    if d < 1:
        raise DomainError(f"need d >= 1, got {d}")
    return _haar_columns(stream, d, d, 1)[0]


def haar_affine_batch(
    stream: RandomStream, e: Ellipsoid, k: int, size: int, radius: float | None = None
) -> AffineBatch:
    """Weighted k-flats whose weighted means are unbiased for integrals over mu_{d,k}.

    The direction L is Haar on G_{d,k}; the offset is uniform in the
    (d-k)-ball of radius r inside L-perp.  The default r is the largest
    semi-axis, which always covers the shadow of E; a larger ``radius`` is
    allowed.  The constant weight kappa_{d-k} r^{d-k} is the volume of that
    ball.
    """
    d = e.dim
    if not 0 <= k <= d - 1:
        raise DomainError(f"affine sampling needs 0 <= k <= d-1, got k={k}, d={d}")
    r = float(e.semi_axes[0])
    if radius is not None:
        if radius < r:
            raise DomainError(f"sampling radius {radius} does not cover the ellipsoid (largest semi-axis {r})")
        r = float(radius)
    basis = _haar_columns(stream, d, d, size)
    frames, complement = basis[..., :k], basis[..., k:]
    y = uniform_in_ball(stream, d - k, size, radius=r)
    offsets = np.einsum("nij,nj->ni", complement, y)
    weight = exact.kappa(d - k) * r ** (d - k)
    return AffineBatch(frames, offsets, weight)


def haar_affine_sample(stream: RandomStream, e: Ellipsoid, k: int) -> WeightedAffineSample:
    batch = haar_affine_batch(stream, e, k, 1)
    plane = AffineSubspace(LinearSubspace(batch.frames[0]), batch.offsets[0])
    return WeightedAffineSample(plane, batch.weight)


def beta_sample(stream: RandomStream, spec: BetaSpec, size: int | None = None):
    """Beta(alpha1, alpha2) variates as G1 / (G1 + G2) with independent Gamma variates."""
    rng = stream.rng
    g1 = rng.standard_gamma(spec.alpha1, size)
    g2 = rng.standard_gamma(spec.alpha2, size)
    out = g1 / (g1 + g2)
    return float(out) if size is None else out


def coupled_gram_ratio(stream: RandomStream, semi_axes: Sequence[float], k: int, size: int | None = None):
    """sqrt(det(G_l^T G_l) / det(G^T G)) with G_l = diag(semi_axes) G built from the same G."""
    lam = np.asarray(semi_axes, dtype=float)
    d = lam.size
    _check_dk(d, k)
    if np.any(lam <= 0):
        raise DomainError("semi-axes must be positive")
    n = 1 if size is None else size
    rng = stream.rng
    g = rng.standard_normal((n, d, k))
    den = gram_roots(g)
    for _ in range(MAX_REDRAWS):
        bad = den == 0.0
        if not bad.any():
            break
        g[bad] = rng.standard_normal((int(bad.sum()), d, k))
        den[bad] = gram_roots(g[bad])
    else:
        raise SamplingError("Gaussian matrix stayed rank deficient")
    ratio = gram_roots(lam[:, None] * g) / den
    return float(ratio[0]) if size is None else ratio


_RANDOM_PRESET = re.compile(r"^random\((\d+)\)$")


def resolve_rotation(preset: str | np.ndarray | None, d: int) -> np.ndarray | None:
    """Turn a rotation preset ("identity", "random(<seed>)") or matrix into a matrix.

    ``None`` and "identity" both mean no rotation and return None.
    """
    if preset is None:
        return None
    if isinstance(preset, str):
        text = preset.strip().lower()
        if text == "identity":
            return None
        m = _RANDOM_PRESET.match(text)
        if not m:
            raise ValidationError(f"unknown rotation preset {preset!r}")
        return haar_rotation(RandomStream(int(m.group(1))), d)
    r = np.asarray(preset, dtype=float)
    if r.shape != (d, d):
        raise ValidationError(f"rotation must be {d}x{d}, got {r.shape}")
    if np.max(np.abs(r.T @ r - np.eye(d))) > 1e-10:
        raise ValidationError("rotation matrix is not orthogonal")
    return r


def ball_radius_power(x: np.ndarray, e: Ellipsoid) -> np.ndarray:
    """|A_sym^{-1} x|^d: uniform on [0, 1] when x is uniform in E."""
    z = np.asarray(x) @ e.inverse_sym_root.T
    return np.linalg.norm(z, axis=-1) ** e.dim

