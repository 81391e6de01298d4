"""Ellipsoids, subspaces, and the volumes of simplices, projections and sections.

Every volume routine has a scalar form taking the typed objects below and a
batched ``*_volumes`` form working on stacked numpy arrays; the Monte Carlo
code only uses the batched forms.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import exact
from .errors import DegenerateInputError, DomainError, ValidationError

# Gram determinants below this fraction of (largest column norm)^(2k) count as zero.
GRAM_DEGENERACY = 1e-13
ORTHO_TOL = 1e-12


def _readonly(a: np.ndarray) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Ellipsoid:
    """Origin-centred ellipsoid {x : x^T Q x <= 1} with cached spectral data.

    ``semi_axes`` are descending; column i of ``principal_frame`` is the
    direction of semi-axis i.  ``sym_root`` is the symmetric square root of
    Q^{-1}, i.e. the unique symmetric positive-definite A with E = A B^d.
    """

    dim: int
    shape: np.ndarray
    semi_axes: np.ndarray
    principal_frame: np.ndarray
    sym_root: np.ndarray
    volume: float

    @property
    def inverse_shape(self) -> np.ndarray:
        """H = Q^{-1} = A^T A for any A mapping the unit ball onto E."""
        u, lam = self.principal_frame, self.semi_axes
        return (u * lam**2) @ u.T

    @property
    def inverse_sym_root(self) -> np.ndarray:
        u, lam = self.principal_frame, self.semi_axes
        return (u / lam) @ u.T

    @property
    def isotropic(self) -> bool:
        """True when E is a ball (all semi-axes equal)."""
        return bool(np.all(self.semi_axes == self.semi_axes[0]))

    def contains(self, x: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.einsum("...i,ij,...j->...", x, self.shape, x) <= 1.0 + rtol

    def rotated(self, rotation: np.ndarray) -> "Ellipsoid":
        """The image R E of this ellipsoid under an orthogonal matrix R."""
        rotation = np.asarray(rotation, dtype=float)
        return ellipsoid_from_semiaxes(self.semi_axes, rotation @ self.principal_frame)


def _check_orthogonal(frame: np.ndarray, tol: float = 1e-10) -> None:
    d = frame.shape[0]
    if frame.shape != (d, d):
        raise ValidationError(f"frame must be square, got shape {frame.shape}")
    resid = np.max(np.abs(frame.T @ frame - np.eye(d)))
    if resid > tol:
        raise ValidationError(f"frame is not orthogonal (residual {resid:.3e})")


def ellipsoid_from_semiaxes(semi_axes: Sequence[float], frame: np.ndarray | None = None) -> Ellipsoid:
    lam = np.asarray(semi_axes, dtype=float).ravel()
    d = lam.size
    if d < 1:
        raise DomainError("need at least one semi-axis")
    if not np.all(np.isfinite(lam)) or np.any(lam <= 0):
        raise DomainError(f"semi-axes must be finite and positive, got {lam.tolist()}")
    if frame is None:
        u = np.eye(d)
    else:
        u = np.asarray(frame, dtype=float)
        _check_orthogonal(u)
        if u.shape[0] != d:
            raise ValidationError(f"frame is {u.shape[0]}x{u.shape[0]} but there are {d} semi-axes")

    order = np.argsort(-lam, kind="stable")
    lam, u = lam[order], u[:, order]

    shape = (u / lam**2) @ u.T
    shape = 0.5 * (shape + shape.T)
    sym_root = (u * lam) @ u.T
    sym_root = 0.5 * (sym_root + sym_root.T)
    volume = exact.kappa(d) * float(np.prod(lam))
    return Ellipsoid(
        dim=d,
        shape=_readonly(shape),
        semi_axes=_readonly(lam),
        principal_frame=_readonly(u),
        sym_root=_readonly(sym_root),
        volume=volume,
    )


def ellipsoid_from_shape(shape: np.ndarray) -> Ellipsoid:
    """Build the ellipsoid {x : x^T Q x <= 1} from a symmetric positive-definite Q."""
    q = np.atleast_2d(np.asarray(shape, dtype=float))
    d = q.shape[0]
    if q.shape != (d, d):
        raise ValidationError(f"shape matrix must be square, got {q.shape}")
    scale = np.max(np.abs(q))
    if np.max(np.abs(q - q.T)) > 1e-12 * scale:
        raise ValidationError("shape matrix is not symmetric")
    evals, evecs = np.linalg.eigh(0.5 * (q + q.T))
    bad = evals[evals <= 0]
    if bad.size:
        raise ValidationError(f"shape matrix is not positive definite: eigenvalue {bad[0]:.6g}")
    # eigh sorts ascending, so the semi-axes come out descending
    return ellipsoid_from_semiaxes(evals**-0.5, evecs)


def unit_ball(d: int) -> Ellipsoid:
    return ellipsoid_from_semiaxes(np.ones(d))


@dataclass(frozen=True, eq=False)
class LinearSubspace:
    """k-dimensional linear subspace stored by a d x k orthonormal frame."""

    frame: np.ndarray

    def __post_init__(self):
        f = np.asarray(self.frame, dtype=float)
        if f.ndim != 2 or f.shape[1] > f.shape[0]:
            raise ValidationError(f"frame must be d x k with k <= d, got shape {f.shape}")
        resid = np.max(np.abs(f.T @ f - np.eye(f.shape[1])), initial=0.0)
        if resid > ORTHO_TOL:
            raise ValidationError(f"frame columns are not orthonormal (residual {resid:.3e})")
        object.__setattr__(self, "frame", _readonly(f))

    @property
    def ambient_dim(self) -> int:
        return self.frame.shape[0]

    @property
    def dim(self) -> int:
        return self.frame.shape[1]

    @property
    def projector(self) -> np.ndarray:
        return self.frame @ self.frame.T

    @classmethod
    def spanned_by(cls, vectors: np.ndarray) -> "LinearSubspace":
        """Orthonormalise the columns of a d x k matrix (must have full column rank)."""
        x = np.asarray(vectors, dtype=float)
        if x.ndim == 1:
            x = x[:, None]
        if _gram_root(x) == 0.0:
            raise DegenerateInputError("spanning vectors are linearly dependent")
        q, r = np.linalg.qr(x)
        return cls(q * np.where(np.diag(r) < 0, -1.0, 1.0))


@dataclass(frozen=True, eq=False)
class AffineSubspace:
    """direction + offset, with the offset re-projected onto the orthogonal complement."""

    direction: LinearSubspace
    offset: np.ndarray

    def __post_init__(self):
        u = np.asarray(self.offset, dtype=float).ravel()
        o = self.direction.frame
        if u.size != o.shape[0]:
            raise DomainError(f"offset has dimension {u.size}, direction lives in R^{o.shape[0]}")
        u = u - o @ (o.T @ u)
        object.__setattr__(self, "offset", _readonly(u))

    @property
    def ambient_dim(self) -> int:
        return self.direction.ambient_dim

    @property
    def dim(self) -> int:
        return self.direction.dim


@dataclass(frozen=True, eq=False)
class PointConfig:
    """An ordered list of m >= 1 points in R^d, stored as an (m, d) array."""

    points: np.ndarray

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 1:
            raise ValidationError(f"points must be an (m, d) array with m >= 1, got shape {pts.shape}")
        object.__setattr__(self, "points", _readonly(pts))

    @property
    def ambient_dim(self) -> int:
        return self.points.shape[1]

    def __len__(self) -> int:
        return self.points.shape[0]


# --- Gram determinants -------------------------------------------------------


def gram_roots(x: np.ndarray) -> np.ndarray:
    """sqrt(det(X^T X)) for a stack of d x m matrices, shape (..., d, m).

    Uses the R factor of a QR decomposition: |prod diag R| is the root of the
    Gram determinant.  Results under the degeneracy threshold are set to 0.
    """
    x = np.asarray(x, dtype=float)
    m = x.shape[-1]
    if m == 0:
        return np.ones(x.shape[:-2])
    r = np.linalg.qr(x, mode="r")
    root = np.abs(np.prod(np.diagonal(r, axis1=-2, axis2=-1), axis=-1))
    colmax = np.max(np.linalg.norm(x, axis=-2), axis=-1)
    degenerate = root**2 <= GRAM_DEGENERACY * colmax ** (2 * m)
    return np.where(degenerate, 0.0, root)


def _gram_root(x: np.ndarray) -> float:
    return float(gram_roots(x))


# --- volumes -----------------------------------------------------------------


def simplex_volumes(points: np.ndarray) -> np.ndarray:
    """Volumes of a stack of simplices, ``points`` shaped (..., m+1, d)."""
    pts = np.asarray(points, dtype=float)
    m = pts.shape[-2] - 1
    d = pts.shape[-1]
    if m < 1:
        raise DomainError("a simplex needs at least two points")
    if m > d:
        raise DomainError(f"{m + 1} points span at most a {d}-simplex in R^{d}")
    edges = np.swapaxes(pts[..., 1:, :] - pts[..., :1, :], -1, -2)
    return gram_roots(edges) / math.factorial(m)


def simplex_volume(config: PointConfig | np.ndarray) -> float:
    """m-dimensional volume of conv(x_0..x_m); 0 for degenerate configurations."""
    pts = config.points if isinstance(config, PointConfig) else PointConfig(config).points
    return float(simplex_volumes(pts))


def _match_dims(e: Ellipsoid, d: int) -> None:
    if d != e.dim:
        raise DomainError(f"subspace lives in R^{d} but the ellipsoid in R^{e.dim}")


def projection_volumes(e: Ellipsoid, frames: np.ndarray) -> np.ndarray:
    """|P_L E| for a stack of orthonormal frames shaped (..., d, k)."""
    frames = np.asarray(frames, dtype=float)
    _match_dims(e, frames.shape[-2])
    k = frames.shape[-1]
    if e.isotropic:
        return np.full(frames.shape[:-2], exact.kappa(k) * float(e.semi_axes[0]) ** k)
    # det(O^T H O) = det((A O)^T (A O)) with A the symmetric root
    return exact.kappa(k) * gram_roots(e.sym_root @ frames)


def projection_volume(e: Ellipsoid, subspace: LinearSubspace) -> float:
    """k-volume of the orthogonal projection of E onto L."""
    return float(projection_volumes(e, subspace.frame))


def section_volumes(e: Ellipsoid, frames: np.ndarray, offsets: np.ndarray | None = None) -> np.ndarray:
    """|E cap (u + L)| for stacked frames (..., d, k) and offsets (..., d).

    Offsets are taken as given (callers keep them orthogonal to the frame).
    Empty and tangent intersections give 0.
    """
    frames = np.asarray(frames, dtype=float)
    _match_dims(e, frames.shape[-2])
    k = frames.shape[-1]
    q = e.shape
    m = np.swapaxes(frames, -1, -2) @ q @ frames
    det_m = np.linalg.det(m) if k else np.ones(frames.shape[:-2])
    if offsets is None:
        rho2 = np.ones(frames.shape[:-2])
    else:
        u = np.asarray(offsets, dtype=float)
        qu = u @ q
        c = np.sum(qu * u, axis=-1)
        if k:
            b = np.einsum("...dk,...d->...k", frames, qu)
            mib = np.linalg.solve(m, b[..., None])[..., 0]
            rho2 = 1.0 - c + np.sum(b * mib, axis=-1)
        else:
            rho2 = 1.0 - c
    rho2 = np.asarray(rho2)
    safe = np.where(rho2 > 0, rho2, 0.0)
    return np.where(rho2 > 0, exact.kappa(k) * safe ** (0.5 * k) / np.sqrt(det_m), 0.0)


def section_volume(e: Ellipsoid, plane: AffineSubspace | LinearSubspace) -> float:
    """k-volume of the intersection of E with an affine (or linear) k-flat."""
    if isinstance(plane, LinearSubspace):
        return float(section_volumes(e, plane.frame))
    return float(section_volumes(e, plane.direction.frame, plane.offset))


def gram_factors(a: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Batched sqrt(det(X^T A^T A X) / det(X^T X)); zero denominators raise."""
    a = np.asarray(a, dtype=float)
    x = np.asarray(x, dtype=float)
    den = gram_roots(x)
    if np.any(den == 0.0):
        raise DegenerateInputError("spanning vectors are linearly dependent")
    return gram_roots(a @ x) / den


def gram_factor(a: np.ndarray, x: np.ndarray) -> float:
    """sqrt(det(X^T A^T A X) / det(X^T X)) for a nonsingular A and d x k matrix X.

    Equals projection_volume(E_A, span X) / kappa_k where E_A = A B^d.
    """
    x = np.asarray(x, dtype=float)
    if x.ndim == 1:
        x = x[:, None]
    return float(gram_factors(a, x))


def ball_intrinsic_volume(d: int, k: int) -> float:
    return exact.ball_intrinsic_volume(d, k)
