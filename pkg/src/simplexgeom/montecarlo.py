"""Monte Carlo estimators, distributional samplers and the identity catalog.

Work is cut into fixed-size chunks; chunk ``i`` of a run always draws from
substream ``i`` of the side's stream, and per-chunk moments are merged in
chunk order.  The number of worker threads therefore changes only the wall
time, never a single bit of the result.
"""

from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import exact, stats
from .errors import DomainError, ValidationError
from .exact import IdentityId
from .geometry import (
    Ellipsoid,
    ellipsoid_from_semiaxes,
    gram_factors,
    gram_roots,
    projection_volumes,
    section_volumes,
    simplex_volumes,
    unit_ball,
)
from .sampling import (
    RandomStream,
    beta_sample,
    coupled_gram_ratio,
    eta_i_spec,
    eta_spec,
    haar_affine_batch,
    haar_frames,
    resolve_rotation,
    uniform_in_ball,
    uniform_in_ellipsoid,
)

CHUNK_SIZE = 1 << 15
DEFAULT_MOMENT_SAMPLES = 1_000_000
DEFAULT_KS_SAMPLES = 100_000
HEAVY_TAIL_P = -0.5
MU_NORM_RADIUS = 2.0
HEAVY_TAIL_FLAG = "heavy-tail, no variance guarantee"


@dataclass
class RunningMoments:
    """Count, mean and sum of squared deviations; mergeable (Chan et al.)."""

    count: int = 0
    mean: float = 0.0
    m2: float = 0.0

    @classmethod
    def from_array(cls, values) -> "RunningMoments":
        v = np.asarray(values, dtype=float).ravel()
        if v.size == 0:
            return cls()
        mean = float(np.mean(v))
        return cls(int(v.size), mean, float(np.sum((v - mean) ** 2)))

    def update(self, value: float) -> None:
        self.count += 1
        delta = value - self.mean
        self.mean += delta / self.count
        self.m2 += delta * (value - self.mean)

    def merge(self, other: "RunningMoments") -> "RunningMoments":
        if other.count == 0:
            return RunningMoments(self.count, self.mean, self.m2)
        if self.count == 0:
            return RunningMoments(other.count, other.mean, other.m2)
        n = self.count + other.count
        delta = other.mean - self.mean
        mean = self.mean + delta * other.count / n
        m2 = self.m2 + other.m2 + delta * delta * self.count * other.count / n
        return RunningMoments(n, mean, m2)

    @property
    def variance(self) -> float:
        return self.m2 / (self.count - 1) if self.count > 1 else 0.0

    @property
    def stderr(self) -> float:
        if self.count < 2:
            return 0.0
        return math.sqrt(self.m2 / (self.count * (self.count - 1)))


@dataclass(frozen=True)
class EstimateReport:
    value: float
    stderr: float
    count: int
    seed: int
    label: str
    flags: tuple[str, ...] = ()

    def scaled(self, factor: float, label: str | None = None) -> "EstimateReport":
        return EstimateReport(
            self.value * factor,
            self.stderr * abs(factor),
            self.count,
            self.seed,
            label or self.label,
            self.flags,
        )


def _exact_report(value: float, n: int, stream: RandomStream, label: str) -> EstimateReport:
    return EstimateReport(float(value), 0.0, n, stream.seed, label)


def default_workers() -> int:
    """Worker count from SIMPLEXGEOM_WORKERS, falling back to 1."""
    raw = os.environ.get("SIMPLEXGEOM_WORKERS", "").strip()
    if not raw:
        return 1
    try:
        w = int(raw)
    except ValueError:
        raise ValidationError(f"SIMPLEXGEOM_WORKERS must be an integer, got {raw!r}") from None
    if w < 1:
        raise ValidationError(f"SIMPLEXGEOM_WORKERS must be >= 1, got {w}")
    return w


def _chunk_sizes(n: int) -> list[int]:
    full, rest = divmod(n, CHUNK_SIZE)
    return [CHUNK_SIZE] * full + ([rest] if rest else [])


def map_chunks(stream: RandomStream, n: int, fn: Callable[[RandomStream, int], object], workers: int = 1) -> list:
    """Apply ``fn(substream_i, size_i)`` to every chunk; results in chunk order."""
    tasks = [(stream.split(i), m) for i, m in enumerate(_chunk_sizes(n))]
    if workers <= 1 or len(tasks) <= 1:
        return [fn(s, m) for s, m in tasks]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda t: fn(*t), tasks))


def _run_moments(stream, n, fn, workers) -> RunningMoments:
    parts = map_chunks(stream, n, lambda s, m: RunningMoments.from_array(fn(s, m)), workers)
    total = RunningMoments()
    for part in parts:
        total = total.merge(part)
    return total


def _collect(stream, n, fn, workers) -> np.ndarray:
    parts = map_chunks(stream, n, fn, workers)
    return np.concatenate(parts) if parts else np.empty(0)


def _report(stream, moments: RunningMoments, label: str, flags=()) -> EstimateReport:
    return EstimateReport(moments.mean, moments.stderr, moments.count, stream.seed, label, tuple(flags))


def _check_n(n: int) -> None:
    if n < 2:
        raise DomainError(f"need at least 2 samples, got n={n}")


def _check_k(e: Ellipsoid, k: int, kmin: int = 1, kmax: int | None = None) -> None:
    kmax = e.dim if kmax is None else kmax
    if not kmin <= k <= kmax:
        raise DomainError(f"need {kmin} <= k <= {kmax} for d={e.dim}, got k={k}")


def _pow(values: np.ndarray, p: float) -> np.ndarray:
    if p == 1:
        return values
    with np.errstate(divide="ignore"):
        return values**p


# --- moment estimators -------------------------------------------------------


def estimate_simplex_moment(stream, e: Ellipsoid, k: int, p: float, n: int, workers: int = 1) -> EstimateReport:
    """E|conv(X_0..X_k)|^p for i.i.d. uniform points in E."""
    _check_k(e, k)
    _check_n(n)
    if p <= -1:
        raise DomainError(f"simplex moment needs p > -1, got {p}")
    label = f"E|conv(X_0..X_{k})|^{p:g}"
    if p == 0:
        return _exact_report(1.0, n, stream, label)
    d = e.dim

    def chunk(s, m):
        pts = uniform_in_ellipsoid(s, e, m * (k + 1)).reshape(m, k + 1, d)
        return _pow(simplex_volumes(pts), p)

    flags = (HEAVY_TAIL_FLAG,) if p < HEAVY_TAIL_P else ()
    return _report(stream, _run_moments(stream, n, chunk, workers), label, flags)


def estimate_origin_moment(stream, e: Ellipsoid, k: int, p: float, n: int, workers: int = 1) -> EstimateReport:
    """E|conv(0, X_1..X_k)|^p for i.i.d. uniform points in E."""
    _check_k(e, k)
    _check_n(n)
    d = e.dim
    if p <= -d + k:
        raise DomainError(f"origin moment needs p > {-d + k}, got {p}")
    label = f"E|conv(0,X_1..X_{k})|^{p:g}"
    if p == 0:
        return _exact_report(1.0, n, stream, label)
    fact = math.factorial(k)

    def chunk(s, m):
        x = uniform_in_ellipsoid(s, e, m * k).reshape(m, k, d)
        return _pow(gram_roots(np.swapaxes(x, -1, -2)) / fact, p)

    flags = (HEAVY_TAIL_FLAG,) if p < HEAVY_TAIL_P else ()
    return _report(stream, _run_moments(stream, n, chunk, workers), label, flags)


def estimate_projection_moment(stream, e: Ellipsoid, k: int, p: float, n: int, workers: int = 1) -> EstimateReport:
    """Mean of |P_xi E|^p over Haar-random k-subspaces xi."""
    _check_k(e, k)
    _check_n(n)
    label = f"E|P_xi E|^{p:g}"
    if k == e.dim:
        return _exact_report(e.volume**p, n, stream, label)
    if e.isotropic:
        return _exact_report((exact.kappa(k) * float(e.semi_axes[0]) ** k) ** p, n, stream, label)

    def chunk(s, m):
        return _pow(projection_volumes(e, haar_frames(s, e.dim, k, m)), p)

    return _report(stream, _run_moments(stream, n, chunk, workers), label)


def estimate_linear_section_integral(stream, e: Ellipsoid, k: int, q: float, n: int, workers: int = 1) -> EstimateReport:
    """Integral of |E cap L|^q over G_{d,k} (a probability measure, so a mean)."""
    _check_k(e, k)
    _check_n(n)
    label = f"int_G |E cap L|^{q:g}"
    if k == e.dim:
        return _exact_report(e.volume**q, n, stream, label)
    if e.isotropic:
        return _exact_report((exact.kappa(k) * float(e.semi_axes[0]) ** k) ** q, n, stream, label)

    def chunk(s, m):
        return _pow(section_volumes(e, haar_frames(s, e.dim, k, m)), q)

    return _report(stream, _run_moments(stream, n, chunk, workers), label)


def estimate_affine_section_integral(
    stream, e: Ellipsoid, k: int, q: float, n: int, workers: int = 1, radius: float | None = None
) -> EstimateReport:
    """Integral of |E cap F|^q over flats F meeting E, with respect to mu_{d,k}.

    Flats missing E contribute 0 for every q (so q = 0 measures the set of
    flats that hit E).  ``radius`` overrides the offset sampling radius.
    """
    _check_k(e, k, kmin=0, kmax=e.dim - 1)
    _check_n(n)

    def chunk(s, m):
        batch = haar_affine_batch(s, e, k, m, radius)
        vol = section_volumes(e, batch.frames, batch.offsets)
        hit = vol > 0
        return np.where(hit, batch.weight * _pow(np.where(hit, vol, 1.0), q), 0.0)

    label = f"int_A |E cap F|^{q:g}"
    return _report(stream, _run_moments(stream, n, chunk, workers), label)


def estimate_intrinsic_volume(stream, e: Ellipsoid, k: int, n: int, workers: int = 1) -> EstimateReport:
    """V_k(E) through Kubota's formula (mean projection volume, rescaled)."""
    _check_k(e, k, kmin=0)
    _check_n(n)
    d = e.dim
    label = f"V_{k}(E)"
    if k == 0:
        return _exact_report(1.0, n, stream, label)
    if k == d:
        return _exact_report(e.volume, n, stream, label)
    if e.isotropic:
        return _exact_report(exact.ball_intrinsic_volume(d, k) * float(e.semi_axes[0]) ** k, n, stream, label)
    scale = math.comb(d, k) * exact.kappa(d) / (exact.kappa(k) * exact.kappa(d - k))
    return estimate_projection_moment(stream, e, k, 1.0, n, workers).scaled(scale, label)


# --- distributional samplers -------------------------------------------------


class Family(enum.Enum):
    UNIFORM_BALL_IID = "uniform"
    GAUSSIAN_IID = "gaussian"


def _family_points(s: RandomStream, family: Family, m: int, k: int, d: int) -> np.ndarray:
    if family is Family.UNIFORM_BALL_IID:
        return uniform_in_ball(s, d, m * (k + 1)).reshape(m, k + 1, d)
    return s.rng.standard_normal((m, k + 1, d))


def sample_theorem1_pair(stream, e: Ellipsoid, k: int, n: int, family=Family.UNIFORM_BALL_IID, workers: int = 1):
    """Samples of |conv(A X_0..A X_k)| and of (|P_xi E|/kappa_k) |conv(X_0..X_k)|.

    A is the symmetric root of E; the two sides use independent substreams.
    """
    _check_k(e, k)
    family = Family(family)
    d = e.dim
    kap = exact.kappa(k)

    def lhs_chunk(s, m):
        x = _family_points(s, family, m, k, d)
        return simplex_volumes(x @ e.sym_root.T)

    def rhs_chunk(s, m):
        x = _family_points(s, family, m, k, d)
        factor = projection_volumes(e, haar_frames(s, d, k, m)) / kap
        return factor * simplex_volumes(x)

    return (
        _collect(stream.split(0), n, lhs_chunk, workers),
        _collect(stream.split(1), n, rhs_chunk, workers),
    )


def sample_gram_pair(stream, e: Ellipsoid, k: int, n: int, workers: int = 1):
    """Samples of gram_factor(A_sym, G) and of the coupled diagonal Gram ratio.

    Also returns the largest relative per-draw gap between gram_factor(A_sym, G)
    and |P_span(G) E| / kappa_k, which should be at rounding level.
    """
    _check_k(e, k)
    d = e.dim
    kap = exact.kappa(k)
    lam = e.semi_axes

    def lhs_chunk(s, m):
        g = s.rng.standard_normal((m, d, k))
        vals = gram_factors(e.sym_root, g)
        frames = np.linalg.qr(g)[0]
        via_projection = projection_volumes(e, frames) / kap
        resid = np.max(np.abs(vals - via_projection) / via_projection)
        return vals, resid

    parts = map_chunks(stream.split(0), n, lhs_chunk, workers)
    lhs = np.concatenate([v for v, _ in parts])
    resid = max(float(r) for _, r in parts)
    rhs = _collect(stream.split(1), n, lambda s, m: coupled_gram_ratio(s, lam, k, m), workers)
    return lhs, rhs, resid


def sample_theorem_beta_pair(stream, e: Ellipsoid, k: int, n: int, workers: int = 1):
    """Both sides of the Beta factorisation of the squared simplex volume in E."""
    _check_k(e, k)
    d = e.dim
    fact2 = math.factorial(k) ** 2
    lam = e.semi_axes

    def lhs_chunk(s, m):
        pts = uniform_in_ellipsoid(s, e, m * (k + 1)).reshape(m, k + 1, d)
        vol = simplex_volumes(pts)
        eta = beta_sample(s, eta_spec(d, k), m)
        return fact2 * eta * (1.0 - eta) ** k * vol**2

    def rhs_chunk(s, m):
        eta_p = beta_sample(s, eta_spec(d, k), m)
        prod = np.ones(m)
        for i in range(1, k + 1):
            prod *= beta_sample(s, eta_i_spec(d, k, i), m)
        ratio = coupled_gram_ratio(s, lam, k, m)
        return (1.0 - eta_p) ** k * prod * ratio**2

    return (
        _collect(stream.split(0), n, lhs_chunk, workers),
        _collect(stream.split(1), n, rhs_chunk, workers),
    )


# --- identity verification ---------------------------------------------------


@dataclass(frozen=True)
class Policy:
    z_threshold: float = 4.0
    alpha: float = 0.01

    def __post_init__(self):
        if not self.z_threshold > 0:
            raise ValidationError(f"z_threshold must be positive, got {self.z_threshold}")
        if not 0 < self.alpha < 1:
            raise ValidationError(f"alpha must lie in (0, 1), got {self.alpha}")


@dataclass(frozen=True)
class IdentityParams:
    d: int
    k: int
    p: float = 1.0
    semi_axes: tuple[float, ...] | None = None
    rotation: object = None
    family: str = "uniform"

    def __post_init__(self):
        axes = self.semi_axes
        axes = tuple(float(a) for a in axes) if axes is not None else (1.0,) * self.d
        object.__setattr__(self, "semi_axes", axes)
        if self.d < 1:
            raise ValidationError(f"d must be >= 1, got {self.d}")
        if len(axes) != self.d:
            raise ValidationError(f"semi_axes has {len(axes)} entries but d={self.d}")
        if not 0 <= self.k <= self.d:
            raise ValidationError(f"need 0 <= k <= d, got k={self.k}, d={self.d}")
        Family(self.family)

    def ellipsoid(self) -> Ellipsoid:
        return ellipsoid_from_semiaxes(self.semi_axes, resolve_rotation(self.rotation, self.d))

    def rotation_label(self):
        if self.rotation is None or isinstance(self.rotation, str):
            return self.rotation or "identity"
        return np.asarray(self.rotation, dtype=float).tolist()


@dataclass(frozen=True)
class IdentityReport:
    identity: str
    kind: str
    lhs: EstimateReport | float
    rhs: EstimateReport | float
    z_score: float | None
    ks_stat: float | None
    ks_pvalue: float | None
    passed: bool
    params: IdentityParams
    policy: Policy
    n: int
    seed: int
    workers: int
    details: dict = field(default_factory=dict)

    def to_record(self) -> dict:
        """Flat, JSON-ready view of the report (no timestamps or host data)."""

        def side(prefix, s):
            if isinstance(s, EstimateReport):
                return {
                    f"{prefix}_value": s.value,
                    f"{prefix}_stderr": s.stderr,
                    f"{prefix}_count": s.count,
                    f"{prefix}_label": s.label,
                }
            return {f"{prefix}_value": float(s), f"{prefix}_stderr": 0.0, f"{prefix}_count": None, f"{prefix}_label": "exact"}

        flags = sorted(
            {f for s in (self.lhs, self.rhs) if isinstance(s, EstimateReport) for f in s.flags}
        )
        rec = {
            "identity": self.identity,
            "title": CATALOG[self.identity].title,
            "kind": self.kind,
            "d": self.params.d,
            "k": self.params.k,
            "p": self.params.p,
            "semi_axes": list(self.params.semi_axes),
            "rotation": self.params.rotation_label(),
            "family": self.params.family,
            "n": self.n,
            "seed": self.seed,
            "workers": self.workers,
        }
        rec.update(side("lhs", self.lhs))
        rec.update(side("rhs", self.rhs))
        rec.update(
            {
                "z_score": self.z_score,
                "ks_stat": self.ks_stat,
                "ks_pvalue": self.ks_pvalue,
                "z_threshold": self.policy.z_threshold,
                "alpha": self.policy.alpha,
                "pass": self.passed,
                "flags": flags,
                "details": dict(self.details),
            }
        )
        return rec


@dataclass(frozen=True)
class _Identity:
    name: str
    kind: str  # "moment" or "distribution"
    title: str
    run: Callable


CATALOG: dict[str, _Identity] = {}


def _register(name: str, kind: str, title: str):
    def deco(fn):
        CATALOG[name] = _Identity(name, kind, title, fn)
        return fn

    return deco


def canonical_identity(label: str) -> str:
    """Map labels such as "THM_2.1", "ft_linear" or "Eq-4.3" to catalog keys."""
    key = label.strip().lower().replace("_", "-")
    if key not in CATALOG:
        raise ValidationError(f"unknown identity {label!r}; known: {', '.join(sorted(CATALOG))}")
    return key


def _need_affine(e: Ellipsoid, k: int) -> None:
    if k >= e.dim:
        raise DomainError(f"affine Grassmannian integrals need k <= d-1, got k={k}, d={e.dim}")


@_register("thm-1.1", "distribution", "|conv(AX)| =d |P_xi E|/kappa_k |conv(X)|")
def _thm_1_1(root, e, prm, n, workers):
    lhs, rhs = sample_theorem1_pair(root, e, prm.k, n, Family(prm.family), workers)
    return lhs, rhs, {}


@_register("cor-1.2", "moment", "E|conv(AX)| = V_k(E)/V_k(B^d) E|conv(X)|")
def _cor_1_2(root, e, prm, n, workers):
    d, k = e.dim, prm.k
    if Family(prm.family) is not Family.UNIFORM_BALL_IID:
        raise ValidationError("cor-1.2 is checked for the uniform-ball family only")
    lhs = estimate_simplex_moment(root.split(0), e, k, 1.0, n, workers)
    vk = estimate_intrinsic_volume(root.split(1), e, k, n, workers)
    scale = exact.ball_simplex_moment(d, k, 1.0) / exact.ball_intrinsic_volume(d, k)
    return lhs, vk.scaled(scale, "V_k(E)/V_k(B) E|conv(X)|"), {}


@_register("cor-1.4", "distribution", "|P_xi E|/kappa_k =d Gram ratio with G_lambda")
def _cor_1_4(root, e, prm, n, workers):
    lhs, rhs, resid = sample_gram_pair(root, e, prm.k, n, workers)
    return lhs, rhs, {"max_first_equality_residual": resid}


@_register("thm-2.1", "moment", "ellipsoid simplex moment = ball moment x projection moment")
def _thm_2_1(root, e, prm, n, workers):
    d, k, p = e.dim, prm.k, prm.p
    lhs = estimate_simplex_moment(root.split(0), e, k, p, n, workers)
    proj = estimate_projection_moment(root.split(1), e, k, p, n, workers)
    scale = exact.ball_simplex_moment(d, k, p) / exact.kappa(k) ** p
    return lhs, proj.scaled(scale, "ball moment x E|P_xi E|^p / kappa_k^p"), {}


@_register("cor-1.9", "moment", "E|conv| = alpha_{d,k} V_k(E)")
def _cor_1_9(root, e, prm, n, workers):
    d, k = e.dim, prm.k
    lhs = estimate_simplex_moment(root.split(0), e, k, 1.0, n, workers)
    vk = estimate_intrinsic_volume(root.split(1), e, k, n, workers)
    return lhs, vk.scaled(exact.mean_volume_coeff(d, k), "alpha_{d,k} V_k(E)"), {}


@_register("thm-1.10", "distribution", "Beta factorisation of the squared simplex volume")
def _thm_1_10(root, e, prm, n, workers):
    lhs, rhs = sample_theorem_beta_pair(root, e, prm.k, n, workers)
    return lhs, rhs, {}


@_register("thm-1.11", "moment", "int_{E^{k+1}} |conv|^p = c int_A |E cap F|^{p+d+1}")
def _thm_1_11(root, e, prm, n, workers):
    d, k, p = e.dim, prm.k, prm.p
    _need_affine(e, k)
    const = exact.identity_constant(IdentityId.AFFINE_BP_MOMENT, d, k, p)
    lhs = estimate_simplex_moment(root.split(0), e, k, p, n, workers)
    lhs = lhs.scaled(e.volume ** (k + 1), "int_{E^{k+1}} |conv|^p")
    rhs = estimate_affine_section_integral(root.split(1), e, k, p + d + 1, n, workers)
    return lhs, rhs.scaled(const), {"constant": const}


@_register("thm-1.12", "moment", "c int_A |E cap F|^{p+d+1} = |E|^{k+1} int_G |P_L E|^p")
def _thm_1_12(root, e, prm, n, workers):
    d, k, p = e.dim, prm.k, prm.p
    _need_affine(e, k)
    const = exact.identity_constant(IdentityId.SECTION_PROJECTION, d, k, p)
    lhs = estimate_affine_section_integral(root.split(0), e, k, p + d + 1, n, workers).scaled(const)
    rhs = estimate_projection_moment(root.split(1), e, k, p, n, workers)
    return lhs, rhs.scaled(e.volume ** (k + 1), "|E|^{k+1} E|P_L E|^p"), {"constant": const}


@_register("eq-4.3", "moment", "int_A |E cap F|^{d+1} = c |E|^{k+1} (affine Furstenberg-Tzkoni)")
def _eq_4_3(root, e, prm, n, workers):
    d, k = e.dim, prm.k
    _need_affine(e, k)
    const = exact.identity_constant(IdentityId.FT_AFFINE, d, k)
    lhs = estimate_affine_section_integral(root.split(0), e, k, d + 1, n, workers)
    return lhs, const * e.volume ** (k + 1), {"constant": const}


@_register("ft-linear", "moment", "int_G |E cap L|^d = c |E|^k (Furstenberg-Tzkoni)")
def _ft_linear(root, e, prm, n, workers):
    d, k = e.dim, prm.k
    if k < 1:
        raise DomainError("ft-linear needs k >= 1")
    const = exact.identity_constant(IdentityId.FT_LINEAR, d, k)
    lhs = estimate_linear_section_integral(root.split(0), e, k, d, n, workers)
    return lhs, const * e.volume**k, {"constant": const}


@_register("thm-1.14", "moment", "|E|^k E|conv(0,X)|^p = c int_G |E cap L|^{p+d}")
def _thm_1_14(root, e, prm, n, workers):
    d, k, p = e.dim, prm.k, prm.p
    const = exact.identity_constant(IdentityId.LINEAR_BP_MOMENT, d, k, p)
    lhs = estimate_origin_moment(root.split(0), e, k, p, n, workers)
    lhs = lhs.scaled(e.volume**k, "|E|^k E|conv(0,X)|^p")
    rhs = estimate_linear_section_integral(root.split(1), e, k, p + d, n, workers)
    return lhs, rhs.scaled(const), {"constant": const}


@_register("mu-norm", "moment", "mu_{d,k}(flats meeting B^d) = kappa_{d-k}")
def _mu_norm(root, e, prm, n, workers):
    # A statement about the unit ball, so the semi-axes are not used.  Offsets are
    # drawn from a radius-2 ball so that some flats miss B^d and the weight is
    # actually exercised.
    d, k = e.dim, prm.k
    ball = unit_ball(d)
    _need_affine(ball, k)
    lhs = estimate_affine_section_integral(root.split(0), ball, k, 0.0, n, workers, radius=MU_NORM_RADIUS)
    return lhs, exact.kappa(d - k), {"sampling_radius": MU_NORM_RADIUS}


def verify_identity(
    identity: str,
    params: IdentityParams,
    n: int | None = None,
    seed: int = 0,
    policy: Policy | None = None,
    workers: int = 1,
    rhs_scale: float = 1.0,
) -> IdentityReport:
    """Run both sides of one catalogued identity and judge them.

    Moment identities compare the two sides by z-score, distributional ones
    by a two-sample KS test.  ``rhs_scale`` multiplies the right-hand side and
    exists only to check that the harness notices a wrong constant.
    """
    name = canonical_identity(identity)
    entry = CATALOG[name]
    policy = policy or Policy()
    if n is None:
        n = DEFAULT_MOMENT_SAMPLES if entry.kind == "moment" else DEFAULT_KS_SAMPLES
    _check_n(n)
    if workers < 1:
        raise ValidationError(f"workers must be >= 1, got {workers}")
    e = params.ellipsoid()
    root = RandomStream(seed)
    lhs, rhs, details = entry.run(root, e, params, n, workers)
    if rhs_scale != 1.0:
        details = {**details, "rhs_scale": rhs_scale}

    if entry.kind == "moment":
        if rhs_scale != 1.0:
            rhs = rhs.scaled(rhs_scale) if isinstance(rhs, EstimateReport) else rhs * rhs_scale
        z = stats.z_compare(lhs, rhs)
        return IdentityReport(
            name, entry.kind, lhs, rhs, z, None, None, abs(z) <= policy.z_threshold,
            params, policy, n, seed, workers, details,
        )

    rhs = rhs * rhs_scale
    ks = stats.ks_two_sample(lhs, rhs)
    lhs_rep = EstimateReport(float(np.mean(lhs)), _sem(lhs), lhs.size, seed, "lhs sample")
    rhs_rep = EstimateReport(float(np.mean(rhs)), _sem(rhs), rhs.size, seed, "rhs sample")
    return IdentityReport(
        name, entry.kind, lhs_rep, rhs_rep, stats.z_compare(lhs_rep, rhs_rep), ks.statistic, ks.p_value,
        ks.p_value >= policy.alpha, params, policy, n, seed, workers, details,
    )


def _sem(x: np.ndarray) -> float:
    return float(np.std(x, ddof=1) / math.sqrt(x.size)) if x.size > 1 else 0.0


def identity_names() -> Sequence[str]:
    return sorted(CATALOG)
