"""Two-sample Kolmogorov-Smirnov test and z-score comparison."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError

SERIES_CUTOFF = 1e-12


@dataclass(frozen=True)
class KsResult:
    statistic: float
    p_value: float
    n1: int
    n2: int


def kolmogorov_sf(x: float) -> float:
    """P(K > x) for the limiting Kolmogorov distribution.

    Two series are used: the alternating one converges fast for large x, the
    Jacobi-transformed one for small x.
    """
    if x <= 0:
        return 1.0
    if x < 1.0:
        # P(K <= x) = sqrt(2 pi)/x * sum_j exp(-(2j-1)^2 pi^2 / (8 x^2))
        c = -(math.pi**2) / (8.0 * x * x)
        total, j = 0.0, 1
        while True:
            term = math.exp(c * (2 * j - 1) ** 2)
            total += term
            if term < SERIES_CUTOFF:
                break
            j += 1
        cdf = math.sqrt(2.0 * math.pi) / x * total
        return min(1.0, max(0.0, 1.0 - cdf))
    total, j = 0.0, 1
    while True:
        term = math.exp(-2.0 * j * j * x * x)
        total += term if j % 2 else -term
        if term < SERIES_CUTOFF:
            break
        j += 1
    return min(1.0, max(0.0, 2.0 * total))


def _clean(sample, name: str) -> np.ndarray:
    a = np.asarray(sample, dtype=float).ravel()
    if a.size == 0:
        raise DomainError(f"sample {name} is empty")
    if np.isnan(a).any():
        raise DomainError(f"sample {name} contains NaN")
    return np.sort(a)


def ks_two_sample(a, b) -> KsResult:
    """Two-sample KS test with the asymptotic p-value.

    D is the exact supremum of |F_a - F_b| over the pooled sample; tied values
    are stepped over together because both ECDFs are evaluated with
    right-continuous ``searchsorted``.  The p-value is the Kolmogorov tail at
    D * sqrt(n1 n2 / (n1 + n2)).  It is accurate once both samples have a few
    hundred points; tiny samples are accepted but the p-value is rough.
    """
    x, y = _clean(a, "a"), _clean(b, "b")
    n1, n2 = x.size, y.size
    pooled = np.concatenate([x, y])
    cdf1 = np.searchsorted(x, pooled, side="right") / n1
    cdf2 = np.searchsorted(y, pooled, side="right") / n2
    stat = float(np.max(np.abs(cdf1 - cdf2)))
    en = math.sqrt(n1 * n2 / (n1 + n2))
    return KsResult(stat, kolmogorov_sf(stat * en), n1, n2)


def _value_and_se(side) -> tuple[float, float]:
    if isinstance(side, (int, float, np.floating, np.integer)):
        return float(side), 0.0
    return float(side.value), float(side.stderr)


def z_compare(lhs, rhs) -> float:
    """(lhs - rhs) / sqrt(se_lhs^2 + se_rhs^2).

    Either side is an estimate (anything with ``value`` and ``stderr``) or a
    plain number, which counts as exact.  Two exact sides give 0 when equal
    and a signed infinity otherwise.
    """
    lv, ls = _value_and_se(lhs)
    rv, rs = _value_and_se(rhs)
    se = math.hypot(ls, rs)
    diff = lv - rv
    if se == 0.0:
        if diff == 0.0:
            return 0.0
        return math.copysign(math.inf, diff)
    return diff / se
