import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate

from simplexgeom import exact
from simplexgeom.errors import DomainError
from simplexgeom.exact import IdentityId

from conftest import ball_volume


def _quadrature_ball_volume(k: int) -> float:
    vol = 1.0
    for j in range(1, k + 1):
        vol *= integrate.quad(lambda t: (1 - t * t) ** ((j - 1) / 2), -1, 1, epsabs=1e-13, epsrel=1e-12)[0]
    return vol


def _sphere_area(n: float) -> float:
    return 2 * math.pi ** (n / 2) / math.gamma(n / 2)


def _ball_affine_integral(d: int, k: int, q: float) -> float:
    """Integral of |B^d cap F|^q over affine k-flats, by radial quadrature over offsets."""
    sec = ball_volume(k)
    if k == d:
        return sec**q
    m = d - k
    radial = integrate.quad(lambda r: (1 - r * r) ** (k * q / 2) * r ** (m - 1), 0, 1, epsabs=1e-14, epsrel=1e-13)[0]
    return sec**q * _sphere_area(m) * radial


class TestKappaOmega:
    @pytest.mark.parametrize(
        "p, expected", [(0, 1.0), (1, 2.0), (2, math.pi), (3, 4 * math.pi / 3)]
    )
    def test_values(self, p, expected):
        assert exact.kappa(p) == pytest.approx(expected, rel=1e-14)

    @pytest.mark.parametrize("k", range(1, 9))
    def test_matches_recursive_quadrature(self, k):
        assert exact.kappa(k) == pytest.approx(_quadrature_ball_volume(k), abs=1e-10)

    @pytest.mark.parametrize("p, expected", [(1, 2.0), (2, 2 * math.pi), (3, 4 * math.pi)])
    def test_omega(self, p, expected):
        assert exact.omega(p) == pytest.approx(expected, rel=1e-14)

    def test_domain(self):
        with pytest.raises(DomainError):
            exact.kappa(-0.1)
        with pytest.raises(DomainError):
            exact.omega(0)


class TestSubspaceCoeff:
    def test_examples(self):
        assert exact.subspace_coeff(1, 1) == pytest.approx(1.0, rel=1e-15)
        assert exact.subspace_coeff(2, 1) == pytest.approx(math.pi, rel=1e-14)
        assert exact.subspace_coeff(3, 2) == pytest.approx(2 * math.pi, rel=1e-14)

    def test_real_argument_against_gamma(self):
        omega_25 = 2.5 * math.pi**1.25 / math.gamma(2.25)
        assert exact.subspace_coeff(2.5, 1) == pytest.approx(omega_25 / 2.0, rel=1e-13)

    @pytest.mark.parametrize("k", range(0, 9))
    def test_diagonal_is_one(self, k):
        assert exact.subspace_coeff(k, k) == pytest.approx(1.0, abs=1e-12)

    def test_domain(self):
        with pytest.raises(DomainError):
            exact.subspace_coeff(1.0, 2)


class TestBallMoments:
    @pytest.mark.parametrize("d", range(1, 7))
    def test_zeroth_moment(self, d):
        for k in range(1, d + 1):
            assert exact.ball_simplex_moment(d, k, 0) == 1.0

    def test_classical_mean_distances(self):
        assert exact.ball_simplex_moment(2, 1, 1) == pytest.approx(128 / (45 * math.pi), rel=1e-13)
        assert exact.ball_simplex_moment(3, 1, 1) == pytest.approx(36 / 35, rel=1e-13)

    @pytest.mark.parametrize("d, expected", [(2, 128 / (45 * math.pi)), (3, 36 / 35)])
    def test_monte_carlo_oracle(self, oracle_rng, d, expected):
        n = 400_000
        z = oracle_rng.standard_normal((2, n, d))
        z /= np.linalg.norm(z, axis=2, keepdims=True)
        z *= oracle_rng.random((2, n, 1)) ** (1 / d)
        dist = np.linalg.norm(z[0] - z[1], axis=1)
        se = dist.std(ddof=1) / math.sqrt(n)
        assert abs(dist.mean() - exact.ball_simplex_moment(d, 1, 1)) < 4 * se
        assert abs(dist.mean() - expected) < 4 * se

    def test_domain(self):
        with pytest.raises(DomainError):
            exact.ball_simplex_moment(2, 1, -1)
        with pytest.raises(DomainError):
            exact.ball_simplex_moment(2, 3, 1)
        with pytest.raises(DomainError):
            exact.ball_simplex_moment(2, 0, 1)


class TestOriginBallIntegral:
    @pytest.mark.parametrize("k", [1, 2, 3, 4])
    def test_zero_exponent(self, k):
        assert exact.origin_ball_integral(k, 0) == pytest.approx(ball_volume(k) ** k, rel=1e-13)

    def test_segment(self):
        # integral of |y| over [-1, 1]
        assert exact.origin_ball_integral(1, 1) == pytest.approx(1.0, rel=1e-14)

    def test_disk_triangle(self):
        # E|conv(0,Y1,Y2)| = (1/2) E r1 E r2 E|sin| = (1/2)(2/3)^2(2/pi); times kappa_2^2
        assert exact.origin_ball_integral(2, 1) == pytest.approx(4 * math.pi / 9, rel=1e-13)

    @pytest.mark.parametrize("k", [1, 2, 3])
    @pytest.mark.parametrize("m", [1, 2])
    def test_monte_carlo_oracle(self, oracle_rng, k, m):
        n = 200_000
        y = oracle_rng.standard_normal((n, k, k))
        y /= np.linalg.norm(y, axis=2, keepdims=True)
        y *= oracle_rng.random((n, k, 1)) ** (1 / k)
        vol = np.abs(np.linalg.det(y)) / math.factorial(k)
        vals = vol**m
        se = vals.std(ddof=1) / math.sqrt(n)
        target = exact.origin_ball_integral(k, m) / ball_volume(k) ** k
        assert abs(vals.mean() - target) < 4 * se

    def test_domain(self):
        with pytest.raises(DomainError):
            exact.origin_ball_integral(2, -0.5)
        with pytest.raises(DomainError):
            exact.origin_ball_integral(0, 1)


class TestMeanVolumeCoeff:
    @pytest.mark.parametrize(
        "d, k, expected",
        [(1, 1, 1 / 3), (2, 1, 128 / (45 * math.pi**2)), (2, 2, 35 / (48 * math.pi**2))],
    )
    def test_values(self, d, k, expected):
        assert exact.mean_volume_coeff(d, k) == pytest.approx(expected, rel=1e-12)

    @pytest.mark.parametrize("d", range(1, 7))
    def test_matches_ball_moment_over_ball_intrinsic_volume(self, d):
        for k in range(1, d + 1):
            ratio = exact.ball_simplex_moment(d, k, 1) / exact.ball_intrinsic_volume(d, k)
            assert exact.mean_volume_coeff(d, k) == pytest.approx(ratio, rel=1e-11)

    def test_large_arguments_stay_finite(self):
        val = exact.mean_volume_coeff(12, 8)
        assert math.isfinite(val) and val > 0


class TestIdentityConstants:
    def test_ft_linear(self):
        assert exact.identity_constant(IdentityId.FT_LINEAR, 2, 1) == pytest.approx(4 / math.pi, rel=1e-14)
        for d in range(1, 7):
            assert exact.identity_constant(IdentityId.FT_LINEAR, d, d) == pytest.approx(1.0, rel=1e-14)

    def test_ft_affine_against_chord_quadrature(self):
        chord_cubed = integrate.quad(lambda t: (2 * math.sqrt(1 - t * t)) ** 3, -1, 1)[0]
        assert chord_cubed == pytest.approx(3 * math.pi, rel=1e-9)
        c = exact.identity_constant(IdentityId.FT_AFFINE, 2, 1)
        assert c == pytest.approx(3 / math.pi, rel=1e-14)
        assert c == pytest.approx(chord_cubed / math.pi**2, rel=1e-9)

    def test_section_projection_is_reciprocal_at_p0(self):
        c = exact.identity_constant(IdentityId.SECTION_PROJECTION, 2, 1, 0)
        assert c == pytest.approx(math.pi / 3, rel=1e-14)
        for d in range(1, 6):
            for k in range(0, d + 1):
                sp = exact.identity_constant(IdentityId.SECTION_PROJECTION, d, k, 0)
                fa = exact.identity_constant(IdentityId.FT_AFFINE, d, k)
                assert sp * fa == pytest.approx(1.0, rel=1e-12)

    def test_affine_bp_disk(self):
        c = exact.identity_constant(IdentityId.AFFINE_BP_MOMENT, 2, 1, 1)
        assert c == pytest.approx(math.pi / 6, rel=1e-14)
        chord4 = integrate.quad(lambda t: (2 * math.sqrt(1 - t * t)) ** 4, -1, 1)[0]
        assert chord4 == pytest.approx(256 / 15, rel=1e-12)
        assert c * chord4 == pytest.approx(128 * math.pi / 45, rel=1e-12)

    def test_linear_bp_disk(self):
        assert exact.identity_constant(IdentityId.LINEAR_BP_MOMENT, 2, 1, 1) == pytest.approx(math.pi / 12, rel=1e-14)

    @pytest.mark.parametrize("d", [2, 3, 4, 5])
    @pytest.mark.parametrize("p", [-0.5, 0.0, 1.0, 2.5])
    def test_affine_bp_k1_matches_chord_power_formula(self, d, p):
        # The classical chord-power formula is usually stated for a line measure
        # with oriented directions, which counts every line twice.
        chord_const = 2 * d * ball_volume(d) / ((d + p) * (d + p + 1))
        assert exact.identity_constant(IdentityId.AFFINE_BP_MOMENT, d, 1, p) == pytest.approx(chord_const / 2, rel=1e-12)

    @pytest.mark.parametrize("d", range(1, 6))
    @pytest.mark.parametrize("p", [0.0, 0.5, 1.0, 2.0])
    def test_consistency_at_the_ball(self, d, p):
        for k in range(0, d + 1):
            q = p + d + 1
            aff = _ball_affine_integral(d, k, q)
            sp = exact.identity_constant(IdentityId.SECTION_PROJECTION, d, k, p)
            assert sp * aff == pytest.approx(ball_volume(d) ** (k + 1) * ball_volume(k) ** p, rel=1e-9)
            if k >= 1:
                bp = exact.identity_constant(IdentityId.AFFINE_BP_MOMENT, d, k, p)
                lhs = ball_volume(d) ** (k + 1) * exact.ball_simplex_moment(d, k, p)
                assert bp * aff == pytest.approx(lhs, rel=1e-9)

    @pytest.mark.parametrize("d, p", [(d, p) for d in range(1, 6) for p in (0.5, 1.0, 2.0)] + [(3, -1.5), (4, -2.5)])
    def test_linear_bp_segment_case(self, d, p):
        # k = 1 at the ball: the integral of |x|^p over B^d is kappa_d d/(d+p)
        lhs = ball_volume(d) * d / (d + p)
        c = exact.identity_constant(IdentityId.LINEAR_BP_MOMENT, d, 1, p)
        assert c * 2.0 ** (p + d) == pytest.approx(lhs, rel=1e-12)

    @pytest.mark.parametrize("d", range(1, 6))
    @pytest.mark.parametrize("p", [0.5, 1.0, 2.0])
    def test_linear_bp_full_dimension(self, d, p):
        c = exact.identity_constant(IdentityId.LINEAR_BP_MOMENT, d, d, p)
        assert c * ball_volume(d) ** (p + d) == pytest.approx(exact.origin_ball_integral(d, p), rel=1e-12)

    def test_linear_bp_monte_carlo(self, oracle_rng):
        d, k, p, n = 3, 2, 1.0, 400_000
        x = oracle_rng.standard_normal((n, k, d))
        x /= np.linalg.norm(x, axis=2, keepdims=True)
        x *= oracle_rng.random((n, k, 1)) ** (1 / d)
        area = 0.5 * np.linalg.norm(np.cross(x[:, 0], x[:, 1]), axis=1)
        se = area.std(ddof=1) / math.sqrt(n)
        c = exact.identity_constant(IdentityId.LINEAR_BP_MOMENT, d, k, p)
        target = c * math.pi ** (p + d) / ball_volume(d) ** k
        assert abs(area.mean() - target) < 4 * se

    def test_domain(self):
        with pytest.raises(DomainError):
            exact.identity_constant(IdentityId.SECTION_PROJECTION, 3, 1, -1)
        with pytest.raises(DomainError):
            exact.identity_constant(IdentityId.AFFINE_BP_MOMENT, 3, 1, -3)
        with pytest.raises(DomainError):
            exact.identity_constant(IdentityId.LINEAR_BP_MOMENT, 3, 1, -2)
        with pytest.raises(ValueError):
            exact.identity_constant("nonsense", 3, 1, 0)

    def test_string_ids(self):
        assert exact.identity_constant("ft_linear", 2, 1) == exact.identity_constant(IdentityId.FT_LINEAR, 2, 1)


@settings(max_examples=200, deadline=None)
@given(
    d=st.integers(1, 8),
    data=st.data(),
)
def test_outputs_finite_and_positive(d, data):
    k = data.draw(st.integers(1, d))
    p = data.draw(st.floats(-0.99, 6.0))
    assert 0 < exact.ball_simplex_moment(d, k, p) < math.inf
    assert 0 < exact.mean_volume_coeff(d, k) < math.inf
    assert 0 < exact.identity_constant(IdentityId.SECTION_PROJECTION, d, k, p) < math.inf
    assert 0 < exact.identity_constant(IdentityId.AFFINE_BP_MOMENT, d, k, p) < math.inf
    pl = data.draw(st.floats(-d + k + 0.01, 6.0))
    assert 0 < exact.identity_constant(IdentityId.LINEAR_BP_MOMENT, d, k, pl) < math.inf
    m = data.draw(st.floats(0.0, 6.0))
    assert 0 < exact.origin_ball_integral(k, m) < math.inf
