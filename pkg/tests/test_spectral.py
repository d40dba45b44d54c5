"""Spectral-measure families: constants, admissibility, densities."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from andersonlyap.errors import ParameterError, SingularPointError
from andersonlyap.spectral import (
    KernelSpec,
    c_h,
    dalang_check,
    riesz_constant,
    spectral_density,
)

# frozen against a 30-digit gamma oracle (mpmath)
C_1_HALF = 0.398942280401432677939946059934
C_3_1 = 0.0506605918211688857219397316049
C_2_19 = 1.60994638451834387310814721758
CH_THIRD = 0.124427391302465076108783437474
CH_026 = 0.102913317487251752978926648004


class TestRieszConstant:
    def test_d1_alpha_half_cancels_gammas(self):
        assert riesz_constant(1, 0.5) == pytest.approx((2 * math.pi) ** -0.5,
                                                       rel=1e-14)

    def test_d3_alpha_one_closed_form(self):
        assert riesz_constant(3, 1.0) == pytest.approx(1 / (2 * math.pi ** 2),
                                                       rel=1e-14)
        assert riesz_constant(3, 1.0) == pytest.approx(C_3_1, rel=1e-13)

    def test_near_upper_boundary(self):
        val = riesz_constant(2, 1.9)
        assert val == pytest.approx(C_2_19, rel=1e-13)
        assert val > 0

    @pytest.mark.parametrize("d,alpha", [(1, 0.0), (1, 1.0), (2, -0.5),
                                         (2, 2.5), (3, 3.0)])
    def test_domain_errors(self, d, alpha):
        with pytest.raises(ParameterError):
            riesz_constant(d, alpha)

    @given(st.integers(1, 6), st.floats(0.01, 0.99))
    def test_positive(self, d, frac):
        assert riesz_constant(d, frac * d) > 0


class TestCH:
    def test_frozen_values(self):
        assert c_h(1 / 3) == pytest.approx(CH_THIRD, rel=1e-13)
        assert c_h(0.26) == pytest.approx(CH_026, rel=1e-13)

    def test_upper_limit(self):
        # the formula tends to Gamma(2) sin(pi/2)/(2 pi) = 1/(2 pi)
        assert c_h(0.4999999) == pytest.approx(1 / (2 * math.pi), rel=1e-5)

    @pytest.mark.parametrize("H", [0.25, 0.5, 0.1, 0.9])
    def test_domain_errors(self, H):
        with pytest.raises(ParameterError):
            c_h(H)


class TestDalang:
    def test_classical(self):
        assert dalang_check(1.9) is True
        assert dalang_check(2.0) is False

    def test_fractional_dispersion(self):
        assert dalang_check(1.5, beta_l=1.2) is False
        assert dalang_check(1.1, beta_l=1.2) is True

    @given(st.floats(0.01, 3.0), st.floats(0.01, 3.0))
    def test_monotone_in_alpha(self, a1, a2):
        lo, hi = min(a1, a2), max(a1, a2)
        if dalang_check(hi):
            assert dalang_check(lo)

    def test_nonpositive_alpha(self):
        with pytest.raises(ParameterError):
            dalang_check(0.0)


class TestSpectralDensity:
    def test_white_flat(self):
        spec = KernelSpec("white")
        for xi in (0.0, 1.0, -3.7, 100.0):
            assert spectral_density(spec, xi) == pytest.approx(
                1 / (2 * math.pi), rel=1e-15
            )

    def test_riesz_at_one(self):
        spec = KernelSpec("riesz", d=1, alpha=0.5)
        assert spectral_density(spec, 1.0) == pytest.approx(C_1_HALF, rel=1e-13)

    def test_fractional_value(self):
        spec = KernelSpec("fractional", H=1 / 3)
        assert spectral_density(spec, 2.0) == pytest.approx(
            0.156768689485482008415408284757, rel=1e-13
        )

    def test_riesz_singularity(self):
        spec = KernelSpec("riesz", d=1, alpha=0.5)
        with pytest.raises(SingularPointError):
            spectral_density(spec, 0.0)

    @given(st.floats(0.01, 100.0), st.floats(0.01, 50.0))
    @settings(max_examples=40)
    def test_riesz_homogeneity(self, c, xi):
        spec = KernelSpec("riesz", d=1, alpha=0.5)
        lhs = spectral_density(spec, c * xi)
        rhs = c ** (spec.alpha - spec.d) * spectral_density(spec, xi)
        assert lhs == pytest.approx(rhs, rel=1e-12)

    def test_vectorized(self):
        spec = KernelSpec("riesz", d=1, alpha=0.5)
        xs = np.array([0.5, 1.0, 2.0])
        out = spectral_density(spec, xs)
        assert out.shape == (3,)
        assert out[1] == pytest.approx(C_1_HALF, rel=1e-13)


class TestKernelSpec:
    def test_alpha_eff(self):
        assert KernelSpec("riesz", d=2, alpha=1.3).alpha_eff == 1.3
        assert KernelSpec("fractional", H=0.3).alpha_eff == pytest.approx(1.4)
        assert KernelSpec("white").alpha_eff == 1.0

    @pytest.mark.parametrize(
        "spec",
        [
            KernelSpec("riesz", d=3, alpha=1.7),
            KernelSpec("fractional", H=0.3),
            KernelSpec("white"),
        ],
    )
    def test_config_round_trip(self, spec):
        assert KernelSpec.from_config(spec.to_config()) == spec

    def test_invalid(self):
        with pytest.raises(ParameterError):
            KernelSpec("riesz", d=1, alpha=1.5)
        with pytest.raises(ParameterError):
            KernelSpec("fractional", H=0.7)
        with pytest.raises(ParameterError):
            KernelSpec("polka")
