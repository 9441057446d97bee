import numpy as np
import pytest

from bohmosc import (
    FrequencyProfile,
    RationalFrequency,
    Regime,
    classify_rational,
)


class TestRationalFrequency:
    def test_critical_family_at_zero(self):
        # Omega(t) = 1/(1+2t) starts at 1
        assert RationalFrequency(1.0, 2.0).omega(0.0) == 1.0

    def test_half_time(self):
        assert RationalFrequency(1.0, 2.0).omega(0.5) == pytest.approx(0.5, abs=0)

    def test_forced_offset_b1(self):
        # a = sqrt(3)/2 forced by rho(0)=1 gives Omega(0) = 2/sqrt(3)
        freq = RationalFrequency(np.sqrt(3.0) / 2.0, 1.0)
        assert freq.omega(0.0) == pytest.approx(1.1547005383792517, abs=1e-15)

    def test_domain_error(self):
        freq = RationalFrequency(1.0, 1.0)
        with pytest.raises(ValueError):
            freq.omega(-2.0)

    def test_invalid_parameters(self):
        with pytest.raises(ValueError):
            RationalFrequency(0.0, 1.0)
        with pytest.raises(ValueError):
            RationalFrequency(1.0, -0.5)

    @pytest.mark.parametrize("b", [0.1, 0.5, 1.0, 1.9, 2.0, 3.0])
    def test_strictly_decreasing_for_positive_slope(self, b):
        freq = RationalFrequency(1.0, b)
        t = np.linspace(0.0, 10.0, 257)
        assert np.all(np.diff(freq.omega(t)) < 0)

    def test_vectorized(self):
        freq = RationalFrequency(1.0, 2.0)
        t = np.array([0.0, 0.5, 2.0])
        np.testing.assert_allclose(freq.omega(t), [1.0, 0.5, 0.2])


class TestClassify:
    def test_subcritical(self):
        assert classify_rational(1.0) is Regime.SUBCRITICAL

    def test_constant_limit_is_subcritical(self):
        assert classify_rational(0.0) is Regime.SUBCRITICAL

    def test_critical(self):
        assert classify_rational(2.0) is Regime.CRITICAL

    def test_critical_within_tolerance(self):
        assert classify_rational(2.0 - 1e-13) is Regime.CRITICAL
        assert classify_rational(2.0 + 1e-13) is Regime.CRITICAL

    def test_unsupported(self):
        assert classify_rational(3.0) is Regime.UNSUPPORTED

    def test_near_critical_stays_subcritical(self):
        assert classify_rational(2.0 - 1e-6) is Regime.SUBCRITICAL

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            classify_rational(-1.0)

    @pytest.mark.parametrize("b", [0.0, 0.3, 0.5, 1.0, 1.5, 1.99])
    def test_subcritical_amplitude_is_real(self, b):
        # consistency: every subcritical slope has a real C = (1-b^2/4)^(-1/4)
        assert classify_rational(b) is Regime.SUBCRITICAL
        assert np.isfinite((1.0 - b * b / 4.0) ** -0.25)


class TestFrequencyProfile:
    def test_constant(self):
        profile = FrequencyProfile.constant(1.0)
        np.testing.assert_array_equal(profile.omega([0.0, 3.0, 7.0]), [1, 1, 1])

    def test_rational_factory(self):
        profile = FrequencyProfile.rational(1.0, 2.0)
        assert profile.omega(0.5) == pytest.approx(0.5)

    def test_from_table_linear_interpolation(self):
        profile = FrequencyProfile.from_table([0.0, 1.0, 2.0], [1.0, 0.5, 0.25])
        assert profile.omega(0.5) == pytest.approx(0.75)
        assert profile.omega(1.5) == pytest.approx(0.375)

    def test_from_table_validation(self):
        with pytest.raises(ValueError):
            FrequencyProfile.from_table([0.0, 0.0], [1.0, 1.0])
        with pytest.raises(ValueError):
            FrequencyProfile.from_table([0.0, 1.0], [1.0, -1.0])
        with pytest.raises(ValueError):
            FrequencyProfile.from_table([0.0], [1.0])

    def test_custom_callable(self):
        profile = FrequencyProfile(lambda t: 1.0 / (1.0 + t * t))
        assert profile.omega(1.0) == pytest.approx(0.5)

    def test_nonfinite_rejected(self):
        profile = FrequencyProfile(lambda t: 1.0 / t)
        with np.errstate(divide="ignore"):
            with pytest.raises(ValueError):
                profile.omega(0.0)
