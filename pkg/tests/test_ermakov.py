import numpy as np
import pytest

from bohmosc import (
    FrequencyProfile,
    closed_form_critical,
    closed_form_subcritical,
    critical_solution,
    ermakov_residual,
    log_scale,
    solve_numeric,
    subcritical_parameters,
    subcritical_solution,
)


def family_profile(b):
    if b == 2.0:
        return FrequencyProfile.rational(1.0, 2.0)
    a, _ = subcritical_parameters(b)
    return FrequencyProfile.rational(a, b)


class TestClosedForms:
    def test_subcritical_starts_at_one(self):
        assert closed_form_subcritical(1.0, 0.0) == pytest.approx(1.0, abs=1e-15)

    def test_subcritical_b1_t1(self):
        # frozen from numeric integration of the Ermakov equation with
        # rho(0)=1, rho'(0)=b/(2a); closed form C*sqrt(a+b) agrees to 9e-14
        assert closed_form_subcritical(1.0, 1.0) == pytest.approx(
            1.4678898250138706, abs=1e-12)

    def test_constant_frequency_limit(self):
        # b=0 collapses to Omega=1 and rho identically 1
        t = np.linspace(0.0, 10.0, 101)
        np.testing.assert_allclose(closed_form_subcritical(0.0, t), 1.0, atol=1e-15)

    def test_near_critical_guard(self):
        with pytest.raises(ValueError):
            closed_form_subcritical(2.0, 1.0)
        with pytest.raises(ValueError):
            closed_form_subcritical(3.0, 1.0)
        with pytest.raises(ValueError):
            closed_form_subcritical(2.0 - 1e-15, 1.0)  # 1-b^2/4 at rounding level
        # near-critical but representable slopes stay on this branch
        assert np.isfinite(closed_form_subcritical(2.0 - 1e-6, 1.0))

    def test_critical_starts_at_one(self):
        assert closed_form_critical(0.0) == pytest.approx(1.0, abs=0)

    def test_critical_log_two_point(self):
        # ln(1+2t) = 2 makes the second factor sqrt(2) and the first e
        t = (np.e**2 - 1.0) / 2.0
        assert closed_form_critical(t) == pytest.approx(np.e * np.sqrt(2.0), rel=1e-15)

    def test_critical_t1(self):
        # frozen from numeric integration with rho(0)=1, rho'(0)=1;
        # equals sqrt(3)*sqrt(1 + ln(3)^2/4)
        assert closed_form_critical(1.0) == pytest.approx(
            1.9761608539310345, abs=1e-12)

    def test_critical_domain_error(self):
        with pytest.raises(ValueError):
            closed_form_critical(-0.6)

    def test_b_to_zero_continuity(self):
        # C -> 1 and a -> 1 continuously as b -> 0
        t = np.linspace(0.0, 10.0, 33)
        for b in [1e-4, 1e-6, 1e-8]:
            drift = np.max(np.abs(closed_form_subcritical(b, t)
                                  - np.sqrt(1.0 + b * t)))
            assert drift < 10 * b


class TestResidual:
    @pytest.mark.parametrize("b", [0.5, 1.0, 1.5])
    def test_subcritical_solves_the_equation(self, b):
        solution = subcritical_solution(b)
        t = np.linspace(0.0, 10.0, 1000)
        residual = ermakov_residual(solution, family_profile(b), t)
        assert np.max(np.abs(residual)) < 1e-12

    def test_critical_solves_the_equation(self):
        solution = critical_solution()
        t = np.linspace(0.0, 10.0, 1000)
        residual = ermakov_residual(solution, family_profile(2.0), t)
        assert np.max(np.abs(residual)) < 1e-12

    def test_equilibrium(self):
        # rho = 1 with Omega = 1: residual 0 + 1 - 1
        solution = subcritical_solution(0.0)
        residual = ermakov_residual(solution, FrequencyProfile.constant(1.0), 3.0)
        assert abs(residual) < 1e-15

    @pytest.mark.parametrize("b", [0.5, 1.0, 1.5])
    def test_curvature_matches_finite_differences(self, b):
        # rho'' reconstructed from the equation agrees with the second
        # difference of rho at second order (ratio ~4 per h halving)
        solution = subcritical_solution(b)
        profile = family_profile(b)
        t = np.linspace(0.5, 8.0, 7)
        errors = []
        for h in (1e-2, 5e-3):
            fd = (solution.rho(t + h) - 2 * solution.rho(t)
                  + solution.rho(t - h)) / h**2
            ode = 1.0 / solution.rho(t) ** 3 - profile.omega(t) ** 2 * solution.rho(t)
            errors.append(np.max(np.abs(fd - ode)))
        assert errors[0] / errors[1] == pytest.approx(4.0, rel=0.2)


class TestNumericSolver:
    def test_equilibrium_is_preserved(self):
        profile = FrequencyProfile.constant(1.0)
        solution = solve_numeric(profile, 1.0, 0.0, (0.0, 10.0))
        t = np.linspace(0.0, 10.0, 257)
        assert np.max(np.abs(solution.rho(t) - 1.0)) < 1e-9

    def test_matches_subcritical_closed_form(self):
        b = 1.0
        a, _ = subcritical_parameters(b)
        solution = solve_numeric(family_profile(b), 1.0, b / (2 * a), (0.0, 10.0))
        t = np.linspace(0.0, 10.0, 1001)
        assert np.max(np.abs(solution.rho(t) - closed_form_subcritical(b, t))) < 1e-8

    def test_matches_critical_closed_form(self):
        solution = solve_numeric(family_profile(2.0), 1.0, 1.0, (0.0, 10.0))
        t = np.linspace(0.0, 10.0, 1001)
        assert np.max(np.abs(solution.rho(t) - closed_form_critical(t))) < 1e-8

    def test_tightening_tolerances_is_monotone(self):
        b = 1.0
        a, _ = subcritical_parameters(b)
        t = np.linspace(0.0, 10.0, 501)
        deviations = []
        for rel in (1e-6, 1e-8, 1e-10):
            solution = solve_numeric(family_profile(b), 1.0, b / (2 * a),
                                     (0.0, 10.0), rel_tol=rel, abs_tol=rel * 1e-2)
            deviations.append(
                np.max(np.abs(solution.rho(t) - closed_form_subcritical(b, t))))
        assert deviations[0] > deviations[1] > deviations[2]

    def test_phase_quadrature_rides_along(self):
        solution = solve_numeric(family_profile(2.0), 1.0, 1.0, (0.0, 10.0))
        # mu = -arctan(ln(1+2t)/2)/2 for the critical branch
        t = np.linspace(0.0, 10.0, 101)
        expected = -0.5 * np.arctan(0.5 * np.log(1.0 + 2.0 * t))
        assert np.max(np.abs(solution.mu(t) - expected)) < 1e-9

    def test_interpolant_self_check_residual(self):
        solution = solve_numeric(family_profile(1.0), 1.0,
                                 1.0 / np.sqrt(3.0), (0.0, 10.0))
        t = np.linspace(0.01, 9.99, 733)
        residual = ermakov_residual(solution, family_profile(1.0), t)
        assert np.max(np.abs(residual)) < 1e-6

    def test_rho_floor_aborts(self):
        # a huge constant frequency squeezes rho to ~1/Omega < the floor
        profile = FrequencyProfile.constant(1e9)
        with pytest.raises(RuntimeError, match="floor"):
            solve_numeric(profile, 1.0, 0.0, (0.0, 1e-8))

    def test_invalid_arguments(self):
        profile = FrequencyProfile.constant(1.0)
        with pytest.raises(ValueError):
            solve_numeric(profile, -1.0, 0.0, (0.0, 1.0))
        with pytest.raises(ValueError):
            solve_numeric(profile, 1.0, 0.0, (1.0, 1.0))
        with pytest.raises(ValueError):
            solve_numeric(profile, 1.0, 0.0, (0.0, 1.0), rel_tol=0.0)


class TestLogScale:
    def test_static_case_vanishes(self):
        scale = log_scale(subcritical_solution(0.0), family_profile(0.0))
        t = np.linspace(0.0, 10.0, 65)
        assert np.max(np.abs(scale.nu(t))) < 1e-15
        assert np.max(np.abs(scale.nu_dot(t))) < 1e-15
        assert np.max(np.abs(scale.nu_ddot(t))) < 1e-15

    def test_initial_slope_b1(self):
        scale = log_scale(subcritical_solution(1.0), family_profile(1.0))
        assert scale.nu(0.0) == pytest.approx(0.0, abs=1e-15)
        assert scale.nu_dot(0.0) == pytest.approx(1.0 / np.sqrt(3.0), rel=1e-14)

    @pytest.mark.parametrize("b", [0.5, 1.0, 1.5])
    def test_matches_expanded_log_form(self, b):
        # nu(t) = -ln(1-b^2/4)/4 + ln(sqrt(1-b^2/4) + b t)/2
        scale = log_scale(subcritical_solution(b), family_profile(b))
        t = np.linspace(0.0, 10.0, 257)
        disc = 1.0 - b * b / 4.0
        reference = -0.25 * np.log(disc) + 0.5 * np.log(np.sqrt(disc) + b * t)
        assert np.max(np.abs(scale.nu(t) - reference)) < 1e-12

    def test_nu_dot_consistency_with_finite_differences(self):
        scale = log_scale(critical_solution(), family_profile(2.0))
        t = np.linspace(0.2, 8.0, 29)
        h = 1e-6
        fd = (scale.nu(t + h) - scale.nu(t - h)) / (2 * h)
        assert np.max(np.abs(fd - scale.nu_dot(t))) < 1e-9

    def test_nu_ddot_consistency_with_finite_differences(self):
        scale = log_scale(critical_solution(), family_profile(2.0))
        t = np.linspace(0.2, 8.0, 29)
        h = 1e-4
        fd = (scale.nu(t + h) - 2 * scale.nu(t) + scale.nu(t - h)) / h**2
        assert np.max(np.abs(fd - scale.nu_ddot(t))) < 1e-7
