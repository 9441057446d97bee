"""Madelung fields of the time-dependent harmonic oscillator.

Writing psi = A exp(iS) with real amplitude and phase, a quadratic phase

    S(x,t) = x^2 nu_dot(t)/2 + mu(t),      mu_dot = -exp(-2 nu)/2,

together with the dilated Gaussian amplitude

    A(x,t) = pi^(-1/4) exp(-x^2 exp(-2 nu)/2 - nu/2)

solves the Schrodinger equation for V(x,t) = Omega^2(t) x^2/2 exactly,
provided rho = exp(nu) obeys the Ermakov equation.  The quantum part of
the dynamics is the Bohm potential

    V_B(x,t) = -x^2 exp(-4 nu)/2 + exp(-2 nu)/2,

which this module evaluates three independent ways: from nu, from the
branch closed forms of the rational family, and from -A''/(2mA) by finite
differences on sampled amplitudes.  Units: hbar = 1, m = 1 (m kept as an
explicit parameter only where the defining formula retains it).

All field evaluations are pure functions of immutable inputs.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Callable, Optional

import numpy as np
from scipy.interpolate import CubicSpline

from .frequency import FrequencyProfile, Regime, classify_rational
from .ermakov import (
    ErmakovSolution,
    LogScale,
    critical_solution,
    log_scale,
    solve_numeric,
    subcritical_parameters,
    subcritical_solution,
)

__all__ = [
    "SpatialGrid",
    "WavefunctionGrid",
    "PhaseField",
    "Construction",
    "amplitude_gaussian",
    "amplitude_gaussian_dx",
    "amplitude_gaussian_dt",
    "amplitude_general",
    "mu_subcritical",
    "mu_critical",
    "phase_field_subcritical",
    "phase_field_critical",
    "phase_field_numeric",
    "phase",
    "wavefunction",
    "bohm_potential_gaussian",
    "bohm_potential_subcritical",
    "bohm_potential_critical",
    "bohm_potential_from_amplitude",
    "classical_potential",
    "rational_construction",
    "numeric_construction",
    "AMPLITUDE_FLOOR",
]

_PI_MQUARTER = np.pi**-0.25

# |A| below this is treated as a node: the Bohm potential genuinely diverges
# there and fabricated values would poison residual tests, so mask instead.
AMPLITUDE_FLOOR = 1e-12

# Tolerable fraction of L2 mass allowed to leave the grid under dilation
# before amplitude_general emits a warning.
_DILATION_LEAK_TOL = 1e-6


@dataclass(frozen=True)
class SpatialGrid:
    """Uniform grid on [x_min, x_max] with n samples, spacing h = span/(n-1).

    The default covers [-8, 8] with 512 points (a power of two, as the
    spectral propagator requires).
    """

    x_min: float = -8.0
    x_max: float = 8.0
    n: int = 512

    def __post_init__(self):
        if self.n < 16:
            raise ValueError(f"need n >= 16 grid points, got {self.n}")
        if not self.x_max > self.x_min:
            raise ValueError(f"need x_max > x_min, got [{self.x_min}, {self.x_max}]")

    @cached_property
    def x(self) -> np.ndarray:
        x = np.linspace(self.x_min, self.x_max, self.n)
        x.setflags(write=False)
        return x

    @property
    def h(self) -> float:
        return (self.x_max - self.x_min) / (self.n - 1)

    @property
    def is_power_of_two(self) -> bool:
        return self.n > 0 and (self.n & (self.n - 1)) == 0


@dataclass(frozen=True)
class WavefunctionGrid:
    """Complex psi samples on a SpatialGrid at one or more times.

    psi has shape (len(times), grid.n); arrays are frozen read-only.
    """

    grid: SpatialGrid
    times: np.ndarray
    psi: np.ndarray

    def __post_init__(self):
        # private copies so later writes to caller arrays cannot leak in,
        # then frozen to honor the immutability contract
        times = np.atleast_1d(np.array(self.times, dtype=float))
        psi = np.atleast_2d(np.array(self.psi, dtype=complex))
        if psi.shape != (times.size, self.grid.n):
            raise ValueError(
                f"psi shape {psi.shape} does not match "
                f"({times.size}, {self.grid.n})"
            )
        times.setflags(write=False)
        psi.setflags(write=False)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "psi", psi)

    def amplitude(self) -> np.ndarray:
        return np.abs(self.psi)

    def phase_angle(self) -> np.ndarray:
        return np.angle(self.psi)

    def at(self, index: int) -> "WavefunctionGrid":
        """Single-time slice."""
        return WavefunctionGrid(self.grid, self.times[index : index + 1],
                                self.psi[index : index + 1])

    def norms(self) -> np.ndarray:
        """Trapezoidal int |psi|^2 dx per stored time."""
        return np.trapezoid(np.abs(self.psi) ** 2, self.grid.x, axis=1)


@dataclass(frozen=True)
class PhaseField:
    """Quadratic phase S(x,t) = x^2 nu_dot(t)/2 + mu(t), with mu(0) = 0.

    mu is pinned by mu_dot = -exp(-2 nu)/2 = -1/(2 rho^2); the integration
    constant mu(0) = 0 is a convention (a global phase is physically
    irrelevant but must be fixed for reproducibility).
    """

    mu: Callable
    mu_dot: Callable
    scale: LogScale

    def S(self, x, t):
        return 0.5 * np.asarray(x, dtype=float) ** 2 * self.scale.nu_dot(t) + self.mu(t)

    def S_x(self, x, t):
        return np.asarray(x, dtype=float) * self.scale.nu_dot(t)

    def S_xx(self, t):
        return self.scale.nu_dot(t)

    def S_t(self, x, t):
        return 0.5 * np.asarray(x, dtype=float) ** 2 * self.scale.nu_ddot(t) + self.mu_dot(t)


def amplitude_gaussian(x, t, scale: LogScale):
    """Dilated Gaussian amplitude pi^(-1/4) exp(-x^2 e^(-2nu)/2 - nu/2).

    At nu = 0 this is the initial condition A0(x) = pi^(-1/4) exp(-x^2/2);
    the L2 norm is 1 for every nu (the dilation is unitary).
    """
    x = np.asarray(x, dtype=float)
    nu = scale.nu(t)
    return _PI_MQUARTER * np.exp(-0.5 * x * x * np.exp(-2.0 * nu) - 0.5 * nu)


def amplitude_gaussian_dx(x, t, scale: LogScale):
    """Spatial derivative A' = -x e^(-2nu) A of the Gaussian amplitude."""
    x = np.asarray(x, dtype=float)
    return -x * np.exp(-2.0 * scale.nu(t)) * amplitude_gaussian(x, t, scale)


def amplitude_gaussian_dt(x, t, scale: LogScale):
    """Time derivative A_t = nu_dot (x^2 e^(-2nu) - 1/2) A of the Gaussian amplitude."""
    x = np.asarray(x, dtype=float)
    nu = scale.nu(t)
    return (
        scale.nu_dot(t)
        * (x * x * np.exp(-2.0 * nu) - 0.5)
        * amplitude_gaussian(x, t, scale)
    )


def amplitude_general(a0, grid: SpatialGrid, t, scale: LogScale) -> np.ndarray:
    """Dilate an arbitrary sampled initial amplitude: A(x,t) = e^(-nu/2) A0(x e^(-nu)).

    Off-grid arguments are evaluated by cubic interpolation and zero
    outside the grid.  If more than 1e-6 of the L2 mass of A0 falls
    outside the shrunken evaluation window (expansion, nu > 0), a warning
    reports the lost fraction.
    """
    a0 = np.asarray(a0, dtype=float)
    if a0.shape != (grid.n,):
        raise ValueError(f"a0 must be sampled on the grid, shape {(grid.n,)}")
    nu = float(scale.nu(t))
    stretch = np.exp(-nu)
    x = grid.x
    y = x * stretch

    spline = CubicSpline(x, a0, extrapolate=False)
    values = spline(y)
    values = np.where(np.isnan(values), 0.0, values)

    if stretch < 1.0:
        mass_total = np.trapezoid(a0 * a0, x)
        inside = (x >= grid.x_min * stretch) & (x <= grid.x_max * stretch)
        mass_inside = np.trapezoid(np.where(inside, a0 * a0, 0.0), x)
        if mass_total > 0:
            leak = 1.0 - mass_inside / mass_total
            if leak > _DILATION_LEAK_TOL:
                warnings.warn(
                    f"dilation pushed {leak:.3e} of the L2 mass off the grid "
                    f"(nu={nu:.4g}); enlarge the domain",
                    stacklevel=2,
                )
    return np.exp(-0.5 * nu) * values


def mu_subcritical(b: float, t):
    """Closed-form mu(t) = -(a/2b) ln((a+bt)/a) on the subcritical branch.

    This is the antiderivative of -1/(2 rho^2) with mu(0) = 0; b = 0 is
    the constant-frequency limit mu = -t/2.
    """
    a, _ = subcritical_parameters(b)
    t = np.asarray(t, dtype=float)
    if b == 0.0:
        return -0.5 * t
    return -(a / (2.0 * b)) * np.log1p(b * t / a)


def mu_critical(t):
    """Closed-form mu(t) = -arctan(ln(1+2t)/2)/2 on the critical branch.

    Monotone decreasing with limit -pi/4 as t -> infinity; mu(0) = 0.
    """
    t = np.asarray(t, dtype=float)
    u = 1.0 + 2.0 * t
    if np.any(u <= 0):
        raise ValueError("critical phase requires 1 + 2t > 0")
    return -0.5 * np.arctan(0.5 * np.log(u))


def _mu_dot_from_scale(scale: LogScale) -> Callable:
    return lambda t: -0.5 * np.exp(-2.0 * scale.nu(t))


def phase_field_subcritical(b: float) -> PhaseField:
    a, _ = subcritical_parameters(b)
    profile = FrequencyProfile.rational(a, b)
    scale = log_scale(subcritical_solution(b), profile)
    return PhaseField(
        mu=lambda t: mu_subcritical(b, t),
        mu_dot=_mu_dot_from_scale(scale),
        scale=scale,
    )


def phase_field_critical() -> PhaseField:
    profile = FrequencyProfile.rational(1.0, 2.0)
    scale = log_scale(critical_solution(), profile)
    return PhaseField(mu=mu_critical, mu_dot=_mu_dot_from_scale(scale), scale=scale)


def phase_field_numeric(solution: ErmakovSolution, profile: FrequencyProfile) -> PhaseField:
    """Phase field for a numerically integrated Ermakov solution."""
    if solution.mu is None:
        raise ValueError("solution carries no phase quadrature; integrate numerically")
    scale = log_scale(solution, profile)
    return PhaseField(mu=solution.mu, mu_dot=_mu_dot_from_scale(scale), scale=scale)


def phase(x, t, field: PhaseField):
    """S(x,t) = x^2 nu_dot/2 + mu."""
    return field.S(x, t)


def wavefunction(grid: SpatialGrid, times, scale: LogScale, field: PhaseField) -> WavefunctionGrid:
    """psi(x,t) = A(x,t) exp(i S(x,t)) sampled on the grid at the given times."""
    times = np.atleast_1d(np.asarray(times, dtype=float))
    psi = np.empty((times.size, grid.n), dtype=complex)
    for j, t in enumerate(times):
        amp = amplitude_gaussian(grid.x, t, scale)
        psi[j] = amp * np.exp(1j * field.S(grid.x, t))
    return WavefunctionGrid(grid=grid, times=times, psi=psi)


def bohm_potential_gaussian(x, t, scale: LogScale):
    """V_B(x,t) = -x^2 e^(-4 nu)/2 + e^(-2 nu)/2 for the Gaussian amplitude.

    Zero crossings sit at |x| = e^(nu); V_B(0,0) = 1/2 when rho(0) = 1.
    """
    x = np.asarray(x, dtype=float)
    e2 = np.exp(-2.0 * scale.nu(t))
    return -0.5 * x * x * e2 * e2 + 0.5 * e2


def bohm_potential_subcritical(b: float, x, t):
    """Branch closed form: V_B = -(1-b^2/4) x^2 / (2(a+bt)^2) + sqrt(1-b^2/4)/(2(a+bt))."""
    a, _ = subcritical_parameters(b)
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    denom = a + b * t
    if np.any(denom <= 0):
        raise ValueError(f"a + b*t must stay positive (a={a}, b={b})")
    disc = 1.0 - b * b / 4.0
    return -0.5 * disc * x * x / denom**2 + 0.5 * a / denom


def bohm_potential_critical(x, t):
    """Branch closed form at b=2, finite for all t >= 0:

    V_B = -x^2 / (2 (1+2t)^2 [1 + ln^2(1+2t)/4]^2) + 1 / (2 (1+2t) [1 + ln^2(1+2t)/4]).
    """
    x = np.asarray(x, dtype=float)
    t = np.asarray(t, dtype=float)
    u = 1.0 + 2.0 * t
    if np.any(u <= 0):
        raise ValueError("critical Bohm potential requires 1 + 2t > 0")
    ell = np.log(u)
    w = 1.0 + 0.25 * ell * ell
    return -0.5 * x * x / (u * u * w * w) + 0.5 / (u * w)


def bohm_potential_from_amplitude(a, grid: SpatialGrid, m: float = 1.0) -> np.ma.MaskedArray:
    """V_B = -A''/(2mA) by second-order central differences on sampled A.

    Endpoints use one-sided second-order stencils.  Points where
    |A| <= AMPLITUDE_FLOOR are masked: the Bohm potential genuinely
    diverges at amplitude nodes.  The mask of the returned array is the
    machine-readable report of the excluded region.
    """
    a = np.asarray(a, dtype=float)
    if a.shape != (grid.n,):
        raise ValueError(f"amplitude must be sampled on the grid, shape {(grid.n,)}")
    h2 = grid.h * grid.h
    app = np.empty_like(a)
    app[1:-1] = (a[2:] - 2.0 * a[1:-1] + a[:-2]) / h2
    app[0] = (2.0 * a[0] - 5.0 * a[1] + 4.0 * a[2] - a[3]) / h2
    app[-1] = (2.0 * a[-1] - 5.0 * a[-2] + 4.0 * a[-3] - a[-4]) / h2

    mask = np.abs(a) <= AMPLITUDE_FLOOR
    safe = np.where(mask, 1.0, a)
    return np.ma.masked_array(-app / (2.0 * m * safe), mask=mask)


def classical_potential(profile: FrequencyProfile, x, t):
    """V(x,t) = Omega^2(t) x^2 / 2."""
    x = np.asarray(x, dtype=float)
    return 0.5 * profile.omega(t) ** 2 * x * x


@dataclass(frozen=True)
class Construction:
    """A wired frequency/Ermakov/Madelung bundle for one configuration."""

    profile: FrequencyProfile
    solution: ErmakovSolution
    scale: LogScale
    field: PhaseField

    def psi(self, grid: SpatialGrid, times) -> WavefunctionGrid:
        return wavefunction(grid, times, self.scale, self.field)


def rational_construction(b: float) -> Construction:
    """Full construction for the rational family at slope b.

    Dispatches on the regime: subcritical closed forms for 0 <= b < 2
    (b = 0 is the static oscillator Omega = 1), critical closed forms at
    b = 2.  Raises for b > 2, where no real subcritical solution exists.
    """
    regime = classify_rational(b)
    if regime is Regime.UNSUPPORTED:
        raise ValueError(f"b={b} > 2 is outside the supported regimes")
    if regime is Regime.CRITICAL:
        profile = FrequencyProfile.rational(1.0, 2.0)
        solution = critical_solution()
        field = phase_field_critical()
    else:
        a, _ = subcritical_parameters(b)
        profile = FrequencyProfile.rational(a, b)
        solution = subcritical_solution(b)
        field = phase_field_subcritical(b)
    return Construction(profile=profile, solution=solution,
                        scale=field.scale, field=field)


def numeric_construction(
    profile: FrequencyProfile,
    window: tuple,
    rho0: float = 1.0,
    rho_dot0: float = 0.0,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> Construction:
    """Full construction for an arbitrary profile via numeric integration."""
    solution = solve_numeric(profile, rho0, rho_dot0, window,
                             rel_tol=rel_tol, abs_tol=abs_tol)
    field = phase_field_numeric(solution, profile)
    return Construction(profile=profile, solution=solution,
                        scale=field.scale, field=field)
