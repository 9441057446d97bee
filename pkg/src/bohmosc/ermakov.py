"""Solutions of the auxiliary Ermakov equation and their log-scale fields.

The whole construction hinges on one nonlinear ODE for the scale function
rho(t) > 0,

    rho'' + Omega^2(t) rho = 1/rho^3,

normalized so that rho(0) = 1.  For the rational family Omega = 1/(a+bt)
there are two closed forms:

  subcritical, 0 <= b < 2 (a forced to sqrt(1-b^2/4) by rho(0)=1):
      rho(t) = C sqrt(a + b t),   C = (1 - b^2/4)^(-1/4)
  critical, b = 2 (a forced to 1):
      rho(t) = sqrt(1+2t) sqrt(1 + ln^2(1+2t)/4)

Everything downstream consumes rho through nu = ln(rho) and its first two
derivatives, bundled here as a LogScale.  nu_ddot is always reconstructed
through the ODE itself (rho'' = 1/rho^3 - Omega^2 rho) rather than by
numerical differentiation, which would amplify interpolation noise.

For arbitrary profiles an adaptive embedded Runge-Kutta 4(5) integration
with dense output provides rho, rho', and the accumulated phase integral
-int dt/(2 rho^2) on a requested window.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np
from scipy.integrate import solve_ivp
from scipy.interpolate import BPoly

from .frequency import FrequencyProfile

__all__ = [
    "ErmakovSolution",
    "LogScale",
    "ClosedFormSubcritical",
    "ClosedFormCritical",
    "Numeric",
    "subcritical_parameters",
    "closed_form_subcritical",
    "closed_form_critical",
    "subcritical_solution",
    "critical_solution",
    "solve_numeric",
    "ermakov_residual",
    "log_scale",
    "RHO_FLOOR",
]

# Below this the configuration is treated as singular and integration aborts.
RHO_FLOOR = 1e-8

# C = (1-b^2/4)^(-1/4) diverges as b -> 2; refuse the subcritical closed form
# once 1-b^2/4 is at rounding level and point callers at the critical branch.
_NEAR_CRITICAL_MARGIN = 1e-14

# Dense-output samples carry local error ~rel_tol; differentiating the
# rebuilt interpolant twice amplifies that error by the squared node
# spacing, so the sampled residual self-check can only enforce a multiple
# of the requested tolerance (measured amplification is ~1e3..1e4).
_RESIDUAL_CHECK_AMPLIFICATION = 1e5

# Cap on node spacing when rebuilding the dense interpolant.
_NODE_SPACING_CAP = 0.05


@dataclass(frozen=True)
class ClosedFormSubcritical:
    a: float
    b: float
    C: float


@dataclass(frozen=True)
class ClosedFormCritical:
    pass


@dataclass(frozen=True)
class Numeric:
    rel_tol: float
    abs_tol: float


SolutionSource = Union[ClosedFormSubcritical, ClosedFormCritical, Numeric]


@dataclass(frozen=True)
class ErmakovSolution:
    """A positive solution rho(t) of the Ermakov equation.

    rho_ddot is an independent second derivative (analytic for closed
    forms, the twice-differentiated dense interpolant for numeric
    solutions) so that ermakov_residual is a genuine consistency check
    and not a tautology.  mu is the accumulated phase quadrature
    -int_0^t ds/(2 rho^2), carried only by numeric solutions; closed-form
    antiderivatives live in the madelung module.

    Immutable value object; evaluation is reentrant and thread-safe.
    """

    rho: Callable
    rho_dot: Callable
    rho_ddot: Callable
    source: SolutionSource
    window: tuple
    mu: Optional[Callable] = None


@dataclass(frozen=True)
class LogScale:
    """nu = ln(rho) and its derivatives nu' = rho'/rho, nu'' = (rho rho'' - rho'^2)/rho^2."""

    nu: Callable
    nu_dot: Callable
    nu_ddot: Callable


def subcritical_parameters(b: float) -> tuple:
    """Return (a, C) for the subcritical closed form, with a = sqrt(1-b^2/4).

    The offset a is not free: rho(0) = C sqrt(a) = 1 forces it.
    """
    if not np.isfinite(b) or b < 0:
        raise ValueError(f"slope must be finite and >= 0, got {b}")
    disc = 1.0 - b * b / 4.0
    if disc < _NEAR_CRITICAL_MARGIN:
        raise ValueError(
            f"b={b} is at or beyond the critical slope 2; "
            "use the critical closed form instead"
        )
    return float(np.sqrt(disc)), float(disc ** -0.25)


def closed_form_subcritical(b: float, t):
    """rho(t) = C sqrt(a+bt) on the subcritical branch; rho(0) = 1 exactly."""
    a, C = subcritical_parameters(b)
    t = np.asarray(t, dtype=float)
    arg = a + b * t
    if np.any(arg <= 0):
        raise ValueError(f"a + b*t must stay positive (a={a}, b={b})")
    return C * np.sqrt(arg)


def _subcritical_rho_dot(b: float, t):
    a, C = subcritical_parameters(b)
    t = np.asarray(t, dtype=float)
    return 0.5 * C * b / np.sqrt(a + b * t)


def _subcritical_rho_ddot(b: float, t):
    a, C = subcritical_parameters(b)
    t = np.asarray(t, dtype=float)
    return -0.25 * C * b * b * (a + b * t) ** -1.5


def closed_form_critical(t):
    """rho(t) = sqrt(1+2t) sqrt(1 + ln^2(1+2t)/4) for the critical slope b=2."""
    t = np.asarray(t, dtype=float)
    u = 1.0 + 2.0 * t
    if np.any(u <= 0):
        raise ValueError("critical closed form requires 1 + 2t > 0")
    ell = np.log(u)
    return np.sqrt(u) * np.sqrt(1.0 + 0.25 * ell * ell)


def _critical_rho_dot(t):
    # From d(rho^2)/dt = 2 + L + L^2/2 with L = ln(1+2t).
    t = np.asarray(t, dtype=float)
    ell = np.log(1.0 + 2.0 * t)
    g = 1.0 + 0.5 * ell + 0.25 * ell * ell
    return g / closed_form_critical(t)


def _critical_rho_ddot(t):
    t = np.asarray(t, dtype=float)
    u = 1.0 + 2.0 * t
    ell = np.log(u)
    g = 1.0 + 0.5 * ell + 0.25 * ell * ell
    rho = closed_form_critical(t)
    return (1.0 + ell) / (u * rho) - g * g / rho**3


def subcritical_solution(b: float, window: tuple = (0.0, np.inf)) -> ErmakovSolution:
    """Closed-form subcritical solution as an ErmakovSolution value object."""
    a, C = subcritical_parameters(b)
    return ErmakovSolution(
        rho=lambda t: closed_form_subcritical(b, t),
        rho_dot=lambda t: _subcritical_rho_dot(b, t),
        rho_ddot=lambda t: _subcritical_rho_ddot(b, t),
        source=ClosedFormSubcritical(a=a, b=b, C=C),
        window=window,
    )


def critical_solution(window: tuple = (0.0, np.inf)) -> ErmakovSolution:
    """Closed-form critical solution as an ErmakovSolution value object."""
    return ErmakovSolution(
        rho=closed_form_critical,
        rho_dot=_critical_rho_dot,
        rho_ddot=_critical_rho_ddot,
        source=ClosedFormCritical(),
        window=window,
    )


def solve_numeric(
    profile: FrequencyProfile,
    rho0: float,
    rho_dot0: float,
    window: tuple,
    rel_tol: float = 1e-10,
    abs_tol: float = 1e-12,
) -> ErmakovSolution:
    """Integrate the Ermakov equation with an adaptive RK4(5) scheme.

    Returns a dense solution: the accepted solver steps (subdivided to at
    most 0.05 apart) become interpolation nodes, and the solution is
    rebuilt as a quintic Hermite interpolant from (rho, rho', rho'') per
    node, with rho'' supplied by the ODE.  The phase quadrature
    mu(t) = -int_0^t ds/(2 rho^2) rides along as a third state component,
    with mu(window start) = 0.

    Raises RuntimeError if rho falls below RHO_FLOOR (a singular or
    invalid configuration) or if the returned interpolant fails a sampled
    residual self-check at 1e5*(rel_tol + abs_tol).  A bound of order
    rel_tol itself is unreachable: the node data carry local error
    ~rel_tol, and differentiating the interpolant twice amplifies that
    error by the squared node spacing.
    """
    t0, t1 = float(window[0]), float(window[1])
    if not (np.isfinite(rho0) and rho0 > 0):
        raise ValueError(f"rho0 must be positive, got {rho0}")
    if not (t1 > t0):
        raise ValueError(f"window must have positive length, got {window}")
    if not (rel_tol > 0 and abs_tol > 0):
        raise ValueError("tolerances must be positive")

    def rhs(t, y):
        rho = y[0]
        inv2 = 1.0 / (rho * rho)
        return (y[1], inv2 * inv2 * rho - profile.omega(t) ** 2 * rho, -0.5 * inv2)

    def floor_event(t, y):
        return y[0] - RHO_FLOOR

    floor_event.terminal = True
    floor_event.direction = -1

    result = solve_ivp(
        rhs,
        (t0, t1),
        (float(rho0), float(rho_dot0), 0.0),
        method="RK45",
        rtol=rel_tol,
        atol=abs_tol,
        dense_output=True,
        events=floor_event,
    )
    if result.status == 1:
        t_hit = result.t_events[0][0]
        raise RuntimeError(
            f"Ermakov integration failed: rho reached the floor {RHO_FLOOR:g} "
            f"at t={t_hit:.6g} (singular or invalid configuration)"
        )
    if not result.success:
        raise RuntimeError(f"Ermakov integration failed: {result.message}")

    pieces = [np.array([result.t[0]])]
    for lo, hi in zip(result.t[:-1], result.t[1:]):
        splits = max(1, int(np.ceil((hi - lo) / _NODE_SPACING_CAP)))
        pieces.append(np.linspace(lo, hi, splits + 1)[1:])
    nodes = np.concatenate(pieces)
    rho_n, rho_dot_n, mu_n = result.sol(nodes)
    rho_ddot_n = rho_n**-3 - profile.omega(nodes) ** 2 * rho_n
    rho_bp = BPoly.from_derivatives(
        nodes, np.stack([rho_n, rho_dot_n, rho_ddot_n], axis=1)
    )
    mu_bp = BPoly.from_derivatives(
        nodes, np.stack([mu_n, -0.5 / rho_n**2, rho_dot_n / rho_n**3], axis=1)
    )

    solution = ErmakovSolution(
        rho=rho_bp,
        rho_dot=rho_bp.derivative(),
        rho_ddot=rho_bp.derivative(2),
        source=Numeric(rel_tol=rel_tol, abs_tol=abs_tol),
        window=(t0, t1),
        mu=mu_bp,
    )

    probes = t0 + (t1 - t0) * (np.arange(512) + 0.5) / 512
    residual = np.max(np.abs(ermakov_residual(solution, profile, probes)))
    tolerance = _RESIDUAL_CHECK_AMPLIFICATION * (rel_tol + abs_tol)
    if residual > tolerance:
        raise RuntimeError(
            f"dense interpolant failed the residual self-check: "
            f"{residual:.3e} > {tolerance:.3e}"
        )
    return solution


def ermakov_residual(solution: ErmakovSolution, profile: FrequencyProfile, t):
    """rho'' + Omega^2 rho - 1/rho^3, with rho'' independent of the ODE.

    For closed forms rho'' is analytic; for numeric solutions it is the
    second derivative of the dense interpolant.
    """
    t = np.asarray(t, dtype=float)
    rho = solution.rho(t)
    return solution.rho_ddot(t) + profile.omega(t) ** 2 * rho - rho**-3


def log_scale(solution: ErmakovSolution, profile: FrequencyProfile) -> LogScale:
    """Build nu = ln(rho) and derivatives; nu'' is reconstructed via the ODE."""

    def nu(t):
        return np.log(solution.rho(t))

    def nu_dot(t):
        return solution.rho_dot(t) / solution.rho(t)

    def nu_ddot(t):
        rho = solution.rho(t)
        rho_dot = solution.rho_dot(t)
        rho_ddot = rho**-3 - profile.omega(t) ** 2 * rho
        return (rho * rho_ddot - rho_dot * rho_dot) / (rho * rho)

    return LogScale(nu=nu, nu_dot=nu_dot, nu_ddot=nu_ddot)
