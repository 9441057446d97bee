"""Time-dependent oscillator frequency profiles.

The driving frequency enters everything downstream only through the map
t -> Omega(t), which sets the harmonic potential V(x,t) = Omega^2(t) x^2/2
and the coefficient of the auxiliary (Ermakov) equation.  The family of
interest is the rational profile

    Omega(t) = 1 / (a + b t),      a > 0,  b >= 0,

whose auxiliary equation has two distinct closed-form regimes: subcritical
(0 <= b < 2) and critical (b = 2).  For b > 2 the subcritical closed form
turns complex, so those slopes are rejected outright.  Arbitrary profiles
are supported through plain callables or tabulated samples.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

__all__ = [
    "Regime",
    "RationalFrequency",
    "FrequencyProfile",
    "classify_rational",
    "CRITICAL_SLOPE",
    "CRITICAL_SLOPE_TOL",
]

# The two branches use different closed forms; classification must never
# silently mix them, hence an explicit absolute tolerance on |b - 2|.
CRITICAL_SLOPE = 2.0
CRITICAL_SLOPE_TOL = 1e-12


class Regime(enum.Enum):
    """Regime of the rational frequency family."""

    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    UNSUPPORTED = "unsupported"


def classify_rational(b: float) -> Regime:
    """Classify the slope b of Omega(t)=1/(a+bt).

    b in [0, 2) is subcritical (b=0 is the constant-frequency limit),
    b = 2 within 1e-12 is critical, and b > 2 is unsupported.
    """
    if not np.isfinite(b) or b < 0:
        raise ValueError(f"slope must be finite and >= 0, got {b}")
    if abs(b - CRITICAL_SLOPE) <= CRITICAL_SLOPE_TOL:
        return Regime.CRITICAL
    if b < CRITICAL_SLOPE:
        return Regime.SUBCRITICAL
    return Regime.UNSUPPORTED


@dataclass(frozen=True)
class RationalFrequency:
    """Rational profile Omega(t) = 1/(a + b t) with a > 0, b >= 0."""

    a: float
    b: float

    def __post_init__(self):
        if not (np.isfinite(self.a) and self.a > 0):
            raise ValueError(f"require a > 0, got a={self.a}")
        if not (np.isfinite(self.b) and self.b >= 0):
            raise ValueError(f"require b >= 0, got b={self.b}")

    @property
    def regime(self) -> Regime:
        return classify_rational(self.b)

    def omega(self, t):
        """Evaluate Omega(t); raises if the denominator a + b t is not positive."""
        t = np.asarray(t, dtype=float)
        denom = self.a + self.b * t
        if np.any(denom <= 0):
            raise ValueError(
                f"Omega undefined: a + b*t <= 0 for a={self.a}, b={self.b}"
            )
        return 1.0 / denom

    __call__ = omega


@dataclass(frozen=True)
class FrequencyProfile:
    """Wraps an arbitrary evaluator t -> Omega(t) >= 0.

    Immutable after construction; safe to share across threads.  The
    evaluator must accept scalars and numpy arrays and be finite on the
    time window it will be used on.
    """

    evaluator: Callable
    label: str = field(default="custom", compare=False)

    def omega(self, t):
        t = np.asarray(t, dtype=float)
        value = np.asarray(self.evaluator(t), dtype=float)
        if not np.all(np.isfinite(value)):
            raise ValueError(f"frequency profile '{self.label}' not finite at t={t}")
        return value

    __call__ = omega

    @classmethod
    def constant(cls, value: float) -> "FrequencyProfile":
        if not (np.isfinite(value) and value >= 0):
            raise ValueError(f"constant frequency must be >= 0, got {value}")
        return cls(lambda t: np.full_like(np.asarray(t, dtype=float), value),
                   label=f"constant({value})")

    @classmethod
    def rational(cls, a: float, b: float) -> "FrequencyProfile":
        return cls(RationalFrequency(a, b), label=f"rational(a={a}, b={b})")

    @classmethod
    def from_table(cls, t_samples, omega_samples) -> "FrequencyProfile":
        """Piecewise-linear profile through (t, Omega) samples.

        Samples must be strictly increasing in t; evaluation clamps to the
        end values outside the tabulated range.
        """
        ts = np.asarray(t_samples, dtype=float)
        om = np.asarray(omega_samples, dtype=float)
        if ts.ndim != 1 or ts.shape != om.shape or ts.size < 2:
            raise ValueError("table needs two 1-d columns of equal length >= 2")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("table times must be strictly increasing")
        if not (np.all(np.isfinite(ts)) and np.all(np.isfinite(om))):
            raise ValueError("table entries must be finite")
        if np.any(om < 0):
            raise ValueError("tabulated frequencies must be >= 0")
        return cls(lambda t: np.interp(t, ts, om), label="table")
