"""Split-step spectral propagator: the brute-force oracle.

Propagates i psi_t = -psi_xx/(2m) + V(x,t) psi for the harmonic potential
V = Omega^2(t) x^2/2 by Strang splitting,

    psi  <-  e^(-i V dt/2) F^-1 e^(-i k^2 dt/2) F e^(-i V dt/2) psi,

with the potential evaluated at the midpoint of each step.  The scheme is
second order in dt and exactly unitary in the discrete norm, so agreement
with the analytically constructed wavefunction is an independent check of
the whole construction, not a restatement of it.

The discrete Fourier transform uses the standard wavenumber layout
k in [-pi/h, pi/h); no transform convention leaks into the API.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .frequency import FrequencyProfile
from .madelung import SpatialGrid, WavefunctionGrid

__all__ = ["PropagatorConfig", "propagate", "fidelity"]

# dt * max|V| beyond this risks phase wrapping within a single step.
_PHASE_WRAP_LIMIT = 0.5

# Momentum-space headroom: the grid cutoff pi/h must exceed this multiple
# of the wavepacket's momentum width.
_MOMENTUM_MARGIN = 6.0

_NORM_DRIFT_LIMIT = 1e-10


@dataclass(frozen=True)
class PropagatorConfig:
    """Grid, step size, and potential for a split-step run.

    The grid size must be a power of two; dt may be negative for
    backward propagation.
    """

    grid: SpatialGrid
    dt: float
    profile: FrequencyProfile
    scheme: str = "strang"

    def __post_init__(self):
        if not self.grid.is_power_of_two:
            raise ValueError(f"grid size must be a power of two, got n={self.grid.n}")
        if not (np.isfinite(self.dt) and self.dt != 0):
            raise ValueError(f"dt must be finite and nonzero, got {self.dt}")
        if self.scheme != "strang":
            raise ValueError(f"unknown splitting scheme '{self.scheme}'")


def _momentum_width(psi: np.ndarray, k: np.ndarray) -> float:
    spectrum = np.abs(np.fft.fft(psi)) ** 2
    total = spectrum.sum()
    if total == 0:
        return 0.0
    return float(np.sqrt((k * k * spectrum).sum() / total))


def propagate(psi0: WavefunctionGrid, config: PropagatorConfig,
              t_end: float, sample_times=None) -> WavefunctionGrid:
    """Propagate a single-time slice to t_end, optionally sampling on the way.

    The number of steps is (t_end - start)/dt rounded to the nearest
    integer, which must reproduce the span to within 1e-9; sample times
    must fall on step boundaries.  Returns a WavefunctionGrid holding the
    requested sample times, or the single final slice if none are given.
    """
    if psi0.times.size != 1:
        raise ValueError("psi0 must be a single-time slice")
    if psi0.grid != config.grid:
        raise ValueError("psi0 and config use different grids")
    grid = config.grid
    x = grid.x
    h = grid.h
    t0 = float(psi0.times[0])
    span = t_end - t0
    if span == 0:
        raise ValueError("t_end coincides with the start time")
    if np.sign(span) != np.sign(config.dt):
        raise ValueError(f"dt={config.dt} points away from t_end={t_end}")

    n_steps = int(round(span / config.dt))
    if n_steps < 1 or abs(n_steps * config.dt - span) > 1e-9 * max(abs(span), 1.0):
        raise ValueError(
            f"(t_end - t0)={span:g} is not an integer multiple of dt={config.dt:g}"
        )
    dt = span / n_steps

    psi = psi0.psi[0].astype(complex)
    norm0 = np.trapezoid(np.abs(psi) ** 2, x)
    if abs(norm0 - 1.0) > 1e-8:
        raise ValueError(f"psi0 is not normalized: int |psi|^2 dx = {norm0!r}")

    k = 2.0 * np.pi * np.fft.fftfreq(grid.n, d=h)
    sigma_k = _momentum_width(psi, k)
    cutoff = np.pi / h
    if cutoff < _MOMENTUM_MARGIN * sigma_k:
        raise ValueError(
            f"momentum cutoff pi/h = {cutoff:.3g} is below "
            f"{_MOMENTUM_MARGIN:g} x packet width {sigma_k:.3g}; refine the grid"
        )

    step_of_sample = {}
    if sample_times is not None:
        for ts in np.atleast_1d(np.asarray(sample_times, dtype=float)):
            j = int(round((ts - t0) / dt))
            if not (1 <= j <= n_steps) or abs(t0 + j * dt - ts) > 1e-9:
                raise ValueError(f"sample time {ts} is not on a step boundary")
            step_of_sample[j] = ts

    x2 = x * x
    exp_kinetic = np.exp(-0.5j * k * k * dt)
    l2_0 = float(np.linalg.norm(psi))

    out_times, out_psi = [], []
    for step in range(1, n_steps + 1):
        t_mid = t0 + (step - 0.5) * dt
        coeff = 0.5 * float(config.profile.omega(t_mid)) ** 2
        v_max = coeff * max(grid.x_min**2, grid.x_max**2)
        if abs(dt) * v_max >= _PHASE_WRAP_LIMIT:
            raise ValueError(
                f"dt * max|V| = {abs(dt) * v_max:.3g} >= {_PHASE_WRAP_LIMIT} "
                f"at t={t_mid:.6g}; shrink dt or the domain"
            )
        half_v = np.exp((-0.5j * dt * coeff) * x2)
        psi = half_v * np.fft.ifft(exp_kinetic * np.fft.fft(half_v * psi))
        if step in step_of_sample:
            out_times.append(step_of_sample[step])
            out_psi.append(psi.copy())

    drift = abs(float(np.linalg.norm(psi)) - l2_0) / l2_0
    if drift > _NORM_DRIFT_LIMIT:
        raise RuntimeError(f"propagation lost unitarity: norm drift {drift:.3e}")

    if sample_times is None:
        return WavefunctionGrid(grid, np.array([t_end]), psi[None, :])
    return WavefunctionGrid(grid, np.array(out_times), np.array(out_psi))


def fidelity(psi_a: WavefunctionGrid, psi_b: WavefunctionGrid):
    """|int psi_a* psi_b dx| / (||psi_a|| ||psi_b||), in [0, 1].

    Insensitive to global phase.  For multi-time grids with matching
    times, returns one value per time.
    """
    if psi_a.grid != psi_b.grid:
        raise ValueError("fidelity requires a common grid")
    if psi_a.psi.shape != psi_b.psi.shape:
        raise ValueError("fidelity requires matching time samples")
    x = psi_a.grid.x
    overlap = np.abs(np.trapezoid(np.conj(psi_a.psi) * psi_b.psi, x, axis=1))
    norms = np.sqrt(psi_a.norms() * psi_b.norms())
    values = overlap / norms
    return float(values[0]) if values.size == 1 else values
