"""1/f^alpha charge noise: spectrum, amplitude calibration, time traces.

All frequencies are in internal units ``omega * t0`` (``t0 = 1/h``), so
the spectrum ``S(omega) = A / omega**alpha`` is dimensionless and the
variance of the fractional detuning noise is ``(1/pi) * int S d omega``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import average_gate_fidelity
from .pulses import NoiseChannel, PulseSchedule, propagate_schedule_noisy

DEFAULT_COMPONENTS = 200

# Effective coupling of the fractional noise, J -> J (1 + lambda * delta_eps),
# used by the spectral pipelines (filter functions, randomized benchmarking).
# Fixed once so that the naive y(pi/4) gate has infidelity 2.6e-4 at
# A_J t0 = 1e-4, alpha = 1, 50 kHz - 1 MHz; see README.
CHARGE_SENSITIVITY = 1.57559


def t0_seconds(h_ghz: float = 1.0) -> float:
    """Time unit ``t0 = 1/h`` for ``h/(2 pi) = h_ghz`` GHz."""
    return 1.0 / (2.0 * math.pi * h_ghz * 1e9)


@dataclass(frozen=True)
class NoiseSpectrum:
    """``S(omega) = amplitude / omega**alpha`` on ``[omega_ir, omega_uv]``.

    ``amplitude`` is ``A_J t0`` and both cutoffs are ``omega * t0``.
    """

    amplitude: float
    alpha: float = 1.0
    omega_ir: float = 2 * math.pi * 50e3 * t0_seconds()
    omega_uv: float = 2 * math.pi * 1e6 * t0_seconds()

    def __post_init__(self):
        problems = self.problems()
        if problems:
            raise ValueError("; ".join(problems))

    def problems(self) -> list[str]:
        out = []
        if not (0 < self.omega_ir < self.omega_uv):
            out.append(
                f"cutoffs must satisfy 0 < omega_ir < omega_uv "
                f"(got omega_ir={self.omega_ir:.6g}, omega_uv={self.omega_uv:.6g})"
            )
        if self.amplitude < 0:
            out.append(f"amplitude must be >= 0, got {self.amplitude}")
        if self.alpha < 0:
            out.append(f"alpha must be >= 0, got {self.alpha}")
        return out

    @classmethod
    def from_hz(cls, amplitude, alpha=1.0, f_ir=50e3, f_uv=1e6, h_ghz=1.0):
        """Build from cutoff frequencies in Hz (converted as ``2 pi f t0``)."""
        t0 = t0_seconds(h_ghz)
        return cls(amplitude, alpha, 2 * math.pi * f_ir * t0, 2 * math.pi * f_uv * t0)

    def with_amplitude(self, amplitude: float) -> "NoiseSpectrum":
        return NoiseSpectrum(amplitude, self.alpha, self.omega_ir, self.omega_uv)

    def with_alpha(self, alpha: float) -> "NoiseSpectrum":
        return NoiseSpectrum(self.amplitude, alpha, self.omega_ir, self.omega_uv)

    def band_integral(self) -> float:
        """``int_{ir}^{uv} S(omega) d omega`` in closed form."""
        return self.amplitude * _power_integral(self.alpha, self.omega_ir, self.omega_uv)

    @property
    def variance(self) -> float:
        """Variance of the fractional noise, ``(1/pi) int S d omega``."""
        return self.band_integral() / math.pi


def _power_integral(alpha: float, a: float, b: float) -> float:
    """``int_a^b omega**(-alpha) d omega``."""
    if abs(alpha - 1.0) < 1e-12:
        return math.log(b / a)
    p = 1.0 - alpha
    return (b ** p - a ** p) / p


def psd(omega, spectrum: NoiseSpectrum):
    """Spectral density at ``omega`` (internal units); zero outside the band.

    Raises:
        ValueError: for non-positive frequencies.
    """
    w = np.asarray(omega, dtype=float)
    if np.any(w <= 0):
        raise ValueError("psd is defined for omega > 0 only")
    inside = (w >= spectrum.omega_ir) & (w <= spectrum.omega_uv)
    out = np.where(inside, spectrum.amplitude / np.where(inside, w, 1.0) ** spectrum.alpha, 0.0)
    return float(out) if np.ndim(out) == 0 else out


def calibrate_amplitude(sigma_ratio: float, alpha: float, omega_ir: float, omega_uv: float) -> float:
    """Amplitude ``A_J t0`` whose band integral equals ``pi * sigma_ratio**2``.

    Only the ratio of the cutoffs matters for ``alpha = 1``; otherwise the
    cutoffs must be given in internal units.
    """
    if sigma_ratio <= 0:
        raise ValueError(f"sigma_ratio must be positive, got {sigma_ratio}")
    if not (0 < omega_ir < omega_uv):
        raise ValueError(
            f"cutoffs must satisfy 0 < omega_ir < omega_uv (got {omega_ir}, {omega_uv})"
        )
    return math.pi * sigma_ratio ** 2 / _power_integral(alpha, omega_ir, omega_uv)


def split_seed(master: int, k: int) -> int:
    """Child seed ``master XOR k`` used for independent realizations."""
    return int(master) ^ int(k)


@dataclass(frozen=True)
class NoiseTrace:
    """Uniformly sampled fractional detuning ``delta_eps(k * dt)``."""

    dt: float
    samples: np.ndarray
    seed: int

    @property
    def duration(self) -> float:
        return self.dt * (len(self.samples) - 1)

    def __call__(self, t):
        grid = self.dt * np.arange(len(self.samples))
        return np.interp(t, grid, self.samples)


def spectral_components(spectrum: NoiseSpectrum, n_components: int = DEFAULT_COMPONENTS):
    """Log-spaced frequencies and cosine amplitudes ``sqrt(2 S dw / pi)``.

    The band is split into ``n_components`` log-uniform bins; each bin is
    represented by its geometric centre and carries the exact band integral
    of ``S`` over the bin, so the total variance is reproduced exactly.
    """
    edges = np.geomspace(spectrum.omega_ir, spectrum.omega_uv, n_components + 1)
    centres = np.sqrt(edges[:-1] * edges[1:])
    power = np.array([
        spectrum.amplitude * _power_integral(spectrum.alpha, lo, hi)
        for lo, hi in zip(edges[:-1], edges[1:])
    ])
    return centres, np.sqrt(2.0 * power / math.pi)


def trace_values(times, spectrum: NoiseSpectrum, phases: np.ndarray,
                 n_components: int = DEFAULT_COMPONENTS) -> np.ndarray:
    """Evaluate ``sum_k a_k cos(w_k t + phi_k)``.

    ``phases`` may carry leading batch dimensions, ``(..., n_components)``;
    ``times`` then broadcasts as ``(..., n_times)``.
    """
    omegas, amps = spectral_components(spectrum, n_components)
    phases = np.asarray(phases, dtype=float)
    times = np.asarray(times, dtype=float)
    cos_phi = np.cos(phases) * amps
    sin_phi = np.sin(phases) * amps
    wt = times[..., :, None] * omegas
    # cos(wt + phi) = cos(wt) cos(phi) - sin(wt) sin(phi)
    return (np.cos(wt) @ cos_phi[..., :, None] - np.sin(wt) @ sin_phi[..., :, None])[..., 0]


def random_phases(rng: np.random.Generator, n_components: int = DEFAULT_COMPONENTS) -> np.ndarray:
    return rng.uniform(0.0, 2.0 * math.pi, size=n_components)


def sample_trace(spectrum: NoiseSpectrum, total_time: float, dt: float, seed: int,
                 n_components: int = DEFAULT_COMPONENTS) -> NoiseTrace:
    """Random-phase sum-of-cosines realization of the spectrum.

    The trace covers ``[0, total_time]`` (one extra sample past the end if
    ``dt`` does not divide it) and is fully determined by ``seed``.
    """
    if total_time <= 0 or dt <= 0:
        raise ValueError("total_time and dt must be positive")
    n = int(math.ceil(total_time / dt - 1e-9)) + 1
    times = dt * np.arange(n)
    rng = np.random.default_rng(seed)
    phases = random_phases(rng, n_components)
    if spectrum.amplitude == 0:
        return NoiseTrace(dt, np.zeros(n), seed)
    return NoiseTrace(dt, trace_values(times, spectrum, phases, n_components), seed)


def quasistatic_sweep(ideal: np.ndarray, sched: PulseSchedule, delta_eps_grid=None,
                      channel: NoiseChannel = NoiseChannel.SIGMA_Z):
    """Average gate fidelity under constant fractional noise ``delta_eps``.

    Returns a list of ``(delta_eps, fidelity)`` pairs.
    """
    if delta_eps_grid is None:
        delta_eps_grid = np.linspace(-0.1, 0.1, 41)
    return [
        (float(e), average_gate_fidelity(propagate_schedule_noisy(sched, float(e), channel), ideal))
        for e in delta_eps_grid
    ]
