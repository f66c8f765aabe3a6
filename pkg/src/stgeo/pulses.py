"""Singlet-triplet control model and piecewise-constant propagators.

The qubit Hamiltonian is ``H = (h/2) sigma_x + (J/2) sigma_z`` with the
gradient fixed to ``h = 1``.  Charge noise enters multiplicatively,
``J -> J (1 + delta_eps)``.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .linalg import axis_angle_unitary

J_MAX = math.exp(5.0)


class ExchangeRangeError(ValueError):
    """Detuning or exchange value outside the physically allowed range."""


@dataclass(frozen=True)
class ExchangeModel:
    """Phenomenological exchange curve ``J(eps) = J0 exp(eps / eps0)``.

    ``epsilon`` arguments are in units of ``epsilon0``.  ``epsilon0`` itself
    (meV) is carried for reporting only.
    """

    J0: float = 1.0
    epsilon0: float = 0.272
    epsilon_min: float = -5.0
    epsilon_max: float = 5.0

    @property
    def J_max(self) -> float:
        return self.J0 * math.exp(self.epsilon_max)

    @property
    def J_min(self) -> float:
        return self.J0 * math.exp(self.epsilon_min)


def exchange_from_detuning(epsilon: float, model: ExchangeModel = ExchangeModel()) -> float:
    """Exchange strength for a detuning given in units of ``epsilon0``."""
    if epsilon < model.epsilon_min:
        raise ExchangeRangeError(
            f"detuning {epsilon} below epsilon_min={model.epsilon_min}"
        )
    if epsilon > model.epsilon_max:
        raise ExchangeRangeError(
            f"detuning {epsilon} above epsilon_max={model.epsilon_max}"
        )
    return model.J0 * math.exp(epsilon)


@dataclass(frozen=True)
class PulseSegment:
    """Square exchange pulse of height ``J`` (units of h) lasting ``duration`` (t0)."""

    J: float
    duration: float

    def __post_init__(self):
        if not (self.duration >= 0.0 and math.isfinite(self.duration)):
            raise ValueError(f"segment duration must be finite and >= 0, got {self.duration}")
        if not (0.0 <= self.J <= J_MAX * (1 + 1e-12)):
            raise ExchangeRangeError(f"J={self.J} outside [0, {J_MAX:.3f}]")

    @property
    def rate(self) -> float:
        """Rotation rate ``sqrt(J^2 + h^2)`` with ``h = 1``."""
        return math.hypot(self.J, 1.0)

    @property
    def angle(self) -> float:
        return self.duration * self.rate


@dataclass(frozen=True)
class PulseSchedule:
    """Ordered square pulses; the first segment is applied first."""

    segments: tuple[PulseSegment, ...] = ()
    label: str = ""
    h: float = field(default=1.0)

    def __post_init__(self):
        object.__setattr__(self, "segments", tuple(self.segments))
        if self.h != 1.0:
            raise ValueError("internal units require h = 1")

    @property
    def duration(self) -> float:
        return float(sum(s.duration for s in self.segments))

    def __len__(self) -> int:
        return len(self.segments)

    def __add__(self, other: "PulseSchedule") -> "PulseSchedule":
        label = "+".join(x for x in (self.label, other.label) if x)
        return PulseSchedule(self.segments + other.segments, label=label)

    def boundaries(self) -> np.ndarray:
        """Segment boundary times ``t_0 = 0, t_1, ..., t_n``."""
        return np.concatenate([[0.0], np.cumsum([s.duration for s in self.segments])])

    def exchange_at(self, t: float) -> float:
        """Exchange value at time ``t`` (right-continuous inside the schedule)."""
        edges = self.boundaries()
        if t < 0 or t > edges[-1] + 1e-12:
            raise ValueError(f"t={t} outside [0, {edges[-1]}]")
        k = int(np.searchsorted(edges, t, side="right")) - 1
        k = min(max(k, 0), len(self.segments) - 1)
        return self.segments[k].J

    def pulse_shape(self) -> tuple[np.ndarray, np.ndarray]:
        """Step series ``(t, J)`` suitable for plotting a square pulse train."""
        ts, js = [], []
        t = 0.0
        for seg in self.segments:
            ts.extend([t, t + seg.duration])
            js.extend([seg.J, seg.J])
            t += seg.duration
        return np.array(ts), np.array(js)

    def nonzero(self) -> "PulseSchedule":
        """Copy without zero-duration segments."""
        return PulseSchedule(tuple(s for s in self.segments if s.duration > 0), self.label)


class NoiseChannel(enum.Enum):
    """Pauli term that a fractional fluctuation multiplies."""

    SIGMA_Z = "sigma_z"
    SIGMA_X = "sigma_x"


def segment_unitary(J: float, duration: float, h: float = 1.0) -> np.ndarray:
    """``exp(-i t (h sigma_x + J sigma_z)/2)`` for a constant segment."""
    rate = math.hypot(J, h)
    if rate == 0.0:
        return np.eye(2, dtype=complex)
    return axis_angle_unitary((h, 0.0, J), duration * rate)


def propagate_segment(seg: PulseSegment) -> np.ndarray:
    """``R(J, phi)`` with ``phi = duration * sqrt(J^2 + 1)``."""
    return segment_unitary(seg.J, seg.duration)


def propagate_schedule(sched: PulseSchedule) -> np.ndarray:
    """Time-ordered product ``U_n ... U_2 U_1`` of the segment propagators.

    Raises:
        ValueError: For a schedule with no segments.
    """
    if len(sched.segments) == 0:
        raise ValueError("cannot propagate an empty schedule")
    u = np.eye(2, dtype=complex)
    for seg in sched.segments:
        u = propagate_segment(seg) @ u
    return u


def slice_schedule(sched: PulseSchedule, dt: float):
    """Split every segment into equal slices no wider than ``dt``.

    Returns arrays ``(J, width, t_mid)`` over all slices in time order.
    """
    js, widths, mids = [], [], []
    t = 0.0
    for seg in sched.segments:
        if seg.duration <= 0:
            continue
        n = max(1, int(math.ceil(seg.duration / dt - 1e-9)))
        w = seg.duration / n
        js.append(np.full(n, seg.J))
        widths.append(np.full(n, w))
        mids.append(t + (np.arange(n) + 0.5) * w)
        t += seg.duration
    if not js:
        return np.zeros(0), np.zeros(0), np.zeros(0)
    return np.concatenate(js), np.concatenate(widths), np.concatenate(mids)


def batch_segment_unitaries(hx, hz, widths) -> np.ndarray:
    """Closed-form ``exp(-i w (hx sx + hz sz)/2)`` for arrays of slices.

    Returns an array of shape ``broadcast(hx, hz, widths).shape + (2, 2)``.
    """
    hx, hz, widths = np.broadcast_arrays(
        np.asarray(hx, float), np.asarray(hz, float), np.asarray(widths, float)
    )
    rate = np.hypot(hx, hz)
    safe = np.where(rate > 0, rate, 1.0)
    nx = np.where(rate > 0, hx / safe, 0.0)
    nz = np.where(rate > 0, hz / safe, 0.0)
    half = 0.5 * rate * widths
    c = np.cos(half)
    s = np.sin(half)
    out = np.empty(hx.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c - 1j * s * nz
    out[..., 0, 1] = -1j * s * nx
    out[..., 1, 0] = -1j * s * nx
    out[..., 1, 1] = c + 1j * s * nz
    return out


def ordered_product(mats: np.ndarray) -> np.ndarray:
    """Time-ordered product ``M[..., n-1] ... M[..., 0]`` along axis ``-3``.

    Uses pairwise reduction so long products stay cheap and accurate.
    """
    mats = np.asarray(mats)
    if mats.shape[-3] == 0:
        eye = np.zeros(mats.shape[:-3] + (2, 2), dtype=complex)
        eye[..., 0, 0] = eye[..., 1, 1] = 1.0
        return eye
    while mats.shape[-3] > 1:
        n = mats.shape[-3]
        if n % 2:
            pad = np.zeros(mats.shape[:-3] + (1,) + mats.shape[-2:], dtype=mats.dtype)
            pad[..., 0, 0, 0] = pad[..., 0, 1, 1] = 1.0
            mats = np.concatenate([mats, pad], axis=-3)
        mats = mats[..., 1::2, :, :] @ mats[..., 0::2, :, :]
    return mats[..., 0, :, :]


def _noise_at(delta_eps, times: np.ndarray, total: float) -> np.ndarray:
    if np.isscalar(delta_eps):
        return np.full_like(times, float(delta_eps))
    # a sampled trace: anything with .samples / .dt, or a callable
    if callable(delta_eps):
        return np.asarray(delta_eps(times), dtype=float)
    samples = np.asarray(delta_eps.samples, dtype=float)
    step = float(delta_eps.dt)
    span = step * (len(samples) - 1)
    if span < total - 1e-9 * max(1.0, total):
        raise ValueError(
            f"noise trace covers {span:.6g} t0 but the schedule lasts {total:.6g} t0"
        )
    grid = step * np.arange(len(samples))
    return np.interp(times, grid, samples)


def propagate_schedule_noisy(
    sched: PulseSchedule,
    delta_eps=0.0,
    channel: NoiseChannel = NoiseChannel.SIGMA_Z,
    dt: float | None = None,
) -> np.ndarray:
    """Propagate with a fractional detuning fluctuation.

    Every segment is cut into slices of width at most ``dt``; inside each
    slice the noise value at the slice midpoint is held constant.  For the
    ``sigma_z`` channel the slice Hamiltonian is
    ``(1/2) sigma_x + (J (1 + delta_eps)/2) sigma_z``; the ``sigma_x`` channel
    perturbs the gradient instead, ``h -> h (1 + delta_eps)``.

    Args:
        sched: Schedule to propagate.
        delta_eps: Constant (quasi-static), a callable of time, or a trace
            object with ``samples`` and ``dt`` attributes.
        channel: Which Hamiltonian term the noise multiplies.
        dt: Maximum slice width; defaults to ``duration / 2000``.
    """
    total = sched.duration
    if total <= 0:
        raise ValueError("cannot propagate an empty schedule")
    if dt is None:
        dt = total / 2000.0
    if dt <= 0:
        raise ValueError(f"dt must be positive, got {dt}")
    if np.isscalar(delta_eps):
        # constant noise: one exact exponential per segment
        js = np.array([s.J for s in sched.segments if s.duration > 0])
        widths = np.array([s.duration for s in sched.segments if s.duration > 0])
        eps = np.full_like(js, float(delta_eps))
    else:
        js, widths, mids = slice_schedule(sched, dt)
        eps = _noise_at(delta_eps, mids, total)
    if channel is NoiseChannel.SIGMA_Z:
        hx, hz = np.ones_like(js), js * (1.0 + eps)
    else:
        hx, hz = 1.0 + eps, js
    return ordered_product(batch_segment_unitaries(hx, hz, widths))


def concatenate(schedules: Sequence[PulseSchedule], label: str = "") -> PulseSchedule:
    segs = tuple(seg for s in schedules for seg in s.segments)
    return PulseSchedule(segs, label=label)
