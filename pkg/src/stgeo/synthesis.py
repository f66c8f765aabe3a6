"""Compile rotations into exchange pulse schedules.

Two families are supported:

* geometric gates: three square pulses ``J = 0, tan(gamma/2), 0`` that
  drive the dressed states around a closed loop with no dynamical phase,
  realizing a rotation about ``(0, sin theta, -cos theta)``;
* naive dynamical composites: x rotations (``J = 0``) and Hadamard-axis
  pi pulses (``J = h``) combined through an x-z-x Euler decomposition.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import SIGMA_X, SIGMA_Y, SIGMA_Z, axis_angle_unitary, su2_axis_angle
from .pulses import J_MAX, PulseSchedule, PulseSegment, segment_unitary

TWO_PI = 2.0 * math.pi
HADAMARD_DURATION = math.pi / math.sqrt(2.0)
_ANGLE_TOL = 1e-10


class UnrepresentableGateError(ValueError):
    """The requested rotation needs an exchange value outside ``[0, J_max]``."""


def reduce_angle(a: float) -> float:
    """Reduce to ``[0, 2 pi)``, snapping values within 1e-10 of 2 pi to 0."""
    r = math.fmod(a, TWO_PI)
    if r < 0:
        r += TWO_PI
    if TWO_PI - r < _ANGLE_TOL or r < _ANGLE_TOL:
        return 0.0
    return r


def reduce_symmetric(a: float) -> float:
    """Reduce to ``(-pi, pi]``."""
    r = reduce_angle(a)
    if r > math.pi + _ANGLE_TOL:
        r -= TWO_PI
    return r


def _wrap_theta(theta: float) -> float:
    t = reduce_symmetric(theta)
    # keep +pi rather than -pi so an axis along +z maps to theta = pi
    if abs(t + math.pi) < _ANGLE_TOL:
        t = math.pi
    return t


def winding_numbers(theta: float) -> tuple[int, int]:
    """Return ``(n1, n2)``: ``n1 = 1`` iff theta > pi/2, ``n2 = 1`` iff theta < -pi/2."""
    n1 = 1 if theta > math.pi / 2 + 1e-12 else 0
    n2 = 1 if theta < -math.pi / 2 - 1e-12 else 0
    return n1, n2


@dataclass(frozen=True)
class GeometricGateSpec:
    """Rotation by ``gamma`` about ``(0, sin theta, -cos theta)``."""

    theta: float
    gamma: float

    @property
    def n1(self) -> int:
        return winding_numbers(self.theta)[0]

    @property
    def n2(self) -> int:
        return winding_numbers(self.theta)[1]

    def normalized(self) -> "GeometricGateSpec":
        """Equivalent spec with ``gamma`` in ``[0, pi]`` and ``theta`` in ``[-pi, pi]``.

        Angles above pi are realized about the inverted axis; this changes
        the unitary by a global sign only.
        """
        gamma = reduce_angle(self.gamma)
        theta = self.theta
        if gamma > math.pi + _ANGLE_TOL:
            gamma = TWO_PI - gamma
            theta = theta + math.pi
        return GeometricGateSpec(_wrap_theta(theta), gamma)


@dataclass(frozen=True)
class CompositeSpec:
    """Angles of ``U(x, xi1) U(z, xi2) U(x, xi3)``; ``xi3`` is applied first."""

    xi1: float = 0.0
    xi2: float = 0.0
    xi3: float = 0.0

    @classmethod
    def z_rotation(cls, xi0: float) -> "CompositeSpec":
        return cls(0.0, xi0, 0.0)

    def reduced(self) -> "CompositeSpec":
        return CompositeSpec(reduce_angle(self.xi1), reduce_angle(self.xi2), reduce_angle(self.xi3))


@dataclass(frozen=True)
class DressedPair:
    psi_plus: np.ndarray
    psi_minus: np.ndarray


def geometric_schedule(spec: GeometricGateSpec, J_max: float = J_MAX) -> PulseSchedule:
    """Three-segment geometric gate for ``spec``.

    The outer segments have ``J = 0`` and lengths ``pi/2 - theta + 2 n1 pi``
    and ``pi/2 + theta + 2 n2 pi``; the middle segment has
    ``J = tan(gamma/2)`` and length ``pi cos(gamma/2)``.

    Raises:
        UnrepresentableGateError: if ``tan(gamma/2)`` exceeds ``J_max``
            (in particular ``gamma = pi``).
    """
    s = spec.normalized()
    half = s.gamma / 2.0
    if abs(math.cos(half)) < 1e-12 or math.tan(half) > J_max:
        raise UnrepresentableGateError(
            f"gamma={spec.gamma:.6g} needs J2=tan(gamma/2) beyond J_max={J_max:.4g}"
        )
    J2 = math.tan(half)
    n1, n2 = winding_numbers(s.theta)
    t_ab = math.pi / 2 - s.theta + 2 * n1 * math.pi
    t_bd = math.pi * math.cos(half)
    t_da = math.pi / 2 + s.theta + 2 * n2 * math.pi
    label = f"geo(theta={s.theta:.6g},gamma={s.gamma:.6g})"
    return PulseSchedule(
        (PulseSegment(0.0, max(t_ab, 0.0)), PulseSegment(J2, t_bd), PulseSegment(0.0, max(t_da, 0.0))),
        label=label,
    )


def three_segment_schedule(theta: float, J1: float, J2: float) -> PulseSchedule:
    """Geometric path with equal outer exchange ``J1`` and middle exchange ``J2``."""
    n1, n2 = winding_numbers(theta)
    r1 = math.hypot(J1, 1.0)
    r2 = math.hypot(J2, 1.0)
    return PulseSchedule((
        PulseSegment(J1, (math.pi / 2 - theta + 2 * n1 * math.pi) / r1),
        PulseSegment(J2, math.pi / r2),
        PulseSegment(J1, (math.pi / 2 + theta + 2 * n2 * math.pi) / r1),
    ))


def three_segment_matrix(theta: float, J1: float, J2: float) -> np.ndarray:
    """Closed-form evolution of :func:`three_segment_schedule` (outer J equal)."""
    a = math.hypot(J1, 1.0)
    b = math.hypot(J2, 1.0)
    den = a * a * b
    ct, st = math.cos(theta), math.sin(theta)
    return np.array([
        [(1j * (J1 - J2) * ct - a * (J1 * J2 + 1)) / den, (J2 - J1) * (a * st + 1j * J1 * ct) / den],
        [(J1 - J2) * (a * st - 1j * J1 * ct) / den, -(1j * (J1 - J2) * ct + a * (J1 * J2 + 1)) / den],
    ], dtype=complex)


def geometric_gate_matrix(theta: float, gamma: float) -> np.ndarray:
    """``-exp(-i gamma/2 (sin theta sigma_y - cos theta sigma_z))``."""
    return -axis_angle_unitary((0.0, math.sin(theta), -math.cos(theta)), gamma)


def winding_sign(spec: GeometricGateSpec) -> int:
    """Sign picked up by the extra 2 pi of x rotation when a winding is active.

    ``propagate_schedule(geometric_schedule(spec))`` equals
    ``winding_sign(spec) * geometric_gate_matrix(...)`` for a normalized spec.
    """
    s = spec.normalized()
    n1, n2 = winding_numbers(s.theta)
    return -1 if (n1 + n2) % 2 else 1


def _x_segment(angle: float) -> PulseSegment:
    return PulseSegment(0.0, angle)


def _hadamard_segment() -> PulseSegment:
    return PulseSegment(1.0, HADAMARD_DURATION)


def naive_composite_schedule(spec: CompositeSpec) -> PulseSchedule:
    """Five-pulse sequence ``x(xi1) H x(xi2) H x(xi3)`` with ``H = U(x+z, pi)``.

    Angles are reduced to ``[0, 2 pi)`` and zero-length x pulses are
    dropped, so a bare z rotation ``(0, xi0, 0)`` gives three segments.
    """
    s = spec.reduced()
    segs = []
    if s.xi3 > 0:
        segs.append(_x_segment(s.xi3))
    segs.append(_hadamard_segment())
    if s.xi2 > 0:
        segs.append(_x_segment(s.xi2))
    segs.append(_hadamard_segment())
    if s.xi1 > 0:
        segs.append(_x_segment(s.xi1))
    return PulseSchedule(tuple(segs), label=f"naive({s.xi1:.6g},{s.xi2:.6g},{s.xi3:.6g})")


def composite_matrix(spec: CompositeSpec) -> np.ndarray:
    """Ideal ``U(x, xi1) U(z, xi2) U(x, xi3)``."""
    return (
        axis_angle_unitary((1, 0, 0), spec.xi1)
        @ axis_angle_unitary((0, 0, 1), spec.xi2)
        @ axis_angle_unitary((1, 0, 0), spec.xi3)
    )


def dressed_states(theta: float) -> DressedPair:
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return DressedPair(
        np.array([c, -1j * s], dtype=complex),
        np.array([1j * s, -c], dtype=complex),
    )


def _segment_hamiltonian(J: float) -> np.ndarray:
    return 0.5 * SIGMA_X + 0.5 * J * SIGMA_Z


def verify_parallel_transport(sched: PulseSchedule, theta: float, samples: int = 200) -> float:
    """Largest ``|<psi(t)|H(t)|psi(t)>|`` along the schedule for both dressed states.

    Each segment is sampled at ``samples`` equally spaced points including
    both ends; the state entering a segment is the one leaving the previous
    segment.
    """
    pair = dressed_states(theta)
    worst = 0.0
    for psi0 in (pair.psi_plus, pair.psi_minus):
        psi = psi0.copy()
        for seg in sched.segments:
            if seg.duration <= 0:
                continue
            H = _segment_hamiltonian(seg.J)
            for t in np.linspace(0.0, seg.duration, samples):
                phi = segment_unitary(seg.J, t) @ psi
                worst = max(worst, abs(np.vdot(phi, H @ phi)))
            psi = segment_unitary(seg.J, seg.duration) @ psi
    return float(worst)


def cyclic_phase_check(spec: GeometricGateSpec) -> complex:
    """``<psi_+|U|psi_+>`` for the propagated geometric schedule of ``spec``."""
    from .pulses import propagate_schedule

    s = spec.normalized()
    u = propagate_schedule(geometric_schedule(s))
    psi = dressed_states(s.theta).psi_plus
    return complex(np.vdot(psi, u @ psi))


def expected_cyclic_phase(spec: GeometricGateSpec) -> complex:
    """Loop phase ``exp(i (gamma/2 + pi))`` times the winding sign."""
    s = spec.normalized()
    return winding_sign(s) * complex(np.exp(1j * (s.gamma / 2 + math.pi)))


# -- general rotations -------------------------------------------------------

_HAD = (SIGMA_X + SIGMA_Z) / math.sqrt(2.0)


def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles ``(phi, theta, lam)`` with ``u ~ Rz(phi) Ry(theta) Rz(lam)``, theta in [0, pi]."""
    v = np.asarray(u, dtype=complex)
    v = v / np.sqrt(np.linalg.det(v))
    theta = 2.0 * math.atan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[1, 0]) < 1e-12:
        plus, minus = 2.0 * np.angle(v[1, 1]), 0.0
        theta = 0.0
    elif abs(v[0, 0]) < 1e-12:
        plus, minus = 0.0, 2.0 * np.angle(v[1, 0])
        theta = math.pi
    else:
        plus, minus = 2.0 * np.angle(v[1, 1]), 2.0 * np.angle(v[1, 0])
    return float((plus + minus) / 2), float(theta), float((plus - minus) / 2)


def xzx_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Angles ``(xi1, xi2, xi3)`` with ``u ~ Rx(xi1) Rz(xi2) Rx(xi3)``, xi2 in [0, pi]."""
    phi, theta, lam = zyz_angles(_HAD @ np.asarray(u, dtype=complex) @ _HAD)
    return phi + math.pi / 2, theta, lam - math.pi / 2


def compile_naive(u: np.ndarray, label: str = "") -> PulseSchedule:
    """Naive dynamical schedule for an arbitrary single-qubit unitary.

    Identity gives an empty schedule, rotations about x a single ``J = 0``
    pulse, and everything else the x-z-x composite.
    """
    axis, angle = su2_axis_angle(u)
    if angle < _ANGLE_TOL:
        return PulseSchedule((), label=label)
    if abs(axis[1]) < 1e-12 and abs(axis[2]) < 1e-12:
        x_angle = reduce_angle(angle if axis[0] > 0 else -angle)
        return PulseSchedule((_x_segment(x_angle),), label=label)
    from .filterfn import quasistatic_sensitivity

    xi1, xi2, xi3 = xzx_angles(u)
    branches = (CompositeSpec(xi1, xi2, xi3), CompositeSpec(xi1 + math.pi, -xi2, xi3 + math.pi))
    # both Euler branches give the same gate; keep the less noise-sensitive one
    scheds = [naive_composite_schedule(b) for b in branches]
    sched = min(scheds, key=lambda s: round(quasistatic_sensitivity(s), 9))
    return PulseSchedule(sched.segments, label=label)


def _geometric_pieces(axis, angle: float) -> list[GeometricGateSpec]:
    """Specs for a rotation whose axis lies in the y-z plane; pi is split in two."""
    theta = math.atan2(axis[1], -axis[2])
    gamma = reduce_angle(angle)
    if gamma < _ANGLE_TOL:
        return []
    spec = GeometricGateSpec(theta, gamma).normalized()
    if math.tan(min(spec.gamma, math.pi - 1e-9) / 2) > J_MAX:
        # at or near pi the middle exchange is out of range: two half turns
        half = GeometricGateSpec(spec.theta, spec.gamma / 2)
        return [half, half]
    return [spec]


_YZ_SWAP = (SIGMA_Y + SIGMA_Z) / math.sqrt(2.0)


def _euler_candidates(u: np.ndarray):
    """Time-ordered ``(axis, angle)`` triples from z-y-z and y-z-y Euler forms.

    Each form also appears in its alternative branch
    ``(phi + pi, -theta, lam + pi)``.
    """
    y, z = (0, 1, 0), (0, 0, 1)
    for outer, inner, v in ((z, y, u), (y, z, _YZ_SWAP @ u @ _YZ_SWAP)):
        phi, theta, lam = zyz_angles(v)
        yield [(outer, lam), (inner, theta), (outer, phi)]
        yield [(outer, lam + math.pi), (inner, -theta), (outer, phi + math.pi)]


def _piece_options(axis, angle: float) -> list[list[GeometricGateSpec]]:
    """Alternative gate lists for one y-z plane rotation.

    Large angles can also be done as two half turns, about the same axis or
    about the opposite one.
    """
    pieces = _geometric_pieces(axis, angle)
    options = [pieces]
    if len(pieces) == 1 and pieces[0].gamma > math.pi / 2:
        half = GeometricGateSpec(pieces[0].theta, pieces[0].gamma / 2)
        options.append([half, half])
        pieces = [half, half]
    if len(pieces) == 2:
        flipped = GeometricGateSpec(pieces[0].theta + math.pi, math.pi - pieces[0].gamma)
        options.append([flipped, flipped])
    return options


def _specs_schedule(specs) -> PulseSchedule:
    return PulseSchedule(tuple(
        seg for p in specs for seg in geometric_schedule(p).segments if seg.duration > 0
    ))


def geometric_specs(u: np.ndarray) -> list[GeometricGateSpec]:
    """Geometric gates (in time order) whose product equals ``u`` up to phase.

    A rotation about an axis in the y-z plane needs a single gate (two for
    an angle of pi).  Any other rotation is built from three rotations about
    y and z.  Among the z-y-z and y-z-y Euler forms and their branches the
    one with the smallest quasi-static charge sensitivity wins, ties going
    to fewer gates and then shorter duration.
    """
    from .filterfn import quasistatic_sensitivity

    axis, angle = su2_axis_angle(u)
    if angle < _ANGLE_TOL:
        return []
    if abs(axis[0]) < 1e-12:
        return _geometric_pieces(axis, angle)
    best, best_key = None, None
    for triple in _euler_candidates(u):
        for combo in itertools.product(*(_piece_options(ax, a) for ax, a in triple)):
            specs = [p for part in combo for p in part]
            sched = _specs_schedule(specs)
            key = (round(quasistatic_sensitivity(sched), 9), len(specs), round(sched.duration, 9))
            if best_key is None or key < best_key:
                best, best_key = specs, key
    return best


def compile_geometric(u: np.ndarray, label: str = "") -> PulseSchedule:
    """Geometric schedule for an arbitrary single-qubit unitary.

    Rotations about x need no exchange at all and stay a single ``J = 0``
    pulse, as in :func:`compile_naive`.
    """
    axis, angle = su2_axis_angle(u)
    if angle >= _ANGLE_TOL and abs(axis[1]) < 1e-12 and abs(axis[2]) < 1e-12:
        x_angle = reduce_angle(angle if axis[0] > 0 else -angle)
        return PulseSchedule((_x_segment(x_angle),), label=label)
    segs = []
    for spec in geometric_specs(u):
        segs.extend(s for s in geometric_schedule(spec).segments if s.duration > 0)
    return PulseSchedule(tuple(segs), label=label)
