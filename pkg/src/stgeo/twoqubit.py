"""Two singlet-triplet qubits coupled through the middle exchange ``J23``.

With ``J12 = 0`` and negligible gradients the four-dot Hamiltonian splits
into two 2x2 blocks

    H_1 = (J34/2) sx - (J23/4) sz,    H_2 = (J34/2) sx + (J23/4) sz,

so each block is a pseudo single qubit with ``hx = J34`` and
``hz = -/+ J23/2``.  Gates are built block-wise from schedules of ``J23``
at fixed ``J34``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .filterfn import CALIBRATED_SCALE, PiecewiseControl, ff_fidelity
from .linalg import SIGMA_X, SIGMA_Z, global_phase_distance
from .noise import NoiseSpectrum
from .pulses import J_MAX, batch_segment_unitaries, ordered_product
from .synthesis import UnrepresentableGateError

CHI_ROWS = (-math.pi / 2, -math.pi / 4, 0.0, math.pi / 4, math.pi / 2)

U0 = 0.5 * np.array(
    [[1, 1, 1, 1], [1, -1, 1, -1], [1, 1, -1, -1], [1, -1, -1, 1]], dtype=complex
)
Q_BELL = np.array(
    [[1, 0, 0, 1j], [0, 1j, 1, 0], [0, 1j, -1, 0], [1, 0, 0, -1j]], dtype=complex
) / math.sqrt(2.0)


class BlockStructureError(ValueError):
    """A 4x4 matrix is not block diagonal in the two-qubit block structure."""


@dataclass(frozen=True)
class FourDotParams:
    J12: float = 0.0
    J23: float = 0.0
    J34: float = 1.0
    ha: float = 0.0
    hb: float = 0.0

    def __post_init__(self):
        for name in ("J12", "J23", "J34"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0, got {getattr(self, name)}")


def four_dot_hamiltonian(p: FourDotParams) -> np.ndarray:
    """Four-dot Hamiltonian in the basis ``|00>, |01>, |10>, |11>`` (tilde states)."""
    a, b = p.ha, p.hb
    return np.array([
        [-p.J23 / 4 + b + a, p.J34 / 2, p.J12 / 2, 0.0],
        [p.J34 / 2, p.J23 / 4 - b + a, 0.0, p.J12 / 2],
        [p.J12 / 2, 0.0, p.J23 / 4 + b - a, p.J34 / 2],
        [0.0, p.J12 / 2, p.J34 / 2, -p.J23 / 4 - b - a],
    ], dtype=complex)


@dataclass(frozen=True)
class Block:
    """``H = x_coeff sx + z_coeff sz`` for one 2x2 block."""

    z_coeff: float
    x_coeff: float

    @property
    def matrix(self) -> np.ndarray:
        return self.x_coeff * SIGMA_X + self.z_coeff * SIGMA_Z


@dataclass(frozen=True)
class BlockPair:
    block1: Block
    block2: Block

    def assemble(self) -> np.ndarray:
        return direct_sum(self.block1.matrix, self.block2.matrix)


def direct_sum(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((4, 4), dtype=complex)
    out[:2, :2] = a
    out[2:, 2:] = b
    return out


def block_decompose(H: np.ndarray, tol: float = 1e-12) -> BlockPair:
    """Split a block-diagonal Hamiltonian into its two traceless 2x2 blocks.

    Raises:
        BlockStructureError: if an entry outside the blocks exceeds ``tol``,
            or a block is not of the form ``x sx + z sz``.
    """
    H = np.asarray(H, dtype=complex)
    for i in range(4):
        for j in range(4):
            if (i < 2) != (j < 2) and abs(H[i, j]) > tol:
                raise BlockStructureError(
                    f"entry ({i}, {j}) = {H[i, j]:.3g} couples the two blocks"
                )
    blocks = []
    for k in (0, 2):
        m = H[k:k + 2, k:k + 2]
        if abs(m[0, 0] + m[1, 1]) > tol or abs(m[0, 1] - m[1, 0]) > tol or abs(m[0, 1].imag) > tol:
            raise BlockStructureError(f"block at ({k}, {k}) is not real x sx + z sz: {m}")
        blocks.append(Block(float(m[0, 0].real), float(m[0, 1].real)))
    return BlockPair(*blocks)


# -- block schedules ----------------------------------------------------------


@dataclass(frozen=True)
class BlockSchedule:
    """Piecewise-constant ``J23`` at fixed ``J34`` seen by one block.

    ``sign`` is -1 for the first block and +1 for the second, the sign of
    the ``sz`` coefficient ``sign * J23 / 4``.
    """

    J23: tuple
    durations: tuple
    J34: float
    sign: int
    label: str = ""

    @property
    def duration(self) -> float:
        return float(sum(self.durations))

    def control(self) -> PiecewiseControl:
        """Pseudo-qubit control with weights ``J34`` on x and ``J23`` on z."""
        j23 = np.array(self.J23, dtype=float)
        n = len(j23)
        weights = np.zeros((n, 3))
        weights[:, 0] = self.J34
        weights[:, 2] = j23
        return PiecewiseControl(
            np.full(n, float(self.J34)), self.sign * j23 / 2.0,
            np.array(self.durations, dtype=float), weights, self.label,
        )


def propagate_block(bs: BlockSchedule, eps_x: float = 0.0, eps_z: float = 0.0) -> np.ndarray:
    """Block propagator with constant fractional noise on ``J34`` and ``J23``."""
    ctrl = bs.control()
    us = batch_segment_unitaries(ctrl.hx * (1 + eps_x), ctrl.hz * (1 + eps_z), ctrl.durations)
    return ordered_product(us)


@dataclass(frozen=True)
class EntanglerSpec:
    chi: float
    gamma: float

    @property
    def m1(self) -> int:
        return 1 if self.chi > math.pi / 2 else 0

    @property
    def m2(self) -> int:
        return 1 if self.chi < -math.pi / 2 else 0


def entangler_schedule(spec: EntanglerSpec, J34: float = 1.0, J_max: float = J_MAX):
    """Geometric entangler: ``J23 = 0, 2 J34 tan(gamma/2), 0`` on both blocks.

    Durations follow from the half-angle conditions on the block Rabi rate
    ``sqrt((J23/4)^2 + (J34/2)^2)``.

    Raises:
        UnrepresentableGateError: if ``gamma`` is outside ``(0, pi)`` or the
            middle exchange exceeds ``J_max``.
    """
    if not (0.0 < spec.gamma < math.pi):
        raise UnrepresentableGateError(
            f"entangling angle gamma={spec.gamma} must lie in (0, pi); tan(gamma/2) diverges at pi"
        )
    if J34 <= 0:
        raise ValueError("J34 must be positive")
    j2 = 2.0 * J34 * math.tan(spec.gamma / 2.0)
    if j2 > J_max:
        raise UnrepresentableGateError(f"J23={j2:.4g} exceeds J_max={J_max:.4g}")
    rate_free = J34 / 2.0
    rate_mid = math.hypot(j2 / 4.0, J34 / 2.0)
    t1 = ((math.pi / 2 - spec.chi) / 2 + 2 * spec.m1 * math.pi) / rate_free
    t2 = (math.pi / 2) / rate_mid
    t3 = ((math.pi / 2 + spec.chi) / 2 + 2 * spec.m2 * math.pi) / rate_free
    if t1 < -1e-12 or t3 < -1e-12:
        raise UnrepresentableGateError(f"chi={spec.chi} gives a negative segment duration")
    durs = (max(t1, 0.0), t2, max(t3, 0.0))
    j23 = (0.0, j2, 0.0)
    return (BlockSchedule(j23, durs, J34, -1, "geo-block1"),
            BlockSchedule(j23, durs, J34, +1, "geo-block2"))


def dynamical_entangler_schedule(chi: float, gamma: float, J34: float = 1.0):
    """Five-pulse composite per block with ``eta = (pi + chi, gamma, pi - chi)``.

    x pulses use ``J23 = 0``; the tilted pi pulses use ``J23 = 2 J34`` so the
    block axis is ``-/+ z + x``.  ``eta3`` is applied first.
    """
    eta1, eta2, eta3 = math.pi + chi, gamma, math.pi - chi
    t_had = math.pi / (math.sqrt(2.0) * J34)
    j23, durs = [], []
    for J, t in ((0.0, eta3 / J34), (2 * J34, t_had), (0.0, eta2 / J34),
                 (2 * J34, t_had), (0.0, eta1 / J34)):
        if t < -1e-12:
            raise ValueError(f"negative pulse length for chi={chi}, gamma={gamma}")
        if t > 0:
            j23.append(J)
            durs.append(t)
    return (BlockSchedule(tuple(j23), tuple(durs), J34, -1, "nai-block1"),
            BlockSchedule(tuple(j23), tuple(durs), J34, +1, "nai-block2"))


def assemble(blocks) -> np.ndarray:
    return direct_sum(propagate_block(blocks[0]), propagate_block(blocks[1]))


def entangler_matrix(chi: float, gamma: float) -> np.ndarray:
    """Closed form of the geometric entangler in the tilde basis."""
    c = math.cos(gamma / 2)
    s = math.sin(gamma / 2)
    sc, cc = s * math.sin(chi), s * math.cos(chi)
    b1 = np.array([[-c + 1j * cc, -sc], [sc, -c - 1j * cc]])
    b2 = np.array([[-c - 1j * cc, sc], [-sc, -c + 1j * cc]])
    return direct_sum(b1, b2)


def cz_like(gamma: float) -> np.ndarray:
    """``exp(-i gamma/2) diag(1, e^{i gamma}, e^{i gamma}, 1)``."""
    e = cmath.exp(1j * gamma)
    return cmath.exp(-0.5j * gamma) * np.diag([1, e, e, 1])


def to_logical_basis(u: np.ndarray) -> np.ndarray:
    return U0.conj().T @ np.asarray(u, dtype=complex) @ U0


# -- local invariants ---------------------------------------------------------


@dataclass(frozen=True)
class LocalInvariants:
    G1: float
    G2: float
    G3: float

    def as_tuple(self) -> tuple[float, float, float]:
        return (self.G1, self.G2, self.G3)


def local_invariants(u: np.ndarray) -> LocalInvariants:
    """Makhlin invariants from ``m = (Q^dag U Q)^T Q^dag U Q``.

    ``U`` is first scaled to unit determinant, which makes the invariants
    independent of the global phase (CZ maps to ``(0, 0, 1)``).
    """
    u = np.asarray(u, dtype=complex)
    u = u / np.linalg.det(u) ** 0.25
    ub = Q_BELL.conj().T @ u @ Q_BELL
    m = ub.T @ ub
    tr = np.trace(m)
    g = tr ** 2 / 16.0
    g3 = (tr ** 2 - np.trace(m @ m)) / 4.0
    return LocalInvariants(float(g.real), float(g.imag), float(g3.real))


def is_perfect_entangler(u: np.ndarray, tol: float = 1e-9) -> bool:
    inv = local_invariants(u)
    g = complex(inv.G1, inv.G2)
    mag = abs(g)
    chi_g = cmath.phase(g) if mag > tol else 0.0
    first = math.sin(chi_g) ** 2 <= 4 * mag + tol and 4 * mag <= 1 + tol
    second = math.cos(chi_g) * (math.cos(chi_g) - inv.G3) >= -tol
    return bool(first and second)


# -- fidelities ---------------------------------------------------------------


def block_ff_fidelity(bs: BlockSchedule, spectrum: NoiseSpectrum,
                      scale: float = CALIBRATED_SCALE) -> float:
    """Block fidelity with independent charge noise on ``J34`` (x) and ``J23`` (z)."""
    return ff_fidelity(bs.control(), spectrum, ("x", "z"), scale)


def composite_fidelity(f1: float, f2: float) -> float:
    """Two-qubit fidelity ``1/5 + (F1 + F2)^2 / 5`` from block fidelities."""
    for f in (f1, f2):
        if not (0.0 <= f <= 1.0):
            raise ValueError(f"block fidelity {f} outside [0, 1]")
    return 0.2 + (f1 + f2) ** 2 / 5.0


def block_overlap(u_block: np.ndarray, ideal_block: np.ndarray) -> float:
    """``|Tr(U_ideal^dag U)| / 2`` for one block."""
    return float(abs(np.trace(ideal_block.conj().T @ u_block)) / 2.0)


@dataclass(frozen=True)
class TableRow:
    chi: float
    F1_nai: float
    F1_geo: float
    F2_nai: float
    F2_geo: float
    F_nai: float
    F_geo: float


def two_qubit_table(spectrum: NoiseSpectrum, chis=CHI_ROWS, gamma: float = math.pi / 2,
                    J34: float = 1.0, scale: float = CALIBRATED_SCALE) -> list[TableRow]:
    rows = []
    for chi in chis:
        geo = entangler_schedule(EntanglerSpec(chi, gamma), J34)
        nai = dynamical_entangler_schedule(chi, gamma, J34)
        f1n, f2n = (block_ff_fidelity(b, spectrum, scale) for b in nai)
        f1g, f2g = (block_ff_fidelity(b, spectrum, scale) for b in geo)
        rows.append(TableRow(chi, f1n, f1g, f2n, f2g,
                             composite_fidelity(f1n, f2n), composite_fidelity(f1g, f2g)))
    return rows


def phase_distance_to(u: np.ndarray, v: np.ndarray) -> float:
    return global_phase_distance(u, v)
