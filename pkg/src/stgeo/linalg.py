"""Small dense linear algebra for 2x2 and 4x4 unitaries.

Everything here works on plain ``numpy`` arrays.  Unitaries are never
wrapped in a class; :func:`check_unitary` is used at construction sites
that want to enforce the invariant.
"""

import numpy as np

DEFAULT_TOL = 1e-10

IDENTITY = np.eye(2, dtype=complex)
SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULIS = (SIGMA_X, SIGMA_Y, SIGMA_Z)


def axis_angle_unitary(axis, angle: float) -> np.ndarray:
    """Rotation ``exp(-i angle/2 n.sigma)`` about ``axis`` in closed form.

    Args:
        axis: Real 3-vector, need not be normalized.
        angle: Rotation angle in radians.

    Raises:
        ValueError: If ``axis`` has zero length.
    """
    n = np.asarray(axis, dtype=float)
    norm = np.linalg.norm(n)
    if n.shape != (3,) or norm == 0.0:
        raise ValueError(f"rotation axis must be a non-zero 3-vector, got {axis!r}")
    nx, ny, nz = n / norm
    c = np.cos(angle / 2.0)
    s = np.sin(angle / 2.0)
    return np.array(
        [[c - 1j * s * nz, -s * (1j * nx + ny)],
         [s * (ny - 1j * nx), c + 1j * s * nz]],
        dtype=complex,
    )


def su2_axis_angle(u: np.ndarray) -> tuple[np.ndarray, float]:
    """Axis and angle in ``[0, pi]`` of a 2x2 unitary, ignoring global phase.

    For the identity class the returned axis is ``(0, 0, 1)``.
    """
    u = np.asarray(u, dtype=complex)
    v = u / np.sqrt(np.linalg.det(u))
    # v = cos(a/2) I - i sin(a/2) n.sigma
    c = 0.5 * np.trace(v).real
    vec = np.array([
        -0.5 * np.trace(v @ SIGMA_X).imag,
        -0.5 * np.trace(v @ SIGMA_Y).imag,
        -0.5 * np.trace(v @ SIGMA_Z).imag,
    ])
    if c < 0:
        c, vec = -c, -vec
    s = np.linalg.norm(vec)
    angle = 2.0 * np.arctan2(s, c)
    if s < 1e-14:
        return np.array([0.0, 0.0, 1.0]), 0.0
    return vec / s, float(angle)


def check_unitary(u: np.ndarray, tol: float = 1e-12) -> np.ndarray:
    """Return ``u`` unchanged if it is unitary within ``tol``, else raise."""
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {u.shape}")
    err = np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0])))
    if err > tol:
        raise ValueError(f"matrix is not unitary (max deviation {err:.3e})")
    return u


def average_gate_fidelity(u: np.ndarray, u_ideal: np.ndarray) -> float:
    """Average gate fidelity ``[Tr(U U^dag) + |Tr(U_ideal^dag U)|^2] / (d(d+1))``."""
    u = np.asarray(u, dtype=complex)
    u_ideal = np.asarray(u_ideal, dtype=complex)
    if u.shape != u_ideal.shape or u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise ValueError(
            f"dimension mismatch: {u.shape} vs {u_ideal.shape}"
        )
    d = u.shape[0]
    overlap = np.trace(u_ideal.conj().T @ u)
    value = (np.trace(u @ u.conj().T).real + abs(overlap) ** 2) / (d * (d + 1))
    return float(min(1.0, value))


def equal_up_to_global_phase(u: np.ndarray, v: np.ndarray, tol: float = DEFAULT_TOL) -> bool:
    """True if ``u = exp(i phi) v`` for some phase, within ``tol`` (max norm).

    The phase is taken from the largest-magnitude entry of ``v^dag u``.
    """
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    if u.shape != v.shape:
        return False
    w = v.conj().T @ u
    k = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    if abs(w[k]) == 0.0:
        return False
    phase = w[k] / abs(w[k])
    return bool(np.max(np.abs(u - phase * v)) <= tol)


def global_phase_distance(u: np.ndarray, v: np.ndarray) -> float:
    """``max |u - e^{i phi} v|`` with the phase chosen as in
    :func:`equal_up_to_global_phase`."""
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    w = v.conj().T @ u
    k = np.unravel_index(np.argmax(np.abs(w)), w.shape)
    phase = w[k] / abs(w[k]) if abs(w[k]) > 0 else 1.0
    return float(np.max(np.abs(u - phase * v)))


_PAULI_STACK = np.array(PAULIS)


def rotation_matrix(u: np.ndarray) -> np.ndarray:
    """Adjoint representation ``M_jk = Tr[u^dag s_j u s_k] / 2`` (real 3x3).

    Accepts a stack of unitaries with shape ``(..., 2, 2)``.
    """
    u = np.asarray(u, dtype=complex)
    ud = np.conj(np.swapaxes(u, -1, -2))
    m = np.einsum("...ab,jbc,...cd,kda->...jk", ud, _PAULI_STACK, u, _PAULI_STACK)
    return 0.5 * m.real
