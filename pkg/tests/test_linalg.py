import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import product_integrate, qubit_hamiltonian
from stgeo.linalg import (
    SIGMA_X, SIGMA_Z, average_gate_fidelity, axis_angle_unitary, check_unitary,
    equal_up_to_global_phase, global_phase_distance, rotation_matrix, su2_axis_angle,
)

angles = st.floats(-10, 10, allow_nan=False)
components = st.floats(-1, 1, allow_nan=False)


def test_pi_about_x():
    assert np.allclose(axis_angle_unitary((1, 0, 0), math.pi), -1j * SIGMA_X, atol=1e-15)


def test_hadamard_axis():
    had = (SIGMA_X + SIGMA_Z) / math.sqrt(2)
    assert np.allclose(axis_angle_unitary((1, 0, 1), math.pi), -1j * had, atol=1e-15)


def test_tilted_axis_matches_fine_step_integration():
    J = math.tan(math.pi / 8)
    u = axis_angle_unitary((1, 0, J), math.pi)
    ref = product_integrate([(qubit_hamiltonian(J), math.pi * math.cos(math.pi / 8))])
    assert np.max(np.abs(u - ref)) < 1e-10


def test_zero_axis_rejected():
    with pytest.raises(ValueError):
        axis_angle_unitary((0, 0, 0), 1.0)


@given(components, components, components, angles)
def test_axis_angle_is_unitary(x, y, z, a):
    if math.hypot(x, y, z) < 1e-3:
        return
    u = axis_angle_unitary((x, y, z), a)
    check_unitary(u)
    assert abs(abs(np.linalg.det(u)) - 1) < 1e-12


@given(components, components, components, st.floats(0.01, math.pi - 0.01))
def test_axis_angle_round_trip(x, y, z, a):
    if math.hypot(x, y, z) < 1e-3:
        return
    n = np.array([x, y, z]) / math.hypot(x, y, z)
    axis, angle = su2_axis_angle(axis_angle_unitary(n, a))
    assert angle == pytest.approx(a, abs=1e-9)
    assert np.allclose(axis, n, atol=1e-8)


def test_fidelity_of_identical_gates_is_one():
    u = axis_angle_unitary((0.3, -0.2, 0.9), 1.3)
    assert average_gate_fidelity(u, u) == pytest.approx(1.0, abs=1e-14)
    assert average_gate_fidelity(1j * u, u) == pytest.approx(1.0, abs=1e-14)


def test_fidelity_of_orthogonal_paulis():
    assert average_gate_fidelity(SIGMA_X, SIGMA_Z) == pytest.approx(1 / 3)


def test_fidelity_dimension_mismatch():
    with pytest.raises(ValueError):
        average_gate_fidelity(np.eye(2), np.eye(4))


def test_global_phase_comparison():
    u = axis_angle_unitary((1, 2, 3), 0.7)
    assert equal_up_to_global_phase(np.exp(0.4j) * u, u)
    assert not equal_up_to_global_phase(u, axis_angle_unitary((1, 2, 3), 0.8))
    assert global_phase_distance(-u, u) < 1e-15


def test_check_unitary_rejects():
    with pytest.raises(ValueError):
        check_unitary(np.array([[1, 1], [0, 1]]))


@settings(max_examples=30)
@given(components, components, components, angles)
def test_rotation_matrix_is_orthogonal(x, y, z, a):
    if math.hypot(x, y, z) < 1e-3:
        return
    m = rotation_matrix(axis_angle_unitary((x, y, z), a))
    assert np.allclose(m @ m.T, np.eye(3), atol=1e-12)
    assert np.linalg.det(m) == pytest.approx(1.0, abs=1e-12)
