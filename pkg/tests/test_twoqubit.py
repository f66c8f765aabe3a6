import math

import numpy as np
import pytest
from scipy.linalg import expm
from scipy.stats import unitary_group

from oracles import product_integrate
from stgeo.linalg import average_gate_fidelity, equal_up_to_global_phase
from stgeo.noise import NoiseSpectrum
from stgeo.synthesis import UnrepresentableGateError
from stgeo.twoqubit import (
    U0, BlockStructureError, EntanglerSpec, FourDotParams, assemble, block_decompose,
    block_ff_fidelity, composite_fidelity, cz_like, direct_sum, dynamical_entangler_schedule,
    entangler_matrix, entangler_schedule, four_dot_hamiltonian, is_perfect_entangler,
    local_invariants, propagate_block, to_logical_basis, two_qubit_table,
)

BAND = NoiseSpectrum.from_hz(1e-4, 1.0, 50e3, 1e6)
CZ = np.diag([1, 1, 1, -1]).astype(complex)
SWAP = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
GRID = [(chi, gamma) for chi in np.linspace(-2.5, 2.5, 6) for gamma in np.linspace(0.2, 2.9, 5)]


def _local(rng):
    a, b = unitary_group.rvs(2, random_state=rng), unitary_group.rvs(2, random_state=rng)
    return np.kron(a, b)


def test_hamiltonian_examples():
    assert np.all(four_dot_hamiltonian(FourDotParams(0, 0, 0)) == 0)
    H = four_dot_hamiltonian(FourDotParams(0.7, 1.3, 0.4, 0.05, -0.02))
    assert np.max(np.abs(H - H.conj().T)) < 1e-14
    with pytest.raises(ValueError):
        FourDotParams(J23=-1.0)


def test_block_decomposition():
    H = four_dot_hamiltonian(FourDotParams(0.0, 2.0, 1.0))
    pair = block_decompose(H)
    assert pair.block1.z_coeff == pytest.approx(-0.5) and pair.block1.x_coeff == pytest.approx(0.5)
    assert pair.block2.z_coeff == pytest.approx(0.5) and pair.block2.x_coeff == pytest.approx(0.5)
    assert np.max(np.abs(pair.assemble() - H)) < 1e-14
    free = block_decompose(four_dot_hamiltonian(FourDotParams(0.0, 0.0, 1.0)))
    assert free.block1.z_coeff == 0 and free.block2.z_coeff == 0


def test_block_decomposition_rejects_coupling():
    with pytest.raises(BlockStructureError, match=r"entry \(0, 2\)"):
        block_decompose(four_dot_hamiltonian(FourDotParams(0.3, 1.0, 1.0)))


def test_block_evolution_matches_direct():
    geo = entangler_schedule(EntanglerSpec(0.4, 1.1))
    direct = np.eye(4, dtype=complex)
    for J23, tau in zip(geo[0].J23, geo[0].durations):
        direct = expm(-1j * four_dot_hamiltonian(FourDotParams(0.0, J23, 1.0)) * tau) @ direct
    assert np.max(np.abs(assemble(geo) - direct)) < 1e-12


def test_entangler_schedule_examples():
    b1, b2 = entangler_schedule(EntanglerSpec(0.0, math.pi / 2))
    assert b1.J23[1] == pytest.approx(2.0)
    assert b1.durations[1] == pytest.approx(math.pi / math.sqrt(2))
    assert b1.durations[0] == pytest.approx(b1.durations[2])
    assert b1.sign == -1 and b2.sign == 1
    edge = entangler_schedule(EntanglerSpec(math.pi / 2, math.pi / 2))[0]
    assert edge.durations[0] == pytest.approx(0.0, abs=1e-12)
    spec = EntanglerSpec(2.0, 1.0)
    assert (spec.m1, spec.m2) == (1, 0)
    assert (EntanglerSpec(-2.0, 1.0).m1, EntanglerSpec(-2.0, 1.0).m2) == (0, 1)


def test_entangler_schedule_rejects():
    with pytest.raises(UnrepresentableGateError):
        entangler_schedule(EntanglerSpec(0.0, math.pi))
    with pytest.raises(UnrepresentableGateError):
        entangler_schedule(EntanglerSpec(0.0, 3.1), J_max=10.0)


@pytest.mark.parametrize("chi,gamma", GRID)
def test_closed_form_matches_schedules(chi, gamma):
    u = entangler_matrix(chi, gamma)
    assert equal_up_to_global_phase(assemble(entangler_schedule(EntanglerSpec(chi, gamma))), u, 1e-9)
    assert equal_up_to_global_phase(assemble(dynamical_entangler_schedule(chi, gamma)), u, 1e-9)


def test_closed_form_matches_oracle():
    rng = np.random.default_rng(2)
    for _ in range(4):
        chi, gamma = rng.uniform(-3, 3), rng.uniform(0.1, 3.0)
        blocks = entangler_schedule(EntanglerSpec(chi, gamma))
        parts = []
        for bs in blocks:
            hs = [(bs.J34 / 2 * np.array([[0, 1], [1, 0]]) + bs.sign * J / 4 * np.diag([1, -1]), t)
                  for J, t in zip(bs.J23, bs.durations)]
            parts.append(product_integrate(hs))
        assert equal_up_to_global_phase(direct_sum(*parts), entangler_matrix(chi, gamma), 1e-8)


def test_entangler_limits():
    assert np.allclose(entangler_matrix(0.7, 0.0), -np.eye(4))
    for g in (0.3, math.pi / 2, 2.0):
        assert equal_up_to_global_phase(entangler_matrix(0.0, g), cz_like(g), 1e-9)
    ident = assemble(dynamical_entangler_schedule(0.0, 0.0))
    assert equal_up_to_global_phase(ident, np.eye(4), 1e-9)


def test_logical_basis():
    assert np.allclose(to_logical_basis(np.eye(4)), np.eye(4))
    assert np.max(np.abs(U0.conj().T @ U0 - np.eye(4))) < 1e-14
    chi, gamma = 0.3, math.pi / 2
    v = to_logical_basis(entangler_matrix(chi, gamma))
    assert np.allclose(np.diag(v), -math.cos(gamma / 2))
    anti = np.array([v[0, 3], v[1, 2], v[2, 1], v[3, 0]])
    assert np.allclose(np.abs(anti), math.sin(gamma / 2))
    assert np.allclose(anti[[0, 2]], 1j * math.sin(gamma / 2) * np.exp(-1j * chi))
    zeros = v.copy()
    for i in range(4):
        zeros[i, i] = zeros[i, 3 - i] = 0
    assert np.allclose(zeros, 0)


def test_invariant_examples():
    assert local_invariants(np.eye(4)).as_tuple() == pytest.approx((1, 0, 3), abs=1e-12)
    assert local_invariants(CZ).as_tuple() == pytest.approx((0, 0, 1), abs=1e-12)
    assert local_invariants(SWAP).as_tuple() == pytest.approx((-1, 0, -3), abs=1e-12)
    assert is_perfect_entangler(CZ)
    assert not is_perfect_entangler(np.eye(4))
    assert not is_perfect_entangler(SWAP)


def test_invariants_under_local_dressing():
    rng = np.random.default_rng(11)
    for _ in range(100):
        u = unitary_group.rvs(4, random_state=rng)
        ref = np.array(local_invariants(u).as_tuple())
        dressed = _local(rng) @ u @ _local(rng)
        assert np.max(np.abs(np.array(local_invariants(dressed).as_tuple()) - ref)) < 1e-9


def test_entangler_is_perfect():
    for chi in np.linspace(-math.pi, math.pi, 9):
        u = entangler_matrix(chi, math.pi / 2)
        assert local_invariants(u).as_tuple() == pytest.approx((0, 0, 1), abs=1e-9)
        assert is_perfect_entangler(u)
    dyn = assemble(dynamical_entangler_schedule(0.0, math.pi / 2))
    assert local_invariants(dyn).as_tuple() == pytest.approx((0, 0, 1), abs=1e-9)


def test_composite_fidelity_examples():
    assert composite_fidelity(1.0, 1.0) == 1.0
    assert composite_fidelity(0.99685, 0.99685) == pytest.approx(0.99496, abs=1e-5)
    assert composite_fidelity(0.98509, 0.98509) == pytest.approx(0.97633, abs=1e-5)
    with pytest.raises(ValueError):
        composite_fidelity(1.2, 0.9)


def test_zero_noise_block_fidelity():
    b1, _ = entangler_schedule(EntanglerSpec(0.0, math.pi / 2))
    assert block_ff_fidelity(b1, BAND.with_amplitude(0.0)) == 1.0


def test_composite_matches_direct_average():
    """Block-wise composite fidelity against the full 4x4 average gate fidelity."""
    chi, gamma = 0.2, math.pi / 2
    ideal = entangler_matrix(chi, gamma)
    blocks = entangler_schedule(EntanglerSpec(chi, gamma))
    ideal_blocks = [propagate_block(b) for b in blocks]
    rng = np.random.default_rng(4)
    direct, f1s, f2s = [], [], []
    for _ in range(200):
        ex, ez = 0.01 * rng.standard_normal(2)
        us = [propagate_block(b, ex, ez) for b in blocks]
        direct.append(average_gate_fidelity(direct_sum(*us), ideal))
        f1s.append(average_gate_fidelity(us[0], ideal_blocks[0]))
        f2s.append(average_gate_fidelity(us[1], ideal_blocks[1]))
    assert composite_fidelity(np.mean(f1s), np.mean(f2s)) == pytest.approx(np.mean(direct), abs=1e-3)


def test_table_ordering_and_composites():
    rows = two_qubit_table(BAND)
    assert len(rows) == 5
    for r in rows:
        assert r.F_geo > r.F_nai
        assert r.F_geo == composite_fidelity(r.F1_geo, r.F2_geo)
        assert r.F_nai == composite_fidelity(r.F1_nai, r.F2_nai)
