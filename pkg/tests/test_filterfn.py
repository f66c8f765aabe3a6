import math

import numpy as np
import pytest

from oracles import SX, SY, SZ, fine_control_row, product_integrate, qubit_hamiltonian
from stgeo.filterfn import (
    AVERAGE_GATE_SCALE, CALIBRATED_SCALE, FormalismBreakdownError, PiecewiseControl,
    _frame_matrices, control_matrix_freq, control_matrix_time, ff_fidelity, ff_infidelity,
    filter_function, from_schedule, quasistatic_sensitivity,
)
from stgeo.linalg import axis_angle_unitary
from stgeo.noise import NoiseSpectrum, quasistatic_sweep
from stgeo.pulses import NoiseChannel, PulseSchedule, PulseSegment
from stgeo.synthesis import compile_geometric, compile_naive

BAND = NoiseSpectrum.from_hz(1e-4, 1.0, 50e3, 1e6)
Y_PI4 = axis_angle_unitary((0, 1, 0), math.pi / 4)
Z_PI4 = axis_angle_unitary((0, 0, 1), math.pi / 4)
TWO_SEG = PulseSchedule((PulseSegment(0.8, 1.3), PulseSegment(2.5, 0.9)))


def _oracle_control_matrix(sched, t):
    """``g Tr[U^dag s_j U s_k] / 2`` with ``U`` from fine-step integration."""
    pieces, acc, g = [], 0.0, 0.0
    for seg in sched.segments:
        take = min(seg.duration, t - acc)
        if take <= 0:
            break
        pieces.append((qubit_hamiltonian(seg.J), take))
        g = seg.J
        acc += seg.duration
    if not pieces:
        g = sched.segments[0].J
        u = np.eye(2)
    else:
        u = product_integrate(pieces)
    paulis = (SX, SY, SZ)
    return np.array([[g * np.trace(u.conj().T @ a @ u @ b).real / 2 for b in paulis] for a in paulis])


def test_control_matrix_at_start_is_weighted_identity():
    assert np.allclose(control_matrix_time(TWO_SEG, 0.0), 0.8 * np.eye(3))


def test_zero_exchange_segment_has_no_z_sensitivity():
    s = PulseSchedule((PulseSegment(0.0, 2.0),))
    assert np.all(control_matrix_time(s, 1.0) == 0)
    assert np.all(filter_function(s, [1e-3, 1.0]).values == 0)


def test_control_matrix_out_of_range():
    with pytest.raises(ValueError):
        control_matrix_time(TWO_SEG, -0.1)
    with pytest.raises(ValueError):
        control_matrix_time(TWO_SEG, 5.0)


def test_control_matrix_time_matches_oracle():
    rng = np.random.default_rng(7)
    for _ in range(5):
        n = rng.integers(1, 5)
        sched = PulseSchedule(tuple(PulseSegment(float(rng.uniform(0, 3)), float(rng.uniform(0.2, 2)))
                                    for _ in range(n)))
        t = float(rng.uniform(0, sched.duration))
        got = control_matrix_time(sched, t)
        assert np.max(np.abs(got - _oracle_control_matrix(sched, t))) < 1e-9


def test_frames_are_rotations():
    sched = compile_naive(Y_PI4)
    for lam in _frame_matrices(from_schedule(sched)):
        assert np.max(np.abs(lam @ lam.T - np.eye(3))) < 1e-12
        assert np.linalg.det(lam) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("omega", [1e-3, 0.37, 2.0, 11.0])
def test_two_segment_transform_matches_quadrature(omega):
    t, rows, dt = fine_control_row(TWO_SEG, 100_000)
    ref = -1j * omega * np.sum(rows * (np.exp(1j * omega * t) * dt)[:, None], axis=0)
    got = control_matrix_freq(TWO_SEG, omega)
    assert np.max(np.abs(got - ref)) < 1e-6 * np.max(np.abs(ref))


def test_single_segment_is_bare_transform():
    seg = PulseSchedule((PulseSegment(1.0, 1.7),))
    t, rows, dt = fine_control_row(seg, 100_000)
    w = 0.9
    ref = -1j * w * np.sum(rows * (np.exp(1j * w * t) * dt)[:, None], axis=0)
    assert np.allclose(control_matrix_freq(seg, w), ref, rtol=1e-6, atol=1e-9)


def test_low_frequency_limit():
    sched = compile_naive(Y_PI4)
    w = np.array([1e-9, 1e-8, 1e-7])
    r = np.linalg.norm(control_matrix_freq(sched, w), axis=-1) / w
    assert r == pytest.approx(np.full(3, math.sqrt(quasistatic_sensitivity(sched))), rel=1e-9)


def test_low_frequency_exponent():
    w = np.geomspace(1e-7, 1e-4, 30)
    for u in (Y_PI4, Z_PI4):
        for sched in (compile_naive(u), compile_geometric(u)):
            f = filter_function(sched, w).values
            slope = np.polyfit(np.log(w), np.log(f), 1)[0]
            assert 1.9 <= slope <= 2.1


def test_filter_function_non_negative():
    sched = compile_naive(Z_PI4)
    f = filter_function(sched, np.geomspace(1e-4, 1e2, 500))
    assert np.all(f.values >= -1e-12)
    assert f.axis == "z"


def test_filter_function_rejects_non_positive_grid():
    with pytest.raises(ValueError):
        filter_function(TWO_SEG, [0.0, 1.0])


@pytest.mark.parametrize("u", [Y_PI4, Z_PI4], ids=["y", "z"])
def test_geometric_below_naive(u):
    w = np.geomspace(1e-7, 1e-3, 400)
    nai = filter_function(compile_naive(u), w).values
    geo = filter_function(compile_geometric(u), w).values
    assert np.all(geo < nai)


def test_zero_noise_fidelity():
    assert ff_fidelity(compile_naive(Y_PI4), BAND.with_amplitude(0.0)) == 1.0


def test_quadrature_converges():
    sched = compile_naive(Y_PI4)
    a = ff_infidelity(sched, BAND, points=2000)
    b = ff_infidelity(sched, BAND, points=4000)
    assert abs(a - b) < 1e-7


def test_breakdown_is_reported():
    with pytest.raises(FormalismBreakdownError):
        ff_fidelity(compile_naive(Y_PI4), BAND.with_amplitude(10.0))


def test_gradient_channel_uses_unit_weight():
    ctrl = from_schedule(TWO_SEG)
    assert np.all(ctrl.weights[:, 0] == 1.0)
    assert np.allclose(ctrl.weights[:, 2], [0.8, 2.5])
    assert ff_infidelity(TWO_SEG, BAND, channels=(NoiseChannel.SIGMA_X,)) > 0


def test_custom_piecewise_control():
    ctrl = PiecewiseControl(np.array([1.0]), np.array([0.0]), np.array([2.0]),
                            np.array([[0.0, 0.0, 1.0]]))
    # static sigma_x drive, z noise with unit weight: R_z(t) = (0, -sin t, cos t)
    assert quasistatic_sensitivity(ctrl) == pytest.approx((1 - math.cos(2)) ** 2 + math.sin(2) ** 2)


@pytest.mark.parametrize("u", [Y_PI4, Z_PI4], ids=["y", "z"])
def test_cross_validation_against_quasistatic_average(u):
    """A spectrum concentrated at very low frequency acts like static noise."""
    spec = NoiseSpectrum(1e-3, 1.0, 1e-9, 2e-9)
    sigma = math.sqrt(spec.variance)
    nodes, weights = np.polynomial.hermite_e.hermegauss(40)
    for sched in (compile_naive(u), compile_geometric(u)):
        fids = np.array([f for _, f in quasistatic_sweep(u, sched, sigma * nodes)])
        mc = float(np.sum(weights * (1 - fids)) / np.sum(weights))
        ff = ff_infidelity(sched, spec, scale=AVERAGE_GATE_SCALE)
        assert ff == pytest.approx(mc, rel=0.1)


def test_calibrated_scale():
    assert CALIBRATED_SCALE == pytest.approx(1.57559 ** 2 / 6)
