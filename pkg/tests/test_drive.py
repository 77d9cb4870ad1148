import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from stirap_open.drive import (DressedFrame, PulseSchedule, Sequence, dressed_frame, hamiltonian,
                               hamiltonian_from, mixing_angles, pulse_amplitudes, theta_at)
from stirap_open.drive import gaussian_pair


def test_pulse_peak_and_midpoint():
    sched = PulseSchedule()
    om1, _ = gaussian_pair(0.75, sched)
    assert om1 == pytest.approx(12.5)
    om1, om2 = gaussian_pair(0.0, sched)
    # 12.5 * exp(-0.5625)
    assert om1 == pytest.approx(7.1222853091365375, rel=1e-12)
    assert om2 == pytest.approx(om1, rel=1e-15)


@given(t=st.floats(-8, 8))
def test_pulse_reflection_symmetry(t):
    sched = PulseSchedule()
    om1, _ = gaussian_pair(t, sched)
    _, om2 = gaussian_pair(-t, sched)
    assert om1 == pytest.approx(om2, rel=1e-14)


def test_sequences_swap_pump_and_stokes():
    ci = pulse_amplitudes(-1.0, PulseSchedule(sequence="ci"))
    i = pulse_amplitudes(-1.0, PulseSchedule(sequence="i"))
    assert ci == i[::-1]
    # counterintuitive: Stokes (peaked at -tau/2) leads
    assert ci[1] > ci[0]


def test_sequence_aliases():
    assert Sequence.parse("b-STIRAP") is Sequence.INTUITIVE
    assert Sequence.parse("stirap") is Sequence.COUNTERINTUITIVE
    with pytest.raises(ValueError):
        Sequence.parse("sideways")


def test_mixing_angle_examples():
    assert mixing_angles(2.0, 2.0, 1.0)[0] == pytest.approx(math.pi / 4)
    theta, phi, rabi = mixing_angles(3.0, 4.0, 1.0)
    assert theta == pytest.approx(0.6435011087932844, rel=1e-12)
    assert rabi == pytest.approx(5.0)
    assert phi == pytest.approx(0.5 * math.atan(10.0), rel=1e-12)
    assert phi == pytest.approx(0.7355638371518674, rel=1e-12)
    assert mixing_angles(3.0, 4.0, 1e-12)[1] == pytest.approx(math.pi / 4, abs=1e-10)


@pytest.mark.parametrize("args", [(0.0, 0.0, 1.0), (1.0, 1.0, 0.0), (-1.0, 1.0, 1.0)])
def test_mixing_angles_reject_degenerate_input(args):
    with pytest.raises(ValueError):
        mixing_angles(*args)


def test_hamiltonian_examples():
    np.testing.assert_array_equal(hamiltonian_from(0, 0, 1.0), np.diag([0, 1.0, 0]))
    np.testing.assert_array_equal(hamiltonian_from(3, 4, 1),
                                  [[0, 3, 0], [3, 1, 4], [0, 4, 0]])


@given(t=st.floats(-6, 6))
def test_hamiltonian_trace_is_detuning(t):
    assert np.trace(hamiltonian(t, PulseSchedule(delta=1.7))) == pytest.approx(1.7)


def test_schedule_validation():
    with pytest.raises(ValueError):
        PulseSchedule(delta=0.0)
    with pytest.raises(ValueError):
        PulseSchedule(omega0=-1.0)


def test_dressed_frame_matches_numerical_eigenvalues():
    theta, phi, rabi = mixing_angles(3.0, 4.0, 1.0)
    frame = DressedFrame.from_angles(theta, phi, rabi)
    h = np.array([[0, 3, 0], [3, 1, 4], [0, 4, 0.0]])
    np.testing.assert_allclose(frame.hamiltonian, h, atol=1e-12)
    expected = np.sort(np.linalg.eigvalsh(h))[::-1]
    np.testing.assert_allclose(frame.eigenvalues, expected, atol=1e-10)
    # (1 +/- sqrt(101)) / 2
    assert frame.omega_plus == pytest.approx(5.524937810560445, rel=1e-12)


def test_dark_state_is_bare_one_when_pump_is_off():
    frame = DressedFrame.from_angles(0.0, 0.3, 2.0)
    np.testing.assert_allclose(frame.zero, [1, 0, 0], atol=1e-15)


def test_dressed_eigenvalues_at_phi_quarter_pi():
    # the Delta -> 0 limit, evaluated in closed form
    rabi, phi = 2.0, math.pi / 4
    assert rabi / math.tan(phi) == pytest.approx(rabi)
    assert -rabi * math.tan(phi) == pytest.approx(-rabi)


@pytest.mark.parametrize("seq", ["counterintuitive", "intuitive"])
def test_dressed_frame_diagonalises_hamiltonian(seq, rng):
    sched = PulseSchedule(sequence=seq)
    for t in rng.uniform(-6, 6, 100):
        frame = dressed_frame(t, sched)
        assert frame.eigen_residual() <= 1e-10
        np.testing.assert_allclose(frame.kets.T @ frame.kets, np.eye(3), atol=1e-13)


def test_asymptotic_alignment():
    ci = PulseSchedule(sequence="ci")
    assert abs(dressed_frame(-6, ci).zero[0]) ** 2 >= 1 - 1e-6
    assert abs(dressed_frame(6, ci).zero[2]) ** 2 >= 1 - 1e-6
    b = PulseSchedule(sequence="i")
    assert abs(dressed_frame(-6, b).minus[0]) ** 2 >= 1 - 1e-6
    assert abs(dressed_frame(6, b).minus[2]) ** 2 >= 1 - 1e-6


@settings(max_examples=100)
@given(t=st.floats(-5, 5))
def test_theta_log_ratio_identity(t):
    sched = PulseSchedule()
    om_p, om_s = pulse_amplitudes(t, sched)
    assert theta_at(t, sched) == pytest.approx(math.atan2(om_p, om_s), abs=1e-12)


def test_theta_defined_in_far_tails():
    sched = PulseSchedule()
    assert theta_at(-1e4, sched) == pytest.approx(0.0, abs=1e-300)
    assert theta_at(1e4, sched) == pytest.approx(math.pi / 2)
