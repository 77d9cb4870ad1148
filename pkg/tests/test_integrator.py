import numpy as np
import pytest

from stirap_open.core import pure_state, random_density_matrix
from stirap_open.dissipator import BathModel, commutator_term, zero_temperature_generator
from stirap_open.drive import PulseSchedule, hamiltonian
from stirap_open.integrator import (IntegrationError, IntegratorConfig, MicroscopicModel,
                                    PhenomenologicalModel, evolve, make_model, propagate, rhs,
                                    step_for_rate)

FAST = IntegratorConfig(h=4e-3, n_samples=50)


def test_closed_system_counterintuitive_transfer():
    rho, rec = evolve("microscopic", PulseSchedule(), BathModel(0.0), cfg=FAST)
    assert rho[2, 2].real >= 0.99
    assert rec.diagnostics["max_trace_error"][0] <= 1e-8


@pytest.mark.parametrize("model", ["microscopic", "phenomenological"])
def test_undriven_ground_state_is_stationary(model):
    rho, _ = evolve(model, PulseSchedule(omega0=0.0), BathModel(1.0), cfg=FAST)
    assert rho[0, 0].real == pytest.approx(1.0, abs=1e-9)


def test_rhs_examples(rng):
    sched = PulseSchedule()
    rho = random_density_matrix(rng)
    closed = rhs(MicroscopicModel(sched, 0.0), 0.2, rho)
    np.testing.assert_allclose(closed, commutator_term(hamiltonian(0.2, sched), rho), atol=1e-13)
    off = PhenomenologicalModel(PulseSchedule(omega0=0.0), 1.0, 1.0)
    np.testing.assert_allclose(rhs(off, 0.0, pure_state(1)), 0.0, atol=1e-15)
    cold = BathModel(1.2, 0.6, 0.0)
    for t in (-3.0, 0.0, 0.4, 2.5):
        np.testing.assert_allclose(rhs(MicroscopicModel.from_bath(sched, cold), t, rho),
                                   zero_temperature_generator(t, sched, cold, rho), atol=1e-14)


def test_batched_rhs_matches_reference(rng):
    sched = PulseSchedule(sequence="i")
    g, a, n = rng.uniform(0, 5, 8), rng.uniform(0.2, 5, 8), rng.uniform(0, 30, 8)
    model = MicroscopicModel(sched, g, a, n)
    rho = np.array([random_density_matrix(rng) for _ in range(8)])
    for t in (-2.0, 0.1, 1.4):
        out = model.rhs(t, rho)
        for i in range(8):
            np.testing.assert_allclose(out[i], model.reference_rhs(t, rho[i], i), atol=1e-12)


def test_batch_members_do_not_interact():
    sched = PulseSchedule()
    alone, _ = propagate(MicroscopicModel(sched, 0.7), None, FAST)
    mixed, _ = propagate(MicroscopicModel(sched, [3.0, 0.7, 0.01]), None, FAST)
    np.testing.assert_array_equal(alone[0], mixed[1])


def test_make_model_dispatch():
    sched = PulseSchedule()
    assert isinstance(make_model("phenomenological", sched, (1.0, 2.0)), PhenomenologicalModel)
    with pytest.raises(TypeError):
        make_model("microscopic", sched, (1.0, 2.0))
    with pytest.raises(ValueError):
        make_model("semiclassical", sched, BathModel())


def test_stability_cap_and_refinement():
    cfg = IntegratorConfig()
    assert step_for_rate(1.0, cfg) == 1e-3
    assert step_for_rate(4000.0, cfg) == 5e-4
    assert step_for_rate(1.0, cfg.refined()) == 5e-4


def test_adaptive_agrees_with_fixed():
    sched = PulseSchedule()
    fixed, _ = evolve("microscopic", sched, BathModel(1.0), cfg=FAST)
    adaptive, rec = evolve("microscopic", sched, BathModel(1.0),
                           cfg=IntegratorConfig(step_mode="adaptive", n_samples=50))
    assert rec.steps > 0
    assert adaptive[2, 2].real == pytest.approx(fixed[2, 2].real, abs=1e-7)


def test_trajectory_record_shapes():
    _, rec = evolve("phenomenological", PulseSchedule(), (1.0, 1.0), cfg=FAST)
    assert rec.times[0] == -6.0 and rec.times[-1] == pytest.approx(6.0)
    assert rec.bare.shape == (50, 1, 3) and rec.dressed.shape == (50, 1, 3)
    np.testing.assert_allclose(rec.bare.sum(axis=-1), 1.0, atol=1e-10)
    np.testing.assert_allclose(rec.dressed.sum(axis=-1), 1.0, atol=1e-10)


def test_unstable_step_is_caught():
    cfg = IntegratorConfig(h=0.5, stability_cap=False, invariant_check_every=1)
    with pytest.raises(IntegrationError):
        evolve("phenomenological", PulseSchedule(), (200.0, 200.0), cfg=cfg)


def test_config_validation():
    for kw in ({"t_start": 1.0, "t_end": 0.0}, {"h": 0.0}, {"step_mode": "implicit"},
               {"rel_tol": -1.0}, {"n_samples": 1}):
        with pytest.raises(ValueError):
            IntegratorConfig(**kw)
