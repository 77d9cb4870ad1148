import numpy as np
import pytest

from stirap_open.core import pure_state
from stirap_open.experiments import (SweepSpec, compare_models, efficiency, run_sweep,
                                     sweep_gamma, sweep_gamma_alpha, sweep_gamma_n)
from stirap_open.integrator import IntegratorConfig

CFG = IntegratorConfig(h=4e-3, n_samples=20)
GAMMAS = (0.05, 1.0, 20.0)


def test_efficiency_examples():
    assert efficiency(pure_state(3)) == 1.0
    assert efficiency(pure_state(1)) == 0.0
    assert efficiency(0.7 * pure_state(3) + 0.3 * pure_state(1)) == pytest.approx(0.7)


def test_one_record_per_gamma_and_model():
    records = sweep_gamma(SweepSpec(model="both", gammas=GAMMAS, cfg=CFG))
    assert len(records) == 6
    assert {r.model for r in records} == {"microscopic", "phenomenological"}
    assert all(0.0 <= r.p3_final <= 1.0 for r in records)


def test_sweeps_are_deterministic():
    spec = SweepSpec(sequence="i", model="both", gammas=GAMMAS, cfg=CFG)
    assert run_sweep(spec) == run_sweep(spec)


def test_alpha_row_matches_gamma_sweep_bitwise():
    line = sweep_gamma(SweepSpec(gammas=GAMMAS, cfg=CFG))
    plane = sweep_gamma_alpha(SweepSpec(gammas=GAMMAS, alphas=(0.2, 1.0, 5.0), cfg=CFG))
    row = [r for r in plane if r.alpha == 1.0]
    assert [r.p3_final for r in row] == [r.p3_final for r in line]


@pytest.mark.parametrize("seq", ["ci", "i"])
def test_zero_n_row_matches_zero_temperature_sweep_bitwise(seq):
    line = sweep_gamma(SweepSpec(sequence=seq, gammas=GAMMAS, cfg=CFG))
    plane = sweep_gamma_n(SweepSpec(sequence=seq, gammas=GAMMAS, n_photons=(0.0, 1.0, 100.0),
                                    cfg=CFG))
    row = [r for r in plane if r.n_photons == 0.0]
    assert [r.p3_final for r in row] == [r.p3_final for r in line]


def test_parallel_sweep_matches_serial():
    spec = SweepSpec(model="both", gammas=GAMMAS, alphas=(0.5, 2.0), cfg=CFG)
    assert run_sweep(spec, jobs=1) == run_sweep(spec, jobs=3)


def test_phenomenological_points_ignore_temperature():
    spec = SweepSpec(model="both", gammas=(1.0,), n_photons=(0.0, 5.0))
    assert spec.points() == [("microscopic", 1.0, 1.0, 0.0), ("microscopic", 1.0, 1.0, 5.0),
                             ("phenomenological", 1.0, 1.0, 0.0)]


@pytest.mark.parametrize("kw", [{"gammas": ()}, {"alphas": (-1.0,)},
                                {"n_photons": (float("nan"),)}, {"model": "exact"},
                                {"delta": 0.0}])
def test_spec_validation(kw):
    with pytest.raises(ValueError):
        SweepSpec(**kw)


def test_single_valued_dimensions_enforced():
    with pytest.raises(ValueError):
        sweep_gamma(SweepSpec(alphas=(1.0, 2.0)))
    with pytest.raises(ValueError):
        sweep_gamma_n(SweepSpec(alphas=(1.0, 2.0)))


def test_compare_models_rejects_empty_grid():
    with pytest.raises(ValueError):
        compare_models("ci", gammas=[])


def test_comparison_summary():
    comp = compare_models("ci", gammas=GAMMAS, cfg=CFG)
    summary = comp.summary()
    assert summary["points"] == 3
    assert summary["max_abs_gap"] == pytest.approx(np.max(np.abs(comp.difference)))
    assert comp.min_advantage <= comp.max_advantage


def test_closed_system_baseline_is_not_undercut(ci_comparison):
    closed = sweep_gamma(SweepSpec(gammas=(0.0,)))[0].p3_final
    assert np.all(ci_comparison.microscopic >= closed - 0.05)


def test_summary_stable_under_grid_refinement(ci_comparison):
    fine = compare_models("counterintuitive", gammas=np.logspace(-2, 2, 79))
    assert abs(fine.max_abs_gap - ci_comparison.max_abs_gap) <= 1e-3
    assert abs(fine.min_advantage - ci_comparison.min_advantage) <= 1e-3
    assert len(fine.crossovers) == len(ci_comparison.crossovers)


def test_intuitive_thermal_photons_help_then_hurt(thermal_optimum):
    p3 = {r.n_photons: r.p3_final for r in thermal_optimum}
    ns = np.array(sorted(p3))
    ten = ns[np.argmin(abs(ns - 10.0))]
    assert ten == pytest.approx(10.0) and ns[-1] == pytest.approx(1000.0)
    assert p3[ten] > p3[0.0] and p3[ten] > p3[ns[-1]]


def test_counterintuitive_temperature_lowers_efficiency(thermal_degradation):
    p3 = {r.n_photons: r.p3_final for r in thermal_degradation if r.gamma == 1.0}
    assert p3[1.0] < p3[0.0]
