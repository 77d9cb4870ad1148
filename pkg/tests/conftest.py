import numpy as np
import pytest

from stirap_open.experiments import SweepSpec, compare_models, default_n_photons, sweep_gamma_n
from stirap_open.integrator import IntegratorConfig


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def ci_comparison():
    return compare_models("counterintuitive")


@pytest.fixture(scope="session")
def intuitive_comparison():
    gammas = np.append(np.logspace(-2, np.log10(2.0), 40), 1.0)
    return compare_models("intuitive", gammas=gammas)


def thermal_optimum_sweep(cfg=IntegratorConfig()):
    """Intuitive sequence at Gamma T = 1 over the default N grid."""
    return sweep_gamma_n(SweepSpec(sequence="intuitive", gammas=(1.0,),
                                   n_photons=default_n_photons(), cfg=cfg))


def thermal_degradation_sweep(cfg=IntegratorConfig()):
    """Counterintuitive sequence, N in {0, 1}, Gamma T in {0.1, 1, 10}."""
    return sweep_gamma_n(SweepSpec(gammas=(0.1, 1.0, 10.0), n_photons=(0.0, 1.0), cfg=cfg))


@pytest.fixture(scope="session")
def thermal_optimum():
    return thermal_optimum_sweep()


@pytest.fixture(scope="session")
def thermal_degradation():
    return thermal_degradation_sweep()


_ACCEPTANCE = {}


@pytest.fixture(scope="session")
def report():
    """Record one PASS/FAIL line per acceptance criterion."""
    def record(number: int, title: str, passed: bool, detail: str) -> bool:
        line = f"{'PASS' if passed else 'FAIL'}  criterion {number:>2}: {title} ({detail})"
        _ACCEPTANCE[number] = line
        print(line)
        return passed
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for number in sorted(_ACCEPTANCE):
            terminalreporter.write_line(_ACCEPTANCE[number])
