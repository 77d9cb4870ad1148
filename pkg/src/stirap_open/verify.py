"""Self-checks run by ``stirap verify``.

Each check returns a :class:`Check`; the suite passes when all of them do.
The heavy efficiency studies live in the test suite, not here.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import hermiticity_error, random_density_matrix
from .dissipator import (BathModel, appendix_components, commutator_term, jump_operators,
                         lindblad_dissipator, microscopic_generator,
                         phenomenological_generator, zero_temperature_generator)
from .drive import DressedFrame, PulseSchedule, dressed_frame
from .integrator import MicroscopicModel, dissipative_flow
from .spectral import COUPLINGS, coupling_operator, secular_generator, spectral_decompose


@dataclass
class Check:
    name: str
    passed: bool
    detail: str


def _random_angles(rng, n):
    # keep phi away from pi/4 where two Bohr frequencies coincide
    theta = rng.uniform(0.02, 0.5 * math.pi - 0.02, n)
    phi = rng.uniform(0.02, 0.7, n)
    return theta, phi


def check_oracle_components(samples: int = 100, seed: int = 7) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_comp = worst_sum = worst_comm = 0.0
    mismatched = 0
    for theta, phi in zip(*_random_angles(rng, samples)):
        frame = DressedFrame.from_angles(theta, phi, rabi=rng.uniform(0.5, 20.0))
        levels = {"+": frame.omega_plus, "0": 0.0, "-": frame.omega_minus}
        table = appendix_components(theta, phi)
        for key in COUPLINGS:
            a = coupling_operator(*key)
            comps = spectral_decompose(a, frame)
            closed = {levels[m] - levels[n]: frame.kets @ mat @ frame.kets.T
                      for (ch, s, (m, n)), mat in table.items() if (ch, s) == key}
            if len(closed) != len(comps):
                mismatched += 1
            for w, m in comps.items():
                w_cf = min(closed, key=lambda x: abs(x - w))
                if abs(w_cf - w) > 1e-8 * max(1.0, abs(w)):
                    mismatched += 1
                    continue
                worst_comp = max(worst_comp, float(np.max(np.abs(m - closed[w_cf]))))
                comm = frame.hamiltonian @ m - m @ frame.hamiltonian
                worst_comm = max(worst_comm, float(np.max(np.abs(comm + w * m))))
            worst_sum = max(worst_sum, float(np.max(np.abs(sum(comps.values()) - a))))
    return [
        Check("closed-form jump operators == spectral decomposition",
              mismatched == 0 and worst_comp <= 1e-10,
              f"max deviation {worst_comp:.2e}, mismatched frequencies {mismatched}"),
        Check("sum over Bohr frequencies reproduces the coupling operator",
              worst_sum <= 1e-12, f"max deviation {worst_sum:.2e}"),
        Check("[H, A(w)] = -w A(w)", worst_comm <= 1e-10, f"max deviation {worst_comm:.2e}"),
    ]


def check_generator_oracle(samples: int = 50, seed: int = 11) -> Check:
    rng = np.random.default_rng(seed)
    worst = 0.0
    for theta, phi in zip(*_random_angles(rng, samples)):
        frame = DressedFrame.from_angles(theta, phi, rabi=rng.uniform(0.5, 20.0))
        bath = BathModel(rng.uniform(0.01, 5.0), rng.uniform(0.2, 5.0), rng.uniform(0.0, 10.0))
        rho = random_density_matrix(rng)
        closed = commutator_term(frame.hamiltonian, rho) + frame.kets @ lindblad_dissipator(
            jump_operators(theta, phi, bath), frame.kets.T @ rho @ frame.kets) @ frame.kets.T
        worst = max(worst, float(np.max(np.abs(closed - secular_generator(frame, bath, rho)))))
    return Check("dressed generator == first-principles secular generator", worst <= 1e-10,
                 f"max deviation {worst:.2e}")


def check_generator_invariants(samples: int = 200, seed: int = 3) -> list[Check]:
    rng = np.random.default_rng(seed)
    worst_tr = worst_herm = worst_zero_t = worst_fast = 0.0
    for _ in range(samples):
        sched = PulseSchedule(omega0=rng.uniform(1, 40), tau=rng.uniform(0.5, 3),
                              delta=rng.uniform(0.1, 5), sequence=rng.choice(["ci", "i"]))
        t = rng.uniform(-4, 4)
        bath = BathModel(rng.uniform(0, 10), rng.uniform(0, 5), rng.uniform(0, 100))
        rho = random_density_matrix(rng)
        for g in (microscopic_generator(t, sched, bath, rho),
                  phenomenological_generator(t, sched, bath.gamma, bath.alpha * bath.gamma, rho)):
            worst_tr = max(worst_tr, abs(np.trace(g)))
            worst_herm = max(worst_herm, hermiticity_error(g))
        cold = BathModel(bath.gamma, bath.alpha, 0.0)
        worst_zero_t = max(worst_zero_t, float(np.max(np.abs(
            microscopic_generator(t, sched, cold, rho) - zero_temperature_generator(t, sched, cold, rho)))))
        fast = MicroscopicModel.from_bath(sched, bath).rhs(t, rho[None])[0]
        worst_fast = max(worst_fast, float(np.max(np.abs(
            fast - microscopic_generator(t, sched, bath, rho)))))
    return [
        Check("generators are trace-free", worst_tr <= 1e-12, f"max |tr| {worst_tr:.2e}"),
        Check("generators preserve Hermiticity", worst_herm <= 1e-12, f"max {worst_herm:.2e}"),
        Check("N=0 generator == five-channel zero-temperature form", worst_zero_t <= 1e-12,
              f"max deviation {worst_zero_t:.2e}"),
        Check("batched integrator rhs == generic Lindblad generator", worst_fast <= 1e-12,
              f"max deviation {worst_fast:.2e}"),
    ]


def check_dressed_frame() -> list[Check]:
    worst = 0.0
    for seq in ("counterintuitive", "intuitive"):
        sched = PulseSchedule(sequence=seq)
        for t in np.linspace(-6, 6, 241):
            worst = max(worst, dressed_frame(t, sched, check=False).eigen_residual())
    ci = PulseSchedule(sequence="counterintuitive")
    bi = PulseSchedule(sequence="intuitive")
    align = min(
        abs(dressed_frame(-6, ci).zero[0]) ** 2, abs(dressed_frame(6, ci).zero[2]) ** 2,
        abs(dressed_frame(-6, bi).minus[0]) ** 2, abs(dressed_frame(6, bi).minus[2]) ** 2)
    return [
        Check("closed-form dressed states diagonalise H_s", worst <= 1e-10,
              f"max residual {worst:.2e}"),
        Check("dark/bright state aligned with |1>, |3> at the window edges",
              align >= 1 - 1e-6, f"min overlap {align:.12f}"),
    ]


def check_funneling() -> Check:
    bath = BathModel(1.0, 1.0, 0.0)
    rho0 = np.full((3, 3), 1.0 / 3.0, dtype=complex)
    times, states = dissipative_flow(math.pi / 4, math.pi / 6, bath, rho0, 50.0)
    p0 = np.real(states[:, 1, 1])
    ok = p0[-1] >= 1 - 1e-6 and np.all(np.diff(p0) >= -1e-12)
    return Check("zero-temperature dissipation funnels into |0>", bool(ok),
                 f"final P0 {p0[-1]:.9f}")


def run_all() -> list[Check]:
    checks: list[Check] = []
    checks += check_oracle_components()
    checks.append(check_generator_oracle())
    checks += check_generator_invariants()
    checks += check_dressed_frame()
    checks.append(check_funneling())
    return checks

