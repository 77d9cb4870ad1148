"""Open-system STIRAP / b-STIRAP in a Lambda system coupled to a bosonic bath."""

from .core import min_eigenvalue, population, pure_state
from .dissipator import (BathModel, LindbladTerm, jump_operators, microscopic_generator,
                         phenomenological_generator, rates)
from .drive import (DressedFrame, PulseSchedule, Sequence, dressed_frame, hamiltonian,
                    mixing_angles, pulse_amplitudes)
from .experiments import (EfficiencyRecord, SweepSpec, compare_models, efficiency,
                          sweep_gamma, sweep_gamma_alpha, sweep_gamma_n)
from .integrator import IntegratorConfig, TrajectoryRecord, evolve
from .spectral import spectral_decompose

__version__ = "0.1.0"
