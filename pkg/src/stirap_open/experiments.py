"""Transfer-efficiency sweeps over decay rate, dipole ratio and temperature.

Every grid point is an independent propagation.  Points that share a
model and an integration step are stacked into one batched propagation;
the batching never changes a point's result, so sweeps are deterministic
and a point computed in one sweep is bit-identical to the same point in
another.
"""

from __future__ import annotations

import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from itertools import product

import numpy as np

from .core import population
from .drive import PulseSchedule, Sequence
from .integrator import (IntegrationError, IntegratorConfig, MicroscopicModel,
                         PhenomenologicalModel, propagate, step_for_rate)

log = logging.getLogger(__name__)

JOBS_ENV = "STIRAP_JOBS"
MAX_BATCH = 512


def default_gammas(points: int = 40) -> tuple[float, ...]:
    return tuple(np.logspace(-2.0, 2.0, points))


def default_alphas(points: int = 13) -> tuple[float, ...]:
    return tuple(np.linspace(0.2, 5.0, points))


def default_n_photons(points: int = 21) -> tuple[float, ...]:
    return (0.0,) + tuple(np.logspace(-2.0, 3.0, points))


class SweepError(RuntimeError):
    """A grid point failed to integrate; ``coordinates`` names it."""

    def __init__(self, message: str, coordinates: dict):
        super().__init__(f"{message} at {coordinates}")
        self.coordinates = coordinates


@dataclass(frozen=True)
class SweepSpec:
    sequence: Sequence = Sequence.COUNTERINTUITIVE
    model: str = "microscopic"
    gammas: tuple = field(default_factory=default_gammas)
    alphas: tuple = (1.0,)
    n_photons: tuple = (0.0,)
    omega0: float = 25.0
    tau: float = 1.5
    delta: float = 1.0
    cfg: IntegratorConfig = field(default_factory=IntegratorConfig)

    def __post_init__(self):
        object.__setattr__(self, "sequence", Sequence.parse(self.sequence))
        if self.model not in ("microscopic", "phenomenological", "both"):
            raise ValueError(f"unknown model {self.model!r}")
        for name in ("gammas", "alphas", "n_photons"):
            values = tuple(float(v) for v in getattr(self, name))
            if not values:
                raise ValueError(f"{name} grid is empty")
            if any(not math.isfinite(v) or v < 0 for v in values):
                raise ValueError(f"{name} grid must hold finite non-negative values")
            object.__setattr__(self, name, values)
        self.schedule  # validates the pulse parameters

    @property
    def schedule(self) -> PulseSchedule:
        return PulseSchedule(self.omega0, self.tau, self.delta, self.sequence)

    @property
    def models(self) -> tuple[str, ...]:
        if self.model == "both":
            return ("microscopic", "phenomenological")
        return (self.model,)

    def points(self) -> list[tuple[str, float, float, float]]:
        """(model, gamma, alpha, N) for every record the sweep produces.

        The phenomenological model has no temperature, so its points are
        emitted once with N = 0.
        """
        pts = []
        for model in self.models:
            ns = self.n_photons if model == "microscopic" else (0.0,)
            pts.extend((model, g, a, n) for g, a, n in product(self.gammas, self.alphas, ns))
        return sorted(set(pts))


@dataclass(frozen=True)
class EfficiencyRecord:
    sequence: str
    model: str
    gamma: float
    alpha: float
    n_photons: float
    p3_final: float
    trace_err: float
    min_eig: float
    herm_err: float = field(default=0.0, compare=False)

    @property
    def key(self) -> tuple:
        return (self.sequence, self.model, self.gamma, self.alpha, self.n_photons)


def efficiency(rho: np.ndarray) -> float:
    """Transfer efficiency: final population of the target state |3>."""
    return population(rho, 3)


def _build(model: str, sched: PulseSchedule, points):
    g = np.array([p[0] for p in points])
    a = np.array([p[1] for p in points])
    n = np.array([p[2] for p in points])
    if model == "microscopic":
        return MicroscopicModel(sched, g, a, n)
    return PhenomenologicalModel(sched, g, a * g)


def _run_group(args) -> list[EfficiencyRecord]:
    sched, cfg, model, points = args
    m = _build(model, sched, points)
    try:
        rho, rec = propagate(m, None, cfg)
    except IntegrationError as exc:
        i = int(exc.index[0]) if exc.index is not None and len(exc.index) else 0
        g, a, n = points[i]
        raise SweepError(str(exc), {"sequence": sched.sequence.value, "model": model,
                                    "gamma": g, "alpha": a, "n_photons": n}) from exc
    out = []
    diag = rec.diagnostics
    for i, (gi, ai, ni) in enumerate(points):
        out.append(EfficiencyRecord(sched.sequence.value, model, gi, ai, ni, efficiency(rho[i]),
                                    float(diag["max_trace_error"][i]),
                                    float(diag["min_eigenvalue"][i]),
                                    float(diag["max_hermiticity_error"][i])))
    return out


def default_jobs() -> int:
    try:
        return max(1, int(os.environ.get(JOBS_ENV, "1")))
    except ValueError:
        return 1


def run_sweep(spec: SweepSpec, jobs: int | None = None) -> list[EfficiencyRecord]:
    """Evaluate every point of ``spec``; records come back canonically sorted."""
    sched = spec.schedule
    cfg = spec.cfg
    groups: dict[tuple[str, float], list] = {}
    all_points = spec.points()
    for model in spec.models:
        pts = [p[1:] for p in all_points if p[0] == model]
        for pt, rate in zip(pts, _build(model, sched, pts).rate_bound()):
            groups.setdefault((model, step_for_rate(float(rate), cfg)), []).append(pt)
    tasks = []
    for (model, _), pts in sorted(groups.items()):
        for i in range(0, len(pts), MAX_BATCH):
            tasks.append((sched, cfg, model, pts[i:i + MAX_BATCH]))
    jobs = default_jobs() if jobs is None else max(1, jobs)
    log.info("sweep %s: %d points in %d batches, %d worker(s)",
             spec.sequence.value, sum(len(t[3]) for t in tasks), len(tasks), jobs)
    if jobs == 1 or len(tasks) == 1:
        results = [_run_group(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=min(jobs, len(tasks))) as pool:
            results = list(pool.map(_run_group, tasks))
    records = [r for batch in results for r in batch]
    return sorted(records, key=lambda r: r.key)


def _require_single(spec: SweepSpec, *names: str) -> None:
    for name in names:
        if len(getattr(spec, name)) != 1:
            raise ValueError(f"this sweep needs a single {name} value")


def sweep_gamma(spec: SweepSpec, jobs: int | None = None) -> list[EfficiencyRecord]:
    """P3 versus Gamma at fixed alpha and N."""
    _require_single(spec, "alphas", "n_photons")
    return run_sweep(spec, jobs)


def sweep_gamma_alpha(spec: SweepSpec, jobs: int | None = None) -> list[EfficiencyRecord]:
    """P3 over the (Gamma, alpha) plane at fixed N."""
    _require_single(spec, "n_photons")
    return run_sweep(spec, jobs)


def sweep_gamma_n(spec: SweepSpec, jobs: int | None = None) -> list[EfficiencyRecord]:
    """P3 over the (Gamma, N) plane at fixed alpha."""
    _require_single(spec, "alphas")
    return run_sweep(spec, jobs)


@dataclass
class ModelComparison:
    sequence: str
    gammas: np.ndarray
    microscopic: np.ndarray
    phenomenological: np.ndarray
    records: list[EfficiencyRecord]

    @property
    def difference(self) -> np.ndarray:
        """Microscopic minus phenomenological efficiency, per grid point."""
        return self.microscopic - self.phenomenological

    @property
    def max_abs_gap(self) -> float:
        return float(np.max(np.abs(self.difference)))

    @property
    def max_advantage(self) -> float:
        return float(np.max(self.difference))

    @property
    def min_advantage(self) -> float:
        return float(np.min(self.difference))

    @property
    def crossovers(self) -> list[float]:
        """Gammas where the difference changes sign, interpolated in log Gamma."""
        d = self.difference
        out = []
        for i in range(len(d) - 1):
            if d[i] == 0.0:
                out.append(float(self.gammas[i]))
            elif d[i] * d[i + 1] < 0:
                lo, hi = np.log(self.gammas[i]), np.log(self.gammas[i + 1])
                x = lo + (hi - lo) * d[i] / (d[i] - d[i + 1])
                out.append(float(np.exp(x)))
        return out

    def summary(self) -> dict:
        return {"sequence": self.sequence, "points": int(len(self.gammas)),
                "max_abs_gap": self.max_abs_gap, "max_advantage": self.max_advantage,
                "min_advantage": self.min_advantage, "crossover_gammas": self.crossovers}


def compare_models(sequence, gammas=None, alpha: float = 1.0, *, omega0: float = 25.0,
                   tau: float = 1.5, delta: float = 1.0, cfg: IntegratorConfig | None = None,
                   jobs: int | None = None) -> ModelComparison:
    """Run both models on a Gamma grid (N = 0, Gamma_1 = Gamma, Gamma_3 = alpha Gamma)."""
    gammas = default_gammas() if gammas is None else tuple(gammas)
    if len(gammas) == 0:
        raise ValueError("gamma grid is empty")
    spec = SweepSpec(sequence=sequence, model="both", gammas=tuple(sorted(set(gammas))),
                     alphas=(alpha,), n_photons=(0.0,), omega0=omega0, tau=tau,
                     delta=delta, cfg=cfg or IntegratorConfig())
    records = sweep_gamma(spec, jobs)
    by = {(r.model, r.gamma): r.p3_final for r in records}
    g = np.array(spec.gammas)
    return ModelComparison(spec.sequence.value, g,
                           np.array([by[("microscopic", x)] for x in g]),
                           np.array([by[("phenomenological", x)] for x in g]),
                           records)
