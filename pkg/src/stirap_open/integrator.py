"""Time propagation of the density matrix through the pulse sequence.

All models are batched: the state has shape (B, 3, 3) and every batch
member shares the pulse schedule while carrying its own decay rates.  A
sweep over Gamma (or alpha, or N) at fixed pulses therefore runs as one
propagation.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .core import dagger, pure_state, symmetrize
from .dissipator import (BathModel, Rates, channel_rates, commutator_term,
                         microscopic_generator, phenomenological_dissipation,
                         phenomenological_generator, rates_from)
from .drive import PulseSchedule, angles_at, dressed_frame, dressed_kets, hamiltonian

log = logging.getLogger(__name__)

MODELS = ("microscopic", "phenomenological")

# RK4 is stable on the negative real axis up to h*lambda ~ 2.78
RK4_STABILITY = 2.0


class IntegrationError(RuntimeError):
    """Propagation produced a non-physical or non-finite state."""

    def __init__(self, message: str, t: float | None = None, index=None):
        super().__init__(message)
        self.t = t
        self.index = index


@dataclass(frozen=True)
class IntegratorConfig:
    t_start: float = -6.0
    t_end: float = 6.0
    step_mode: str = "fixed"
    h: float = 1e-3
    rel_tol: float = 1e-9
    abs_tol: float = 1e-11
    invariant_check_every: int = 100
    n_samples: int = 600
    physicality_tol: float = 1e-6
    stability_cap: bool = True
    refinement: int = 0

    def __post_init__(self):
        if not self.t_start < self.t_end:
            raise ValueError("t_start must precede t_end")
        if self.step_mode not in ("fixed", "adaptive"):
            raise ValueError(f"unknown step_mode {self.step_mode!r}")
        if not self.h > 0:
            raise ValueError("step h must be positive")
        if not (self.rel_tol > 0 and self.abs_tol > 0):
            raise ValueError("tolerances must be positive")
        if self.refinement < 0:
            raise ValueError("refinement must be non-negative")
        if self.invariant_check_every < 1 or self.n_samples < 2:
            raise ValueError("invariant_check_every >= 1 and n_samples >= 2 required")

    def refined(self) -> "IntegratorConfig":
        """Config with halved effective step (fixed) or tolerances divided by ten
        (adaptive)."""
        from dataclasses import replace
        if self.step_mode == "fixed":
            return replace(self, refinement=self.refinement + 1)
        return replace(self, rel_tol=0.1 * self.rel_tol, abs_tol=0.1 * self.abs_tol)


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    bare: np.ndarray  # (samples, B, 3): rho_11, rho_22, rho_33
    dressed: np.ndarray  # (samples, B, 3): P+, P0, P-
    trace_error: np.ndarray  # (samples, B)
    min_eigenvalue: np.ndarray  # (samples, B)
    steps: int = 0
    step_size: float = float("nan")
    # per-member worst values over every check, not only the samples
    diagnostics: dict = field(default_factory=dict)


def _channel_maps() -> np.ndarray:
    """Map from the seven channel rates to the dressed-basis decay matrix K
    (first 9 columns) and the population inflow matrix (last 9).

    The dressed dissipator acts elementwise: d rho_mn = -K_mn rho_mn, plus
    inflow[target, source] * rho_source,source on the diagonal.
    """
    maps = np.zeros((7, 18))
    # (source, target) of each transfer channel; index 3 is the dephasing
    transfers = {0: (0, 1), 1: (1, 2), 2: (0, 2), 4: (1, 0), 5: (2, 1), 6: (2, 0)}
    deph = np.array([1.0, 0.0, -1.0])
    for c in range(7):
        k = np.zeros((3, 3))
        inflow = np.zeros((3, 3))
        if c == 3:
            k += 0.5 * (deph[:, None] - deph[None, :]) ** 2
        else:
            src, tgt = transfers[c]
            k[src, :] += 0.5
            k[:, src] += 0.5
            inflow[tgt, src] = 1.0
        maps[c, :9] = k.ravel()
        maps[c, 9:] = inflow.ravel()
    return maps


_CHANNEL_MAPS = _channel_maps()
_UNIT_CLASSES = Rates(*np.eye(4))


class MicroscopicModel:
    """Dressed-state master equation for a batch of baths at fixed pulses."""

    name = "microscopic"

    def __init__(self, sched: PulseSchedule, gamma, alpha=1.0, n_photons=0.0):
        self.sched = sched
        g, a, n = np.broadcast_arrays(np.atleast_1d(np.asarray(gamma, dtype=float)),
                                      np.asarray(alpha, dtype=float),
                                      np.asarray(n_photons, dtype=float))
        for arr, name in ((g, "gamma"), (a, "alpha"), (n, "n_photons")):
            if np.any(~np.isfinite(arr)) or np.any(arr < 0):
                raise ValueError(f"{name} must be finite and non-negative")
        self.gamma, self.alpha, self.n_photons = g.copy(), a.copy(), n.copy()
        self.rates = Rates(*(np.asarray(x) for x in rates_from(g, a, n)))
        self._rate_matrix = np.stack(self.rates, axis=-1)
        self._cache_t = None
        self._cache = None

    @classmethod
    def from_bath(cls, sched: PulseSchedule, bath: BathModel) -> "MicroscopicModel":
        return cls(sched, bath.gamma, bath.alpha, bath.n_photons)

    @property
    def batch(self) -> int:
        return self.gamma.shape[0]

    def rate_bound(self) -> np.ndarray:
        """Per-member upper bound on the decay rate of any matrix element."""
        r = self.rates
        return 2.0 * (r.aa_pp + r.aa_mm + r.bb_pp + r.bb_mm)

    def max_rate(self) -> float:
        return float(np.max(self.rate_bound()))

    def _coefficients(self, t: float):
        if t == self._cache_t:
            return self._cache
        theta, phi, _ = angles_at(t, self.sched)
        # channel rates are linear in the four rate classes; the sum is written
        # out so each member's arithmetic does not depend on the batch size
        per_class = np.array(channel_rates(theta, phi, _UNIT_CLASSES)).T @ _CHANNEL_MAPS
        r = self._rate_matrix
        coeff = (r[:, 0:1] * per_class[0] + r[:, 1:2] * per_class[1]
                 + r[:, 2:3] * per_class[2] + r[:, 3:4] * per_class[3])
        k = coeff[:, :9].reshape(-1, 3, 3)
        inflow = coeff[:, 9:].reshape(-1, 3, 3)
        self._cache_t = t
        self._cache = (hamiltonian(t, self.sched), dressed_kets(theta, phi), k, inflow)
        return self._cache

    def rhs(self, t: float, rho: np.ndarray) -> np.ndarray:
        h, kets, k, inflow = self._coefficients(t)
        rho_d = kets.T @ rho @ kets
        pops = np.real(np.diagonal(rho_d, axis1=-2, axis2=-1))
        d = -k * rho_d
        idx = np.arange(3)
        d[..., idx, idx] += (inflow[..., 0] * pops[..., 0:1] + inflow[..., 1] * pops[..., 1:2]
                             + inflow[..., 2] * pops[..., 2:3])
        return commutator_term(h, rho) + kets @ d @ kets.T

    def reference_rhs(self, t: float, rho: np.ndarray, i: int = 0) -> np.ndarray:
        """Generator for batch member ``i`` through the generic Lindblad path."""
        bath = BathModel(float(self.gamma[i]), float(self.alpha[i]), float(self.n_photons[i]))
        return microscopic_generator(t, self.sched, bath, rho)


class PhenomenologicalModel:
    """Bare-state spontaneous-emission model for a batch of (Gamma_1, Gamma_3)."""

    name = "phenomenological"

    def __init__(self, sched: PulseSchedule, gamma1, gamma3):
        self.sched = sched
        g1, g3 = np.broadcast_arrays(np.atleast_1d(np.asarray(gamma1, dtype=float)),
                                     np.asarray(gamma3, dtype=float))
        if np.any(~np.isfinite(g1)) or np.any(g1 < 0) or np.any(~np.isfinite(g3)) or np.any(g3 < 0):
            raise ValueError("phenomenological rates must be finite and non-negative")
        self.gamma1, self.gamma3 = g1.copy(), g3.copy()

    @classmethod
    def from_bath(cls, sched: PulseSchedule, bath: BathModel) -> "PhenomenologicalModel":
        return cls(sched, bath.gamma, bath.alpha * bath.gamma)

    @property
    def batch(self) -> int:
        return self.gamma1.shape[0]

    def rate_bound(self) -> np.ndarray:
        return 2.0 * (self.gamma1 + self.gamma3)

    def max_rate(self) -> float:
        return float(np.max(self.rate_bound()))

    def rhs(self, t: float, rho: np.ndarray) -> np.ndarray:
        return (commutator_term(hamiltonian(t, self.sched), rho)
                + phenomenological_dissipation(self.gamma1, self.gamma3, rho))

    def reference_rhs(self, t: float, rho: np.ndarray, i: int = 0) -> np.ndarray:
        return phenomenological_generator(t, self.sched, float(self.gamma1[i]),
                                          float(self.gamma3[i]), rho)


def make_model(model: str, sched: PulseSchedule, params):
    """Build a model from a BathModel, or from (Gamma_1, Gamma_3) for the
    phenomenological one."""
    if model == "microscopic":
        if not isinstance(params, BathModel):
            raise TypeError("microscopic model needs a BathModel")
        return MicroscopicModel.from_bath(sched, params)
    if model == "phenomenological":
        if isinstance(params, BathModel):
            return PhenomenologicalModel.from_bath(sched, params)
        g1, g3 = params
        return PhenomenologicalModel(sched, g1, g3)
    raise ValueError(f"unknown model {model!r}; expected one of {MODELS}")


def rhs(model, t: float, rho: np.ndarray) -> np.ndarray:
    """Right-hand side d rho/dt for a model object (batched or single rho)."""
    single = np.ndim(rho) == 2
    out = model.rhs(t, rho[None] if single else rho)
    return out[0] if single else out


# Dormand-Prince 5(4) tableau
_DP_C = (0.0, 1 / 5, 3 / 10, 4 / 5, 8 / 9, 1.0, 1.0)
_DP_A = (
    (),
    (1 / 5,),
    (3 / 40, 9 / 40),
    (44 / 45, -56 / 15, 32 / 9),
    (19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729),
    (9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656),
    (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84),
)
_DP_B = (35 / 384, 0.0, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84, 0.0)
_DP_E = (71 / 57600, 0.0, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40)


def _rk4_step(f, t, y, h):
    k1 = f(t, y)
    k2 = f(t + 0.5 * h, y + (0.5 * h) * k1)
    k3 = f(t + 0.5 * h, y + (0.5 * h) * k2)
    k4 = f(t + h, y + h * k3)
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


def _dp_step(f, t, y, h, k1):
    ks = [k1]
    for i in range(1, 7):
        yi = y + h * sum(a * k for a, k in zip(_DP_A[i], ks))
        ks.append(f(t + _DP_C[i] * h, yi))
    y_new = y + h * sum(b * k for b, k in zip(_DP_B, ks) if b)
    err = h * sum(e * k for e, k in zip(_DP_E, ks) if e)
    return y_new, err, ks[-1]


class _Monitor:
    """Samples the trajectory and checks physicality along the way."""

    def __init__(self, sched: PulseSchedule, sample_times: np.ndarray, batch: int, tol: float):
        self.sched = sched
        self.sample_times = sample_times
        self.tol = tol
        n = len(sample_times)
        self.times = np.empty(n)
        self.bare = np.empty((n, batch, 3))
        self.dressed = np.empty((n, batch, 3))
        self.trace_error = np.empty((n, batch))
        self.min_eig = np.empty((n, batch))
        self.next = 0
        self.worst_trace = np.zeros(batch)
        self.worst_eig = np.full(batch, np.inf)
        self.worst_herm = np.zeros(batch)

    def check(self, t: float, rho: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        if not np.all(np.isfinite(rho)):
            bad = np.nonzero(~np.all(np.isfinite(rho), axis=(-2, -1)))[0]
            raise IntegrationError(f"non-finite state at t={t:.6g}", t, bad)
        terr = np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0)
        lam = np.linalg.eigvalsh(rho)[..., 0]
        herm = np.max(np.abs(rho - dagger(rho)), axis=(-2, -1))
        np.maximum(self.worst_trace, terr, out=self.worst_trace)
        np.minimum(self.worst_eig, lam, out=self.worst_eig)
        np.maximum(self.worst_herm, herm, out=self.worst_herm)
        bad = np.nonzero((terr > self.tol) | (lam < -self.tol))[0]
        if bad.size:
            raise IntegrationError(
                f"physicality lost at t={t:.6g}: trace error {np.max(terr):.3e}, "
                f"min eigenvalue {np.min(lam):.3e}", t, bad)
        return terr, lam

    def sample(self, t: float, rho: np.ndarray) -> None:
        terr, lam = self.check(t, rho)
        i = self.next
        self.times[i] = t
        self.bare[i] = np.real(np.diagonal(rho, axis1=-2, axis2=-1))
        frame = dressed_frame(t, self.sched, check=False)
        self.dressed[i] = frame.populations(rho)
        self.trace_error[i] = terr
        self.min_eig[i] = lam
        self.next += 1

    def due(self, t: float) -> bool:
        return self.next < len(self.sample_times) and t >= self.sample_times[self.next] - 1e-12


def step_for_rate(rate: float, cfg: IntegratorConfig) -> float:
    """Fixed step for a point whose fastest decay rate is ``rate``.

    The configured step is halved until RK4 is comfortably stable; the
    quantisation to h / 2**k lets points with different rates share a
    batch without changing each other's results.
    """
    h = cfg.h
    if cfg.stability_cap and cfg.step_mode == "fixed":
        while rate * h > RK4_STABILITY:
            h *= 0.5
    return h * 0.5 ** cfg.refinement


def effective_step(model, cfg: IntegratorConfig) -> float:
    return step_for_rate(model.max_rate(), cfg)


def propagate(model, rho0: np.ndarray | None = None,
              cfg: IntegratorConfig | None = None) -> tuple[np.ndarray, TrajectoryRecord]:
    """Integrate a (batched) model from cfg.t_start to cfg.t_end.

    ``rho0`` is a single 3x3 state shared by all batch members or a
    (B, 3, 3) stack; it defaults to |1><1|.
    """
    cfg = cfg or IntegratorConfig()
    if rho0 is None:
        rho0 = pure_state(1)
    rho = np.array(rho0, dtype=complex)
    if rho.ndim == 2:
        rho = np.broadcast_to(rho, (model.batch, 3, 3)).copy()
    if rho.shape != (model.batch, 3, 3):
        raise ValueError(f"initial state shape {rho.shape} does not match batch {model.batch}")

    t0, t1 = cfg.t_start, cfg.t_end
    sample_times = np.linspace(t0, t1, cfg.n_samples)
    mon = _Monitor(model.sched, sample_times, model.batch, cfg.physicality_tol)
    mon.sample(t0, rho)
    f = model.rhs

    if cfg.step_mode == "fixed":
        h_target = effective_step(model, cfg)
        nsteps = max(1, math.ceil((t1 - t0) / h_target - 1e-9))
        h = (t1 - t0) / nsteps
        for n in range(1, nsteps + 1):
            t = t0 + (n - 1) * h
            rho = symmetrize(_rk4_step(f, t, rho, h))
            t_new = t0 + n * h
            if mon.due(t_new):
                mon.sample(t_new, rho)
            elif n % cfg.invariant_check_every == 0:
                mon.check(t_new, rho)
        steps = nsteps
    else:
        rho, steps, h = _adaptive(f, rho, cfg, mon)

    if mon.next < len(sample_times):
        mon.sample(t1, rho)
    record = TrajectoryRecord(
        times=mon.times[: mon.next].copy(), bare=mon.bare[: mon.next],
        dressed=mon.dressed[: mon.next], trace_error=mon.trace_error[: mon.next],
        min_eigenvalue=mon.min_eig[: mon.next], steps=steps, step_size=h,
        diagnostics={"max_trace_error": mon.worst_trace,
                     "min_eigenvalue": mon.worst_eig,
                     "max_hermiticity_error": mon.worst_herm})
    return rho, record


def _adaptive(f, rho, cfg: IntegratorConfig, mon: _Monitor):
    t, t1 = cfg.t_start, cfg.t_end
    h = cfg.h
    k1 = f(t, rho)
    steps = 0
    h_min = 1e-12 * (t1 - cfg.t_start)
    while t < t1 - 1e-14:
        # land exactly on the next sample time
        target = mon.sample_times[mon.next] if mon.next < len(mon.sample_times) else t1
        h_step = min(h, target - t) if target > t else min(h, t1 - t)
        y_new, err, k_last = _dp_step(f, t, rho, h_step, k1)
        scale = cfg.abs_tol + cfg.rel_tol * np.maximum(np.abs(rho), np.abs(y_new))
        enorm = float(np.sqrt(np.mean(np.abs(err / scale) ** 2)))
        if not np.isfinite(enorm):
            raise IntegrationError(f"non-finite error estimate at t={t:.6g}", t)
        if enorm <= 1.0:
            t += h_step
            rho = symmetrize(y_new)
            k1 = k_last if np.array_equal(y_new, rho) else f(t, rho)
            steps += 1
            if mon.due(t):
                mon.sample(t, rho)
            elif steps % cfg.invariant_check_every == 0:
                mon.check(t, rho)
        factor = 0.9 * enorm ** -0.2 if enorm > 0 else 5.0
        h = h_step * min(5.0, max(0.2, factor))
        if h < h_min:
            raise IntegrationError(f"step size underflow at t={t:.6g}", t)
    return rho, steps, h


def evolve(model: str, sched: PulseSchedule, params, rho0: np.ndarray | None = None,
           cfg: IntegratorConfig | None = None) -> tuple[np.ndarray, TrajectoryRecord]:
    """Propagate a single parameter point and return (rho_final, trajectory)."""
    m = make_model(model, sched, params)
    rho, record = propagate(m, rho0, cfg)
    return rho[0], record


def dissipative_flow(theta: float, phi: float, bath: BathModel, rho0: np.ndarray,
                     t_end: float, h: float = 1e-2, n_samples: int = 501):
    """Integrate the dressed dissipator alone at frozen angles.

    Works directly in the dressed basis (index order +, 0, -), with no
    Hamiltonian term.  Returns (times, states) with states of shape
    (n_samples, 3, 3).
    """
    from .dissipator import jump_operators, lindblad_dissipator

    terms = jump_operators(theta, phi, bath)

    def f(_t, rho):
        return lindblad_dissipator(terms, rho)

    nsteps = max(1, math.ceil(t_end / h))
    h = t_end / nsteps
    stride = max(1, nsteps // (n_samples - 1))
    rho = np.array(rho0, dtype=complex)
    times, states = [0.0], [rho.copy()]
    for n in range(1, nsteps + 1):
        rho = symmetrize(_rk4_step(f, (n - 1) * h, rho, h))
        if n % stride == 0 or n == nsteps:
            times.append(n * h)
            states.append(rho.copy())
    return np.array(times), np.array(states)
