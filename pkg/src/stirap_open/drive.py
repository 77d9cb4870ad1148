"""Gaussian pulse pair, mixing angles and the instantaneous dressed frame.

Time is measured in units of the pulse width T, so all rates and
frequencies are in units of 1/T.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

EIGEN_RESIDUAL_TOL = 1e-10


class Sequence(str, enum.Enum):
    COUNTERINTUITIVE = "counterintuitive"  # STIRAP, Stokes before pump
    INTUITIVE = "intuitive"  # b-STIRAP, pump before Stokes

    @classmethod
    def parse(cls, value: "str | Sequence") -> "Sequence":
        if isinstance(value, cls):
            return value
        aliases = {"ci": cls.COUNTERINTUITIVE, "stirap": cls.COUNTERINTUITIVE,
                   "i": cls.INTUITIVE, "in": cls.INTUITIVE,
                   "b-stirap": cls.INTUITIVE, "bstirap": cls.INTUITIVE}
        key = str(value).strip().lower()
        if key in aliases:
            return aliases[key]
        return cls(key)


@dataclass(frozen=True)
class PulseSchedule:
    omega0: float = 25.0
    tau: float = 1.5
    delta: float = 1.0
    sequence: Sequence = Sequence.COUNTERINTUITIVE
    width: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "sequence", Sequence.parse(self.sequence))
        for name in ("omega0", "tau", "delta", "width"):
            if not math.isfinite(getattr(self, name)):
                raise ValueError(f"{name} must be finite")
        if self.omega0 < 0:
            raise ValueError("omega0 must be non-negative")
        if self.width <= 0:
            raise ValueError("pulse width must be positive")
        if self.delta <= 0:
            raise ValueError("detuning delta must be positive")

    @property
    def log_ratio_rate(self) -> float:
        """Slope k of ln(Omega_p / Omega_s) = k t."""
        k = 2.0 * self.tau / self.width**2
        return k if self.sequence is Sequence.COUNTERINTUITIVE else -k


def gaussian_pair(t: float, sched: PulseSchedule) -> tuple[float, float]:
    """The two Gaussians (Omega_1, Omega_2), peaked at +tau/2 and -tau/2."""
    a = 0.5 * sched.omega0
    w2 = sched.width**2
    om1 = a * math.exp(-(t - 0.5 * sched.tau) ** 2 / w2)
    om2 = a * math.exp(-(t + 0.5 * sched.tau) ** 2 / w2)
    return om1, om2


def pulse_amplitudes(t: float, sched: PulseSchedule) -> tuple[float, float]:
    """Pump and Stokes Rabi frequencies (Omega_p, Omega_s) at time t."""
    om1, om2 = gaussian_pair(t, sched)
    if sched.sequence is Sequence.COUNTERINTUITIVE:
        return om1, om2
    return om2, om1


def mixing_angles(omega_p: float, omega_s: float, delta: float) -> tuple[float, float, float]:
    """Return (theta, phi, Omega) for the given couplings and detuning.

    theta = atan2(Omega_p, Omega_s), Omega = hypot(Omega_p, Omega_s) and
    phi = atan2(2 Omega, Delta) / 2.
    """
    if omega_p < 0 or omega_s < 0:
        raise ValueError("Rabi frequencies must be non-negative")
    if omega_p == 0 and omega_s == 0:
        raise ValueError("mixing angles undefined when both pulses vanish")
    if delta <= 0:
        raise ValueError("detuning must be positive")
    rabi = math.hypot(omega_p, omega_s)
    return math.atan2(omega_p, omega_s), 0.5 * math.atan2(2.0 * rabi, delta), rabi


def theta_at(t: float, sched: PulseSchedule) -> float:
    """theta(t) = atan(exp(k t)); exact even where both Gaussians underflow."""
    x = sched.log_ratio_rate * t
    # atan2(e^{x/2}, e^{-x/2}) avoids the overflow of exp(x)
    x = max(-1400.0, min(1400.0, x))
    return math.atan2(math.exp(0.5 * x), math.exp(-0.5 * x))


def hamiltonian_from(omega_p: float, omega_s: float, delta: float) -> np.ndarray:
    return np.array([[0.0, omega_p, 0.0],
                     [omega_p, delta, omega_s],
                     [0.0, omega_s, 0.0]])


def hamiltonian(t: float, sched: PulseSchedule) -> np.ndarray:
    """Rotating-frame system Hamiltonian H_s(t) (real symmetric)."""
    om_p, om_s = pulse_amplitudes(t, sched)
    return hamiltonian_from(om_p, om_s, sched.delta)


def dressed_kets(theta: float, phi: float) -> np.ndarray:
    """Columns |+>, |0>, |-> in the bare basis."""
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    return np.array([[sp * st, ct, cp * st],
                     [cp, 0.0, -sp],
                     [sp * ct, -st, cp * ct]])


@dataclass(frozen=True)
class DressedFrame:
    theta: float
    phi: float
    rabi: float
    delta: float
    omega_plus: float
    omega_minus: float
    kets: np.ndarray  # columns |+>, |0>, |->
    hamiltonian: np.ndarray

    omega_zero = 0.0

    @property
    def eigenvalues(self) -> tuple[float, float, float]:
        return self.omega_plus, 0.0, self.omega_minus

    @property
    def plus(self) -> np.ndarray:
        return self.kets[:, 0]

    @property
    def zero(self) -> np.ndarray:
        return self.kets[:, 1]

    @property
    def minus(self) -> np.ndarray:
        return self.kets[:, 2]

    def eigen_residual(self) -> float:
        h = self.hamiltonian
        res = h @ self.kets - self.kets * np.array(self.eigenvalues)
        return float(np.max(np.abs(res)))

    def populations(self, rho: np.ndarray) -> np.ndarray:
        """Dressed populations (P+, P0, P-) of a bare-basis state."""
        k = self.kets
        return np.real(np.einsum("ia,...ij,ja->...a", k, rho, k))

    @classmethod
    def from_angles(cls, theta: float, phi: float, rabi: float = 1.0) -> "DressedFrame":
        """Frame for given angles, rebuilding a Hamiltonian consistent with them."""
        if not 0.0 < phi < 0.25 * math.pi:
            raise ValueError("phi must lie in (0, pi/4) to give a positive detuning")
        delta = 2.0 * rabi / math.tan(2.0 * phi)
        h = hamiltonian_from(rabi * math.sin(theta), rabi * math.cos(theta), delta)
        return _build_frame(theta, phi, rabi, delta, h)


def _eigenvalues(rabi: float, phi: float, delta: float) -> tuple[float, float]:
    # Omega cot(phi) and -Omega tan(phi); phi -> 0 limit of the first is Delta
    if phi == 0.0:
        return delta, 0.0
    return rabi / math.tan(phi), -rabi * math.tan(phi)


def _build_frame(theta: float, phi: float, rabi: float, delta: float,
                 h: np.ndarray) -> DressedFrame:
    w_plus, w_minus = _eigenvalues(rabi, phi, delta)
    return DressedFrame(theta=theta, phi=phi, rabi=rabi, delta=delta,
                        omega_plus=w_plus, omega_minus=w_minus,
                        kets=dressed_kets(theta, phi), hamiltonian=h)


def angles_at(t: float, sched: PulseSchedule) -> tuple[float, float, float]:
    """(theta, phi, Omega) at time t with theta taken from the log-ratio form."""
    om_p, om_s = pulse_amplitudes(t, sched)
    rabi = math.hypot(om_p, om_s)
    phi = 0.5 * math.atan2(2.0 * rabi, sched.delta)
    return theta_at(t, sched), phi, rabi


def dressed_frame(t: float, sched: PulseSchedule, *, check: bool = True) -> DressedFrame:
    """Closed-form dressed eigensystem of H_s(t), verified against H_s(t)."""
    theta, phi, rabi = angles_at(t, sched)
    frame = _build_frame(theta, phi, rabi, sched.delta, hamiltonian(t, sched))
    if check:
        res = frame.eigen_residual()
        if res > EIGEN_RESIDUAL_TOL:
            raise ArithmeticError(
                f"dressed eigenvectors fail H|v> = w|v> at t={t} (residual {res:.3e})")
    return frame
