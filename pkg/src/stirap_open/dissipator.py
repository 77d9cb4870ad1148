"""Dissipators for the driven Lambda system.

Two models are provided:

* the microscopic dressed-state master equation, whose jump operators
  connect the instantaneous eigenstates |+>, |0>, |-> of H_s(t), with
  flat spectral densities J_a = Gamma, J_b = alpha * Gamma and a single
  thermal occupation N for both optical transitions;
* the phenomenological bare-state model of spontaneous emission from
  |2> to |1> and |3> with rates Gamma_1 and Gamma_3.

Dressed-basis matrices use the index order (+, 0, -).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .core import dagger
from .drive import PulseSchedule, dressed_frame, hamiltonian

PLUS, ZERO, MINUS = 0, 1, 2


@dataclass(frozen=True)
class BathModel:
    gamma: float = 1.0
    alpha: float = 1.0
    n_photons: float = 0.0

    def __post_init__(self):
        for name in ("gamma", "alpha", "n_photons"):
            v = getattr(self, name)
            if not math.isfinite(v) or v < 0:
                raise ValueError(f"{name} must be finite and non-negative, got {v!r}")


class Rates(NamedTuple):
    """Flat-spectrum rates.  ``pp`` is emission (1 + N), ``mm`` absorption (N)."""

    aa_pp: float
    bb_pp: float
    aa_mm: float
    bb_mm: float


def rates(bath: BathModel) -> Rates:
    return rates_from(bath.gamma, bath.alpha, bath.n_photons)


def rates_from(gamma, alpha, n_photons) -> Rates:
    """Array-friendly version of :func:`rates`."""
    ga = gamma
    gb = alpha * gamma
    return Rates(ga * (1.0 + n_photons), gb * (1.0 + n_photons),
                 ga * n_photons, gb * n_photons)


@dataclass(frozen=True)
class LindbladTerm:
    jump: np.ndarray
    rate: float

    def __post_init__(self):
        if np.any(np.asarray(self.rate) < 0):
            raise ValueError("Lindblad rates must be non-negative")


def _ketbra(i: int, j: int) -> np.ndarray:
    m = np.zeros((3, 3))
    m[i, j] = 1.0
    return m


# channel order: +->0, 0->-, +->-, dephasing, 0->+, -->0, -->+
CHANNEL_NAMES = ("+->0", "0->-", "+->-", "dephasing", "0->+", "-->0", "-->+")
DRESSED_JUMPS = (
    _ketbra(ZERO, PLUS),
    _ketbra(MINUS, ZERO),
    _ketbra(MINUS, PLUS),
    np.diag([1.0, 0.0, -1.0]),
    _ketbra(PLUS, ZERO),
    _ketbra(ZERO, MINUS),
    _ketbra(PLUS, MINUS),
)


def check_angles(theta: float, phi: float) -> None:
    if not -1e-12 <= theta <= 0.5 * math.pi + 1e-12:
        raise ValueError(f"theta={theta!r} outside [0, pi/2]")
    if not -1e-12 <= phi < 0.5 * math.pi:
        raise ValueError(f"phi={phi!r} outside [0, pi/2)")


def channel_rates(theta: float, phi: float, r: Rates) -> tuple:
    """Rates of the seven dressed channels (order of ``CHANNEL_NAMES``).

    Entries of ``r`` may be arrays, in which case each returned rate is an
    array of the same shape.
    """
    c2t, s2t = math.cos(theta) ** 2, math.sin(theta) ** 2
    c2p, s2p = math.cos(phi) ** 2, math.sin(phi) ** 2
    c4p, s4p = c2p * c2p, s2p * s2p
    return (
        (r.aa_pp * c2t + r.bb_pp * s2t) * c2p,
        (r.aa_mm * c2t + r.bb_mm * s2t) * s2p,
        r.aa_pp * s2t * c4p + r.aa_mm * s2t * s4p + r.bb_pp * c2t * c4p + r.bb_mm * c2t * s4p,
        ((r.aa_pp + r.aa_mm) * s2t + (r.bb_pp + r.bb_mm) * c2t) * s2p * c2p,
        (r.aa_mm * c2t + r.bb_mm * s2t) * c2p,
        (r.aa_pp * c2t + r.bb_pp * s2t) * s2p,
        r.aa_mm * s2t * c4p + r.aa_pp * s2t * s4p + r.bb_mm * c2t * c4p + r.bb_pp * c2t * s4p,
    )


def jump_operators(theta: float, phi: float, bath: BathModel) -> list[LindbladTerm]:
    """The seven finite-temperature channels in the dressed basis."""
    check_angles(theta, phi)
    return [LindbladTerm(jump, rate)
            for jump, rate in zip(DRESSED_JUMPS, channel_rates(theta, phi, rates(bath)))]


def zero_temperature_jump_operators(theta: float, phi: float,
                                    bath: BathModel) -> list[LindbladTerm]:
    """The five channels that remain at N = 0, written out independently.

    Only the emission rates enter; ``bath.n_photons`` is ignored.
    """
    check_angles(theta, phi)
    ga, gb = bath.gamma, bath.alpha * bath.gamma
    c2t, s2t = math.cos(theta) ** 2, math.sin(theta) ** 2
    c2p, s2p = math.cos(phi) ** 2, math.sin(phi) ** 2
    to_zero = ga * c2t + gb * s2t
    between = ga * s2t + gb * c2t
    return [
        LindbladTerm(_ketbra(ZERO, PLUS), to_zero * c2p),
        LindbladTerm(_ketbra(ZERO, MINUS), to_zero * s2p),
        LindbladTerm(_ketbra(MINUS, PLUS), between * c2p * c2p),
        LindbladTerm(_ketbra(PLUS, MINUS), between * s2p * s2p),
        LindbladTerm(np.diag([1.0, 0.0, -1.0]), between * s2p * c2p),
    ]


def appendix_components(theta: float, phi: float) -> dict:
    """Closed-form spectral components of the four coupling operators.

    Keys are ``(channel, sign, (m, n))`` with channel in {"a", "b"}, sign in
    {"+", "-"} and (m, n) the dressed labels of the Bohr frequency
    w_m - w_n; values are dressed-basis matrices.  Only the non-zero
    components are listed.  Negative frequencies follow from
    A^{+/-}(-w) = (A^{-/+}(w))^dagger.
    """
    st, ct = math.sin(theta), math.cos(theta)
    sp, cp = math.sin(phi), math.cos(phi)
    deph = np.diag([1.0, 0.0, -1.0])
    pos = {
        ("a", "+", ("+", "0")): ct * cp * _ketbra(ZERO, PLUS),
        ("b", "+", ("+", "0")): -st * cp * _ketbra(ZERO, PLUS),
        ("a", "-", ("0", "-")): -ct * sp * _ketbra(MINUS, ZERO),
        ("b", "-", ("0", "-")): st * sp * _ketbra(MINUS, ZERO),
        ("a", "+", ("+", "-")): st * cp * cp * _ketbra(MINUS, PLUS),
        ("a", "-", ("+", "-")): -st * sp * sp * _ketbra(MINUS, PLUS),
        ("b", "+", ("+", "-")): ct * cp * cp * _ketbra(MINUS, PLUS),
        ("b", "-", ("+", "-")): -ct * sp * sp * _ketbra(MINUS, PLUS),
    }
    out = dict(pos)
    flip = {"+": "-", "-": "+"}
    for (ch, sign, (m, n)), mat in pos.items():
        out[(ch, flip[sign], (n, m))] = mat.T
    for sign in "+-":
        out[("a", sign, ("0", "0"))] = st * sp * cp * deph
        out[("b", sign, ("0", "0"))] = ct * sp * cp * deph
    return out


def lindblad_dissipator(terms, rho: np.ndarray) -> np.ndarray:
    """Sum of rate * (L rho L^dag - {L^dag L, rho} / 2) over ``terms``.

    ``rho`` may be batched (..., 3, 3); a term's rate may then be an array
    broadcastable against the batch shape.
    """
    out = np.zeros(np.shape(rho), dtype=complex)
    for term in terms:
        rate = np.asarray(term.rate)
        if not np.any(rate):
            continue
        L = term.jump
        Ld = dagger(L)
        LdL = Ld @ L
        d = L @ rho @ Ld - 0.5 * (LdL @ rho + rho @ LdL)
        out += rate[..., None, None] * d
    return out


def commutator_term(h: np.ndarray, rho: np.ndarray) -> np.ndarray:
    """-i [H, rho]."""
    return -1j * (h @ rho - rho @ h)


def dressed_dissipator(theta: float, phi: float, r: Rates, rho: np.ndarray,
                       kets: np.ndarray) -> np.ndarray:
    """Microscopic dissipator applied to a bare-basis rho.

    Rotates into the dressed frame spanned by the columns of ``kets``,
    applies the seven channels and rotates back.
    """
    rho_d = dagger(kets) @ rho @ kets
    terms = [LindbladTerm(j, np.asarray(c))
             for j, c in zip(DRESSED_JUMPS, channel_rates(theta, phi, r))]
    d = lindblad_dissipator(terms, rho_d)
    return kets @ d @ dagger(kets)


def microscopic_generator(t: float, sched: PulseSchedule, bath: BathModel,
                          rho: np.ndarray) -> np.ndarray:
    """d rho / dt of the microscopic model (finite temperature)."""
    frame = dressed_frame(t, sched)
    terms = jump_operators(frame.theta, frame.phi, bath)
    rho_d = dagger(frame.kets) @ rho @ frame.kets
    diss = frame.kets @ lindblad_dissipator(terms, rho_d) @ frame.kets.T
    return commutator_term(frame.hamiltonian, rho) + diss


def zero_temperature_generator(t: float, sched: PulseSchedule, bath: BathModel,
                               rho: np.ndarray) -> np.ndarray:
    """d rho / dt of the microscopic model at N = 0 via the five-channel form."""
    frame = dressed_frame(t, sched)
    terms = zero_temperature_jump_operators(frame.theta, frame.phi, bath)
    rho_d = dagger(frame.kets) @ rho @ frame.kets
    diss = frame.kets @ lindblad_dissipator(terms, rho_d) @ frame.kets.T
    return commutator_term(frame.hamiltonian, rho) + diss


def phenomenological_dissipation(gamma1, gamma3, rho: np.ndarray) -> np.ndarray:
    """The matrix -D/2 of the bare-state spontaneous-emission model."""
    g1 = np.asarray(gamma1, dtype=float)[..., None, None]
    g3 = np.asarray(gamma3, dtype=float)[..., None, None]
    gsum = g1 + g3
    p2 = rho[..., 1:2, 1:2]
    mask = np.array([[0.0, 1.0, 0.0], [1.0, 0.0, 1.0], [0.0, 1.0, 0.0]])
    d = gsum * mask * rho
    d = d + p2 * (np.array([[-2.0, 0, 0], [0, 0, 0], [0, 0, 0]]) * g1
                  + np.array([[0, 0, 0], [0, 2.0, 0], [0, 0, 0]]) * gsum
                  + np.array([[0, 0, 0], [0, 0, 0], [0, 0, -2.0]]) * g3)
    return -0.5 * d


def phenomenological_generator(t: float, sched: PulseSchedule, gamma1: float,
                               gamma3: float, rho: np.ndarray) -> np.ndarray:
    """d rho / dt of the phenomenological model."""
    if gamma1 < 0 or gamma3 < 0:
        raise ValueError("decay rates must be non-negative")
    return (commutator_term(hamiltonian(t, sched), rho)
            + phenomenological_dissipation(gamma1, gamma3, rho))
