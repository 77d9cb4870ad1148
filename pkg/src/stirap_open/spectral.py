"""Secular master equation built from first principles.

This is the independent route used to check the closed-form dressed
dissipator: the coupling operators |1><2|, |2><1|, |3><2|, |2><3| are split
into Bohr-frequency components with projectors from a numerical
diagonalisation of H_s, and each component enters its own Lindblad term
with the flat-spectrum rate of its sign class.  Nothing here uses the
closed-form eigenvectors or jump operators.
"""

from __future__ import annotations

import numpy as np

from .core import dagger
from .dissipator import BathModel, LindbladTerm, commutator_term, lindblad_dissipator, rates

COUPLINGS = {
    ("a", "+"): (0, 1),  # |1><2|
    ("a", "-"): (1, 0),  # |2><1|
    ("b", "+"): (2, 1),  # |3><2|
    ("b", "-"): (1, 2),  # |2><3|
}


class DegenerateSpectrumError(ArithmeticError):
    """Two eigenvalues or Bohr frequencies are closer than the threshold."""


def coupling_operator(channel: str, sign: str) -> np.ndarray:
    i, j = COUPLINGS[(channel, sign)]
    a = np.zeros((3, 3), dtype=complex)
    a[i, j] = 1.0
    return a


def _hamiltonian_of(frame_or_h) -> np.ndarray:
    return np.asarray(getattr(frame_or_h, "hamiltonian", frame_or_h))


def eigenprojectors(h: np.ndarray, threshold: float) -> tuple[np.ndarray, list[np.ndarray]]:
    evals, evecs = np.linalg.eigh(h)
    if np.any(np.diff(evals) < threshold):
        raise DegenerateSpectrumError(f"eigenvalues {evals} closer than {threshold:g}")
    projectors = [np.outer(evecs[:, k], evecs[:, k].conj()) for k in range(len(evals))]
    return evals, projectors


def spectral_decompose(a: np.ndarray, frame_or_h, threshold: float | None = None,
                       merge: bool = False) -> dict[float, np.ndarray]:
    """Split ``a`` into components A(w) = sum_{e' - e = w} P(e) A P(e').

    ``frame_or_h`` is a DressedFrame (its Hamiltonian is used) or a Hermitian
    matrix.  Components are returned in the bare basis keyed by the Bohr
    frequency w; components that vanish identically are omitted.  Distinct
    Bohr frequencies closer than ``threshold`` (default 1e-9 times the
    spectral width) raise DegenerateSpectrumError unless ``merge`` is set.
    """
    h = _hamiltonian_of(frame_or_h)
    a = np.asarray(a, dtype=complex)
    if threshold is None:
        threshold = 1e-9 * max(1.0, float(np.max(np.abs(np.linalg.eigvalsh(h)))))
    evals, proj = eigenprojectors(h, threshold)

    pieces: list[tuple[float, np.ndarray]] = []
    for i, e in enumerate(evals):
        for j, e_prime in enumerate(evals):
            w = 0.0 if i == j else float(e_prime - e)
            pieces.append((w, proj[i] @ a @ proj[j]))
    pieces.sort(key=lambda p: p[0])

    groups: list[list] = []
    for w, m in pieces:
        if groups and (w == groups[-1][0] or abs(w - groups[-1][0]) < threshold):
            if w != groups[-1][0] and not merge:
                raise DegenerateSpectrumError(
                    f"Bohr frequencies {groups[-1][0]:.6g} and {w:.6g} nearly coincide")
            groups[-1][1] = groups[-1][1] + m
        else:
            groups.append([w, m])

    scale = max(1.0, float(np.max(np.abs(a))))
    return {w: m for w, m in groups if np.max(np.abs(m)) > 1e-13 * scale}


def secular_terms(frame_or_h, bath: BathModel, threshold: float | None = None) -> list[LindbladTerm]:
    """One Lindblad term per (channel, sign, Bohr frequency), bare basis."""
    r = rates(bath)
    rate_of = {("a", "+"): r.aa_pp, ("a", "-"): r.aa_mm,
               ("b", "+"): r.bb_pp, ("b", "-"): r.bb_mm}
    terms = []
    for key in COUPLINGS:
        comps = spectral_decompose(coupling_operator(*key), frame_or_h, threshold)
        terms.extend(LindbladTerm(m, rate_of[key]) for m in comps.values())
    return terms


def secular_generator(frame_or_h, bath: BathModel, rho: np.ndarray,
                      threshold: float | None = None) -> np.ndarray:
    """-i[H, rho] plus the secular dissipator from :func:`secular_terms`."""
    h = _hamiltonian_of(frame_or_h)
    return commutator_term(h, rho) + lindblad_dissipator(secular_terms(h, bath, threshold), rho)


def in_bare_basis(dressed: np.ndarray, kets: np.ndarray) -> np.ndarray:
    return kets @ dressed @ dagger(kets)
