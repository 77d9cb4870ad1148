"""Dense 3x3 density-matrix helpers for the Lambda system.

States live in the bare rotating-frame basis {|1>, |2>, |3>} unless a
function says otherwise.  Arrays may carry leading batch dimensions; the
last two axes are always the 3x3 matrix.
"""

from __future__ import annotations

import numpy as np

DIM = 3

HERMITIAN_TOL = 1e-12
TRACE_TOL = 1e-9
POSITIVITY_TOL = 1e-8


class PhysicalityError(ValueError):
    """A density matrix violates Hermiticity, unit trace or positivity."""


def pure_state(k: int) -> np.ndarray:
    """Projector |k><k| onto bare state k (1-based)."""
    if k not in (1, 2, 3):
        raise IndexError(f"basis index must be 1, 2 or 3, got {k!r}")
    rho = np.zeros((DIM, DIM), dtype=complex)
    rho[k - 1, k - 1] = 1.0
    return rho


def ket_projector(ket: np.ndarray) -> np.ndarray:
    ket = np.asarray(ket, dtype=complex)
    return np.outer(ket, ket.conj())


def dagger(a: np.ndarray) -> np.ndarray:
    return np.conj(np.swapaxes(a, -1, -2))


def symmetrize(rho: np.ndarray) -> np.ndarray:
    """Return (rho + rho^dagger) / 2."""
    return 0.5 * (rho + dagger(rho))


def hermiticity_error(rho: np.ndarray) -> float:
    return float(np.max(np.abs(rho - dagger(rho))))


def trace_error(rho: np.ndarray) -> float:
    return float(np.max(np.abs(np.trace(rho, axis1=-2, axis2=-1) - 1.0)))


def min_eigenvalue(rho: np.ndarray) -> float:
    """Smallest eigenvalue of a Hermitian matrix (or of a batch of them)."""
    rho = np.asarray(rho, dtype=complex)
    if hermiticity_error(rho) > 1e-9:
        raise PhysicalityError("min_eigenvalue needs a Hermitian matrix")
    return float(np.min(np.linalg.eigvalsh(symmetrize(rho))))


def check_physical(rho: np.ndarray, *, trace_tol: float = TRACE_TOL,
                   positivity_tol: float = POSITIVITY_TOL) -> None:
    """Raise PhysicalityError unless rho is a valid density matrix."""
    rho = np.asarray(rho)
    if rho.shape[-2:] != (DIM, DIM):
        raise PhysicalityError(f"expected 3x3 matrices, got shape {rho.shape}")
    if not np.all(np.isfinite(rho)):
        raise PhysicalityError("density matrix has non-finite entries")
    herm = hermiticity_error(rho)
    if herm > 1e-9:
        raise PhysicalityError(f"not Hermitian (max deviation {herm:.3e})")
    terr = trace_error(rho)
    if terr > trace_tol:
        raise PhysicalityError(f"trace deviates from 1 by {terr:.3e}")
    lam = min_eigenvalue(rho)
    if lam < -positivity_tol:
        raise PhysicalityError(f"negative eigenvalue {lam:.3e}")


def population(rho: np.ndarray, k: int) -> float:
    """Population of bare state k, clamped to [0, 1]."""
    if k not in (1, 2, 3):
        raise IndexError(f"basis index must be 1, 2 or 3, got {k!r}")
    check_physical(rho)
    p = float(np.real(rho[k - 1, k - 1]))
    return min(1.0, max(0.0, p))


def to_basis(rho: np.ndarray, kets: np.ndarray) -> np.ndarray:
    """Express rho in the basis whose vectors are the columns of ``kets``."""
    return dagger(kets) @ rho @ kets


def from_basis(rho: np.ndarray, kets: np.ndarray) -> np.ndarray:
    """Inverse of :func:`to_basis` for a unitary ``kets``."""
    return kets @ rho @ dagger(kets)


def random_density_matrix(rng: np.random.Generator, rank: int = DIM) -> np.ndarray:
    """Random full- or reduced-rank state, drawn as G G^dagger / tr."""
    g = rng.normal(size=(DIM, rank)) + 1j * rng.normal(size=(DIM, rank))
    rho = g @ g.conj().T
    return symmetrize(rho / np.trace(rho).real)
