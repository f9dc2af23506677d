"""Truncated Fock-space operators and gate fidelity.

Every operator is a dense ``complex128`` ndarray of shape ``(dim, dim)``.
Displacements are exponentials of the *truncated* generator
``alpha * (a^dag - a)``, evaluated through a cached eigendecomposition of
the Hermitian matrix ``i (a^dag - a)``.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import (InvalidArgumentError, InvalidDimensionError,
                     NumericalFailureError)

__all__ = [
    "DisplacementFrame",
    "annihilation",
    "as_complex_matrix",
    "displacement",
    "displacement_frame",
    "fidelity",
    "givens_embed",
    "infidelity",
    "r_pi",
    "snap",
    "unitarity_deviation",
]


def _check_dim(dim):
    if isinstance(dim, bool) or not isinstance(dim, (int, np.integer)) or dim < 2:
        raise InvalidDimensionError(f"dimension must be an integer >= 2, got {dim!r}")
    return int(dim)


def as_complex_matrix(M, name="matrix"):
    """Validate ``M`` as a finite square complex matrix with dim >= 2."""
    M = np.asarray(M, dtype=np.complex128)
    if M.ndim != 2 or M.shape[0] != M.shape[1]:
        raise InvalidArgumentError(f"{name} must be square, got shape {M.shape}")
    _check_dim(M.shape[0])
    if not np.all(np.isfinite(M)):
        raise NumericalFailureError(f"{name} has non-finite entries")
    return M


def unitarity_deviation(U):
    """Return max-entry norm of ``U^dag U - I``."""
    U = np.asarray(U)
    return float(np.max(np.abs(U.conj().T @ U - np.eye(U.shape[0]))))


def annihilation(dim):
    """Ladder operator ``a`` truncated to the lowest ``dim`` Fock levels."""
    dim = _check_dim(dim)
    return np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1).astype(np.complex128)


@dataclass(frozen=True, eq=False)
class DisplacementFrame:
    """Eigenbasis of ``i (a^dag - a)``.

    ``basis`` has the eigenvectors as columns, ``spectrum`` is ascending.
    ``basis_h`` caches the conjugate transpose so a displacement costs two
    dense products.
    """

    dim: int
    basis: np.ndarray
    spectrum: np.ndarray
    basis_h: np.ndarray

    def propagator(self, alpha):
        """Return the diagonal factor ``exp(-i alpha lambda)``."""
        return np.exp(-1j * alpha * self.spectrum)

    def apply(self, alpha, M):
        """Left-multiply ``M`` by D(alpha) without forming D(alpha)."""
        return self.basis @ (self.propagator(alpha)[:, None] * (self.basis_h @ M))


def _frame(dim):
    a = annihilation(dim)
    generator = 1j * (a.conj().T - a)
    try:
        spectrum, basis = np.linalg.eigh(generator)
    except np.linalg.LinAlgError as exc:
        raise NumericalFailureError(f"eigensolver failed at dim={dim}") from exc
    if not (np.all(np.isfinite(spectrum)) and np.all(np.isfinite(basis))):
        raise NumericalFailureError(f"eigensolver returned non-finite values at dim={dim}")
    order = np.argsort(spectrum, kind="stable")
    spectrum = spectrum[order]
    basis = basis[:, order]
    # fix each column's phase: largest-magnitude entry real positive
    lead = np.argmax(np.abs(basis), axis=0)
    pivots = basis[lead, np.arange(dim)]
    basis = basis * (np.abs(pivots) / pivots)[None, :]
    basis = np.ascontiguousarray(basis)
    spectrum.setflags(write=False)
    basis.setflags(write=False)
    basis_h = np.ascontiguousarray(basis.conj().T)
    basis_h.setflags(write=False)
    return DisplacementFrame(dim, basis, spectrum, basis_h)


@lru_cache(maxsize=32)
def _cached_frame(dim):
    return _frame(dim)


def displacement_frame(dim):
    """One-time eigendecomposition backing every displacement at ``dim``.

    Results are cached per dimension; the returned arrays are read-only.
    """
    return _cached_frame(_check_dim(dim))


def displacement(frame, alpha):
    """Dense D(alpha) for real ``alpha`` on the truncated space."""
    alpha = float(alpha)
    if not np.isfinite(alpha):
        raise InvalidArgumentError("alpha must be finite")
    return (frame.basis * frame.propagator(alpha)[None, :]) @ frame.basis_h


def snap(phases):
    """Diagonal SNAP gate ``diag(exp(i theta_n))``."""
    phases = np.asarray(phases, dtype=float)
    if phases.ndim != 1:
        raise InvalidArgumentError("phases must be a 1-d vector")
    _check_dim(phases.shape[0])
    return np.diag(np.exp(1j * phases))


def snap_checked(phases, dim):
    phases = np.asarray(phases, dtype=float)
    if phases.shape != (dim,):
        raise InvalidArgumentError(f"expected {dim} phases, got shape {phases.shape}")
    return snap(phases)


def r_pi_phases(dim, k):
    if not 0 <= k <= dim - 1:
        raise InvalidArgumentError(f"level k={k} outside [0, {dim - 1}]")
    phases = np.zeros(dim)
    phases[: k + 1] = np.pi
    return phases


def r_pi(dim, k):
    """SNAP with phase pi on levels 0..k, built from exact +-1 signs."""
    dim = _check_dim(dim)
    r_pi_phases(dim, k)
    signs = np.ones(dim)
    signs[: k + 1] = -1.0
    return np.diag(signs).astype(np.complex128)


def givens_embed(dim, k, theta):
    """Identity with ``[[cos, -sin], [sin, cos]]`` on levels ``k, k+1``."""
    dim = _check_dim(dim)
    if not 0 <= k <= dim - 2:
        raise InvalidArgumentError(f"level k={k} outside [0, {dim - 2}]")
    G = np.eye(dim, dtype=np.complex128)
    c, s = np.cos(theta), np.sin(theta)
    G[k, k] = c
    G[k, k + 1] = -s
    G[k + 1, k] = s
    G[k + 1, k + 1] = c
    return G


def fidelity(U, V):
    """``|Tr(U^dag V)|^2 / dim^2``, clipped into [0, 1].

    Insensitive to a global phase on either argument.
    """
    U = np.asarray(U)
    V = np.asarray(V)
    if U.shape != V.shape or U.ndim != 2:
        raise InvalidArgumentError(f"shape mismatch: {U.shape} vs {V.shape}")
    d = U.shape[0]
    overlap = np.vdot(U, V)
    F = (overlap.real ** 2 + overlap.imag ** 2) / d ** 2
    return float(min(1.0, max(0.0, F)))


def infidelity(U, V):
    return 1.0 - fidelity(U, V)
