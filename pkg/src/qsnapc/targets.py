"""Benchmark target unitaries."""
from dataclasses import dataclass

import numpy as np
from scipy.stats import unitary_group

from .errors import InvalidArgumentError, InvalidDimensionError

__all__ = ["TargetSpec", "build_target", "default_active_levels", "haar_random", "qft"]


@dataclass(frozen=True)
class TargetSpec:
    kind: str
    N: int
    dim: int
    seed: int = None

    def __post_init__(self):
        if self.kind not in ("qft", "haar", "file"):
            raise InvalidArgumentError(f"unknown target kind {self.kind!r}")
        if self.dim < 2:
            raise InvalidDimensionError(f"dimension must be >= 2, got {self.dim}")
        if not 2 <= self.N:
            raise InvalidArgumentError(f"active dimension N must be >= 2, got {self.N}")
        if self.N > self.dim:
            raise InvalidArgumentError(f"N exceeds dim ({self.N} > {self.dim})")


def default_active_levels(dim):
    """Largest N leaving ``max(2, dim // 16)`` guard levels above it."""
    return dim - max(2, dim // 16)


def qft(N, dim=None):
    """Centered Fourier transform on levels ``0..N-1``, identity above.

    ``F[l, m] = exp(2 pi i (l - N/2)(m - N/2) / N) / sqrt(N)`` with
    zero-based ``l, m`` and real-valued ``N/2``.
    """
    dim = N if dim is None else dim
    if dim < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {dim}")
    if N < 2:
        raise InvalidArgumentError(f"N must be >= 2, got {N}")
    if N > dim:
        raise InvalidArgumentError(f"N exceeds dim ({N} > {dim})")
    idx = np.arange(N) - N / 2
    block = np.exp(2j * np.pi * np.outer(idx, idx) / N) / np.sqrt(N)
    U = np.eye(dim, dtype=np.complex128)
    U[:N, :N] = block
    return U


def haar_random(dim, seed=None):
    """Haar-distributed unitary, reproducible for a given integer seed."""
    if dim < 2:
        raise InvalidDimensionError(f"dimension must be >= 2, got {dim}")
    return np.asarray(unitary_group.rvs(dim, random_state=np.random.default_rng(seed)),
                      dtype=np.complex128)


def build_target(spec):
    if spec.kind == "qft":
        return qft(spec.N, spec.dim)
    if spec.kind == "haar":
        U = haar_random(spec.N, spec.seed)
        if spec.N == spec.dim:
            return U
        full = np.eye(spec.dim, dtype=np.complex128)
        full[:spec.N, :spec.N] = U
        return full
    raise InvalidArgumentError("file targets are read through qsnapc.io.read_matrix")
