"""Exact SNAP + adjacent-level Givens decomposition of a unitary.

The target ``U`` is reduced through ``W = U^dag``: for every column from
the last down to 1, a SNAP makes the upper part of the column real and
non-negative, then Givens rotations on levels ``(j, j+1)``, ``j = 0..c-1``,
push the column weight down onto the diagonal. One closing SNAP removes
the leftover phase on level 0. Since ``M_n ... M_1 U^dag = I`` the emitted
steps, read in circuit order, rebuild ``U`` exactly.
"""
import hashlib
from dataclasses import dataclass
from functools import lru_cache
from typing import NamedTuple

import numpy as np

from . import _kernels
from .errors import InvalidArgumentError, NonUnitaryInputError, NumericalFailureError
from .fockops import as_complex_matrix, givens_embed, unitarity_deviation

__all__ = [
    "DecompositionPlan",
    "GivensStep",
    "OpCounter",
    "PlanStats",
    "SnapStep",
    "canonical_phase",
    "decompose",
    "matrix_checksum",
    "plan_stats",
    "reconstruct",
]

DEFAULT_UNITARITY_TOL = 1e-10
DEFAULT_PRUNE_TOL = 1e-14


def canonical_phase(phases):
    """Wrap phases into (-pi, pi]."""
    wrapped = np.mod(np.asarray(phases, dtype=float) + np.pi, 2 * np.pi) - np.pi
    return np.where(wrapped <= -np.pi, np.pi, wrapped)


def _frozen(arr):
    arr = np.array(arr, dtype=float)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class SnapStep:
    phases: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "phases", _frozen(self.phases))

    def __eq__(self, other):
        return isinstance(other, SnapStep) and np.array_equal(self.phases, other.phases)

    def matrix(self, dim):
        return np.diag(np.exp(1j * self.phases)).astype(np.complex128)


class GivensStep(NamedTuple):
    k: int
    theta: float

    def matrix(self, dim):
        return givens_embed(dim, self.k, self.theta)


class DecompositionPlan:
    """Ordered SNAP and Givens steps that rebuild a unitary exactly.

    Plans produced by :func:`decompose` keep their angles in flat arrays
    and only build the step objects when ``steps`` is first read.
    """

    def __init__(self, dim, steps=(), source_checksum=""):
        self.dim = int(dim)
        self.source_checksum = source_checksum
        self._steps = tuple(steps)
        self._layout = None
        for step in self._steps:
            if isinstance(step, GivensStep):
                if not 0 <= step.k <= self.dim - 2:
                    raise InvalidArgumentError(f"Givens level {step.k} out of range for dim {self.dim}")
            elif isinstance(step, SnapStep):
                if step.phases.shape != (self.dim,):
                    raise InvalidArgumentError("SNAP step length does not match plan dimension")
            else:
                raise InvalidArgumentError(f"unknown plan step {step!r}")

    @classmethod
    def _packed(cls, dim, snaps, live, levels, thetas, bounds, checksum):
        plan = object.__new__(cls)
        plan.dim = dim
        plan.source_checksum = checksum
        plan._steps = None
        plan._layout = (snaps, live, levels, thetas, bounds)
        return plan

    @property
    def steps(self):
        if self._steps is None:
            snaps, live, levels, thetas, bounds = self._layout
            rotations = list(map(GivensStep._make, zip(levels.tolist(), thetas.tolist())))
            steps = []
            for row in range(self.dim - 1):
                if live[row]:
                    steps.append(SnapStep(snaps[row]))
                steps.extend(rotations[bounds[row]:bounds[row + 1]])
            if live[self.dim - 1]:
                steps.append(SnapStep(snaps[self.dim - 1]))
            self._steps = tuple(steps)
            self._layout = None
        return self._steps

    def __len__(self):
        return len(self.steps)

    def __iter__(self):
        return iter(self.steps)

    def __eq__(self, other):
        if not isinstance(other, DecompositionPlan):
            return NotImplemented
        return (self.dim, self.source_checksum, self.steps) == (
            other.dim, other.source_checksum, other.steps)

    def __repr__(self):
        return f"DecompositionPlan(dim={self.dim}, steps={len(self)}, source_checksum={self.source_checksum[:12]!r})"


@dataclass
class OpCounter:
    """Tally of complex multiply-adds spent on updating ``W``."""

    multiply_adds: int = 0
    rotations: int = 0


def matrix_checksum(U):
    """SHA-256 over the little-endian complex128 bytes of ``U``."""
    data = np.ascontiguousarray(np.asarray(U, dtype="<c16"))
    h = hashlib.sha256()
    h.update(f"{data.shape[0]}x{data.shape[1]}:".encode())
    h.update(data.tobytes())
    return h.hexdigest()


def decompose(U, unitarity_tol=DEFAULT_UNITARITY_TOL, prune_tol=DEFAULT_PRUNE_TOL, counter=None):
    """Decompose unitary ``U`` into SNAP and Givens steps.

    Parameters
    ----------
    U : (d, d) array_like
        Target unitary.
    unitarity_tol : float
        Maximum allowed ``max|U^dag U - I|``.
    prune_tol : float or None
        Steps whose angle or phases are all within this tolerance of zero
        are dropped. ``None`` keeps every step, including exact zeros.
    counter : OpCounter, optional
        Receives the number of complex multiply-adds applied to ``W``.

    Returns
    -------
    DecompositionPlan
    """
    U = as_complex_matrix(U, "U")
    dev = unitarity_deviation(U)
    if not np.isfinite(dev):
        raise NumericalFailureError("U contains non-finite values")
    if dev > unitarity_tol:
        raise NonUnitaryInputError(dev, unitarity_tol)
    d = U.shape[0]
    prune = prune_tol is not None
    tol = float(prune_tol) if prune else -1.0

    W = np.ascontiguousarray(U.conj().T)
    snap_phases, pairs, madds = _kernels.eliminate(W, tol)
    if not (np.all(np.isfinite(snap_phases)) and np.all(np.isfinite(pairs))):
        raise NumericalFailureError("elimination produced non-finite angles")
    thetas = np.arctan2(pairs[:, 0], pairs[:, 1])
    levels, starts = _rotation_layout(d)
    keep = np.any(pairs != 0.0, axis=1) if prune else np.ones(len(thetas), dtype=bool)
    bounds = np.zeros(d, dtype=np.intp)
    np.cumsum(np.add.reduceat(keep, starts), out=bounds[1:])
    snaps = canonical_phase(snap_phases)
    live = np.any(np.abs(snaps) > tol, axis=1) if prune else np.ones(d, dtype=bool)
    plan = DecompositionPlan._packed(d, snaps, live, levels[keep], thetas[keep], bounds,
                                     matrix_checksum(U))

    if counter is not None:
        counter.multiply_adds += int(madds)
        counter.rotations += int(np.count_nonzero(keep))
    return plan


@lru_cache(maxsize=16)
def _rotation_layout(d):
    cols = np.arange(d - 1, 0, -1)
    levels = np.concatenate([np.arange(c) for c in cols])
    starts = np.cumsum(cols) - cols
    return levels, starts


def reconstruct(plan):
    """Multiply the plan out in circuit order (first step rightmost)."""
    d = plan.dim
    M = np.eye(d, dtype=np.complex128)
    for step in plan.steps:
        if isinstance(step, SnapStep):
            M = np.exp(1j * step.phases)[:, None] * M
        else:
            k, c, s = step.k, np.cos(step.theta), np.sin(step.theta)
            top = M[k].copy()
            M[k] = c * top - s * M[k + 1]
            M[k + 1] = s * top + c * M[k + 1]
    return M


@dataclass(frozen=True)
class PlanStats:
    snaps: int = 0
    givens: int = 0
    max_abs_theta: float = 0.0
    total_abs_theta: float = 0.0

    def as_dict(self):
        return {
            "plan_snaps": self.snaps,
            "plan_givens": self.givens,
            "plan_max_abs_theta": self.max_abs_theta,
            "plan_total_abs_theta": self.total_abs_theta,
        }


def plan_stats(plan):
    thetas = [abs(s.theta) for s in plan.steps if isinstance(s, GivensStep)]
    return PlanStats(
        snaps=sum(isinstance(s, SnapStep) for s in plan.steps),
        givens=len(thetas),
        max_abs_theta=max(thetas, default=0.0),
        total_abs_theta=float(sum(thetas)),
    )
