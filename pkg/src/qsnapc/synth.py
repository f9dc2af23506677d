"""Lowering of a decomposition plan to SNAP and displacement gates.

Each Givens rotation G(theta) on levels ``k, k+1`` becomes the five-gate
block ``D(a) R(k) D(-2a) R(k) D(a)`` with ``a = theta / (4 sqrt(k+1))``
and ``R(k)`` the SNAP flipping the sign of levels ``0..k``. Splitting a
rotation into ``m`` equal pieces shrinks the per-block error, which grows
roughly as the sixth power of the angle.
"""
import math
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .decompose import DEFAULT_PRUNE_TOL, GivensStep, SnapStep, canonical_phase
from .errors import InvalidArgumentError

__all__ = [
    "DispGate",
    "GateSequence",
    "SequenceStats",
    "SnapGate",
    "SynthesisOptions",
    "expand_givens",
    "merge",
    "phi",
    "sequence_stats",
    "synthesize",
]


@dataclass(frozen=True, eq=False)
class SnapGate:
    phases: np.ndarray

    def __post_init__(self):
        phases = self.phases
        if not (isinstance(phases, np.ndarray) and not phases.flags.writeable):
            phases = np.array(phases, dtype=float)
            phases.setflags(write=False)
        if not np.all(np.isfinite(phases)):
            raise InvalidArgumentError("SNAP phases must be finite")
        object.__setattr__(self, "phases", phases)

    def __eq__(self, other):
        return isinstance(other, SnapGate) and np.array_equal(self.phases, other.phases)

    __hash__ = None


@dataclass(frozen=True)
class DispGate:
    alpha: float

    def __post_init__(self):
        if not math.isfinite(self.alpha):
            raise InvalidArgumentError("displacement alpha must be finite")


@dataclass(frozen=True)
class GateSequence:
    """Gates in circuit order: ``gates[0]`` acts first.

    ``provenance`` optionally maps ``(start, stop)`` gate ranges of an
    unmerged sequence to the index of the plan step they came from.
    """

    dim: int
    gates: tuple = ()
    provenance: tuple = None

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if isinstance(g, SnapGate):
                if g.phases.shape != (self.dim,):
                    raise InvalidArgumentError(
                        f"SNAP gate has {g.phases.shape[0]} phases, sequence dim is {self.dim}")
            elif not isinstance(g, DispGate):
                raise InvalidArgumentError(f"unknown gate {g!r}")

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def __add__(self, other):
        if not isinstance(other, GateSequence):
            return NotImplemented
        if other.dim != self.dim:
            raise InvalidArgumentError("cannot concatenate sequences of different dimension")
        return GateSequence(self.dim, self.gates + other.gates)


@dataclass(frozen=True)
class SynthesisOptions:
    m: int = 1
    merge: bool = True
    prune_tol: float = DEFAULT_PRUNE_TOL
    # optional per-rotation split policy, called as policy(step) -> m
    m_policy: object = field(default=None, compare=False)

    def __post_init__(self):
        if isinstance(self.m, bool) or not isinstance(self.m, (int, np.integer)) or self.m < 1:
            raise InvalidArgumentError(f"split factor m must be a positive integer, got {self.m!r}")


def phi(theta, k):
    """Displacement amplitude for a Givens angle on levels ``k, k+1``."""
    if k < 0:
        raise InvalidArgumentError(f"level k must be >= 0, got {k}")
    return theta / (4.0 * math.sqrt(k + 1))


@lru_cache(maxsize=1024)
def _r_pi_gate(dim, k):
    phases = np.zeros(dim)
    phases[: k + 1] = np.pi
    phases.setflags(write=False)
    return SnapGate(phases)


def _block(dim, k, alpha):
    r = _r_pi_gate(dim, k)
    return [DispGate(alpha), r, DispGate(-2.0 * alpha), r, DispGate(alpha)]


def expand_givens(dim, k, theta, m=1):
    """``m`` copies of the V_k block approximating G(theta) on ``k, k+1``."""
    if not 0 <= k <= dim - 2:
        raise InvalidArgumentError(f"level k={k} outside [0, {dim - 2}]")
    if m < 1:
        raise InvalidArgumentError(f"split factor m must be >= 1, got {m}")
    alpha = phi(theta / m, k)
    return GateSequence(dim, _block(dim, k, alpha) * m)


def synthesize(plan, options=None):
    """Lower a plan to SNAP and displacement gates.

    Work per rotation is independent of the matrix size apart from sharing
    the cached ``R(k)`` phase vector; no matrix arithmetic happens here.
    """
    options = options or SynthesisOptions()
    dim = plan.dim
    gates = []
    provenance = []
    for index, step in enumerate(plan.steps):
        start = len(gates)
        if isinstance(step, SnapStep):
            gates.append(SnapGate(step.phases))
        elif isinstance(step, GivensStep):
            m = options.m if options.m_policy is None else int(options.m_policy(step))
            if m < 1:
                raise InvalidArgumentError(f"split policy returned m={m}")
            alpha = phi(step.theta / m, step.k)
            gates.extend(_block(dim, step.k, alpha) * m)
        else:
            raise InvalidArgumentError(f"unknown plan step {step!r}")
        provenance.append(((start, len(gates)), index))
    seq = GateSequence(dim, gates, tuple(provenance))
    if options.merge:
        seq = merge(seq, options.prune_tol)
    return seq


def merge(seq, prune_tol=DEFAULT_PRUNE_TOL):
    """Fuse neighbouring gates of the same kind and drop trivial ones.

    Displacements add their amplitudes (exact, same generator); SNAPs add
    phases modulo 2 pi. A fused gate that becomes trivial is removed, which
    may expose a new pair of neighbours to fuse.
    """
    tol = 0.0 if prune_tol is None else prune_tol
    out = []
    for gate in seq.gates:
        if out and type(out[-1]) is type(gate):
            gate = _fuse(out.pop(), gate)
        if not _is_trivial(gate, tol):
            out.append(gate)
    return GateSequence(seq.dim, out)


def _fuse(a, b):
    if isinstance(a, DispGate):
        return DispGate(a.alpha + b.alpha)
    return SnapGate(canonical_phase(a.phases + b.phases))


def _is_trivial(gate, tol):
    if isinstance(gate, DispGate):
        return abs(gate.alpha) <= tol
    return bool(np.all(np.abs(gate.phases) <= tol))


@dataclass(frozen=True)
class SequenceStats:
    gates: int = 0
    snaps: int = 0
    displacements: int = 0
    max_abs_alpha: float = 0.0
    total_abs_alpha: float = 0.0

    def as_dict(self):
        return {
            "gate_count": self.gates,
            "snap_count": self.snaps,
            "disp_count": self.displacements,
            "max_abs_alpha": self.max_abs_alpha,
            "total_abs_alpha": self.total_abs_alpha,
        }


def sequence_stats(seq):
    alphas = [abs(g.alpha) for g in seq.gates if isinstance(g, DispGate)]
    return SequenceStats(
        gates=len(seq.gates),
        snaps=len(seq.gates) - len(alphas),
        displacements=len(alphas),
        max_abs_alpha=max(alphas, default=0.0),
        total_abs_alpha=math.fsum(alphas),
    )
