"""Truncated Fock-space simulation and the scaling sweeps."""
import math
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass

import numpy as np

from .decompose import decompose
from .errors import (InsufficientDataError, InvalidArgumentError,
                     TruncationRiskError)
from .fockops import displacement_frame, fidelity, givens_embed
from .synth import (DispGate, SnapGate, SynthesisOptions, expand_givens,
                    sequence_stats, synthesize)
from .targets import qft

__all__ = [
    "CLAMP_FLOOR",
    "FIT_FLOOR",
    "SlopeFit",
    "SweepRecord",
    "clamp",
    "fit_slope",
    "infidelity_vs_target",
    "simulate",
    "sweep_givens",
    "sweep_qft",
]

CLAMP_FLOOR = 1e-15
FIT_FLOOR = 1e-14


def simulate(seq):
    """Operator product of ``seq`` with ``gates[0]`` as the rightmost factor."""
    dim = seq.dim
    frame = displacement_frame(dim)
    M = np.eye(dim, dtype=np.complex128)
    for gate in seq.gates:
        if isinstance(gate, DispGate):
            M = frame.apply(gate.alpha, M)
        elif isinstance(gate, SnapGate):
            if gate.phases.shape != (dim,):
                raise InvalidArgumentError("SNAP gate dimension does not match sequence")
            M = np.exp(1j * gate.phases)[:, None] * M
        else:
            raise InvalidArgumentError(f"unknown gate {gate!r}")
    return M


def clamp(eps):
    """Reporting floor so log-scale output never sees zero."""
    return max(CLAMP_FLOOR, eps)


def infidelity_vs_target(seq, target):
    target = np.asarray(target)
    if target.shape != (seq.dim, seq.dim):
        raise InvalidArgumentError(
            f"target shape {target.shape} does not match sequence dim {seq.dim}")
    return 1.0 - fidelity(simulate(seq), target)


@dataclass(frozen=True)
class SweepRecord:
    experiment: str
    dim: int
    N: int = None
    k: int = None
    m: int = None
    theta: float = None
    infidelity: float = 0.0
    gate_count: int = 0
    compile_seconds: float = 0.0
    simulate_seconds: float = 0.0
    decompose_seconds: float = 0.0
    synthesize_seconds: float = 0.0

    @property
    def infidelity_clamped(self):
        return clamp(self.infidelity)

    def as_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class SlopeFit:
    slope: float
    intercept: float
    r_squared: float
    domain: tuple
    points: int


def fit_slope(records, x_field, window=None):
    """Least-squares slope of ``log(infidelity)`` against ``log(x_field)``.

    Points outside ``window`` (inclusive), with non-positive x, or with
    infidelity at or below the fit floor are skipped.
    """
    lo, hi = window if window is not None else (-math.inf, math.inf)
    xs, ys = [], []
    for rec in records:
        x = getattr(rec, x_field) if not isinstance(rec, dict) else rec[x_field]
        eps = rec.infidelity if not isinstance(rec, dict) else rec["infidelity"]
        if x is None or x <= 0 or not lo <= x <= hi or not eps > FIT_FLOOR:
            continue
        xs.append(math.log(x))
        ys.append(math.log(eps))
    if len(xs) < 3:
        raise InsufficientDataError(
            f"need at least 3 usable points for a slope fit, got {len(xs)}")
    x = np.array(xs)
    y = np.array(ys)
    if np.ptp(x) == 0:
        raise InsufficientDataError("fit window has no spread in x")
    slope, intercept = np.polyfit(x, y, 1)
    resid = y - (slope * x + intercept)
    ss_tot = float(np.sum((y - y.mean()) ** 2))
    r2 = 1.0 - float(np.sum(resid ** 2)) / ss_tot if ss_tot > 0 else 1.0
    return SlopeFit(float(slope), float(intercept), min(1.0, max(0.0, r2)),
                    (math.exp(x.min()), math.exp(x.max())), len(xs))


def _map(fn, items, jobs):
    if jobs is None or jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _givens_point(args):
    dim, k, theta = args
    t0 = time.perf_counter()
    seq = expand_givens(dim, k, theta, 1)
    t1 = time.perf_counter()
    U = simulate(seq)
    t2 = time.perf_counter()
    eps = 1.0 - fidelity(U, givens_embed(dim, k, theta))
    return SweepRecord("givens_theta", dim, None, k, 1, float(theta), eps, len(seq),
                       t1 - t0, t2 - t1, 0.0, t1 - t0)


def sweep_givens(dim, k_list, theta_list, jobs=1):
    """Infidelity of a single V_k(Phi(theta)) block against G(theta).

    Levels above ``dim - 3`` are refused: the block then reaches into the
    truncation edge and the error no longer reflects the map itself.
    """
    k_list = sorted(set(int(k) for k in k_list))
    for k in k_list:
        if k < 0:
            raise InvalidArgumentError(f"level k must be >= 0, got {k}")
        if k > dim - 3:
            raise TruncationRiskError(
                f"k={k} too close to the cutoff of a {dim}-level space (max {dim - 3})")
    points = [(dim, k, float(t)) for k in k_list for t in sorted(theta_list)]
    return _map(_givens_point, points, jobs)


def _qft_point(args):
    N, dim, m, merge_gates, prune_tol = args
    target = qft(N, dim)
    t0 = time.perf_counter()
    plan = decompose(target, prune_tol=prune_tol)
    t1 = time.perf_counter()
    seq = synthesize(plan, SynthesisOptions(m=m, merge=merge_gates, prune_tol=prune_tol))
    t2 = time.perf_counter()
    U = simulate(seq)
    t3 = time.perf_counter()
    eps = 1.0 - fidelity(U, target)
    return SweepRecord("qft_m", dim, N, None, m, None, eps, sequence_stats(seq).gates,
                       t2 - t0, t3 - t2, t1 - t0, t2 - t1)


def sweep_qft(N, dim, m_list, jobs=1, merge=True, prune_tol=1e-14):
    """Compile and simulate the embedded QFT once per split factor."""
    if N >= dim:
        raise InvalidArgumentError(
            f"N must be below dim to leave guard levels (N={N}, dim={dim})")
    if N < 2:
        raise InvalidArgumentError(f"N must be >= 2, got {N}")
    m_list = sorted(set(int(m) for m in m_list))
    if not m_list or m_list[0] < 1:
        raise InvalidArgumentError("split factors must be positive integers")
    return _map(_qft_point, [(N, dim, m, merge, prune_tol) for m in m_list], jobs)
