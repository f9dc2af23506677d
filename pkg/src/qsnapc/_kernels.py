"""Compiled inner loop of the column elimination."""
import numpy as np
from numba import njit


@njit(cache=True)
def eliminate(W, prune_tol):
    """Reduce ``W`` (a copy of U^dag) to the identity in place.

    Returns ``(snap_phases, pairs, multiply_adds)``. Row ``i`` of
    ``snap_phases`` is the SNAP emitted for column ``dim-1-i``; the last
    row is the closing phase fix on level 0. ``pairs[g] = (a, b)`` holds
    the entries that rotation ``g`` consumed, in emission order (column
    ``dim-1`` first, ``k`` ascending inside a column); its angle is
    ``atan2(a, b)`` and a zero pair marks a skipped rotation. A negative
    ``prune_tol`` disables pruning.
    """
    d = W.shape[0]
    prune = prune_tol >= 0.0
    snap_phases = np.zeros((d, d))
    pairs = np.zeros((d * (d - 1) // 2, 2))
    madds = 0
    g = 0
    for col in range(d - 1, 0, -1):
        row = d - 1 - col
        for j in range(col + 1):
            w = W[j, col]
            mag = abs(w)
            if mag > 0.0 and not (prune and mag <= prune_tol):
                phase = -np.arctan2(w.imag, w.real)
                if phase <= -np.pi:
                    phase += 2.0 * np.pi
                snap_phases[row, j] = phase
                z = np.conj(w) / mag
                for c in range(d):
                    W[j, c] *= z
                madds += d
        for j in range(col):
            a = W[j, col].real
            b = W[j + 1, col].real
            r = np.hypot(a, b)
            if r > 0.0 and not (prune and abs(a) <= prune_tol):
                cs = b / r
                sn = a / r
                for c in range(d):
                    top = W[j, c]
                    bot = W[j + 1, c]
                    W[j, c] = cs * top - sn * bot
                    W[j + 1, c] = sn * top + cs * bot
                madds += 4 * d
                pairs[g, 0] = a
                pairs[g, 1] = b
            g += 1
    w = W[0, 0]
    mag = abs(w)
    if mag > 0.0:
        phase = -np.arctan2(w.imag, w.real)
        if phase <= -np.pi:
            phase += 2.0 * np.pi
        if not (prune and abs(phase) <= prune_tol):
            snap_phases[d - 1, 0] = phase
            W[0, 0] *= np.conj(w) / mag
            madds += 1
    return snap_phases, pairs, madds
