"""Difference operators and power variations.

Second-order differences at frequency v,

    d_i = X(i*delta) - 2*X((i-v)*delta) + X((i-2v)*delta),  i = 2v..N,

their p-th power variations V_{v,t} = sum_{i=2v}^{floor(t/delta)} |d_i|^p,
first-order variations, and the realized relative power variation
t -> V_t / V_T (a nondecreasing [0,1]-valued path ending exactly at 1).
"""

from dataclasses import dataclass

import numpy as np

from .exceptions import DegenerateError, DomainError, LengthError


@dataclass(frozen=True)
class PowerVariation:
    """Power-variation value; frequency 0 marks first-order differences."""

    p: float
    frequency: int
    value: float
    count: int


@dataclass(frozen=True)
class RrvPath:
    """Relative variation accumulated along the grid; final value exactly 1."""

    times: np.ndarray
    values: np.ndarray


def grid_index(t, delta):
    """Largest grid index i with i*delta <= t, snapping away roundoff.

    The ratio t/delta gets a relative 1e-9 nudge so times meant to land on the
    grid do not truncate to the previous index.
    """
    r = t / delta
    return int(np.floor(r + 1e-9 * max(1.0, abs(r))))


def second_diff(path, v):
    """Second-order differences at frequency v >= 1, for i = 2v..N in order."""
    if v < 1:
        raise DomainError(f"frequency v must be >= 1, got {v}")
    x = path.values
    if len(x) < 2 * v + 1:
        raise LengthError(f"need at least {2 * v + 1} points for v={v}, got {len(x)}")
    return x[2 * v:] - 2.0 * x[v:len(x) - v] + x[:len(x) - 2 * v]


def power_variation(path, v, p, t):
    """Sum of |second difference|^p over indices 2v..floor(t/delta)."""
    if not p > 0:
        raise DomainError(f"power p must be > 0, got {p}")
    n = len(path.values) - 1
    i_max = grid_index(t, path.step)
    if i_max > n:
        raise DomainError(f"t={t} lies beyond the path horizon {path.horizon}")
    if i_max < 2 * v:
        raise LengthError(f"floor(t/delta)={i_max} < 2v={2 * v}; nothing to sum")
    d = second_diff(path, v)
    value = float(np.sum(np.abs(d[:i_max - 2 * v + 1]) ** p))
    return PowerVariation(p=float(p), frequency=int(v), value=value,
                          count=i_max - 2 * v + 1)


def first_order_variation(path, p, t):
    """Sum of |first difference|^p over indices 1..floor(t/delta)."""
    if not p > 0:
        raise DomainError(f"power p must be > 0, got {p}")
    n = len(path.values) - 1
    i_max = grid_index(t, path.step)
    if i_max > n:
        raise DomainError(f"t={t} lies beyond the path horizon {path.horizon}")
    if i_max < 1:
        raise LengthError(f"floor(t/delta)={i_max} < 1; nothing to sum")
    d = np.diff(path.values)
    value = float(np.sum(np.abs(d[:i_max]) ** p))
    return PowerVariation(p=float(p), frequency=0, value=value, count=i_max)


def rrv(path, p):
    """Realized relative power variation at every grid time i*delta, i = 1..N.

    The final entry is exactly 1 (the cumulative sum is divided by its own
    last element). Raises DegenerateError when the total variation vanishes.
    """
    if not p > 0:
        raise DomainError(f"power p must be > 0, got {p}")
    d = np.abs(np.diff(path.values)) ** p
    cum = np.cumsum(d)
    total = cum[-1]
    if total == 0.0:
        raise DegenerateError("total variation is zero (constant or affine-free path)")
    n = len(path.values) - 1
    return RrvPath(times=path.step * np.arange(1, n + 1), values=cum / total)
