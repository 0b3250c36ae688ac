"""Empirical margins with left limits, tie-aware score columns, serial frames."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import InputError
from .scores import get_family, score_at

__all__ = [
    "EmpiricalMargin",
    "ScoredColumn",
    "SerialFrame",
    "build_margin",
    "jump_kernel",
    "score_column",
    "build_serial_frame",
]


def _frozen(arr):
    arr = np.asarray(arr)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class EmpiricalMargin:
    """Empirical cdf ``F_n`` of a sample, grouped by exact value equality.

    Attributes
    ----------
    distinct_values : ndarray
        Sorted distinct sample values.
    cum_probs : ndarray
        ``F_n`` at each distinct value; the last entry is exactly 1.
    n : int
    lower, upper : ndarray
        Per original observation, ``F_n(X_i-)`` and ``F_n(X_i)``.
    group : ndarray of int
        Per original observation, the index of its value in ``distinct_values``.
    """

    distinct_values: np.ndarray
    cum_probs: np.ndarray
    n: int
    lower: np.ndarray
    upper: np.ndarray
    group: np.ndarray

    @property
    def obs_bounds(self):
        """``(n, 2)`` array of ``(F_n(X_i-), F_n(X_i))`` pairs."""
        return np.column_stack([self.lower, self.upper])

    @property
    def jumps(self):
        """Jump of ``F_n`` at each distinct value."""
        return np.diff(self.cum_probs, prepend=0.0)


def build_margin(sample):
    """Build the empirical margin of a one-dimensional sample.

    Ties are exact value equality; ``-0.0`` and ``0.0`` are the same value.

    >>> m = build_margin([1, 2, 2, 5])
    >>> m.cum_probs.tolist()
    [0.25, 0.75, 1.0]
    """
    x = np.asarray(sample, dtype=float)
    if x.ndim != 1:
        raise InputError("sample must be one-dimensional")
    if x.size == 0:
        raise InputError("sample is empty")
    if np.isnan(x).any():
        raise InputError("sample contains NaN")
    x = x + 0.0  # -0.0 -> 0.0
    n = x.size
    values, group, counts = np.unique(x, return_inverse=True, return_counts=True)
    cum = np.cumsum(counts)
    cum_probs = cum / n
    upper = cum_probs[group]
    lower = ((cum - counts) / n)[group]
    return EmpiricalMargin(
        distinct_values=_frozen(values),
        cum_probs=_frozen(cum_probs),
        n=int(n),
        lower=_frozen(lower),
        upper=_frozen(upper),
        group=_frozen(group.reshape(-1)),
    )


def jump_kernel(margin, obs_index, u):
    """Multilinear kernel ``J(X_i, u)``: 0 below ``F_n(X_i-)``, 1 above ``F_n(X_i)``, linear between."""
    a = margin.lower[obs_index]
    b = margin.upper[obs_index]
    u = np.asarray(u, dtype=float)
    out = np.clip((u - a) / (b - a), 0.0, 1.0)
    return float(out) if out.ndim == 0 else out


@dataclass(frozen=True, eq=False)
class ScoredColumn:
    """Per-observation tie-aware scores of one margin under one family."""

    values: np.ndarray
    centered: np.ndarray
    s2: float
    family: object

    def __len__(self):
        return self.values.size


def score_column(margin, family):
    """Score every observation of ``margin`` with ``family``.

    ``s2`` is the mean squared centered score; it estimates the asymptotic
    variance of the score under the margin.
    """
    family = get_family(family)
    lo = np.concatenate([[0.0], margin.cum_probs[:-1]])
    per_value = np.asarray(score_at(family, lo, margin.cum_probs), dtype=float)
    values = per_value[margin.group]
    centered = values - family.mean
    s2 = float(np.mean(centered * centered))
    return ScoredColumn(_frozen(values), _frozen(centered), s2, family)


@dataclass(frozen=True, eq=False)
class SerialFrame:
    """Circular lag embedding of a series of length ``n``.

    ``rows[t, j]`` is the (0-based) index of ``Y_{t-j}`` with ``Y_{t+n} = Y_t``.
    """

    rows: np.ndarray
    d: int

    @property
    def n(self):
        return self.rows.shape[0]


def build_serial_frame(series_length, d):
    """Index table ``rows[t, j] = (t - j) mod n`` for lags ``j = 0..d-1``."""
    n = int(series_length)
    d = int(d)
    if d < 2:
        raise InputError(f"embedding dimension must be at least 2, got {d}")
    if d > n:
        raise InputError(f"embedding dimension {d} exceeds series length {n}")
    t = np.arange(n)[:, None]
    j = np.arange(d)[None, :]
    return SerialFrame(_frozen((t - j) % n), d)
