"""Score families and the tie-aware score function.

A score family is described by a quantile function ``q`` on (0, 1), its
integral ``L(u) = int_0^u q(v) dv``, and the mean and variance of ``q(U)``
for ``U`` uniform.  For an observation whose cdf jumps from ``a = G(x-)`` to
``b = G(x)``, the tie-aware score is the average of ``q`` over ``(a, b]``::

    score_at(a, b) = (L(b) - L(a)) / (b - a)     if b > a
                   = q(a)                         if b == a

All functions accept scalars or numpy arrays and broadcast.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .exceptions import DomainError, InputError

__all__ = [
    "ScoreFamily",
    "SPEARMAN",
    "VAN_DER_WAERDEN",
    "SAVAGE",
    "BLEST",
    "FAMILIES",
    "get_family",
    "quantile",
    "lintegral",
    "score_at",
]

# below this interval width the ratio form loses too many digits
_RATIO_MIN_WIDTH = 1e-14


@dataclass(frozen=True)
class ScoreFamily:
    """A score distribution K, identified by ``kind``.

    ``mean`` and ``variance`` are those of ``quantile(U)`` with U ~ U(0, 1).
    """

    kind: str
    token: str
    mean: float
    variance: float
    bounded: bool

    def __str__(self):
        return self.token


SPEARMAN = ScoreFamily("Spearman", "spearman", 0.5, 1.0 / 12.0, True)
VAN_DER_WAERDEN = ScoreFamily("VanDerWaerden", "vdw", 0.0, 1.0, False)
SAVAGE = ScoreFamily("Savage", "savage", 1.0, 1.0, False)
BLEST = ScoreFamily("BlestSquared", "blest", 1.0 / 3.0, 4.0 / 45.0, True)

FAMILIES = {f.token: f for f in (SPEARMAN, VAN_DER_WAERDEN, SAVAGE, BLEST)}

_ALIASES = {
    "spearman": "spearman",
    "vdw": "vdw",
    "vanderwaerden": "vdw",
    "van_der_waerden": "vdw",
    "savage": "savage",
    "blest": "blest",
    "blestsquared": "blest",
}


def get_family(token):
    """Look up a score family by case-insensitive token.

    Accepts a :class:`ScoreFamily` unchanged.

    >>> get_family("VDW").kind
    'VanDerWaerden'
    """
    if isinstance(token, ScoreFamily):
        return token
    key = _ALIASES.get(str(token).strip().lower())
    if key is None:
        raise InputError(
            f"unknown score family {token!r}; expected one of spearman, vdw, savage, blest"
        )
    return FAMILIES[key]


def _unwrap(x):
    return float(x) if np.ndim(x) == 0 else x


def quantile(family, u):
    """Quantile function of the score family.

    Spearman and Blest accept the closed interval [0, 1]; van der Waerden
    and Savage are unbounded at the endpoints and require 0 < u < 1.
    """
    family = get_family(family)
    u = np.asarray(u, dtype=float)
    if family.bounded:
        if np.any((u < 0.0) | (u > 1.0)) or np.any(np.isnan(u)):
            raise DomainError(f"{family.kind} quantile requires u in [0, 1]")
    elif np.any(~((u > 0.0) & (u < 1.0))):
        raise DomainError(f"{family.kind} quantile requires u in (0, 1)")

    kind = family.kind
    if kind == "Spearman":
        out = u.copy()
    elif kind == "VanDerWaerden":
        out = special.ndtri(u)
    elif kind == "Savage":
        out = -np.log(u)
    else:
        out = u * u
    return _unwrap(out)


def lintegral(family, u):
    """Integrated quantile ``L(u) = int_0^u quantile(v) dv`` on [0, 1]."""
    family = get_family(family)
    u = np.asarray(u, dtype=float)
    if np.any(~((u >= 0.0) & (u <= 1.0))):
        raise DomainError("lintegral requires u in [0, 1]")

    kind = family.kind
    if kind == "Spearman":
        out = 0.5 * u * u
    elif kind == "VanDerWaerden":
        inner = (u > 0.0) & (u < 1.0)
        z = special.ndtri(np.where(inner, u, 0.5))
        out = np.where(inner, -np.exp(-0.5 * z * z) / math.sqrt(2.0 * math.pi), 0.0)
    elif kind == "Savage":
        out = u - special.xlogy(u, u)
    else:
        out = u * u * u / 3.0
    return _unwrap(out)


def score_at(family, a, b):
    """Tie-aware score: the mean of the quantile over the probability interval (a, b].

    Parameters
    ----------
    family : ScoreFamily or str
    a, b : float or array_like
        Left limit ``G(x-)`` and value ``G(x)`` of a cdf at the point scored.

    Returns
    -------
    float or ndarray
    """
    family = get_family(family)
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    a, b = np.broadcast_arrays(a, b)
    if np.any(a > b):
        raise InputError("score_at requires a <= b")
    if np.any((a < 0.0) | (b > 1.0)):
        raise DomainError("score_at requires 0 <= a <= b <= 1")

    width = b - a
    wide = width > _RATIO_MIN_WIDTH
    out = np.empty(a.shape, dtype=float)
    if np.any(wide):
        aw, bw = a[wide], b[wide]
        out[wide] = (lintegral(family, bw) - lintegral(family, aw)) / (bw - aw)
    if not np.all(wide):
        mid = 0.5 * (a[~wide] + b[~wide])
        out[~wide] = quantile(family, mid)
    return _unwrap(out)
