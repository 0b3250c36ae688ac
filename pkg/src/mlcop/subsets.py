"""Index sets A over {1, ..., d}, encoded as bitmasks (bit j-1 <-> element j)."""

from __future__ import annotations

from dataclasses import dataclass
from math import comb

from .exceptions import InputError

__all__ = ["SubsetFamily", "subset_family", "mask_elements", "mask_from_elements", "subset_label"]


def mask_elements(mask):
    """1-based elements of ``mask`` in increasing order."""
    out = []
    j = 1
    while mask:
        if mask & 1:
            out.append(j)
        mask >>= 1
        j += 1
    return out


def mask_from_elements(elements):
    mask = 0
    for j in elements:
        if j < 1:
            raise InputError(f"subset elements are 1-based, got {j}")
        mask |= 1 << (j - 1)
    return mask


def subset_label(mask):
    """``{1,3,4}``-style label."""
    return "{" + ",".join(str(j) for j in mask_elements(mask)) + "}"


@dataclass(frozen=True)
class SubsetFamily:
    """All A with 2 <= |A| <= pmax; serial families keep only A containing 1."""

    d: int
    serial: bool
    pmax: int
    subsets: tuple

    def __len__(self):
        return len(self.subsets)

    def __iter__(self):
        return iter(self.subsets)

    @staticmethod
    def expected_count(d, pmax, serial):
        if serial:
            return sum(comb(d - 1, k - 1) for k in range(2, pmax + 1))
        return sum(comb(d, k) for k in range(2, pmax + 1))


def subset_family(d, pmax=None, serial=False):
    """Enumerate subsets in ascending bitmask order."""
    d = int(d)
    pmax = d if pmax is None else int(pmax)
    if d < 2:
        raise InputError(f"dimension must be at least 2, got {d}")
    if not 2 <= pmax <= d:
        raise InputError(f"pmax must satisfy 2 <= pmax <= d={d}, got {pmax}")
    masks = []
    for mask in range(1, 1 << d):
        if serial and not mask & 1:
            continue
        k = mask.bit_count()
        if 2 <= k <= pmax:
            masks.append(mask)
    return SubsetFamily(d, bool(serial), pmax, tuple(masks))
