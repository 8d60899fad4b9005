"""Bit-encoded spin-1/2 configuration basis and magnetization sectors.

Site ``i`` of a length-``L`` chain is stored in bit ``i`` of the basis
index (site 0 = least significant bit); bit value 1 means spin up along
z, bit value 0 spin down.  The full Hilbert space has dimension ``2**L``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_SITES = 24


def _check_length(length: int) -> None:
    if not 1 <= length <= MAX_SITES:
        raise ValueError(f"site count must be in [1, {MAX_SITES}], got {length}")


@dataclass(frozen=True)
class SpinConfiguration:
    """One computational-basis configuration: ``bits`` over ``length`` sites."""

    bits: int
    length: int

    def __post_init__(self):
        _check_length(self.length)
        if self.bits < 0 or self.bits >> self.length:
            raise ValueError(f"bits 0b{self.bits:b} out of range for {self.length} sites")

    def spin_up(self, site: int) -> bool:
        return bool((self.bits >> site) & 1)


@dataclass(frozen=True)
class SectorDecomposition:
    """Partition of all basis indices into total-magnetization sectors.

    ``sectors`` maps magnetization ``s^z = popcount - L/2`` to the ascending
    array of basis indices with that popcount.
    """

    length: int
    sectors: tuple[tuple[float, np.ndarray], ...]

    @property
    def dimension(self) -> int:
        return 1 << self.length


def config_to_index(config: SpinConfiguration) -> int:
    """Basis index of a configuration (the integer with the same bits)."""
    return config.bits


def index_to_config(index: int, length: int) -> SpinConfiguration:
    """Inverse of :func:`config_to_index`."""
    return SpinConfiguration(bits=index, length=length)


def popcounts(length: int) -> np.ndarray:
    """Number of up spins for every basis index of an ``length``-site chain."""
    _check_length(length)
    idx = np.arange(1 << length, dtype=np.uint32 if length <= 20 else np.uint64)
    return np.bitwise_count(idx).astype(np.int64)


def site_occupations(length: int) -> np.ndarray:
    """(D, L) array of bit values; column ``i`` is site ``i`` of each index."""
    _check_length(length)
    idx = np.arange(1 << length, dtype=np.int64)
    return (idx[:, None] >> np.arange(length)) & 1


def sector_decomposition(length: int) -> SectorDecomposition:
    """Split ``0..2^L-1`` into sectors of fixed total magnetization."""
    counts = popcounts(length)
    sectors = []
    for k in range(length + 1):
        indices = np.nonzero(counts == k)[0]
        sectors.append((k - length / 2, indices))
    return SectorDecomposition(length=length, sectors=tuple(sectors))
