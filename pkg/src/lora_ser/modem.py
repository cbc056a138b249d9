"""Discrete-time LoRa baseband: chirp modulation and de-chirp/FFT detection."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Sequence

import numpy as np

__all__ = [
    "LoRaParams",
    "bits_to_symbol",
    "dechirp_dft",
    "detect",
    "modulate",
    "symbol_to_bits",
]

MAX_SF = 16
# full M x M symbol table is cached up to this size (16 MiB)
_TABLE_MAX_M = 1024


@dataclass(frozen=True)
class LoRaParams:
    """Spreading factor and symbol energy of a LoRa link.

    The constellation size is always ``2**sf``. The base up-chirp is built once
    and cached on the instance; treat it as read-only.
    """

    sf: int
    symbol_energy: float = 1.0
    _upchirp: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if isinstance(self.sf, bool) or int(self.sf) != self.sf or not 1 <= self.sf <= MAX_SF:
            raise ValueError(f"sf must be an integer in [1, {MAX_SF}], got {self.sf!r}")
        if not self.symbol_energy > 0:
            raise ValueError(f"symbol_energy must be > 0, got {self.symbol_energy!r}")
        object.__setattr__(self, "sf", int(self.sf))
        chirp = _unit_upchirp(self.m_size) * math.sqrt(self.symbol_energy / self.m_size)
        chirp.setflags(write=False)
        object.__setattr__(self, "_upchirp", chirp)

    @property
    def m_size(self) -> int:
        return 1 << self.sf

    @property
    def spectral_efficiency(self) -> float:
        """Bits per complex dimension."""
        return self.sf / self.m_size

    @property
    def upchirp(self) -> np.ndarray:
        """x_0[k], the modulated samples of symbol 0."""
        return self._upchirp


def _unit_upchirp(m_size: int) -> np.ndarray:
    # (-1)^k exp(i pi k^2 / M) = exp(i pi (k^2 + M k) / M); reduce the integer
    # phase numerator mod 2M before the single trig call.
    k = np.arange(m_size, dtype=np.int64)
    num = (k * k + m_size * k) % (2 * m_size)
    return np.exp(1j * math.pi * num / m_size)


def _tone(m_size: int, m) -> np.ndarray:
    k = np.arange(m_size, dtype=np.int64)
    roots = np.exp(2j * math.pi * k / m_size)
    return roots[np.multiply.outer(np.asarray(m, dtype=np.int64), k) % m_size]


def _check_symbol(params: LoRaParams, m) -> None:
    arr = np.asarray(m)
    if arr.dtype.kind not in "iu" or np.any(arr < 0) or np.any(arr >= params.m_size):
        raise ValueError(f"symbol index must be an integer in [0, {params.m_size}), got {m!r}")


@lru_cache(maxsize=8)
def _symbol_table(params: LoRaParams) -> np.ndarray:
    table = params.upchirp * _tone(params.m_size, np.arange(params.m_size))
    table.setflags(write=False)
    return table


def modulate(params: LoRaParams, m) -> np.ndarray:
    """Samples x_m[k] = x_0[k] exp(i 2 pi m k / M), k = 0..M-1.

    ``m`` may be an integer array, in which case one row per symbol is returned.
    """
    _check_symbol(params, m)
    if params.m_size <= _TABLE_MAX_M:
        return _symbol_table(params)[m]
    return params.upchirp * _tone(params.m_size, m)


def dechirp_dft(params: LoRaParams, received) -> np.ndarray:
    """Squared DFT magnitudes of the de-chirped block(s).

    ``received`` has the constellation size along its last axis.
    """
    y = np.asarray(received, dtype=complex)
    if y.shape[-1:] != (params.m_size,):
        raise ValueError(
            f"received block must have {params.m_size} samples, got shape {y.shape}"
        )
    spectrum = np.fft.fft(y * np.conj(params.upchirp), axis=-1)
    return spectrum.real ** 2 + spectrum.imag ** 2


def detect(metrics) -> int | np.ndarray:
    """Index of the largest bin along the last axis; ties go to the lowest index."""
    arr = np.asarray(metrics)
    if arr.size == 0:
        raise ValueError("detect needs at least one decision metric")
    idx = np.argmax(arr, axis=-1)
    if np.ndim(idx) == 0:
        return int(idx)
    return idx


def symbol_to_bits(sf: int, m: int) -> tuple[int, ...]:
    """(b_0, ..., b_{SF-1}) with m = sum_j b_j 2^j."""
    if not 0 <= m < (1 << sf):
        raise ValueError(f"symbol {m} out of range for SF={sf}")
    return tuple((m >> j) & 1 for j in range(sf))


def bits_to_symbol(bits: Sequence[int]) -> int:
    if any(b not in (0, 1) for b in bits):
        raise ValueError("bits must be 0 or 1")
    return sum(b << j for j, b in enumerate(bits))
