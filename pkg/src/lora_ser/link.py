"""Operating point shared by the analytic error probabilities and the bounds."""

from __future__ import annotations

import math
from dataclasses import dataclass

from .channel import ChannelParams
from .modem import LoRaParams
from .specfun import NoncentralChi2

__all__ = ["LinkBudget", "db_to_linear"]


def db_to_linear(db: float) -> float:
    return 10.0 ** (db / 10.0)


@dataclass(frozen=True)
class LinkBudget:
    """A constellation, a channel and a symbol SNR E/N0 (linear).

    Only ``params.sf`` is consulted by the analytic routines; the energy that
    sets the operating point is ``es_n0 * ch.n0``.
    """

    params: LoRaParams
    ch: ChannelParams
    es_n0: float

    def __post_init__(self):
        if not self.es_n0 >= 0 or math.isnan(self.es_n0):
            raise ValueError(f"es_n0 must be >= 0, got {self.es_n0!r}")

    @classmethod
    def from_ebn0_db(cls, sf: int, ch: ChannelParams, ebn0_db: float) -> "LinkBudget":
        """E = SF * Eb, so E/N0 = SF * (Eb/N0)."""
        return cls(LoRaParams(sf), ch, sf * db_to_linear(ebn0_db))

    @property
    def m_size(self) -> int:
        return self.params.m_size

    @property
    def energy(self) -> float:
        return self.es_n0 * self.ch.n0

    @property
    def sigma0_2(self) -> float:
        """Per-component variance of the correct-bin DFT output."""
        e = self.energy
        return (e * e * self.ch.sigma_h2 + e * self.ch.n0) / 2.0

    @property
    def sigma1_2(self) -> float:
        """Per-component variance of every other DFT output."""
        return self.energy * self.ch.n0 / 2.0

    @property
    def s(self) -> float:
        return self.energy * abs(self.ch.mu_h)

    @property
    def mu1(self) -> float:
        return self.energy * self.ch.mu_h.real

    @property
    def mu2(self) -> float:
        return self.energy * self.ch.mu_h.imag

    def metric(self) -> NoncentralChi2:
        """Distribution of the correct-bin metric |V[m]|^2."""
        return NoncentralChi2(self.s, self.sigma0_2)

    def modem_params(self) -> LoRaParams:
        """LoRaParams carrying the symbol energy of this operating point."""
        return LoRaParams(self.params.sf, self.energy)
