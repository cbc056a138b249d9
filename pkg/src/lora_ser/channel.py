"""Flat Rician/Rayleigh block fading and additive white Gaussian noise.

One complex tap is drawn per LoRa symbol and held over all of its samples.
Noise power is fixed by ``n0``; the sweep tools keep ``n0 = 1`` and scale
the symbol energy instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = ["ChannelParams", "FadedObservation", "apply_channel", "sample_tap", "sample_taps"]


@dataclass(frozen=True)
class ChannelParams:
    mu_h: complex = 0.0
    sigma_h2: float = 1.0
    n0: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "mu_h", complex(self.mu_h))
        if not self.sigma_h2 >= 0:
            raise ValueError(f"sigma_h2 must be >= 0, got {self.sigma_h2!r}")
        if not self.n0 > 0:
            raise ValueError(f"n0 must be > 0, got {self.n0!r}")

    @classmethod
    def from_k_factor(cls, k_factor: float, n0: float = 1.0) -> "ChannelParams":
        """Unit-power Rician channel with real mean and Rician factor ``k_factor``.

        ``k_factor=inf`` gives the non-fading channel (mu_h = 1, sigma_h2 = 0).
        """
        if not k_factor >= 0:
            raise ValueError(f"k_factor must be >= 0, got {k_factor!r}")
        if math.isinf(k_factor):
            return cls(1.0, 0.0, n0)
        return cls(math.sqrt(k_factor / (1.0 + k_factor)), 1.0 / (1.0 + k_factor), n0)

    @classmethod
    def rayleigh(cls, sigma_h2: float = 1.0, n0: float = 1.0) -> "ChannelParams":
        return cls(0.0, sigma_h2, n0)

    @property
    def mean_power(self) -> float:
        """E{|H|^2}."""
        return self.sigma_h2 + abs(self.mu_h) ** 2

    @property
    def k_factor(self) -> float:
        if self.sigma_h2 == 0:
            return math.inf
        return abs(self.mu_h) ** 2 / self.sigma_h2

    def normalized(self) -> "ChannelParams":
        """Same K-factor and mean phase, rescaled to E{|H|^2} = 1."""
        p = self.mean_power
        if p <= 0:
            raise ValueError("cannot normalize a channel with zero mean power")
        return ChannelParams(self.mu_h / math.sqrt(p), self.sigma_h2 / p, self.n0)


@dataclass(frozen=True)
class FadedObservation:
    samples: np.ndarray
    tap: complex


def sample_taps(ch: ChannelParams, rng: np.random.Generator, size) -> np.ndarray:
    """Independent taps H = mu_h + g, g ~ CN(0, sigma_h2)."""
    g = rng.standard_normal((2,) + tuple(np.atleast_1d(size)))
    scale = math.sqrt(ch.sigma_h2 / 2.0)
    return ch.mu_h + scale * (g[0] + 1j * g[1])


def sample_tap(ch: ChannelParams, rng: np.random.Generator) -> complex:
    if ch.sigma_h2 == 0:
        return ch.mu_h
    return complex(sample_taps(ch, rng, 1)[0])


def complex_noise(n0: float, rng: np.random.Generator, shape) -> np.ndarray:
    """Circularly symmetric CN(0, n0) samples."""
    z = rng.standard_normal((2,) + tuple(np.atleast_1d(shape)))
    return math.sqrt(n0 / 2.0) * (z[0] + 1j * z[1])


def apply_channel(
    ch: ChannelParams,
    x,
    rng: np.random.Generator,
    noise: bool = True,
) -> FadedObservation:
    """Y[k] = H x[k] + N[k] with a single tap for the whole block."""
    x = np.asarray(x, dtype=complex)
    tap = sample_tap(ch, rng)
    y = tap * x
    if noise:
        y = y + complex_noise(ch.n0, rng, x.shape)
    return FadedObservation(y, tap)
