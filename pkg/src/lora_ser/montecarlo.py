"""Monte Carlo symbol error rate of the de-chirp + FFT detector.

Trials are split into fixed-size batches. Batch ``i`` of a run seeded with
``seed`` draws from its own Philox stream keyed by ``(seed, i)``, so the
per-batch error counts, and therefore the result, do not depend on how many
worker processes ran them or in which order they finished.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .channel import ChannelParams, sample_taps
from .link import LinkBudget
from .modem import LoRaParams, dechirp_dft, detect, modulate

__all__ = ["McConfig", "McResult", "batch_generator", "simulate_ser"]

# samples (not symbols) generated per vectorised step inside a batch
_CHUNK_SAMPLES = 1 << 19
_Z95 = 1.959963984540054


@dataclass(frozen=True)
class McConfig:
    trials: int = 1_000_000
    seed: int = 0
    batch_size: int = 1 << 16
    target_errors: Optional[int] = None
    parallel_workers: int = 1
    noiseless: bool = False

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.parallel_workers < 1:
            raise ValueError(f"parallel_workers must be >= 1, got {self.parallel_workers}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")
        if self.target_errors is not None and self.target_errors < 1:
            raise ValueError(f"target_errors must be >= 1, got {self.target_errors}")

    @property
    def n_batches(self) -> int:
        return -(-self.trials // self.batch_size)

    def batch_trials(self, index: int) -> int:
        return min(self.batch_size, self.trials - index * self.batch_size)


@dataclass(frozen=True)
class McResult:
    errors: int
    trials_run: int

    @property
    def ser_hat(self) -> float:
        return self.errors / self.trials_run

    @property
    def stderr(self) -> float:
        p = self.ser_hat
        return math.sqrt(p * (1.0 - p) / self.trials_run)

    def _wilson(self) -> tuple[float, float]:
        n = self.trials_run
        p = self.ser_hat
        z2 = _Z95 * _Z95
        centre = (p + z2 / (2 * n)) / (1 + z2 / n)
        half = _Z95 * math.sqrt(p * (1 - p) / n + z2 / (4 * n * n)) / (1 + z2 / n)
        low = 0.0 if self.errors == 0 else max(0.0, centre - half)
        high = 1.0 if self.errors == n else min(1.0, centre + half)
        return low, high

    @property
    def ci95_low(self) -> float:
        """Wilson score interval, lower end."""
        return self._wilson()[0]

    @property
    def ci95_high(self) -> float:
        return self._wilson()[1]


def batch_generator(seed: int, index: int) -> np.random.Generator:
    """Counter-based stream for one batch; independent of scheduling."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(index,))))


def _batch_errors(params: LoRaParams, ch: ChannelParams, noiseless: bool,
                  seed: int, index: int, n: int) -> int:
    rng = batch_generator(seed, index)
    m_size = params.m_size
    chunk = max(1, _CHUNK_SAMPLES // m_size)
    noise_scale = math.sqrt(ch.n0 / 2.0)
    errors = 0
    done = 0
    while done < n:
        c = min(chunk, n - done)
        m = rng.integers(0, m_size, size=c)
        if ch.sigma_h2 == 0:
            taps = np.full(c, ch.mu_h)
        else:
            taps = sample_taps(ch, rng, c)
        y = taps[:, None] * modulate(params, m)
        if not noiseless:
            # interleaved (re, im) view: one normal per real component
            z = rng.standard_normal((c, 2 * m_size))
            z *= noise_scale
            y.view(np.float64)[...] += z
        errors += int(np.count_nonzero(detect(dechirp_dft(params, y)) != m))
        done += c
    return errors


def _batch_task(args) -> int:
    return _batch_errors(*args)


def simulate_ser(lb: LinkBudget, mc: McConfig) -> McResult:
    """Estimate the SER by simulating the full modem chain.

    Each trial draws a uniform symbol, modulates it at energy E = es_n0 * n0,
    passes it through one block-fading tap plus noise, de-chirps and picks the
    largest FFT bin. With ``target_errors`` set, the run stops at the first
    batch boundary (in batch order) where the error count reaches the target.
    """
    params = lb.modem_params()
    tasks = [
        (params, lb.ch, mc.noiseless, mc.seed, i, mc.batch_trials(i))
        for i in range(mc.n_batches)
    ]
    errors = 0
    trials = 0
    if mc.parallel_workers == 1:
        for task in tasks:
            errors += _batch_task(task)
            trials += task[-1]
            if mc.target_errors is not None and errors >= mc.target_errors:
                break
        return McResult(errors, trials)

    wave = mc.parallel_workers if mc.target_errors is not None else len(tasks)
    with ProcessPoolExecutor(max_workers=mc.parallel_workers) as pool:
        for start in range(0, len(tasks), wave):
            chunk = tasks[start:start + wave]
            for task, count in zip(chunk, pool.map(_batch_task, chunk)):
                errors += count
                trials += task[-1]
                if mc.target_errors is not None and errors >= mc.target_errors:
                    return McResult(errors, trials)
    return McResult(errors, trials)
