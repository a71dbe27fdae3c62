"""
Seeded Rayleigh channel generation with transmit-side correlation H = H_w R_t^(1/2).

Random numbers come from numpy's Philox-4x64-10 counter-based generator. Every
Monte Carlo trial owns a substream keyed by SeedSequence(seed, spawn_key=(trial,)),
so a trial's channel depends only on (seed, trial) and never on the trial count
or on the order trials are evaluated in.
"""
from dataclasses import dataclass, field

import numpy as np

from src.core.errors import ConfigError, ShapeError
from src.core.linalg import as_matrix, mat_mul, psd_sqrt

SEED_LIMIT = 2 ** 64


@dataclass(frozen=True)
class ChannelConfig:
    n_t: int = 4
    n_r: int = 4
    snr_db: float = 30.0
    trials: int = 10_000
    seed: int = 0

    def __post_init__(self):
        if self.n_t < 1 or self.n_r < 1:
            raise ConfigError(f"antenna counts must be positive, got n_t={self.n_t}, n_r={self.n_r}")
        if self.trials < 1:
            raise ConfigError(f"trials must be at least 1, got {self.trials}")
        if not 0 <= self.seed < SEED_LIMIT:
            raise ConfigError(f"seed must be an unsigned 64-bit integer, got {self.seed}")

    @property
    def gamma0(self) -> float:
        return snr_linear(self.snr_db)


@dataclass(frozen=True, eq=False)
class ChannelRealization:
    h: np.ndarray


@dataclass(frozen=True)
class RandomStream:
    seed: int
    substream_id: int = 0
    generator: np.random.Generator = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        sequence = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.substream_id,))
        object.__setattr__(self, "generator", np.random.Generator(np.random.Philox(sequence)))

    def uniform(self, size) -> np.ndarray:
        """Uniform doubles in [0, 1)."""
        return self.generator.random(size)


def trial_stream(config: ChannelConfig, trial: int) -> RandomStream:
    return RandomStream(config.seed, trial)


def sample_hw(n_r: int, n_t: int, stream: RandomStream) -> ChannelRealization:
    """
    Draws an n_r x n_t matrix of i.i.d. CN(0, 1) entries by Box-Muller.

    Each entry consumes two uniforms (u1, u2): modulus sqrt(-ln(1 - u1)) and
    phase 2 pi u2, i.e. real and imaginary parts N(0, 1/2) each.
    """
    u = stream.uniform(2 * n_r * n_t)
    radius = np.sqrt(-np.log1p(-u[0::2]))
    angle = 2.0 * np.pi * u[1::2]
    h = (radius * np.cos(angle) + 1j * radius * np.sin(angle)).reshape(n_r, n_t)
    return ChannelRealization(h)


def sample_channels(config: ChannelConfig) -> np.ndarray:
    """
    Returns:
        np.ndarray: (trials, n_r, n_t) stack of H_w, trial t drawn from substream t.
    """
    return np.stack([
        sample_hw(config.n_r, config.n_t, trial_stream(config, t)).h
        for t in range(config.trials)
    ])


def apply_tx_correlation(hw: ChannelRealization, r_t) -> ChannelRealization:
    r_t = as_matrix(r_t)
    n_t = hw.h.shape[1]
    if r_t.shape != (n_t, n_t):
        raise ShapeError(f"transmit covariance must be {n_t}x{n_t}, got {r_t.shape[0]}x{r_t.shape[1]}")
    return ChannelRealization(mat_mul(hw.h, psd_sqrt(r_t)))


def snr_linear(snr_db: float) -> float:
    return 10.0 ** (snr_db / 10.0)
