"""Synthetic mixed-frequency data from AR(1) high-frequency processes.

One continuous high-frequency chain is generated for the regressor and one for
the error, each started at zero and run through ``burn_in`` discarded steps.
The chains are cut into T blocks of m consecutive values and every block is
reversed so the most recent observation comes first.  The low-frequency
response aggregates ``beta * x + u`` inside each block with MIDAS weights.

Random numbers come from numpy's PCG64 bit generator seeded with the 64-bit
``seed``; the regressor innovations are drawn first, then the error
innovations.
"""
import hashlib
from dataclasses import dataclass, replace

import numpy as np

from . import _kernels
from .exceptions import InvalidParameter
from .weights import MixedSample, midas_weights

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class DgpSpec:
    T: int
    m: int
    c: float = 0.0
    d: float = 0.0
    beta: float = 10.0
    theta: float = 0.0
    seed: int = 0
    burn_in: int = 1000

    def __post_init__(self):
        if not abs(self.c) < 1 or not abs(self.d) < 1:
            raise InvalidParameter(f"AR coefficients must satisfy |c|, |d| < 1, got c={self.c}, d={self.d}")
        if self.T < 1 or self.m < 1:
            raise InvalidParameter("T and m must be positive")
        if self.burn_in < 0:
            raise InvalidParameter("burn_in must be nonnegative")
        if not np.isfinite(self.theta) or not np.isfinite(self.beta):
            raise InvalidParameter("theta and beta must be finite")

    def with_theta(self, theta):
        return replace(self, theta=theta)


@dataclass(frozen=True)
class HighFrequencyBlocks:
    """Regressor and error blocks, each T x m with the most recent value first."""

    x_high: np.ndarray
    u_high: np.ndarray

    def respond(self, beta, theta):
        w = midas_weights(theta, self.x_high.shape[1]).weights
        return (beta * self.x_high + self.u_high) @ w

    def aggregated_error(self, theta):
        return self.u_high @ midas_weights(theta, self.u_high.shape[1]).weights


def simulate_blocks(spec):
    """Draw the regressor and error chains for ``spec`` and cut them into blocks."""
    rng = np.random.Generator(np.random.PCG64(spec.seed & _MASK64))
    n = spec.burn_in + spec.T * spec.m
    eta_x = rng.standard_normal(n)
    eta_u = rng.standard_normal(n)
    x = _kernels.ar1_filter(eta_x, spec.d)[spec.burn_in:]
    u = _kernels.ar1_filter(eta_u, spec.c)[spec.burn_in:]
    x_high = np.ascontiguousarray(x.reshape(spec.T, spec.m)[:, ::-1])
    u_high = np.ascontiguousarray(u.reshape(spec.T, spec.m)[:, ::-1])
    return HighFrequencyBlocks(x_high, u_high)


def simulate(spec):
    """One mixed-frequency sample; deterministic given ``spec.seed``."""
    blocks = simulate_blocks(spec)
    return MixedSample(blocks.respond(spec.beta, spec.theta), blocks.x_high)


def _splitmix64(x):
    x = (x + 0x9E3779B97F4A7C15) & _MASK64
    x = ((x ^ (x >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
    x = ((x ^ (x >> 27)) * 0x94D049BB133111EB) & _MASK64
    return x ^ (x >> 31)


def derive_replication_seed(base_seed, cell_id, replication_index):
    """Mix ``(base_seed, cell_id, replication_index)`` into a 64-bit seed.

    Each component is folded in with a SplitMix64 finaliser.  Because every
    step is a bijection of the running state, changing only the replication
    index (or only the cell) always changes the result.
    """
    h = _splitmix64(int(base_seed) & _MASK64)
    h = _splitmix64(h ^ (int(cell_id) & _MASK64))
    return _splitmix64(h ^ (int(replication_index) & _MASK64))


def cell_id(T, m, c, d):
    """Stable 64-bit identifier of a data cell; k is excluded so alternatives share draws."""
    key = f"T={int(T)};m={int(m)};c={float(c)!r};d={float(d)!r}".encode()
    return int.from_bytes(hashlib.blake2b(key, digest_size=8).digest(), "little")
