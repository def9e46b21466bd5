"""SplitMix64 streams.

Every random draw in the package comes from the SplitMix64 generator
(Steele, Lea & Flood 2014; the variant used by ``java.util.SplittableRandom``):

    state_k = state_0 + k * 0x9E3779B97F4A7C15          (mod 2**64)
    z = state_k
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    out_k = z ^ (z >> 31)

The k-th output depends only on ``(state_0, k)``, which is what lets the
numpy backend produce blocks of draws without a sequential loop.  Doubles
come from the top 53 bits, offset by half an ulp so that they lie strictly
inside (0, 1).

Streams are derived, never shared: ``derive_seed(base, a, b, ...)`` folds
each identifier into the state through the same finalizer.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
MIX1 = 0xBF58476D1CE4E5B9
MIX2 = 0x94D049BB133111EB
INV_2_53 = 1.0 / (1 << 53)


def mix64(z: int) -> int:
    """SplitMix64 output finalizer on a Python int."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * MIX1) & MASK64
    z = ((z ^ (z >> 27)) * MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(base: int, *ids: int) -> int:
    s = mix64(base)
    for i in ids:
        s = mix64(s ^ mix64((i + GOLDEN_GAMMA) & MASK64))
    return s


def next_u64(state: np.ndarray) -> int:
    """Advance a one-element uint64 state array and return the output."""
    s = (int(state[0]) + GOLDEN_GAMMA) & MASK64
    state[0] = s
    return mix64(s)


def next_double(state: np.ndarray) -> float:
    return ((next_u64(state) >> 11) + 0.5) * INV_2_53


def block_u64(state0: int, start: int, count: int) -> np.ndarray:
    """Outputs ``start+1 .. start+count`` of the stream seeded at ``state0``."""
    k = np.arange(start + 1, start + count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(state0) + k * np.uint64(GOLDEN_GAMMA)
        z = (z ^ (z >> np.uint64(30))) * np.uint64(MIX1)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(MIX2)
    return z ^ (z >> np.uint64(31))


def block_doubles(state0: int, start: int, count: int) -> np.ndarray:
    z = block_u64(state0, start, count)
    return ((z >> np.uint64(11)).astype(np.float64) + 0.5) * INV_2_53


@dataclass(frozen=True)
class RngStream:
    """A named, reproducible random stream.

    Two streams with the same ``(base_seed, stream_id)`` produce the same
    draws on every platform and backend.
    """

    base_seed: int
    stream_id: int = 0

    def __post_init__(self) -> None:
        object.__setattr__(self, "base_seed", int(self.base_seed) & MASK64)
        object.__setattr__(self, "stream_id", int(self.stream_id) & MASK64)

    @property
    def seed(self) -> int:
        """The 64-bit starting state of this stream."""
        return derive_seed(self.base_seed, self.stream_id)

    def child(self, stream_id: int) -> "RngStream":
        return RngStream(self.seed, stream_id)

    def state(self) -> np.ndarray:
        """A fresh mutable state array for the kernels."""
        return np.array([self.seed], dtype=np.uint64)

    @classmethod
    def for_trial(cls, base_seed: int, cell: int, trial: int) -> "RngStream":
        return cls(derive_seed(base_seed, cell), trial)
