"""Portable counter-based random numbers.

Value ``k`` of a stream with key ``K`` is ``mix64(K + (k + 1) * GAMMA)``
where ``mix64`` is the SplitMix64 finalizer and all arithmetic wraps modulo
2**64. Because every draw is a pure function of ``(key, counter)`` the same
numbers come out on any platform, in any language, vectorized or not.
Child streams get their key from ``mix64(key ^ mix64(tag))``.

Uniforms use the top 53 bits; normals use Box-Muller on pairs of uniforms.
"""

from __future__ import annotations

import numpy as np

GAMMA = 0x9E3779B97F4A7C15
MASK64 = (1 << 64) - 1
_M1 = 0xBF58476D1CE4E5B9
_M2 = 0x94D049BB133111EB


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * _M1) & MASK64
    z = ((z ^ (z >> 27)) * _M2) & MASK64
    return z ^ (z >> 31)


def _mix64_vec(z: np.ndarray) -> np.ndarray:
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_M1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_M2)
    return z ^ (z >> np.uint64(31))


class CounterRNG:
    """A keyed stream of 64-bit values addressed by counter."""

    def __init__(self, seed: int, counter: int = 0):
        self.key = int(seed) & MASK64
        self.counter = int(counter)

    def split(self, tag) -> "CounterRNG":
        if isinstance(tag, str):
            h = 0
            for ch in tag.encode():
                h = mix64(h ^ ch)
            tag = h
        return CounterRNG(mix64(self.key ^ mix64(int(tag) & MASK64)))

    def next_u64(self) -> int:
        self.counter += 1
        return mix64(self.key + self.counter * GAMMA)

    def raw(self, size: int) -> np.ndarray:
        ks = np.arange(self.counter + 1, self.counter + 1 + size, dtype=np.uint64)
        self.counter += size
        with np.errstate(over="ignore"):
            z = np.uint64(self.key) + ks * np.uint64(GAMMA)
            return _mix64_vec(z)

    def uniform(self, size=None, low: float = 0.0, high: float = 1.0):
        """Floats in [low, high); scalar when ``size`` is None."""
        count = 1 if size is None else int(np.prod(size))
        u = (self.raw(count) >> np.uint64(11)).astype(np.float64) * (1.0 / (1 << 53))
        u = low + (high - low) * u
        return float(u[0]) if size is None else u.reshape(size)

    def normal(self, size=None, scale: float = 1.0):
        count = 1 if size is None else int(np.prod(size))
        pairs = (count + 1) // 2
        u = self.uniform(2 * pairs)
        u1 = 1.0 - u[0::2]  # (0, 1]
        u2 = u[1::2]
        r = np.sqrt(-2.0 * np.log(u1))
        z = np.empty(2 * pairs)
        z[0::2] = r * np.cos(2.0 * np.pi * u2)
        z[1::2] = r * np.sin(2.0 * np.pi * u2)
        z = scale * z[:count]
        return float(z[0]) if size is None else z.reshape(size)

    def integers(self, low: int, high: int, size=None):
        """Integers in [low, high) by multiply-shift on the top 32 bits."""
        span = int(high) - int(low)
        if span <= 0:
            raise ValueError("empty integer range")
        count = 1 if size is None else int(np.prod(size))
        top = (self.raw(count) >> np.uint64(32)).astype(np.uint64)
        vals = ((top * np.uint64(span)) >> np.uint64(32)).astype(np.int64) + int(low)
        return int(vals[0]) if size is None else vals.reshape(size)
