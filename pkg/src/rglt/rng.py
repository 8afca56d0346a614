"""SplitMix64 stream, reproducible bit-for-bit across languages.

State update ``state <- state + 0x9E3779B97F4A7C15 (mod 2^64)``; the output
is the standard SplitMix64 finalizer of the new state::

    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
    z = (z ^ (z >> 27)) * 0x94D049BB133111EB
    z =  z ^ (z >> 31)

Uniform doubles in ``[0, 1)`` take the top 53 bits: ``(z >> 11) * 2^-53``.
"""
import numpy as np

__all__ = ['SplitMix64']

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)


class SplitMix64:
    """Seeded 64-bit generator. Vectorized: draws ``size`` outputs at once."""

    def __init__(self, seed=0):
        self.state = np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)

    def next_uint64(self, size):
        steps = np.arange(1, size + 1, dtype=np.uint64)
        with np.errstate(over='ignore'):
            z = self.state + steps * _GOLDEN
            self.state = self.state + np.uint64(size) * _GOLDEN
            z = (z ^ (z >> np.uint64(30))) * _M1
            z = (z ^ (z >> np.uint64(27))) * _M2
        return z ^ (z >> np.uint64(31))

    def uniform(self, size, low=0.0, high=1.0):
        u = (self.next_uint64(size) >> np.uint64(11)).astype(np.float64) * 2.0 ** -53
        return low + (high - low) * u

    def normal(self, size):
        """Standard normals by Box-Muller on pairs of uniforms."""
        m = (size + 1) // 2
        u1 = self.uniform(m)
        u2 = self.uniform(m)
        radius = np.sqrt(-2.0 * np.log1p(-u1))
        z = np.concatenate([radius * np.cos(2 * np.pi * u2), radius * np.sin(2 * np.pi * u2)])
        return z[:size]

    def integers(self, size, high):
        """Integers in ``[0, high)`` (modulo reduction; bias below 2^-40 for small ``high``)."""
        return (self.next_uint64(size) % np.uint64(high)).astype(np.int64)
