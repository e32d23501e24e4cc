"""Deterministic pseudo-random numbers.

The generator is xoshiro256** with its 256-bit state filled from four
consecutive SplitMix64 outputs of the seed. The algorithm is fixed so that
sampling and augmentation give the same streams on every platform.
"""

import math

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN_GAMMA = 0x9E3779B97F4A7C15
_TWO_POW_M53 = 1.0 / (1 << 53)


def _rotl(x: int, k: int) -> int:
    return ((x << k) | (x >> (64 - k))) & MASK64


class SplitMix64:
    """SplitMix64 sequence, used only to expand a seed into generator state."""

    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + GOLDEN_GAMMA) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)


class Prng:
    """
    Single-owner random stream.

    Parallel consumers must not share one instance; use split() to derive
    independent children instead.

    Args:
        seed: Any integer; reduced modulo 2**64.

    Example:
        >>> rng = Prng(42)
        >>> hex(rng.next_u64())
        '0x15780b2e0c2ec716'
    """

    def __init__(self, seed: int = 0):
        self.seed = seed & MASK64
        mixer = SplitMix64(self.seed)
        self._s = [mixer.next() for _ in range(4)]

    def next_u64(self) -> int:
        s0, s1, s2, s3 = self._s
        result = (_rotl((s1 * 5) & MASK64, 7) * 9) & MASK64
        t = (s1 << 17) & MASK64
        s2 ^= s0
        s3 ^= s1
        s1 ^= s2
        s0 ^= s3
        s2 ^= t
        s3 = _rotl(s3, 45)
        self._s = [s0, s1, s2, s3]
        return result

    def uniform(self) -> float:
        """Uniform float in [0, 1) from the top 53 bits."""
        return (self.next_u64() >> 11) * _TWO_POW_M53

    def uniforms(self, n: int) -> np.ndarray:
        return np.array([self.uniform() for _ in range(n)], dtype=np.float64)

    def uniform_range(self, lo: float, hi: float) -> float:
        return lo + (hi - lo) * self.uniform()

    def normals(self, n: int, sigma: float = 1.0) -> np.ndarray:
        """Gaussian samples via Box-Muller, two per uniform pair."""
        out = np.empty(n, dtype=np.float64)
        i = 0
        while i < n:
            u1 = 1.0 - self.uniform()  # (0, 1], keeps log finite
            u2 = self.uniform()
            radius = math.sqrt(-2.0 * math.log(u1))
            out[i] = radius * math.cos(2.0 * math.pi * u2)
            if i + 1 < n:
                out[i + 1] = radius * math.sin(2.0 * math.pi * u2)
            i += 2
        return out * sigma

    def normal_matrix(self, rows: int, cols: int, sigma: float = 1.0) -> np.ndarray:
        return self.normals(rows * cols, sigma).reshape(rows, cols)

    def integers(self, n: int, high: int) -> np.ndarray:
        """n integers uniform in [0, high)."""
        return np.array([int(self.uniform() * high) for _ in range(n)], dtype=np.int64)

    def permutation(self, n: int) -> np.ndarray:
        """Fisher-Yates shuffle of range(n)."""
        perm = np.arange(n)
        for i in range(n - 1, 0, -1):
            j = int(self.uniform() * (i + 1))
            perm[i], perm[j] = perm[j], perm[i]
        return perm

    def split(self, index: int) -> "Prng":
        """Independent child stream: seed XOR (index + 1) golden-ratio increments."""
        return Prng(self.seed ^ (((index + 1) * GOLDEN_GAMMA) & MASK64))
