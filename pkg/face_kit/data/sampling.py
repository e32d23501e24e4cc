"""Class-balanced weighted random sampling."""

import numpy as np

from face_kit.data.manifest import DatasetManifest
from face_kit.errors import ConfigError
from face_kit.numerics import Prng


def record_weights(m: DatasetManifest) -> np.ndarray:
    """1 / count(label) per record, so every class carries the same total weight."""
    return 1.0 / m.class_counts[m.labels].astype(np.float64)


def weighted_sample(m: DatasetManifest, rng: Prng, n: int) -> np.ndarray:
    """
    Draw n record indices with replacement, weighted by inverse class frequency.

    Args:
        m: The manifest.
        rng: Random stream; consumes n uniforms.
        n: Number of draws.

    Returns:
        Array of n record indices.
    """
    if n < 1:
        raise ConfigError(f"sample size must be positive, got {n}")
    cdf = np.cumsum(record_weights(m))
    cdf /= cdf[-1]
    draws = np.searchsorted(cdf, rng.uniforms(n), side="right")
    return np.minimum(draws, len(m) - 1)
