"""Label-smoothing utilities and the optimal logit gap under smoothing."""

import logging
import math

import numpy as np

from face_kit.errors import ConfigError
from face_kit.heads.xent import check_loss_options, smoothed_targets, softmax_xent

logger = logging.getLogger(__name__)


def smooth_labels(y: int, k: int, epsilon: float) -> np.ndarray:
    """
    Smoothed target distribution for label y out of k classes.

    Args:
        y: Label in [0, k).
        k: Number of classes.
        epsilon: Smoothing mass in [0, 1).

    Returns:
        k-vector with 1 - epsilon at y and epsilon / (k - 1) elsewhere.

    Raises:
        ConfigError: If epsilon > 0 with fewer than 2 classes, or y is out of range.
    """
    if not 0 <= y < k:
        raise ConfigError(f"label {y} outside [0, {k})")
    check_loss_options(epsilon, 0.0, k)
    return smoothed_targets(np.array([y]), k, epsilon)[0]


def ls_optimal_gap(epsilon: float, k: int) -> float:
    """
    Target-vs-rest logit gap that minimizes smoothed cross-entropy: ln((k-1)(1-eps)/eps).

    Example:
        >>> round(ls_optimal_gap(0.1, 1000), 4)
        9.104
    """
    if not 0.0 < epsilon < 1.0:
        raise ConfigError(f"epsilon must be in (0, 1), got {epsilon}")
    if k < 2:
        raise ConfigError(f"k must be at least 2, got {k}")
    return math.log((k - 1) * (1.0 - epsilon) / epsilon)


def logit_gap(logits: np.ndarray, labels: np.ndarray) -> float:
    """Batch mean of target logit minus the mean of the other logits."""
    z = np.asarray(logits, dtype=np.float64)
    labels = np.asarray(labels, dtype=np.int64)
    rows = np.arange(z.shape[0])
    target = z[rows, labels]
    rest = (z.sum(axis=1) - target) / (z.shape[1] - 1)
    return float(np.mean(target - rest))


def fit_free_logits(
    epsilon: float, k: int, steps: int = 2000, lr: float = 2.0, label: int = 0
) -> tuple[np.ndarray, float]:
    """
    Minimize smoothed cross-entropy over one row of free logits by gradient descent.

    Starts from zeros so the non-target logits stay equal to each other.

    Returns:
        Tuple of (1 x k fitted logits, their logit gap).
    """
    z = np.zeros((1, k), dtype=np.float64)
    labels = np.array([label])
    loss = math.nan
    for _ in range(steps):
        loss, grad = softmax_xent(z, labels, epsilon, 0.0)
        z -= lr * grad
    gap = logit_gap(z, labels)
    logger.debug("free-logit fit: eps=%g k=%d loss=%.6f gap=%.6f", epsilon, k, loss, gap)
    return z, gap
