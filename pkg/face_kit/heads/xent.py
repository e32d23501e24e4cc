"""Softmax cross-entropy with label smoothing and focal modulation."""

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.numerics import as_mat


def check_loss_options(epsilon: float, gamma: float, num_classes: int) -> None:
    if not 0.0 <= epsilon < 1.0:
        raise ConfigError(f"epsilon must be in [0, 1), got {epsilon}")
    if gamma < 0:
        raise ConfigError(f"gamma must be non-negative, got {gamma}")
    if epsilon > 0 and gamma > 0:
        raise ConfigError("focal modulation and label smoothing cannot be combined")
    if epsilon > 0 and num_classes < 2:
        raise ConfigError(f"label smoothing needs at least 2 classes, got {num_classes}")


def smoothed_targets(labels: np.ndarray, num_classes: int, epsilon: float) -> np.ndarray:
    """
    Row-wise smoothed label distributions.

    The target entry gets 1 - epsilon and every other entry epsilon / (K - 1).
    With epsilon = 0 the rows are exact one-hot vectors.
    """
    labels = np.asarray(labels, dtype=np.int64)
    off = epsilon / (num_classes - 1) if num_classes > 1 else 0.0
    q = np.full((labels.shape[0], num_classes), off, dtype=np.float64)
    q[np.arange(labels.shape[0]), labels] = 1.0 - epsilon
    return q


def log_partition(logits: np.ndarray) -> np.ndarray:
    """Stable log-sum-exp of every row."""
    top = logits.max(axis=1)
    return np.log(np.exp(logits - top[:, None]).sum(axis=1)) + top


def softmax_xent(
    logits: np.ndarray, labels: np.ndarray, epsilon: float = 0.0, gamma: float = 0.0
) -> tuple[float, np.ndarray]:
    """
    Batch-mean cross-entropy between softmax(logits) and (smoothed) labels.

    Args:
        logits: B x K logits.
        labels: B integer labels in [0, K).
        epsilon: Label smoothing mass in [0, 1).
        gamma: Focal exponent; the per-sample loss is scaled by (1 - p_y)^gamma.

    Returns:
        Tuple of (loss, d_logits).

    Raises:
        ConfigError: If epsilon and gamma are both positive or out of range.
        ShapeError: If labels do not match the logits.

    Example:
        >>> loss, _ = softmax_xent(np.zeros((1, 1000)), np.array([3]))
        >>> round(loss, 4)
        6.9078
    """
    z = as_mat(logits, "logits")
    batch, k = z.shape
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != batch:
        raise ShapeError(f"{labels.shape[0]} labels for {batch} logit rows")
    if batch and (labels.min() < 0 or labels.max() >= k):
        raise ShapeError(f"labels must lie in [0, {k})")
    check_loss_options(epsilon, gamma, k)

    rows = np.arange(batch)
    log_z = log_partition(z)
    p = np.exp(z - log_z[:, None])
    q = smoothed_targets(labels, k, epsilon)

    if gamma == 0:
        per_sample = log_z - (q * z).sum(axis=1)
        d_logits = (p - q) / batch
        return float(per_sample.mean()), d_logits

    per_sample, coef = focal_terms(z[rows, labels] - log_z, gamma)
    d_logits = (p - q) * coef[:, None] / batch
    return float(per_sample.mean()), d_logits


def focal_terms(log_py: np.ndarray, gamma: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Focal per-sample loss u^gamma * ce and its gradient coefficient, u = 1 - p_y.

    The gradient w.r.t. the logits is (p - onehot) * coef.
    """
    ce = -log_py
    p_y = np.exp(log_py)
    u = -np.expm1(log_py)
    safe_u = np.where(u > 0, u, 1.0)
    weight = u**gamma
    slope = np.where(u > 0, gamma * safe_u ** (gamma - 1.0) * p_y * ce, 0.0)
    return weight * ce, weight + slope
