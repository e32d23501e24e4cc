"""Metric-learning losses: Center, Triplet and Circle."""

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.numerics import as_mat


def center_loss_step(
    embeddings: np.ndarray, labels: np.ndarray, centers: np.ndarray, alpha: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """
    Center loss and the running update of the class centers.

    loss = sum_i ||x_i - c_{y_i}||^2 / 2B. Each center moves by
    alpha * sum_{i: y_i = j} (x_i - c_j) / (1 + n_j).

    Args:
        embeddings: B x D features.
        labels: B labels indexing rows of centers.
        centers: C x D class centers; not modified.
        alpha: Center learning rate in (0, 1].

    Returns:
        Tuple of (loss, d_embeddings, new_centers).

    Raises:
        ConfigError: If alpha is outside (0, 1].
        ShapeError: If a label has no centers row.
    """
    if not 0.0 < alpha <= 1.0:
        raise ConfigError(f"center alpha must be in (0, 1], got {alpha}")
    x = as_mat(embeddings, "embeddings")
    c = as_mat(centers, "centers")
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != x.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for {x.shape[0]} embeddings")
    if labels.size and (labels.min() < 0 or labels.max() >= c.shape[0]):
        raise ShapeError(f"label {int(labels.max())} has no centers row (centers has {c.shape[0]} rows)")
    if c.shape[1] != x.shape[1]:
        raise ShapeError(f"centers dim {c.shape[1]} does not match embedding dim {x.shape[1]}")

    batch = x.shape[0]
    diff = x - c[labels]
    loss = float(np.sum(diff * diff)) / (2.0 * batch)
    d_embeddings = diff / batch

    counts = np.bincount(labels, minlength=c.shape[0]).astype(np.float64)
    pull = np.zeros_like(c)
    np.add.at(pull, labels, c[labels] - x)
    delta = alpha * pull / (1.0 + counts)[:, None]
    return loss, d_embeddings, c - delta


def triplet_loss(
    anchor: np.ndarray, positive: np.ndarray, negative: np.ndarray, margin: float
) -> tuple[float, tuple[np.ndarray, np.ndarray, np.ndarray]]:
    """
    Mean hinge max(0, ||a - p||^2 - ||a - n||^2 + margin) over rows.

    Returns:
        Tuple of (loss, (d_anchor, d_positive, d_negative)).
    """
    a = as_mat(anchor, "anchor")
    p = as_mat(positive, "positive")
    n = as_mat(negative, "negative")
    if not a.shape == p.shape == n.shape:
        raise ShapeError(f"triplet shapes differ: {a.shape}, {p.shape}, {n.shape}")
    if margin < 0:
        raise ConfigError(f"triplet margin must be non-negative, got {margin}")

    batch = a.shape[0]
    ap = a - p
    an = a - n
    hinge = np.sum(ap * ap, axis=1) - np.sum(an * an, axis=1) + margin
    active = (hinge > 0).astype(np.float64)[:, None]
    loss = float(np.sum(np.maximum(hinge, 0.0))) / batch
    d_a = 2.0 * active * (n - p) / batch
    d_p = -2.0 * active * ap / batch
    d_n = 2.0 * active * an / batch
    return loss, (d_a, d_p, d_n)


def _softmax(v: np.ndarray) -> np.ndarray:
    e = np.exp(v - v.max())
    return e / e.sum()


def _logsumexp(v: np.ndarray) -> float:
    top = v.max()
    return float(top + np.log(np.exp(v - top).sum()))


def circle_loss(
    sp: np.ndarray, sn: np.ndarray, m: float, gamma: float
) -> tuple[float, np.ndarray, np.ndarray]:
    """
    Circle loss over positive similarities sp and negative similarities sn.

    L = log(1 + sum_n exp(gamma a_n (s_n - m)) * sum_p exp(-gamma a_p (s_p - 1 + m)))
    with a_p = [1 + m - s_p]_+ and a_n = [s_n + m]_+. The weights a_p and a_n
    are held constant in the backward pass.

    Args:
        sp: Positive-pair similarities in [-1, 1].
        sn: Negative-pair similarities in [-1, 1].
        m: Relaxation margin in (0, 1).
        gamma: Scale, positive.

    Returns:
        Tuple of (loss, d_sp, d_sn).
    """
    sp = np.asarray(sp, dtype=np.float64).reshape(-1)
    sn = np.asarray(sn, dtype=np.float64).reshape(-1)
    if sp.size == 0 or sn.size == 0:
        raise ShapeError("circle loss needs at least one positive and one negative similarity")
    if np.any(np.abs(sp) > 1.0) or np.any(np.abs(sn) > 1.0):
        raise ShapeError("similarities must lie in [-1, 1]")
    if not 0.0 < m < 1.0:
        raise ConfigError(f"circle margin must be in (0, 1), got {m}")
    if gamma <= 0:
        raise ConfigError(f"circle gamma must be positive, got {gamma}")

    alpha_p = np.maximum(1.0 + m - sp, 0.0)
    alpha_n = np.maximum(sn + m, 0.0)
    logit_p = -gamma * alpha_p * (sp - (1.0 - m))
    logit_n = gamma * alpha_n * (sn - m)
    total = _logsumexp(logit_n) + _logsumexp(logit_p)
    loss = float(np.logaddexp(0.0, total))
    # d softplus(total) / d total
    sig = float(np.exp(total - loss))
    d_sp = sig * _softmax(logit_p) * (-gamma * alpha_p)
    d_sn = sig * _softmax(logit_n) * (gamma * alpha_n)
    return loss, d_sp, d_sn
