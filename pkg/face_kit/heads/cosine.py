"""Cosine logits between embeddings and class weights."""

import logging
from dataclasses import dataclass

import numpy as np

from face_kit.errors import ShapeError
from face_kit.numerics import as_mat, l2_normalize_rows, row_norms

logger = logging.getLogger(__name__)


@dataclass
class CosineCache:
    """Forward values kept for the backward pass through both normalizations."""

    x_unit: np.ndarray
    w_unit: np.ndarray
    x_norms: np.ndarray
    w_norms: np.ndarray
    cos: np.ndarray
    degenerate_rows: int


def cosine_forward(embeddings: np.ndarray, weights: np.ndarray, eps: float = 1e-12) -> CosineCache:
    """Normalize both inputs, take their product and clamp to [-1, 1]."""
    x = as_mat(embeddings, "embeddings")
    w = as_mat(weights, "weights")
    if x.shape[1] != w.shape[1]:
        raise ShapeError(
            f"embedding dim {x.shape[1]} does not match weight dim {w.shape[1]}"
        )
    x_norms = row_norms(x)
    w_norms = row_norms(w)
    degenerate = int(np.sum(x_norms < eps) + np.sum(w_norms < eps))
    if degenerate:
        logger.warning("%d zero-norm rows clamped by eps=%g", degenerate, eps)
    x_unit = l2_normalize_rows(x, eps)
    w_unit = l2_normalize_rows(w, eps)
    cos = np.clip(x_unit @ w_unit.T, -1.0, 1.0)
    return CosineCache(x_unit, w_unit, x_norms, w_norms, cos, degenerate)


def cosine_logits(
    embeddings: np.ndarray, weights: np.ndarray, eps: float = 1e-12
) -> tuple[np.ndarray, int]:
    """
    Cosine similarity of every embedding with every class weight.

    Args:
        embeddings: B x D matrix.
        weights: C x D matrix.
        eps: Norm floor for zero rows.

    Returns:
        Tuple of (B x C cosine matrix clamped to [-1, 1], number of zero-norm
        rows that were clamped).
    """
    cache = cosine_forward(embeddings, weights, eps)
    return cache.cos, cache.degenerate_rows
