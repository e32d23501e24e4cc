"""
Head forward/backward composition: cosine logits, margin, cross-entropy.

head_loss_and_grad is the training contract. head_forward and head_backward
are exposed separately so that callers can put their own loss on the margin
logits (distillation does this).
"""

import logging
from dataclasses import dataclass

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.heads.cosine import CosineCache, cosine_forward
from face_kit.heads.margins import MarginCache, margin_backward, margin_forward
from face_kit.heads.types import HeadConfig, HeadKind, HeadState, LossGrad
from face_kit.heads.xent import softmax_xent
from face_kit.numerics import as_mat, normalize_backward

logger = logging.getLogger(__name__)


@dataclass
class HeadForward:
    """Everything head_backward needs from one forward pass."""

    logits: np.ndarray
    labels: np.ndarray
    embeddings: np.ndarray
    weights: np.ndarray
    margin_cache: MarginCache
    cosine_cache: CosineCache | None = None

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]


def _check_state(cfg: HeadConfig, state: HeadState, num_classes: int) -> None:
    state.validate(num_classes)
    if cfg.kind is HeadKind.ADAMSOFTMAX and state.adam_margins.shape != (num_classes,):
        raise ConfigError(
            f"AdaMSoftmax needs {num_classes} learnable margins, state has {state.adam_margins.shape}"
        )


def head_forward(
    embeddings: np.ndarray,
    weights: np.ndarray,
    labels: np.ndarray,
    cfg: HeadConfig,
    state: HeadState,
) -> HeadForward:
    """
    Scaled margin logits of a batch.

    Args:
        embeddings: B x D embeddings (not normalized).
        weights: C x D class weights.
        labels: B labels in [0, C).
        cfg: Head configuration.
        state: Head statistics.

    Returns:
        HeadForward holding the B x C logits and backward caches.
    """
    x = as_mat(embeddings, "embeddings")
    w = as_mat(weights, "weights")
    if x.shape[1] != w.shape[1]:
        raise ShapeError(f"embedding dim {x.shape[1]} does not match weight dim {w.shape[1]}")
    _check_state(cfg, state, w.shape[0])

    if cfg.kind is HeadKind.SOFTMAX:
        logits, mcache = margin_forward(x @ w.T, labels, cfg, state)
        return HeadForward(logits, mcache.labels, x, w, mcache)

    ccache = cosine_forward(x, w, cfg.eps)
    logits, mcache = margin_forward(ccache.cos, labels, cfg, state, magnitudes=ccache.x_norms)
    return HeadForward(logits, mcache.labels, x, w, mcache, ccache)


def head_backward(
    fwd: HeadForward, d_logits: np.ndarray, eps: float = 1e-12
) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
    """
    Backpropagate a logit gradient to embeddings, weights and learnable margins.

    Returns:
        Tuple of (d_embeddings, d_weights, d_margins or None).
    """
    d_cos, d_mags, d_margins = margin_backward(d_logits, fwd.margin_cache, fwd.num_classes)
    if fwd.cosine_cache is None:
        return d_cos @ fwd.weights, d_cos.T @ fwd.embeddings, d_margins

    cc = fwd.cosine_cache
    d_x_unit = d_cos @ cc.w_unit
    d_w_unit = d_cos.T @ cc.x_unit
    if d_mags is not None:
        # magnitude gradient is radial: it bypasses the normalization Jacobian
        d_x = normalize_backward(d_x_unit, cc.x_unit, cc.x_norms, eps) + d_mags[:, None] * cc.x_unit
    else:
        d_x = normalize_backward(d_x_unit, cc.x_unit, cc.x_norms, eps)
    d_w = normalize_backward(d_w_unit, cc.w_unit, cc.w_norms, eps)
    return d_x, d_w, d_margins


def magface_regularizer(norms: np.ndarray, cfg: HeadConfig) -> tuple[float, np.ndarray]:
    """
    lambda_g * mean(1/a + a/u_a^2) over clipped magnitudes a.

    Returns:
        Tuple of (value, derivative w.r.t. each unclipped norm).
    """
    a = np.clip(norms, cfg.mag_la, cfg.mag_ua)
    batch = norms.shape[0]
    value = cfg.mag_lambda_g * float(np.mean(1.0 / a + a / cfg.mag_ua**2))
    inside = (norms > cfg.mag_la) & (norms < cfg.mag_ua)
    d_norms = np.where(inside, cfg.mag_lambda_g * (-1.0 / (a * a) + 1.0 / cfg.mag_ua**2) / batch, 0.0)
    return value, d_norms


def head_loss_and_grad(
    embeddings: np.ndarray,
    weights: np.ndarray,
    labels: np.ndarray,
    cfg: HeadConfig,
    state: HeadState,
) -> LossGrad:
    """
    Loss and analytic gradients of softmax_xent(margin(cosine(x, W))).

    MagFace adds its magnitude regularizer; AdaMSoftmax adds -lambda * mean(m_y)
    and reports the margin gradient in LossGrad.d_margins.

    Args:
        embeddings: B x D embeddings.
        weights: C x D class weights.
        labels: B labels in [0, C).
        cfg: Head configuration.
        state: Head statistics, read only.

    Returns:
        LossGrad with gradients shaped like the inputs.

    Example:
        >>> cfg = HeadConfig(kind="ArcFace", s=16.0, m=0.3)
        >>> state = HeadState.initial(5, 8, cfg)
        >>> lg = head_loss_and_grad(x, w, labels, cfg, state)  # doctest: +SKIP
    """
    fwd = head_forward(embeddings, weights, labels, cfg, state)
    loss, d_logits = softmax_xent(fwd.logits, fwd.labels, cfg.epsilon, cfg.gamma)
    d_x, d_w, d_margins = head_backward(fwd, d_logits, cfg.eps)

    if cfg.kind is HeadKind.MAGFACE:
        cc = fwd.cosine_cache
        reg, d_norms = magface_regularizer(cc.x_norms, cfg)
        loss += reg
        d_x = d_x + d_norms[:, None] * cc.x_unit

    elif cfg.kind is HeadKind.ADAMSOFTMAX:
        batch = fwd.labels.shape[0]
        loss -= cfg.lambda_adam * float(np.mean(state.adam_margins[fwd.labels]))
        np.add.at(d_margins, fwd.labels, -cfg.lambda_adam / batch)

    if not (np.isfinite(loss) and np.all(np.isfinite(d_x)) and np.all(np.isfinite(d_w))):
        logger.warning("non-finite head output for kind=%s", cfg.kind.value)
    return LossGrad(loss=float(loss), d_embeddings=d_x, d_weights=d_w, d_margins=d_margins)
