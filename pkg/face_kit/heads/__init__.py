"""Classification heads: cosine logits, margin zoo, cross-entropy and metric losses."""

from face_kit.heads.adaptive import adaptive_state_update
from face_kit.heads.cosine import CosineCache, cosine_forward, cosine_logits
from face_kit.heads.margins import (
    MarginCache,
    additive_angular,
    effective_scale,
    margin_backward,
    margin_forward,
    margin_transform,
    sphere_psi,
    target_margin,
)
from face_kit.heads.metric import center_loss_step, circle_loss, triplet_loss
from face_kit.heads.types import (
    ADDITIVE_COSINE_KINDS,
    SHARDABLE_KINDS,
    HeadConfig,
    HeadKind,
    HeadState,
    LossGrad,
)
from face_kit.heads.xent import focal_terms, log_partition, smoothed_targets, softmax_xent
from face_kit.heads.zoo import (
    HeadForward,
    head_backward,
    head_forward,
    head_loss_and_grad,
    magface_regularizer,
)

__all__ = [
    # Types
    "HeadKind",
    "HeadConfig",
    "HeadState",
    "LossGrad",
    "ADDITIVE_COSINE_KINDS",
    "SHARDABLE_KINDS",
    # Cosine logits
    "CosineCache",
    "cosine_forward",
    "cosine_logits",
    # Margins
    "MarginCache",
    "additive_angular",
    "sphere_psi",
    "target_margin",
    "effective_scale",
    "margin_forward",
    "margin_transform",
    "margin_backward",
    # Cross-entropy
    "softmax_xent",
    "smoothed_targets",
    "log_partition",
    "focal_terms",
    # Composition
    "HeadForward",
    "head_forward",
    "head_backward",
    "head_loss_and_grad",
    "magface_regularizer",
    # Metric losses
    "center_loss_step",
    "triplet_loss",
    "circle_loss",
    # Adaptive statistics
    "adaptive_state_update",
]
