"""Per-step updates of the adaptive head statistics."""

import logging
import math
from dataclasses import replace

import numpy as np

from face_kit.heads.types import HeadConfig, HeadKind, HeadState

logger = logging.getLogger(__name__)


def _adacos_scale(cos: np.ndarray, logits: np.ndarray, labels: np.ndarray, current: float) -> float:
    rows = np.arange(cos.shape[0])
    others = logits.copy()
    others[rows, labels] = -np.inf
    # ln of the batch mean of sum_{j != y} exp(logit_j), computed in log space
    top = others.max()
    log_b_avg = top + math.log(float(np.mean(np.exp(others - top).sum(axis=1))))
    theta_med = float(np.median(np.arccos(np.clip(cos[rows, labels], -1.0, 1.0))))
    scale = log_b_avg / math.cos(min(math.pi / 4.0, theta_med))
    if not (math.isfinite(scale) and scale > 0):
        logger.warning("AdaCos update gave scale=%g; keeping %g", scale, current)
        return current
    return scale


def adaptive_state_update(
    state: HeadState,
    cos: np.ndarray,
    logits: np.ndarray,
    labels: np.ndarray,
    cfg: HeadConfig,
) -> HeadState:
    """
    Advance the head statistics by one training step.

    AdaCos re-estimates its scale from the batch; CurricularFace moves t
    toward the mean target cosine; SphereFace decays lambda toward its floor.
    Other kinds return the state unchanged.

    Args:
        state: Current statistics; not modified.
        cos: B x C cosines of the forward pass.
        logits: B x C logits of the forward pass.
        labels: B labels.
        cfg: Head configuration.

    Returns:
        A new HeadState.
    """
    labels = np.asarray(labels, dtype=np.int64)
    if cfg.kind is HeadKind.ADACOS:
        scale = _adacos_scale(np.asarray(cos), np.asarray(logits), labels, state.adacos_scale)
        logger.debug("AdaCos scale %.6f -> %.6f", state.adacos_scale, scale)
        return replace(state, adacos_scale=scale)
    if cfg.kind is HeadKind.CURRICULARFACE:
        target = float(np.mean(np.asarray(cos)[np.arange(labels.shape[0]), labels]))
        t = (1.0 - cfg.ema_alpha) * state.curricular_t + cfg.ema_alpha * target
        return replace(state, curricular_t=min(max(t, 0.0), 1.0))
    if cfg.kind is HeadKind.SPHEREFACE:
        return replace(state, sphere_lambda=max(state.sphere_lambda * cfg.lambda_decay, cfg.lambda_min))
    return state
