"""Margin transformations of cosine logits, one formula per head kind.

Every transform works on the B x C cosine matrix and returns scaled logits
plus a MarginCache holding the partial derivatives the backward pass needs.
Formulas and sources are listed in docs/heads.md.
"""

import math
from dataclasses import dataclass

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.heads.types import ADDITIVE_COSINE_KINDS, HeadConfig, HeadKind, HeadState

_SIN_FLOOR = 1e-12


@dataclass
class MarginCache:
    """
    Partial derivatives of the unscaled logits z w.r.t. the cosines.

    dz_dc is elementwise (z[i, j] w.r.t. cos[i, j]). Cross terms cover heads
    whose target logit reads other columns (dzy_dcj) or whose non-target
    logits read the target cosine (dzj_dcy).
    """

    scale: float
    labels: np.ndarray
    dz_dc: np.ndarray
    dzy_dcj: np.ndarray | None = None
    dzj_dcy: np.ndarray | None = None
    dzy_da: np.ndarray | None = None
    dzy_dmargin: np.ndarray | None = None


def additive_angular(c: np.ndarray, m) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    cos(theta + m) via the angle-addition formula, with the monotonic fallback.

    When theta + m > pi the value is c - m * sin(m). With m = 0 the result is c
    exactly.

    Returns:
        Tuple of (value, d value / d c, d value / d m).
    """
    cos_m = np.cos(m)
    sin_m = np.sin(m)
    sin_t = np.sqrt(np.maximum(1.0 - c * c, 0.0))
    phi = c * cos_m - sin_t * sin_m
    dphi_dc = cos_m + sin_m * c / np.maximum(sin_t, _SIN_FLOOR)
    dphi_dm = -c * sin_m - sin_t * cos_m
    inside = c > np.cos(math.pi - m)
    value = np.where(inside, phi, c - m * sin_m)
    d_dc = np.where(inside, dphi_dc, 1.0)
    d_dm = np.where(inside, dphi_dm, -(sin_m + m * cos_m))
    return value, d_dc, d_dm


def sphere_psi(c: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """
    psi(theta) = (-1)^k cos(m theta) - 2k on [k pi / m, (k + 1) pi / m].

    Returns:
        Tuple of (psi, d psi / d cos theta).
    """
    theta = np.arccos(c)
    k = np.clip(np.floor(m * theta / math.pi), 0, m - 1)
    sign = np.where(k % 2 == 0, 1.0, -1.0)
    psi = sign * np.cos(m * theta) - 2.0 * k
    sin_t = np.maximum(np.sin(theta), _SIN_FLOOR)
    dpsi_dc = sign * m * np.sin(m * theta) / sin_t
    return psi, dpsi_dc


def target_margin(kind: HeadKind, c: np.ndarray, m: float) -> tuple[np.ndarray, np.ndarray]:
    """
    Target-column transform for heads whose margin touches only the target.

    Used by both the dense head and the sharded classifier.

    Returns:
        Tuple of (transformed target cosine, derivative w.r.t. the cosine).
    """
    if kind is HeadKind.NORM_SOFTMAX:
        return c.copy(), np.ones_like(c)
    if kind in ADDITIVE_COSINE_KINDS:
        return c - m, np.ones_like(c)
    if kind is HeadKind.ARCFACE:
        value, d_dc, _ = additive_angular(c, m)
        return value, d_dc
    raise ConfigError(f"{kind.value} is not a target-only margin head")


def effective_scale(cfg: HeadConfig, state: HeadState) -> float:
    if cfg.kind is HeadKind.ADACOS:
        return state.adacos_scale
    return float(cfg.s)


def margin_forward(
    cos: np.ndarray,
    labels: np.ndarray,
    cfg: HeadConfig,
    state: HeadState,
    magnitudes: np.ndarray | None = None,
) -> tuple[np.ndarray, MarginCache]:
    """
    Apply the head's margin to the cosine matrix and scale it.

    Args:
        cos: B x C cosines in [-1, 1].
        labels: B integer labels in [0, C).
        cfg: Head configuration.
        state: Head statistics (AdaCos scale, CurricularFace t, SphereFace lambda,
            AdaMSoftmax margins).
        magnitudes: Pre-normalization embedding norms, required by MagFace.

    Returns:
        Tuple of (B x C scaled logits, cache for margin_backward).
    """
    cos = np.asarray(cos, dtype=np.float64)
    labels = _check_labels(labels, cos.shape)
    rows = np.arange(cos.shape[0])
    c_y = cos[rows, labels]
    z = cos.copy()
    dz_dc = np.ones_like(cos)
    cache = MarginCache(scale=effective_scale(cfg, state), labels=labels, dz_dc=dz_dc)
    kind = cfg.kind

    if kind in (HeadKind.SOFTMAX, HeadKind.NORM_SOFTMAX, HeadKind.ADACOS):
        pass

    elif kind in (HeadKind.COSFACE, HeadKind.AMSOFTMAX, HeadKind.ARCFACE):
        z[rows, labels], dz_dc[rows, labels] = target_margin(kind, c_y, cfg.m)

    elif kind is HeadKind.SPHEREFACE:
        lam = state.sphere_lambda
        psi, dpsi = sphere_psi(c_y, int(cfg.m))
        z[rows, labels] = (lam * c_y + psi) / (1.0 + lam)
        dz_dc[rows, labels] = (lam + dpsi) / (1.0 + lam)

    elif kind is HeadKind.CURRICULARFACE:
        phi, dphi, _ = additive_angular(c_y, cfg.m)
        t = state.curricular_t
        hard = cos > phi[:, None]
        hard[rows, labels] = False
        z = np.where(hard, cos * (t + cos), cos)
        dz_dc[:] = np.where(hard, t + 2.0 * cos, 1.0)
        z[rows, labels] = phi
        dz_dc[rows, labels] = dphi

    elif kind is HeadKind.MAGFACE:
        if magnitudes is None:
            raise ConfigError("MagFace needs the embedding magnitudes")
        mags = np.asarray(magnitudes, dtype=np.float64)
        a = np.clip(mags, cfg.mag_la, cfg.mag_ua)
        slope = (cfg.mag_um - cfg.mag_lm) / (cfg.mag_ua - cfg.mag_la)
        margin = slope * (a - cfg.mag_la) + cfg.mag_lm
        phi, dphi, dphi_dm = additive_angular(c_y, margin)
        z[rows, labels] = phi
        dz_dc[rows, labels] = dphi
        inside = (mags > cfg.mag_la) & (mags < cfg.mag_ua)
        cache.dzy_da = np.where(inside, dphi_dm * slope, 0.0)

    elif kind is HeadKind.ADAMSOFTMAX:
        margins = state.adam_margins[labels]
        z[rows, labels] = c_y - margins
        cache.dzy_dmargin = -np.ones_like(c_y)

    elif kind is HeadKind.ARCNEGFACE:
        phi, dphi, _ = additive_angular(c_y, cfg.m)
        # Gaussian centred on the margin target logit cos(theta_y + m)
        diff = cos - phi[:, None]
        if cfg.emphasis:
            weight = cfg.neg_a * np.exp(-(diff * diff) / cfg.neg_sigma)
            dweight_dc = weight * (-2.0 * diff / cfg.neg_sigma)
        else:
            weight = np.ones_like(cos)
            dweight_dc = np.zeros_like(cos)
        # t (c + 1) - 1 written as c + (t - 1)(c + 1) so that t = 1 leaves c untouched
        z = cos + (weight - 1.0) * (cos + 1.0)
        dz_dc[:] = weight + (cos + 1.0) * dweight_dc
        dzj_dcy = -(cos + 1.0) * dweight_dc * dphi[:, None]
        z[rows, labels] = phi
        dz_dc[rows, labels] = dphi
        dzj_dcy[rows, labels] = 0.0
        cache.dzj_dcy = dzj_dcy

    elif kind is HeadKind.NPCFACE:
        t, alpha, m1 = (cfg.npc_t, cfg.npc_alpha, cfg.npc_m1) if cfg.emphasis else (1.0, 0.0, 0.0)
        phi0, _, _ = additive_angular(c_y, cfg.m)
        hard = cos > phi0[:, None]
        hard[rows, labels] = False
        n_hard = hard.sum(axis=1)
        hard_mean = np.where(n_hard > 0, (cos * hard).sum(axis=1) / np.maximum(n_hard, 1), 0.0)
        active = hard_mean > 0.0
        margin = cfg.m + m1 * np.maximum(hard_mean, 0.0) if cfg.emphasis else cfg.m
        phi, dphi, dphi_dm = additive_angular(c_y, margin)
        z = np.where(hard, t * cos + alpha, cos)
        dz_dc[:] = np.where(hard, t, 1.0)
        z[rows, labels] = phi
        dz_dc[rows, labels] = dphi
        coeff = np.where(active, dphi_dm * m1 / np.maximum(n_hard, 1), 0.0)
        cache.dzy_dcj = hard * coeff[:, None]

    elif kind is HeadKind.MVSOFTMAX:
        t = cfg.mv_t if cfg.emphasis else 0.0
        phi, dphi = target_margin(cfg.mv_base, c_y, cfg.m)
        hard = cos > phi[:, None]
        hard[rows, labels] = False
        z = np.where(hard, (t + 1.0) * cos + t, cos)
        dz_dc[:] = np.where(hard, t + 1.0, 1.0)
        z[rows, labels] = phi
        dz_dc[rows, labels] = dphi

    else:
        raise ConfigError(f"Unknown head kind: {kind}")

    cache.dz_dc = dz_dc
    return cache.scale * z, cache


def margin_transform(
    cos: np.ndarray,
    labels: np.ndarray,
    cfg: HeadConfig,
    state: HeadState,
    magnitudes: np.ndarray | None = None,
) -> np.ndarray:
    """Scaled margin logits; see margin_forward."""
    logits, _ = margin_forward(cos, labels, cfg, state, magnitudes)
    return logits


def margin_backward(
    d_logits: np.ndarray, cache: MarginCache, num_classes: int
) -> tuple[np.ndarray, np.ndarray | None, np.ndarray | None]:
    """
    Gradient of a scalar w.r.t. the cosines, magnitudes and per-class margins.

    Args:
        d_logits: Gradient w.r.t. the scaled logits.
        cache: Cache from margin_forward.
        num_classes: C, used to size the margin gradient.

    Returns:
        Tuple of (d_cos, d_magnitudes or None, d_margins or None).
    """
    labels = cache.labels
    rows = np.arange(d_logits.shape[0])
    d_z = cache.scale * d_logits
    d_cos = d_z * cache.dz_dc
    d_zy = d_z[rows, labels]
    if cache.dzj_dcy is not None:
        d_cos[rows, labels] += np.sum(d_z * cache.dzj_dcy, axis=1)
    if cache.dzy_dcj is not None:
        d_cos += d_zy[:, None] * cache.dzy_dcj
    d_mags = d_zy * cache.dzy_da if cache.dzy_da is not None else None
    d_margins = None
    if cache.dzy_dmargin is not None:
        d_margins = np.zeros(num_classes, dtype=np.float64)
        np.add.at(d_margins, labels, d_zy * cache.dzy_dmargin)
    return d_cos, d_mags, d_margins


def _check_labels(labels, shape: tuple[int, int]) -> np.ndarray:
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for a batch of {shape[0]}")
    if labels.size and (labels.min() < 0 or labels.max() >= shape[1]):
        raise ShapeError(f"labels must lie in [0, {shape[1]}), got range [{labels.min()}, {labels.max()}]")
    return labels
