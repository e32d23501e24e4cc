"""
Model-parallel classifier simulated in one process.

Every shard holds a contiguous block of class weights and sees the full
batch of embeddings. A two-pass stable softmax is reconstructed from
per-shard partials: pass one reduces the row maxima, pass two reduces the
exponential sums (together with the smoothed-target dot products and the
target logits). Reductions run sequentially in ascending shard index and
start from shard 0's value, so one shard reproduces the dense head exactly.
"""

import logging
from dataclasses import dataclass

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.heads import (
    SHARDABLE_KINDS,
    HeadConfig,
    HeadState,
    LossGrad,
    effective_scale,
    focal_terms,
    target_margin,
)
from face_kit.heads.xent import check_loss_options
from face_kit.numerics import as_mat, l2_normalize_rows, normalize_backward, row_norms
from face_kit.sharded.shards import WeightShard, check_partition
from face_kit.sharded.trace import ReduceTrace

logger = logging.getLogger(__name__)


@dataclass
class _ShardWork:
    """Shard-local forward values."""

    shard: WeightShard
    w_unit: np.ndarray
    w_norms: np.ndarray
    logits: np.ndarray
    dz_dc: np.ndarray
    targets: np.ndarray
    owned_rows: np.ndarray
    owned_cols: np.ndarray


def _local_forward(
    shard: WeightShard,
    x_unit: np.ndarray,
    labels: np.ndarray,
    cfg: HeadConfig,
    scale: float,
    epsilon_off: float,
) -> _ShardWork:
    w_norms = row_norms(shard.weights)
    w_unit = l2_normalize_rows(shard.weights, cfg.eps)
    cos = np.clip(x_unit @ w_unit.T, -1.0, 1.0)
    owned_rows = np.nonzero(shard.owns(labels))[0]
    owned_cols = labels[owned_rows] - shard.class_offset

    z = cos.copy()
    dz_dc = np.ones_like(cos)
    z[owned_rows, owned_cols], dz_dc[owned_rows, owned_cols] = target_margin(
        cfg.kind, cos[owned_rows, owned_cols], cfg.m
    )
    targets = np.full((x_unit.shape[0], shard.num_classes), epsilon_off, dtype=np.float64)
    targets[owned_rows, owned_cols] = 1.0 - cfg.epsilon
    return _ShardWork(shard, w_unit, w_norms, scale * z, dz_dc, targets, owned_rows, owned_cols)


def sharded_loss_and_grad(
    embeddings: np.ndarray,
    shards: list[WeightShard],
    labels: np.ndarray,
    cfg: HeadConfig,
    state: HeadState,
    trace: ReduceTrace | None = None,
) -> LossGrad:
    """
    Head loss and gradients computed shard by shard.

    Args:
        embeddings: B x D embeddings, replicated to every shard.
        shards: Partition of the class weights from make_shards.
        labels: B labels in [0, C).
        cfg: Head configuration; the kind must touch only the target column.
        state: Head statistics.
        trace: If given, one entry per (phase, shard) is appended.

    Returns:
        LossGrad shaped like the dense head's, with d_weights in class order.

    Raises:
        ConfigError: If cfg.kind is not shardable.
        ShapeError: If shards do not partition the classes or a sample does not
            have exactly one owning shard.
    """
    if cfg.kind not in SHARDABLE_KINDS:
        names = ", ".join(sorted(k.value for k in SHARDABLE_KINDS))
        raise ConfigError(
            f"{cfg.kind.value} cannot be sharded (supported: {names}); "
            "use head_loss_and_grad for the dense path"
        )
    num_classes = check_partition(shards)
    x = as_mat(embeddings, "embeddings")
    if x.shape[1] != shards[0].weights.shape[1]:
        raise ShapeError(f"embedding dim {x.shape[1]} does not match shard dim {shards[0].weights.shape[1]}")
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.shape[0] != x.shape[0]:
        raise ShapeError(f"{labels.shape[0]} labels for a batch of {x.shape[0]}")
    check_loss_options(cfg.epsilon, cfg.gamma, num_classes)
    state.validate(num_classes)
    trace = trace if trace is not None else ReduceTrace()

    batch = x.shape[0]
    scale = effective_scale(cfg, state)
    epsilon_off = cfg.epsilon / (num_classes - 1) if cfg.epsilon > 0 else 0.0
    x_norms = row_norms(x)
    x_unit = l2_normalize_rows(x, cfg.eps)

    work = [_local_forward(s, x_unit, labels, cfg, scale, epsilon_off) for s in shards]

    owners = np.zeros(batch, dtype=np.int64)
    for w in work:
        owners[w.owned_rows] += 1
    if np.any(owners != 1):
        bad = int(np.nonzero(owners != 1)[0][0])
        raise ShapeError(f"sample {bad} (label {labels[bad]}) is owned by {owners[bad]} shards, expected 1")

    # Pass 1: global row maximum
    global_max = None
    for w in work:
        local_max = w.logits.max(axis=1)
        global_max = local_max if global_max is None else np.maximum(global_max, local_max)
        trace.record("max", w.shard.shard_index, f"local_max={float(local_max.max()):.17g}")

    # Pass 2: exponential sums, target dot products and target logits
    sum_exp = None
    q_dot_z = None
    target_logit = np.zeros(batch, dtype=np.float64)
    for w in work:
        local_sum = np.exp(w.logits - global_max[:, None]).sum(axis=1)
        local_qz = (w.targets * w.logits).sum(axis=1)
        target_logit[w.owned_rows] = w.logits[w.owned_rows, w.owned_cols]
        sum_exp = local_sum if sum_exp is None else sum_exp + local_sum
        q_dot_z = local_qz if q_dot_z is None else q_dot_z + local_qz
        trace.record(
            "sumexp",
            w.shard.shard_index,
            f"owned={w.owned_rows.size} local_sum={float(local_sum.sum()):.17g}",
        )
    log_z = np.log(sum_exp) + global_max

    if cfg.gamma == 0:
        per_sample = log_z - q_dot_z
        coef = None
    else:
        per_sample, coef = focal_terms(target_logit - log_z, cfg.gamma)
    loss = float(per_sample.mean())

    # Backward: shard-local weight gradients, reduced embedding gradient
    d_x_unit = None
    d_weight_blocks = []
    for w in work:
        probs = np.exp(w.logits - log_z[:, None])
        if coef is None:
            d_logits = (probs - w.targets) / batch
        else:
            d_logits = (probs - w.targets) * coef[:, None] / batch
        d_cos = (scale * d_logits) * w.dz_dc
        local_dx = d_cos @ w.w_unit
        d_w_unit = d_cos.T @ x_unit
        d_weight_blocks.append(normalize_backward(d_w_unit, w.w_unit, w.w_norms, cfg.eps))
        d_x_unit = local_dx if d_x_unit is None else d_x_unit + local_dx
        trace.record("grad", w.shard.shard_index, f"d_x_partial_norm={float(np.linalg.norm(local_dx)):.17g}")

    d_x = normalize_backward(d_x_unit, x_unit, x_norms, cfg.eps)
    for entry in trace.entries[-3 * len(shards):]:
        logger.debug("reduce %s", entry.to_line())
    return LossGrad(loss=loss, d_embeddings=d_x, d_weights=np.concatenate(d_weight_blocks, axis=0))
