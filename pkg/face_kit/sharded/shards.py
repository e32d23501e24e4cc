"""Contiguous partitioning of the class-weight matrix across simulated workers."""

from dataclasses import dataclass

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.numerics import as_mat


@dataclass
class WeightShard:
    """Rows [class_offset, class_offset + len(weights)) of the classifier."""

    shard_index: int
    class_offset: int
    weights: np.ndarray

    @property
    def num_classes(self) -> int:
        return self.weights.shape[0]

    @property
    def class_stop(self) -> int:
        return self.class_offset + self.num_classes

    def owns(self, labels: np.ndarray) -> np.ndarray:
        """Boolean mask of labels whose class lives on this shard."""
        return (labels >= self.class_offset) & (labels < self.class_stop)


def shard_sizes(num_classes: int, p: int) -> list[int]:
    """Ceiling-first sizes: the first C mod p shards get one extra class."""
    base, extra = divmod(num_classes, p)
    return [base + 1 if i < extra else base for i in range(p)]


def make_shards(weights: np.ndarray, p: int) -> list[WeightShard]:
    """
    Split a C x D weight matrix into p contiguous shards.

    Args:
        weights: C x D class weights.
        p: Number of shards, 1 <= p <= C.

    Returns:
        Shards in ascending shard_index; sizes differ by at most one.

    Example:
        >>> [s.num_classes for s in make_shards(np.zeros((10, 2)), 3)]
        [4, 3, 3]
    """
    w = as_mat(weights, "weights")
    num_classes = w.shape[0]
    if not 1 <= p <= num_classes:
        raise ConfigError(f"shard count must be in [1, {num_classes}], got {p}")
    shards = []
    offset = 0
    for i, size in enumerate(shard_sizes(num_classes, p)):
        shards.append(WeightShard(i, offset, w[offset : offset + size].copy()))
        offset += size
    return shards


def check_partition(shards: list[WeightShard]) -> int:
    """
    Verify the shards tile [0, C) contiguously in ascending index.

    Returns:
        The total class count C.
    """
    if not shards:
        raise ShapeError("at least one shard is required")
    offset = 0
    dim = shards[0].weights.shape[1]
    for i, shard in enumerate(shards):
        if shard.shard_index != i or shard.class_offset != offset:
            raise ShapeError(
                f"shard {shard.shard_index} at offset {shard.class_offset} breaks the "
                f"contiguous partition (expected index {i} at offset {offset})"
            )
        if shard.weights.ndim != 2 or shard.weights.shape[1] != dim or shard.num_classes == 0:
            raise ShapeError(f"shard {i} has weights of shape {shard.weights.shape}")
        offset = shard.class_stop
    return offset


def gather_shards(shards: list[WeightShard]) -> np.ndarray:
    """Reassemble the full weight matrix."""
    check_partition(shards)
    return np.concatenate([s.weights for s in shards], axis=0)
