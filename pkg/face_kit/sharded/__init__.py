"""In-process simulation of a model-parallel softmax classifier."""

from face_kit.sharded.shards import WeightShard, check_partition, gather_shards, make_shards, shard_sizes
from face_kit.sharded.softmax import sharded_loss_and_grad
from face_kit.sharded.trace import PHASES, ReduceTrace, TraceEntry

__all__ = [
    # Partitioning
    "WeightShard",
    "make_shards",
    "shard_sizes",
    "check_partition",
    "gather_shards",
    # Loss
    "sharded_loss_and_grad",
    # Trace
    "PHASES",
    "ReduceTrace",
    "TraceEntry",
]
