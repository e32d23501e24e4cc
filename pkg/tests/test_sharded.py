"""Tests for the simulated model-parallel classifier."""

import numpy as np
import pytest

from face_kit.errors import ConfigError, ShapeError
from face_kit.heads import HeadConfig, HeadState, head_loss_and_grad
from face_kit.numerics import Prng
from face_kit.sharded import (
    ReduceTrace,
    WeightShard,
    check_partition,
    gather_shards,
    make_shards,
    shard_sizes,
    sharded_loss_and_grad,
)

BATCH, CLASSES, DIM = 6, 50, 16


def _instance(seed: int):
    rng = Prng(seed)
    x = rng.normal_matrix(BATCH, DIM)
    w = rng.normal_matrix(CLASSES, DIM)
    labels = rng.integers(BATCH, CLASSES)
    return x, w, labels


HEADS = [
    {"kind": "NormSoftmax", "s": 16.0},
    {"kind": "ArcFace", "s": 64.0, "m": 0.5},
    {"kind": "CosFace", "s": 64.0, "m": 0.35},
    {"kind": "AmSoftmax", "s": 30.0, "m": 0.35},
    {"kind": "ArcFace", "s": 32.0, "m": 0.5, "epsilon": 0.1},
    {"kind": "CosFace", "s": 32.0, "m": 0.35, "gamma": 2.0},
]


@pytest.mark.parametrize("seed", range(5))
@pytest.mark.parametrize("p", [1, 2, 4, 7])
@pytest.mark.parametrize("head", HEADS, ids=lambda h: "-".join(f"{k}={v}" for k, v in h.items()))
def test_sharded_matches_dense(head, p, seed):
    x, w, labels = _instance(seed)
    cfg = HeadConfig(**head)
    state = HeadState.initial(CLASSES, DIM, cfg)
    dense = head_loss_and_grad(x, w, labels, cfg, state)
    sharded = sharded_loss_and_grad(x, make_shards(w, p), labels, cfg, state)
    assert sharded.loss == pytest.approx(dense.loss, abs=1e-12)
    np.testing.assert_allclose(sharded.d_embeddings, dense.d_embeddings, rtol=0, atol=1e-12)
    np.testing.assert_allclose(sharded.d_weights, dense.d_weights, rtol=0, atol=1e-12)


@pytest.mark.parametrize("seed", range(5))
def test_single_shard_is_bit_exact(seed):
    x, w, labels = _instance(seed)
    cfg = HeadConfig(kind="ArcFace", s=64.0, m=0.5)
    state = HeadState.initial(CLASSES, DIM, cfg)
    dense = head_loss_and_grad(x, w, labels, cfg, state)
    sharded = sharded_loss_and_grad(x, make_shards(w, 1), labels, cfg, state)
    assert sharded.loss == dense.loss
    assert np.array_equal(sharded.d_embeddings, dense.d_embeddings)
    assert np.array_equal(sharded.d_weights, dense.d_weights)


def test_trace_order():
    x, w, labels = _instance(0)
    cfg = HeadConfig(kind="CosFace", s=30.0, m=0.35)
    trace = ReduceTrace()
    sharded_loss_and_grad(x, make_shards(w, 4), labels, cfg, HeadState.initial(CLASSES, DIM, cfg), trace)
    trace.check(4)
    assert [e.phase for e in trace.entries] == ["max"] * 4 + ["sumexp"] * 4 + ["grad"] * 4
    assert [e.shard_index for e in trace.phase_entries("grad")] == [0, 1, 2, 3]
    owned = sum(int(e.summary.split()[0].split("=")[1]) for e in trace.phase_entries("sumexp"))
    assert owned == BATCH


def test_trace_write(tmp_path):
    trace = ReduceTrace()
    trace.record("max", 0, "local_max=1")
    path = tmp_path / "trace.log"
    trace.write(path)
    assert path.read_text() == "max\tshard=0\tlocal_max=1\n"
    with pytest.raises(ShapeError):
        trace.check(2)


def test_trace_rejects_unknown_phase():
    with pytest.raises(ValueError):
        ReduceTrace().record("scatter", 0, "")


class TestShards:
    def test_sizes_ceiling_first(self):
        assert shard_sizes(50, 7) == [8, 7, 7, 7, 7, 7, 7]
        assert [s.num_classes for s in make_shards(np.zeros((10, 2)), 3)] == [4, 3, 3]

    def test_roundtrip(self):
        _, w, _ = _instance(1)
        shards = make_shards(w, 7)
        assert check_partition(shards) == CLASSES
        assert np.array_equal(gather_shards(shards), w)

    @pytest.mark.parametrize("p", [0, CLASSES + 1])
    def test_bad_shard_count(self, p):
        with pytest.raises(ConfigError):
            make_shards(np.ones((CLASSES, 2)), p)

    def test_gap_in_partition(self):
        shards = [WeightShard(0, 0, np.ones((3, 2))), WeightShard(1, 4, np.ones((3, 2)))]
        with pytest.raises(ShapeError, match="contiguous"):
            check_partition(shards)

    def test_owns(self):
        shard = WeightShard(1, 5, np.ones((3, 2)))
        assert shard.owns(np.array([4, 5, 7, 8])).tolist() == [False, True, True, False]


def test_label_without_owner():
    x, w, _ = _instance(2)
    shards = make_shards(w, 2)[:1]
    cfg = HeadConfig(kind="ArcFace")
    labels = np.full(BATCH, CLASSES - 1)
    with pytest.raises(ShapeError, match="owned by 0 shards"):
        sharded_loss_and_grad(x, shards, labels, cfg, HeadState.initial(shards[0].num_classes, DIM, cfg))


@pytest.mark.parametrize("kind", ["CurricularFace", "ArcNegFace", "MagFace", "SphereFace"])
def test_unshardable_kinds(kind):
    x, w, labels = _instance(3)
    cfg = HeadConfig(kind=kind)
    with pytest.raises(ConfigError, match="cannot be sharded"):
        sharded_loss_and_grad(x, make_shards(w, 2), labels, cfg, HeadState.initial(CLASSES, DIM, cfg))
