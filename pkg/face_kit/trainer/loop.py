"""Training loop: sampling, head loss, adaptive statistics and SGD."""

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Protocol

import numpy as np

from face_kit.data.manifest import DatasetManifest
from face_kit.data.sampling import weighted_sample
from face_kit.errors import ConfigError, DivergenceError
from face_kit.heads import (
    HeadConfig,
    HeadKind,
    adaptive_state_update,
    center_loss_step,
    cosine_logits,
    head_backward,
    head_forward,
    head_loss_and_grad,
    margin_transform,
)
from face_kit.numerics import Prng, row_norms
from face_kit.schedules import Schedule, lr_at
from face_kit.sharded import ReduceTrace, make_shards, sharded_loss_and_grad
from face_kit.trainer.distill import distill_loss
from face_kit.trainer.model import FaceModel
from face_kit.trainer.optim import OptimState, sgd_step

logger = logging.getLogger(__name__)

ADAPTIVE_KINDS = frozenset({HeadKind.ADACOS, HeadKind.CURRICULARFACE, HeadKind.SPHEREFACE})


class FeatureStore(Protocol):
    input_dim: int

    def features(self, manifest: DatasetManifest, indices: np.ndarray, step: int = 0) -> np.ndarray: ...


@dataclass
class TrainerConfig:
    """Configuration of the training loop."""

    backbone: str = "linear"
    hidden: int = 64
    embedding_dim: int = 16
    epochs: int = 1
    batch_size: int = 64
    steps_per_epoch: int | None = None
    momentum: float = 0.9
    weight_decay: float = 5e-4
    balanced: bool = True
    seed: int = 0
    shards: int = 1
    center_weight: float = 0.0
    center_alpha: float = 0.5
    teacher: FaceModel | None = None
    distill_temperature: float = 4.0
    distill_beta: float = 0.5
    divergence_limit: float = 1e6

    def __post_init__(self):
        if self.epochs < 1 or self.batch_size < 1:
            raise ConfigError("epochs and batch_size must be positive")
        if self.shards < 1:
            raise ConfigError(f"shard count must be positive, got {self.shards}")
        if self.center_weight < 0:
            raise ConfigError(f"center_weight must be non-negative, got {self.center_weight}")
        if self.teacher is not None and self.shards > 1:
            raise ConfigError("distillation runs on the dense head only; set shards to 1")

    def total_steps(self, num_records: int) -> int:
        per_epoch = self.steps_per_epoch or max(1, num_records // self.batch_size)
        return self.epochs * per_epoch


@dataclass
class StepLog:
    step: int
    lr: float
    loss: float


@dataclass
class TrainResult:
    """Trained model and one metric row per step."""

    model: FaceModel
    log: list[StepLog] = field(default_factory=list)

    @property
    def final_loss(self) -> float:
        return self.log[-1].loss if self.log else math.nan

    def write_metrics(self, path: str | Path) -> None:
        """CSV `step,lr,loss` with round-trip float formatting."""
        with Path(path).open("w", newline="", encoding="utf-8") as f:
            writer = csv.writer(f, lineterminator="\n")
            writer.writerow(["step", "lr", "loss"])
            for row in self.log:
                writer.writerow([row.step, repr(row.lr), repr(row.loss)])


class Trainer:
    """
    Owns the model, optimizer state and head state for one training run.

    Every random draw comes from Prng(seed) split by purpose and step, so the
    metric log and the final model are a function of (config, seed, data).

    Args:
        head_cfg: Classification head.
        schedule: Learning-rate schedule; its total_steps must match the run.
        config: Loop configuration.

    Attributes:
        model: The model being trained, set by run.
        last_trace: Reduction trace of the most recent sharded step.

    Example:
        >>> trainer = Trainer(HeadConfig(kind="ArcFace", s=16.0, m=0.3), schedule, TrainerConfig())
        >>> result = trainer.run(manifest, store)  # doctest: +SKIP
    """

    def __init__(self, head_cfg: HeadConfig, schedule: Schedule, config: TrainerConfig | None = None):
        self.head_cfg = head_cfg
        self.schedule = schedule
        self.config = config or TrainerConfig()
        self.model: FaceModel | None = None
        self.last_trace: ReduceTrace | None = None
        self._opt = OptimState()
        self._margin_opt = OptimState()

    def init_model(self, input_dim: int, num_classes: int) -> FaceModel:
        cfg = self.config
        return FaceModel.init(
            cfg.backbone,
            input_dim,
            cfg.embedding_dim,
            num_classes,
            self.head_cfg,
            Prng(cfg.seed).split(0),
            hidden=cfg.hidden,
        )

    def run(self, manifest: DatasetManifest, store: FeatureStore, model: FaceModel | None = None) -> TrainResult:
        """
        Train on the manifest's records, reading inputs from store.

        Raises:
            ConfigError: If the schedule length does not match the run.
            DivergenceError: If the loss exceeds the divergence limit or is not finite.
        """
        cfg = self.config
        total = cfg.total_steps(len(manifest))
        if self.schedule.total_steps != total:
            raise ConfigError(
                f"schedule has {self.schedule.total_steps} steps but the run has {total} "
                f"({cfg.epochs} epochs x {total // cfg.epochs} steps)"
            )
        if cfg.teacher is not None and cfg.teacher.num_classes != manifest.num_classes:
            raise ConfigError(
                f"teacher has {cfg.teacher.num_classes} classes, manifest has {manifest.num_classes}"
            )
        self.model = model or self.init_model(store.input_dim, manifest.num_classes)
        self._opt = OptimState()
        self._margin_opt = OptimState()
        result = TrainResult(self.model)
        sample_root = Prng(cfg.seed).split(1)
        per_epoch = total // cfg.epochs

        for t in range(total):
            loss = self._step(t, manifest, store, sample_root.split(t))
            lr = lr_at(self.schedule, t)
            result.log.append(StepLog(t, lr, loss))
            logger.debug("step %d lr=%.6g loss=%.6f", t, lr, loss)
            if (t + 1) % per_epoch == 0:
                logger.info("epoch %d/%d done: loss=%.6f", (t + 1) // per_epoch, cfg.epochs, loss)
        return result

    def _sample(self, manifest: DatasetManifest, rng: Prng) -> np.ndarray:
        if self.config.balanced:
            return weighted_sample(manifest, rng, self.config.batch_size)
        return rng.integers(self.config.batch_size, len(manifest))

    def _step(self, t: int, manifest: DatasetManifest, store: FeatureStore, rng: Prng) -> float:
        cfg = self.config
        model = self.model
        head_cfg = self.head_cfg
        indices = self._sample(manifest, rng)
        x = store.features(manifest, indices, step=t)
        labels = manifest.labels[indices]

        emb, cache = model.backbone.forward(x)
        d_margins = None
        if cfg.shards > 1:
            shards = make_shards(model.head_weights, cfg.shards)
            self.last_trace = ReduceTrace()
            lg = sharded_loss_and_grad(emb, shards, labels, head_cfg, model.head_state, trace=self.last_trace)
            loss, d_emb, d_w = lg.loss, lg.d_embeddings, lg.d_weights
        elif cfg.teacher is not None:
            fwd = head_forward(emb, model.head_weights, labels, head_cfg, model.head_state)
            teacher_logits = cfg.teacher.logits(x)
            loss, d_logits = distill_loss(
                fwd.logits, teacher_logits, cfg.distill_temperature, cfg.distill_beta, labels
            )
            d_emb, d_w, d_margins = head_backward(fwd, d_logits, head_cfg.eps)
        else:
            lg = head_loss_and_grad(emb, model.head_weights, labels, head_cfg, model.head_state)
            loss, d_emb, d_w, d_margins = lg.loss, lg.d_embeddings, lg.d_weights, lg.d_margins

        state = model.head_state
        if cfg.center_weight > 0:
            center_loss, d_center, state.centers = center_loss_step(emb, labels, state.centers, cfg.center_alpha)
            loss += cfg.center_weight * center_loss
            d_emb = d_emb + cfg.center_weight * d_center

        if not math.isfinite(loss) or loss > cfg.divergence_limit:
            raise DivergenceError(
                f"loss {loss:.6g} at step {t} exceeds the divergence limit {cfg.divergence_limit:g}"
            )

        if head_cfg.kind in ADAPTIVE_KINDS:
            cos, _ = cosine_logits(emb, model.head_weights, head_cfg.eps)
            logits = margin_transform(cos, labels, head_cfg, state, row_norms(emb))
            model.head_state = adaptive_state_update(state, cos, logits, labels, head_cfg)

        lr = lr_at(self.schedule, t)
        grads = {f"backbone.{k}": v for k, v in model.backbone.backward(d_emb, cache).items()}
        grads["head.weight"] = d_w
        model.set_parameters(sgd_step(model.parameters(), grads, self._opt, lr, cfg.momentum, cfg.weight_decay))

        if d_margins is not None:
            margins = {"margins": model.head_state.adam_margins}
            updated = sgd_step(margins, {"margins": d_margins}, self._margin_opt, lr, cfg.momentum, 0.0)
            model.head_state.adam_margins = np.maximum(updated["margins"], 0.0)
        return float(loss)


def train(
    manifest: DatasetManifest,
    store: FeatureStore,
    head_cfg: HeadConfig,
    schedule: Schedule,
    config: TrainerConfig | None = None,
) -> TrainResult:
    """Run a fresh Trainer; see Trainer.run."""
    return Trainer(head_cfg, schedule, config).run(manifest, store)
