"""A backbone plus classification head, with named tensors for saving."""

from dataclasses import dataclass

import numpy as np

from face_kit.errors import ShapeError
from face_kit.heads import (
    HeadConfig,
    HeadState,
    cosine_logits,
    effective_scale,
    head_loss_and_grad,
    log_partition,
)
from face_kit.numerics import Prng
from face_kit.trainer.backbone import Backbone


@dataclass
class FaceModel:
    """
    Backbone, class weights and head statistics.

    Example:
        >>> cfg = HeadConfig(kind="ArcFace", s=16.0, m=0.3)
        >>> model = FaceModel.init("linear", 32, 16, 10, cfg, Prng(0))
        >>> model.head_weights.shape
        (10, 16)
    """

    backbone: Backbone
    head_weights: np.ndarray
    head_cfg: HeadConfig
    head_state: HeadState

    @classmethod
    def init(
        cls,
        backbone_kind: str,
        input_dim: int,
        embedding_dim: int,
        num_classes: int,
        head_cfg: HeadConfig,
        rng: Prng,
        hidden: int = 64,
    ) -> "FaceModel":
        backbone = Backbone.init(backbone_kind, input_dim, embedding_dim, rng.split(0), hidden)
        weights = rng.split(1).normal_matrix(num_classes, embedding_dim, np.sqrt(2.0 / embedding_dim))
        return cls(backbone, weights, head_cfg, HeadState.initial(num_classes, embedding_dim, head_cfg))

    @property
    def num_classes(self) -> int:
        return self.head_weights.shape[0]

    def embed(self, x: np.ndarray) -> np.ndarray:
        return self.backbone.embed(x)

    def logits(self, x: np.ndarray) -> np.ndarray:
        """Margin-free scaled cosine logits, the model's predictive logits."""
        cos, _ = cosine_logits(self.embed(x), self.head_weights, self.head_cfg.eps)
        return effective_scale(self.head_cfg, self.head_state) * cos

    def probabilities(self, x: np.ndarray) -> np.ndarray:
        z = self.logits(x)
        return np.exp(z - log_partition(z)[:, None])

    def parameters(self) -> dict[str, np.ndarray]:
        """Trainable tensors, backbone first."""
        params = {f"backbone.{k}": v for k, v in self.backbone.params.items()}
        params["head.weight"] = self.head_weights
        return params

    def set_parameters(self, params: dict[str, np.ndarray]) -> None:
        for name, value in params.items():
            if name == "head.weight":
                self.head_weights = value
            elif name.startswith("backbone."):
                key = name.split(".", 1)[1]
                if key not in self.backbone.params or self.backbone.params[key].shape != value.shape:
                    raise ShapeError(f"unexpected backbone tensor {name} {value.shape}")
                self.backbone.params[key] = value
            else:
                raise ShapeError(f"unknown parameter {name}")

    def loss_and_grads(self, x: np.ndarray, labels: np.ndarray) -> tuple[float, dict[str, np.ndarray]]:
        """Head loss of a batch and gradients for every trainable tensor."""
        emb, cache = self.backbone.forward(x)
        lg = head_loss_and_grad(emb, self.head_weights, labels, self.head_cfg, self.head_state)
        grads = {f"backbone.{k}": v for k, v in self.backbone.backward(lg.d_embeddings, cache).items()}
        grads["head.weight"] = lg.d_weights
        return lg.loss, grads
