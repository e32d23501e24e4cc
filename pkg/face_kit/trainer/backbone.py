"""Minimal pluggable backbones mapping input vectors to embeddings."""

import math
from dataclasses import dataclass

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.numerics import Prng, as_mat

BACKBONE_KINDS = ("linear", "mlp")


@dataclass
class Backbone:
    """
    Linear map (w1) or one tanh hidden layer (w1, b1, w2, b2).

    Parameters are float64 arrays keyed by name; w1 is H x D_in (or D x D_in).
    """

    kind: str
    params: dict[str, np.ndarray]

    @classmethod
    def init(cls, kind: str, input_dim: int, embedding_dim: int, rng: Prng, hidden: int = 64) -> "Backbone":
        """Gaussian init with per-layer std sqrt(2 / fan_in); biases start at zero."""
        if kind not in BACKBONE_KINDS:
            raise ConfigError(f"unknown backbone {kind!r} (expected one of {', '.join(BACKBONE_KINDS)})")
        if min(input_dim, embedding_dim, hidden) < 1:
            raise ConfigError("backbone dimensions must be positive")
        if kind == "linear":
            return cls(kind, {"w1": rng.normal_matrix(embedding_dim, input_dim, math.sqrt(2.0 / input_dim))})
        return cls(
            kind,
            {
                "w1": rng.normal_matrix(hidden, input_dim, math.sqrt(2.0 / input_dim)),
                "b1": np.zeros(hidden),
                "w2": rng.normal_matrix(embedding_dim, hidden, math.sqrt(2.0 / hidden)),
                "b2": np.zeros(embedding_dim),
            },
        )

    @property
    def input_dim(self) -> int:
        return self.params["w1"].shape[1]

    @property
    def embedding_dim(self) -> int:
        return self.params["w1" if self.kind == "linear" else "w2"].shape[0]

    def forward(self, x: np.ndarray) -> tuple[np.ndarray, dict[str, np.ndarray]]:
        """Embeddings of a B x D_in batch, plus the cache for backward."""
        x = as_mat(x, "inputs")
        if x.shape[1] != self.input_dim:
            raise ShapeError(f"backbone expects {self.input_dim} inputs, got {x.shape[1]}")
        p = self.params
        if self.kind == "linear":
            return x @ p["w1"].T, {"x": x}
        h = np.tanh(x @ p["w1"].T + p["b1"])
        return h @ p["w2"].T + p["b2"], {"x": x, "h": h}

    def embed(self, x: np.ndarray) -> np.ndarray:
        return self.forward(x)[0]

    def backward(self, d_emb: np.ndarray, cache: dict[str, np.ndarray]) -> dict[str, np.ndarray]:
        """Parameter gradients given the gradient w.r.t. the embeddings."""
        x = cache["x"]
        if self.kind == "linear":
            return {"w1": d_emb.T @ x}
        h = cache["h"]
        d_pre = (d_emb @ self.params["w2"]) * (1.0 - h * h)
        return {
            "w1": d_pre.T @ x,
            "b1": d_pre.sum(axis=0),
            "w2": d_emb.T @ h,
            "b2": d_emb.sum(axis=0),
        }
