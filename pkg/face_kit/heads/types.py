"""Head kinds, configuration, mutable statistics and the loss/gradient contract."""

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from face_kit.config import defaults
from face_kit.errors import ConfigError


class HeadKind(Enum):
    """Classification head / margin formula."""

    SOFTMAX = "Softmax"
    NORM_SOFTMAX = "NormSoftmax"
    SPHEREFACE = "SphereFace"
    COSFACE = "CosFace"
    AMSOFTMAX = "AmSoftmax"
    ARCFACE = "ArcFace"
    ADACOS = "AdaCos"
    CURRICULARFACE = "CurricularFace"
    MAGFACE = "MagFace"
    ADAMSOFTMAX = "AdaMSoftmax"
    ARCNEGFACE = "ArcNegFace"
    NPCFACE = "NPCFace"
    MVSOFTMAX = "MVSoftmax"

    @classmethod
    def parse(cls, value: "str | HeadKind") -> "HeadKind":
        if isinstance(value, HeadKind):
            return value
        for kind in cls:
            if kind.value.lower() == str(value).lower():
                return kind
        names = ", ".join(k.value for k in cls)
        raise ConfigError(f"Unknown head kind: {value!r} (expected one of {names})")


# Kinds whose margin is an additive cosine margin on the target column
ADDITIVE_COSINE_KINDS = frozenset({HeadKind.COSFACE, HeadKind.AMSOFTMAX})

# Kinds the sharded classifier supports: margin touches the target column only
SHARDABLE_KINDS = frozenset(
    {HeadKind.NORM_SOFTMAX, HeadKind.ARCFACE, HeadKind.COSFACE, HeadKind.AMSOFTMAX}
)


@dataclass
class HeadConfig:
    """
    Configuration of a classification head.

    Scale and margin left as None are filled from the per-kind defaults.
    Setting emphasis=False turns ArcNegFace, NPCFace and MVSoftmax into their
    base heads.
    """

    kind: HeadKind = HeadKind.ARCFACE
    s: float | None = None
    m: float | None = None
    gamma: float = 0.0
    epsilon: float = 0.0
    lambda_adam: float = defaults.ADAM_LAMBDA
    ema_alpha: float = defaults.CURRICULAR_ALPHA
    # SphereFace lambda schedule
    lambda_base: float = defaults.SPHERE_LAMBDA_BASE
    lambda_min: float = defaults.SPHERE_LAMBDA_MIN
    lambda_decay: float = defaults.SPHERE_LAMBDA_DECAY
    # MagFace
    mag_la: float = defaults.MAG_LOWER_A
    mag_ua: float = defaults.MAG_UPPER_A
    mag_lm: float = defaults.MAG_LOWER_M
    mag_um: float = defaults.MAG_UPPER_M
    mag_lambda_g: float = defaults.MAG_LAMBDA_G
    # Emphasis heads
    emphasis: bool = True
    neg_a: float = defaults.ARCNEG_A
    neg_sigma: float = defaults.ARCNEG_SIGMA
    npc_m1: float = defaults.NPC_M1
    npc_t: float = defaults.NPC_T
    npc_alpha: float = defaults.NPC_ALPHA
    mv_t: float = defaults.MV_T
    mv_base: HeadKind = HeadKind.AMSOFTMAX
    eps: float = 1e-12

    def __post_init__(self):
        self.kind = HeadKind.parse(self.kind)
        self.mv_base = HeadKind.parse(self.mv_base)
        preset = defaults.HEAD_DEFAULTS[self.kind.value]
        if self.s is None:
            self.s = preset["s"]
        if self.m is None:
            self.m = preset["m"]
        self.validate()

    def validate(self) -> None:
        for name, value in vars(self).items():
            if isinstance(value, float) and not math.isfinite(value):
                raise ConfigError(f"HeadConfig.{name} must be finite, got {value}")
        if self.s <= 0:
            raise ConfigError(f"scale s must be positive, got {self.s}")
        if self.m < 0:
            raise ConfigError(f"margin m must be non-negative, got {self.m}")
        if self.gamma < 0:
            raise ConfigError(f"focal gamma must be non-negative, got {self.gamma}")
        if not 0.0 <= self.epsilon < 1.0:
            raise ConfigError(f"label smoothing epsilon must be in [0, 1), got {self.epsilon}")
        if self.kind is HeadKind.SPHEREFACE and (self.m < 1 or self.m != int(self.m)):
            raise ConfigError(f"SphereFace margin must be a positive integer, got {self.m}")
        if self.mv_base not in (HeadKind.ARCFACE, HeadKind.COSFACE, HeadKind.AMSOFTMAX):
            raise ConfigError(f"MVSoftmax base must be ArcFace, CosFace or AmSoftmax, got {self.mv_base.value}")
        if not 0.0 < self.ema_alpha <= 1.0:
            raise ConfigError(f"ema_alpha must be in (0, 1], got {self.ema_alpha}")
        if self.mag_ua <= self.mag_la:
            raise ConfigError("MagFace requires mag_ua > mag_la")

    @property
    def neutral(self) -> bool:
        """True when the emphasis term of an emphasis head is switched off."""
        return not self.emphasis


@dataclass
class HeadState:
    """
    Mutable head statistics, owned by the training loop.

    Exactly one update per optimizer step; the state is never shared between
    concurrent writers.
    """

    adacos_scale: float
    curricular_t: float = 0.0
    sphere_lambda: float = defaults.SPHERE_LAMBDA_BASE
    centers: np.ndarray = field(default_factory=lambda: np.zeros((0, 0)))
    adam_margins: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @classmethod
    def initial(cls, num_classes: int, dim: int, cfg: HeadConfig) -> "HeadState":
        """
        Fresh state for a head over num_classes classes of dimension dim.

        AdaCos starts from sqrt(2) * ln(C - 1); AdaMSoftmax margins start at cfg.m.
        """
        if num_classes < 2:
            raise ConfigError(f"a head needs at least 2 classes, got {num_classes}")
        return cls(
            adacos_scale=math.sqrt(2.0) * math.log(num_classes - 1),
            curricular_t=0.0,
            sphere_lambda=cfg.lambda_base,
            centers=np.zeros((num_classes, dim), dtype=np.float64),
            adam_margins=np.full(num_classes, cfg.m, dtype=np.float64),
        )

    def validate(self, num_classes: int) -> None:
        if not self.adacos_scale > 0:
            raise ConfigError(f"adacos_scale must be positive, got {self.adacos_scale}")
        if self.centers.size and self.centers.shape[0] != num_classes:
            raise ConfigError(
                f"centers has {self.centers.shape[0]} rows but the head has {num_classes} classes"
            )


@dataclass
class LossGrad:
    """Scalar loss and gradients w.r.t. embeddings, class weights and learnable margins."""

    loss: float
    d_embeddings: np.ndarray
    d_weights: np.ndarray
    d_margins: np.ndarray | None = None
