"""Per-head default constants, keyed by head kind name.

Values follow each head's original publication; all are overridable through
HeadConfig fields.
"""

HEAD_DEFAULTS: dict[str, dict[str, float]] = {
    # Plain linear classifier, no normalization
    "Softmax": {"s": 1.0, "m": 0.0},
    # Cosine classifiers
    "NormSoftmax": {"s": 64.0, "m": 0.0},
    "SphereFace": {"s": 64.0, "m": 4.0},
    "CosFace": {"s": 64.0, "m": 0.35},
    "AmSoftmax": {"s": 64.0, "m": 0.35},
    "ArcFace": {"s": 64.0, "m": 0.5},
    # Adaptive heads
    "AdaCos": {"s": 64.0, "m": 0.0},
    "CurricularFace": {"s": 64.0, "m": 0.5},
    "MagFace": {"s": 64.0, "m": 0.0},
    "AdaMSoftmax": {"s": 64.0, "m": 0.35},
    # Emphasis heads
    "ArcNegFace": {"s": 64.0, "m": 0.5},
    "NPCFace": {"s": 64.0, "m": 0.4},
    "MVSoftmax": {"s": 32.0, "m": 0.35},
}

# SphereFace lambda annealing: start, floor, multiplicative decay per step
SPHERE_LAMBDA_BASE = 1500.0
SPHERE_LAMBDA_MIN = 5.0
SPHERE_LAMBDA_DECAY = 0.99

# MagFace magnitude range, margin range and regularizer weight
MAG_LOWER_A = 10.0
MAG_UPPER_A = 110.0
MAG_LOWER_M = 0.45
MAG_UPPER_M = 0.8
MAG_LAMBDA_G = 35.0

# ArcNegFace negative re-weighting
ARCNEG_A = 1.2
ARCNEG_SIGMA = 2.0

# NPCFace collaborative margin and hard-negative logit
NPC_M1 = 0.2
NPC_T = 1.1
NPC_ALPHA = 0.25

# MV-Softmax mis-classified vector weight
MV_T = 0.2

# AdaMSoftmax margin-average weight, CurricularFace statistic momentum
ADAM_LAMBDA = 0.5
CURRICULAR_ALPHA = 0.01
