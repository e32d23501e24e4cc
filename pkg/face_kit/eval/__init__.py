"""Verification protocol: pair scoring, k-fold accuracy and ROC."""

from face_kit.eval.pairs import PairSet, sample_pairs, score_pairs
from face_kit.eval.report import write_report, write_roc
from face_kit.eval.roc import RocPoint, roc_auc, roc_points, tar_at_far
from face_kit.eval.verify import (
    KFoldResult,
    accuracy_at,
    best_threshold,
    fold_bounds,
    threshold_candidates,
    verify_kfold,
)

__all__ = [
    # Pairs
    "PairSet",
    "score_pairs",
    "sample_pairs",
    # k-fold protocol
    "KFoldResult",
    "fold_bounds",
    "threshold_candidates",
    "accuracy_at",
    "best_threshold",
    "verify_kfold",
    # ROC
    "RocPoint",
    "roc_points",
    "tar_at_far",
    "roc_auc",
    # Reports
    "write_report",
    "write_roc",
]
