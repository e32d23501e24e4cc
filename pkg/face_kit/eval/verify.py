"""k-fold verification accuracy with per-fold threshold selection."""

import logging
from dataclasses import dataclass

import numpy as np

from face_kit.errors import ConfigError, DataError
from face_kit.eval.pairs import PairSet

logger = logging.getLogger(__name__)


@dataclass
class KFoldResult:
    mean_accuracy: float
    std: float
    thresholds: list[float]
    fold_accuracies: list[float]


def fold_bounds(n: int, k: int) -> list[tuple[int, int]]:
    """Contiguous folds; the first n mod k folds hold one extra pair."""
    base, extra = divmod(n, k)
    bounds = []
    start = 0
    for i in range(k):
        stop = start + base + (1 if i < extra else 0)
        bounds.append((start, stop))
        start = stop
    return bounds


def threshold_candidates(scores: np.ndarray) -> np.ndarray:
    """-inf, midpoints of adjacent sorted unique scores, +inf; ascending."""
    unique = np.unique(scores)
    mids = (unique[:-1] + unique[1:]) / 2.0
    return np.concatenate([[-np.inf], mids, [np.inf]])


def accuracy_at(scores: np.ndarray, same: np.ndarray, threshold: float) -> float:
    return float(np.mean((scores >= threshold) == same))


def best_threshold(scores: np.ndarray, same: np.ndarray) -> float:
    """Candidate with the highest accuracy; ties go to the lowest threshold."""
    candidates = threshold_candidates(scores)
    predictions = scores[None, :] >= candidates[:, None]
    accuracies = np.mean(predictions == same[None, :], axis=1)
    return float(candidates[int(np.argmax(accuracies))])


def verify_kfold(p: PairSet, k: int = 10) -> KFoldResult:
    """
    Cross-validated verification accuracy.

    For each contiguous fold, the threshold maximizing accuracy on the other
    folds is applied to the held-out fold; a pair is predicted "same" when its
    score is >= the threshold.

    Args:
        p: Scored pairs in file order.
        k: Number of folds, at least 2.

    Returns:
        KFoldResult with mean and population std of the fold accuracies.

    Raises:
        ConfigError: If k < 2.
        DataError: If there are fewer than k pairs or no scores.
    """
    if k < 2:
        raise ConfigError(f"k must be at least 2, got {k}")
    scores = p.require_scores()
    if len(p) < k:
        raise DataError(f"{len(p)} pairs cannot be split into {k} folds")

    thresholds, accuracies = [], []
    for start, stop in fold_bounds(len(p), k):
        train = np.ones(len(p), dtype=bool)
        train[start:stop] = False
        threshold = best_threshold(scores[train], p.same[train])
        thresholds.append(threshold)
        accuracies.append(accuracy_at(scores[start:stop], p.same[start:stop], threshold))
    acc = np.array(accuracies)
    result = KFoldResult(float(acc.mean()), float(acc.std()), thresholds, accuracies)
    logger.info("%d-fold accuracy %.4f +- %.4f", k, result.mean_accuracy, result.std)
    return result
