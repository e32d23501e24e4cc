"""ROC curve over verification scores, TAR@FAR and area under the curve."""

from dataclasses import dataclass

import numpy as np

from face_kit.errors import DataError
from face_kit.eval.pairs import PairSet


@dataclass(frozen=True)
class RocPoint:
    far: float
    tar: float
    threshold: float


def roc_points(p: PairSet) -> list[RocPoint]:
    """
    ROC points for thresholds just above the top score, then every unique score descending.

    Pairs with score >= threshold are accepted. Both rates are non-decreasing
    along the list; the first point is (0, 0) and the last (1, 1).

    Raises:
        DataError: If all pairs share one label.
    """
    scores = p.require_scores()
    same = p.same
    n_same = int(same.sum())
    n_diff = len(p) - n_same
    if n_same == 0 or n_diff == 0:
        raise DataError("ROC needs both same and different pairs")
    thresholds = np.concatenate([[np.nextafter(scores.max(), np.inf)], np.unique(scores)[::-1]])
    points = []
    for th in thresholds:
        accepted = scores >= th
        points.append(
            RocPoint(
                far=float(np.sum(accepted & ~same)) / n_diff,
                tar=float(np.sum(accepted & same)) / n_same,
                threshold=float(th),
            )
        )
    return points


def tar_at_far(points: list[RocPoint], far: float) -> float:
    """TAR at the given FAR, linearly interpolated between adjacent ROC points."""
    fars = np.array([pt.far for pt in points])
    tars = np.array([pt.tar for pt in points])
    above = np.nonzero(fars > far)[0]
    if above.size == 0:
        return float(tars[-1])
    j = int(above[0])
    if j == 0:
        return float(tars[0])
    lo = j - 1
    frac = (far - fars[lo]) / (fars[j] - fars[lo])
    return float(tars[lo] + frac * (tars[j] - tars[lo]))


def roc_auc(points: list[RocPoint]) -> float:
    """Trapezoidal area under the TAR-vs-FAR curve."""
    fars = np.array([pt.far for pt in points])
    tars = np.array([pt.tar for pt in points])
    return float(np.sum(np.diff(fars) * (tars[1:] + tars[:-1]) / 2.0))
