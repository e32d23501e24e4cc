"""Self-training: drop records a trained model does not believe."""

import logging
from dataclasses import dataclass, field

import numpy as np

from face_kit.data.manifest import DatasetManifest
from face_kit.errors import ConfigError, DataError, ShapeError
from face_kit.trainer.model import FaceModel

logger = logging.getLogger(__name__)


@dataclass
class SelfTrainReport:
    """Outcome of one filtering pass; class keys are original class ids."""

    kept: int
    dropped: int
    dropped_per_class: dict[int, int] = field(default_factory=dict)
    dropped_indices: list[int] = field(default_factory=list)

    def summary(self) -> str:
        return f"kept {self.kept} / dropped {self.dropped} records"


def self_train_filter(
    manifest: DatasetManifest, model: FaceModel, tau: float, store, batch_size: int = 256
) -> tuple[DatasetManifest, SelfTrainReport]:
    """
    Keep records whose label gets softmax confidence >= tau from the model.

    Args:
        manifest: Records to filter; labels must index the model's classes.
        model: Previously trained model.
        tau: Confidence threshold in (0, 1).
        store: Feature store providing the records' inputs.
        batch_size: Records scored per forward pass.

    Returns:
        Tuple of (filtered manifest, report).

    Raises:
        DataError: If every record is dropped.
    """
    if not 0.0 < tau < 1.0:
        raise ConfigError(f"tau must be in (0, 1), got {tau}")
    if model.num_classes != manifest.num_classes:
        raise ShapeError(f"model has {model.num_classes} classes, manifest has {manifest.num_classes}")

    labels = manifest.labels
    confidence = np.empty(len(manifest))
    for start in range(0, len(manifest), batch_size):
        idx = np.arange(start, min(start + batch_size, len(manifest)))
        probs = model.probabilities(store.features(manifest, idx))
        confidence[idx] = probs[np.arange(idx.size), labels[idx]]

    keep = confidence >= tau
    dropped = np.nonzero(~keep)[0]
    if dropped.size == len(manifest):
        raise DataError(f"every record falls below tau={tau}")
    per_class: dict[int, int] = {}
    for i in dropped:
        cid = manifest.original_label(int(i))
        per_class[cid] = per_class.get(cid, 0) + 1
    report = SelfTrainReport(
        kept=int(keep.sum()),
        dropped=int(dropped.size),
        dropped_per_class=dict(sorted(per_class.items())),
        dropped_indices=[int(i) for i in dropped],
    )
    logger.info("self-training filter at tau=%g: %s", tau, report.summary())
    return manifest.subset(keep), report
