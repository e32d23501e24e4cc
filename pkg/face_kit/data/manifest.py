"""Dataset manifests: (image path, class) records with dense labels."""

import csv
import json
import logging
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from face_kit.errors import ConfigError, DataError

logger = logging.getLogger(__name__)

MANIFEST_HEADER = ["path", "label"]


@dataclass(frozen=True)
class ManifestRecord:
    path: str
    label: int


@dataclass
class DatasetManifest:
    """
    Records with labels densely indexed 0..C-1.

    class_ids[k] is the original class id of dense label k; dense labels follow
    the sorted order of the original ids.
    """

    records: list[ManifestRecord]
    class_ids: list[int]
    root: Path | None = field(default=None, compare=False)

    @classmethod
    def from_original(
        cls, paths: list[str], original_labels: list[int], root: Path | None = None
    ) -> "DatasetManifest":
        """Build a manifest from original class ids, re-indexing them densely."""
        class_ids = sorted(set(int(v) for v in original_labels))
        dense = {cid: i for i, cid in enumerate(class_ids)}
        records = [ManifestRecord(p, dense[int(v)]) for p, v in zip(paths, original_labels)]
        return cls(records, class_ids, root)

    def __len__(self) -> int:
        return len(self.records)

    @property
    def num_classes(self) -> int:
        return len(self.class_ids)

    @property
    def labels(self) -> np.ndarray:
        return np.array([r.label for r in self.records], dtype=np.int64)

    @property
    def class_counts(self) -> np.ndarray:
        """Records per dense label."""
        return np.bincount(self.labels, minlength=self.num_classes)

    def original_label(self, index: int) -> int:
        return self.class_ids[self.records[index].label]

    def resolve(self, index: int) -> Path:
        """Path of record index, joined with the data root when the path is relative."""
        path = Path(self.records[index].path)
        if self.root is not None and not path.is_absolute():
            return self.root / path
        return path

    def subset(self, keep: np.ndarray) -> "DatasetManifest":
        """Records where keep is true, in order, re-indexed densely."""
        kept = [r for r, k in zip(self.records, keep) if k]
        return DatasetManifest.from_original(
            [r.path for r in kept], [self.class_ids[r.label] for r in kept], self.root
        )


def load_manifest(path: str | Path, data_root: str | Path | None = None) -> DatasetManifest:
    """
    Read a `path,label` CSV manifest (header required).

    Args:
        path: Manifest file.
        data_root: Directory relative record paths are resolved against.

    Returns:
        Manifest in file order with labels re-indexed densely.

    Raises:
        DataError: On a malformed row (with its line number) or an empty manifest.
    """
    path = Path(path)
    paths, labels = [], []
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != MANIFEST_HEADER:
            raise DataError(f"{path}: header must be {','.join(MANIFEST_HEADER)}")
        for row in reader:
            if not row:
                continue
            if len(row) != 2 or not row[0].strip():
                raise DataError(f"{path}:{reader.line_num}: expected 'path,label', got {row!r}")
            try:
                labels.append(int(row[1]))
            except ValueError as e:
                raise DataError(f"{path}:{reader.line_num}: label {row[1]!r} is not an integer") from e
            paths.append(row[0].strip())
    if not paths:
        raise DataError(f"{path}: empty manifest")
    manifest = DatasetManifest.from_original(paths, labels, Path(data_root) if data_root else None)
    logger.info("loaded %s: %d records, %d classes", path, len(manifest), manifest.num_classes)
    return manifest


def classes_sidecar(path: str | Path) -> Path:
    path = Path(path)
    return path.with_name(path.stem + ".classes.json")


def write_manifest(m: DatasetManifest, path: str | Path) -> None:
    """
    Write the manifest with original class ids, plus a `<name>.classes.json`
    sidecar mapping dense labels to original ids.
    """
    path = Path(path)
    with path.open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(MANIFEST_HEADER)
        for r in m.records:
            writer.writerow([r.path, m.class_ids[r.label]])
    classes_sidecar(path).write_text(
        json.dumps({str(i): cid for i, cid in enumerate(m.class_ids)}, indent=2) + "\n", encoding="utf-8"
    )


def filter_low_shot(m: DatasetManifest, num_min: int) -> DatasetManifest:
    """
    Drop classes with fewer than num_min records.

    Record order is preserved and survivors are re-indexed densely.

    Raises:
        ConfigError: If num_min is negative.
        DataError: If no record survives.
    """
    if num_min < 0:
        raise ConfigError(f"num_min must be non-negative, got {num_min}")
    counts = m.class_counts
    keep = counts[m.labels] >= num_min
    if not np.any(keep):
        raise DataError(f"no class has at least {num_min} records (largest has {int(counts.max())})")
    out = m.subset(keep)
    dropped = int(np.sum(counts < num_min))
    if dropped:
        logger.info("removed %d classes / %d records below num_min=%d", dropped, len(m) - len(out), num_min)
    return out
