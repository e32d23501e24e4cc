"""Five-point facial landmarks and the landmark CSV reader."""

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from face_kit.errors import DataError

LANDMARK_NAMES = ("left_eye", "right_eye", "nose", "left_mouth", "right_mouth")
LANDMARK_HEADER = ["path"] + [f"{axis}{i}" for i in range(1, 6) for axis in ("x", "y")]


@dataclass
class LandmarkSet:
    """
    Five (x, y) pixel coordinates: left eye, right eye, nose tip, left and
    right mouth corners.
    """

    points: np.ndarray

    def __post_init__(self):
        self.points = np.asarray(self.points, dtype=np.float64)
        if self.points.shape != (5, 2):
            raise DataError(f"a landmark set has 5 (x, y) points, got shape {self.points.shape}")
        if not np.all(np.isfinite(self.points)):
            raise DataError("landmark coordinates must be finite")
        centered = self.points - self.points.mean(axis=0)
        spread = np.linalg.svd(centered, compute_uv=False)
        if spread[-1] <= 1e-9 * max(spread[0], 1.0):
            raise DataError("landmarks are collinear")

    @classmethod
    def from_flat(cls, values) -> "LandmarkSet":
        return cls(np.asarray(values, dtype=np.float64).reshape(5, 2))

    def inside(self, height: int, width: int) -> bool:
        x, y = self.points[:, 0], self.points[:, 1]
        return bool(np.all((x >= 0) & (x <= width - 1) & (y >= 0) & (y <= height - 1)))


def read_landmarks(path: str | Path) -> list[tuple[str, LandmarkSet]]:
    """
    Read `path,x1,y1,...,x5,y5` rows (header line required).

    Raises:
        DataError: On a missing header or a malformed row, naming its line.
    """
    path = Path(path)
    with path.open(newline="", encoding="utf-8") as f:
        reader = csv.reader(f)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != LANDMARK_HEADER:
            raise DataError(f"{path}: header must be {','.join(LANDMARK_HEADER)}")
        records = []
        for row in reader:
            if not row:
                continue
            if len(row) != 11:
                raise DataError(f"{path}:{reader.line_num}: expected 11 fields, got {len(row)}")
            try:
                values = [float(v) for v in row[1:]]
                records.append((row[0], LandmarkSet.from_flat(values)))
            except (ValueError, DataError) as e:
                raise DataError(f"{path}:{reader.line_num}: {e}") from e
    return records
