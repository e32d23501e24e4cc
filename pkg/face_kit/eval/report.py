"""CSV reports for evaluation runs."""

import csv
from pathlib import Path

from face_kit.eval.roc import RocPoint


def write_report(path: str | Path, metrics: dict[str, float]) -> None:
    """CSV `metric,value`, one row per metric in insertion order."""
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["metric", "value"])
        for name, value in metrics.items():
            writer.writerow([name, repr(float(value))])


def write_roc(path: str | Path, points: list[RocPoint]) -> None:
    """CSV `threshold,far,tar`."""
    with Path(path).open("w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(["threshold", "far", "tar"])
        for pt in points:
            writer.writerow([repr(pt.threshold), repr(pt.far), repr(pt.tar)])
