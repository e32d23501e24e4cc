"""Similarity transforms and their least-squares estimation from point sets."""

from dataclasses import dataclass

import numpy as np

from face_kit.align.landmarks import LandmarkSet
from face_kit.errors import DataError, ShapeError


@dataclass
class SimilarityTransform:
    """
    p -> scale * R p + t for column vectors p = (x, y).

    Example:
        >>> xf = SimilarityTransform.identity()
        >>> xf.apply(np.array([[3.0, 4.0]])).tolist()
        [[3.0, 4.0]]
    """

    scale: float
    rotation: np.ndarray
    translation: np.ndarray

    def __post_init__(self):
        self.scale = float(self.scale)
        self.rotation = np.asarray(self.rotation, dtype=np.float64)
        self.translation = np.asarray(self.translation, dtype=np.float64).reshape(2)
        if not self.scale > 0:
            raise ShapeError(f"similarity scale must be positive, got {self.scale}")
        if self.rotation.shape != (2, 2):
            raise ShapeError(f"rotation must be 2x2, got {self.rotation.shape}")

    @classmethod
    def identity(cls) -> "SimilarityTransform":
        return cls(1.0, np.eye(2), np.zeros(2))

    @classmethod
    def from_angle(cls, scale: float, angle: float, translation) -> "SimilarityTransform":
        c, s = np.cos(angle), np.sin(angle)
        return cls(scale, np.array([[c, -s], [s, c]]), translation)

    @property
    def angle(self) -> float:
        return float(np.arctan2(self.rotation[1, 0], self.rotation[0, 0]))

    @property
    def matrix(self) -> np.ndarray:
        """2 x 3 affine matrix [sR | t]."""
        return np.hstack([self.scale * self.rotation, self.translation[:, None]])

    def apply(self, points: np.ndarray) -> np.ndarray:
        """Map N x 2 points."""
        pts = np.asarray(points, dtype=np.float64)
        return self.scale * (pts @ self.rotation.T) + self.translation

    def apply_inverse(self, points: np.ndarray) -> np.ndarray:
        """Map N x 2 points back: R^T (q - t) / scale."""
        pts = np.asarray(points, dtype=np.float64)
        return ((pts - self.translation) @ self.rotation) / self.scale

    def inverse(self) -> "SimilarityTransform":
        r_inv = self.rotation.T
        return SimilarityTransform(1.0 / self.scale, r_inv, -(r_inv @ self.translation) / self.scale)

    def then(self, other: "SimilarityTransform") -> "SimilarityTransform":
        """The transform applying self first and other second."""
        return SimilarityTransform(
            other.scale * self.scale,
            other.rotation @ self.rotation,
            other.scale * (other.rotation @ self.translation) + other.translation,
        )


def _as_points(pts, name: str) -> np.ndarray:
    if isinstance(pts, LandmarkSet):
        return pts.points
    arr = np.asarray(pts, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 2:
        raise ShapeError(f"{name} must be an N x 2 array with N >= 2, got {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} has non-finite coordinates")
    return arr


def estimate_similarity(src, dst) -> SimilarityTransform:
    """
    Least-squares similarity mapping src onto dst (Umeyama closed form).

    The rotation is forced to det +1: when the SVD factors have opposite
    orientation the last singular direction is flipped.

    Args:
        src: LandmarkSet or N x 2 source points.
        dst: LandmarkSet or N x 2 destination points, same N.

    Returns:
        The transform minimizing sum ||scale R src_i + t - dst_i||^2.

    Raises:
        DataError: If all source points coincide.
    """
    src = _as_points(src, "src")
    dst = _as_points(dst, "dst")
    if src.shape != dst.shape:
        raise ShapeError(f"src {src.shape} and dst {dst.shape} differ")

    src_mean = src.mean(axis=0)
    dst_mean = dst.mean(axis=0)
    src_demean = src - src_mean
    dst_demean = dst - dst_mean
    src_var = src_demean.var(axis=0).sum()
    if src_var <= 0:
        raise DataError("source points all coincide; similarity is undefined")

    cov = dst_demean.T @ src_demean / src.shape[0]
    u, sigma, vt = np.linalg.svd(cov)
    d = np.ones(2)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        d[-1] = -1.0
    rotation = u @ np.diag(d) @ vt
    scale = float(np.dot(sigma, d) / src_var)
    translation = dst_mean - scale * (rotation @ src_mean)
    return SimilarityTransform(scale, rotation, translation)
