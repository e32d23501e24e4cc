"""Landmark-based face alignment: similarity estimation, warping and image I/O."""

from face_kit.align.images import as_image, read_ppm, resize, to_bytes, write_ppm
from face_kit.align.landmarks import LANDMARK_HEADER, LANDMARK_NAMES, LandmarkSet, read_landmarks
from face_kit.align.transform import SimilarityTransform, estimate_similarity
from face_kit.align.warp import align_face, bilinear_sample, warp_image

__all__ = [
    # Images
    "as_image",
    "read_ppm",
    "write_ppm",
    "to_bytes",
    "resize",
    # Landmarks
    "LandmarkSet",
    "LANDMARK_NAMES",
    "LANDMARK_HEADER",
    "read_landmarks",
    # Transforms
    "SimilarityTransform",
    "estimate_similarity",
    "bilinear_sample",
    "warp_image",
    "align_face",
]
