"""Bilinear warping and five-point face alignment."""

import logging

import numpy as np

from face_kit.align.images import as_image
from face_kit.align.landmarks import LandmarkSet
from face_kit.align.transform import SimilarityTransform, estimate_similarity
from face_kit.config.templates import TEMPLATE_112, TEMPLATE_SIZE
from face_kit.errors import ShapeError

logger = logging.getLogger(__name__)


def bilinear_sample(img: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """
    Sample img at real coordinates (x = column, y = row).

    Neighbours outside the image read as zero. Integer coordinates return
    the stored pixel exactly.

    Returns:
        Array of shape x.shape + (channels,).
    """
    h, w, _ = img.shape
    x0 = np.floor(x).astype(np.int64)
    y0 = np.floor(y).astype(np.int64)
    fx = (x - x0)[..., None]
    fy = (y - y0)[..., None]

    def tap(yy: np.ndarray, xx: np.ndarray) -> np.ndarray:
        valid = (xx >= 0) & (xx < w) & (yy >= 0) & (yy < h)
        out = img[np.clip(yy, 0, h - 1), np.clip(xx, 0, w - 1)]
        return np.where(valid[..., None], out, 0.0)

    top = tap(y0, x0) * (1.0 - fx) + tap(y0, x0 + 1) * fx
    bottom = tap(y0 + 1, x0) * (1.0 - fx) + tap(y0 + 1, x0 + 1) * fx
    return top * (1.0 - fy) + bottom * fy


def warp_image(img: np.ndarray, xf: SimilarityTransform, out_h: int, out_w: int) -> np.ndarray:
    """
    Resample img so that output pixel q shows input point xf^-1(q).

    Args:
        img: H x W x C image in [0, 1].
        xf: Transform from input coordinates to output coordinates.
        out_h: Output height.
        out_w: Output width.

    Returns:
        out_h x out_w x C image, clamped to [0, 1].

    Raises:
        ShapeError: If an output dimension is not positive.
    """
    if out_h <= 0 or out_w <= 0:
        raise ShapeError(f"output size must be positive, got {out_h}x{out_w}")
    img = as_image(img)
    rows, cols = np.mgrid[0:out_h, 0:out_w]
    grid = np.stack([cols.ravel(), rows.ravel()], axis=1).astype(np.float64)
    src = xf.apply_inverse(grid)
    values = bilinear_sample(img, src[:, 0], src[:, 1])
    return np.clip(values.reshape(out_h, out_w, img.shape[2]), 0.0, 1.0)


def align_face(
    img: np.ndarray,
    lm: LandmarkSet,
    template: np.ndarray | None = None,
    size: tuple[int, int] = TEMPLATE_SIZE,
) -> np.ndarray:
    """
    Map the landmarks onto the canonical template and warp the face crop.

    Landmarks outside the image only produce a warning.

    Args:
        img: Input image.
        lm: Detected landmarks in img's pixel coordinates.
        template: 5 x 2 destination points; defaults to the 112 x 112 template.
        size: (height, width) of the aligned crop.

    Returns:
        The aligned crop.
    """
    img = as_image(img)
    if not lm.inside(img.shape[0], img.shape[1]):
        logger.warning("landmarks fall outside the %dx%d image", img.shape[1], img.shape[0])
    dst = TEMPLATE_112 if template is None else template
    xf = estimate_similarity(lm, dst)
    logger.debug("alignment scale=%.4f angle=%.4f", xf.scale, xf.angle)
    return warp_image(img, xf, size[0], size[1])
