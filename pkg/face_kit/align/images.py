"""Images as H x W x C float arrays in [0, 1], with NetPBM I/O through Pillow."""

import logging
from pathlib import Path

import numpy as np
from PIL import Image as PILImage

from face_kit.errors import DataError, ShapeError

logger = logging.getLogger(__name__)

MAXVAL = 255.0


def as_image(img, name: str = "image") -> np.ndarray:
    """
    Validate an image array and return it as float64 H x W x C.

    A 2-D array is treated as a single-channel image.
    """
    arr = np.asarray(img, dtype=np.float64)
    if arr.ndim == 2:
        arr = arr[:, :, None]
    if arr.ndim != 3 or arr.shape[2] not in (1, 3) or arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must be H x W x 1 or H x W x 3, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise DataError(f"{name} has non-finite pixels")
    return arr


def read_ppm(path: str | Path) -> np.ndarray:
    """
    Read a binary NetPBM image (P6 color or P5 gray, maxval 255).

    Pixel value p maps to p / 255.

    Raises:
        DataError: If the file is not a binary PPM/PGM.
    """
    path = Path(path)
    try:
        with PILImage.open(path) as im:
            if im.format != "PPM" or im.mode not in ("RGB", "L"):
                raise DataError(f"{path}: expected binary PPM/PGM, got {im.format} {im.mode}")
            data = np.asarray(im, dtype=np.uint8)
    except (OSError, SyntaxError) as e:
        raise DataError(f"{path}: cannot read image ({e})") from e
    return as_image(data.astype(np.float64) / MAXVAL, str(path))


def to_bytes(img: np.ndarray) -> np.ndarray:
    """Quantize [0, 1] pixels to uint8 by rounding."""
    return np.round(np.clip(as_image(img), 0.0, 1.0) * MAXVAL).astype(np.uint8)


def write_ppm(path: str | Path, img: np.ndarray) -> None:
    """Write a 3-channel image as P6 or a 1-channel image as P5."""
    data = to_bytes(img)
    if data.shape[2] == 1:
        pil = PILImage.fromarray(data[:, :, 0])
    else:
        pil = PILImage.fromarray(data)
    pil.save(Path(path), format="PPM")
    logger.debug("wrote %s (%dx%d)", path, data.shape[1], data.shape[0])


def resize(img: np.ndarray, height: int, width: int) -> np.ndarray:
    """Bilinear downscale through Pillow, per channel in float mode."""
    img = as_image(img)
    channels = [
        np.asarray(
            PILImage.fromarray(img[:, :, c].astype(np.float32)).resize(
                (width, height), PILImage.Resampling.BILINEAR
            ),
            dtype=np.float64,
        )
        for c in range(img.shape[2])
    ]
    return np.clip(np.stack(channels, axis=2), 0.0, 1.0)
