"""Training-time augmentation: horizontal flip, HSV jitter and RGB-PCA noise."""

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from face_kit.align.images import as_image, read_ppm
from face_kit.data.manifest import DatasetManifest
from face_kit.errors import ConfigError, DataError, ShapeError
from face_kit.numerics import Prng

logger = logging.getLogger(__name__)


@dataclass
class PcaBasis:
    """Eigenvectors (columns) and descending eigenvalues of the RGB covariance."""

    eigvecs: np.ndarray
    eigvals: np.ndarray

    def to_json(self, path: str | Path) -> None:
        payload = {"eigvecs": self.eigvecs.tolist(), "eigvals": self.eigvals.tolist()}
        Path(path).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")

    @classmethod
    def from_json(cls, path: str | Path) -> "PcaBasis":
        try:
            payload = json.loads(Path(path).read_text(encoding="utf-8"))
            basis = cls(np.array(payload["eigvecs"], dtype=np.float64), np.array(payload["eigvals"], dtype=np.float64))
        except (KeyError, ValueError, TypeError) as e:
            raise DataError(f"{path}: not a PCA basis ({e})") from e
        if basis.eigvecs.shape != (3, 3) or basis.eigvals.shape != (3,):
            raise DataError(f"{path}: PCA basis must be 3x3 vectors and 3 values")
        return basis


@dataclass
class AugmentSpec:
    """
    Augmentation recipe.

    The hue/saturation/brightness coefficients are drawn uniformly from
    hsb_range; PCA coefficients from N(0, pca_sigma).
    """

    hflip_prob: float = 0.5
    hsb_range: tuple[float, float] = (0.6, 1.4)
    pca_sigma: float = 0.1
    flip: bool = True
    hsb: bool = True
    pca: bool = True
    seed: int = 0

    def __post_init__(self):
        self.hsb_range = tuple(float(v) for v in self.hsb_range)
        if len(self.hsb_range) != 2 or self.hsb_range[0] > self.hsb_range[1]:
            raise ConfigError(f"hsb_range must be [lo, hi] with lo <= hi, got {self.hsb_range}")
        if not 0.0 <= self.hflip_prob <= 1.0:
            raise ConfigError(f"hflip_prob must be in [0, 1], got {self.hflip_prob}")
        if self.pca_sigma < 0:
            raise ConfigError(f"pca_sigma must be non-negative, got {self.pca_sigma}")

    @classmethod
    def disabled(cls) -> "AugmentSpec":
        return cls(flip=False, hsb=False, pca=False)


def rgb_to_hsv(rgb: np.ndarray) -> np.ndarray:
    """Vectorized RGB -> HSV on [..., 3] arrays; hue in [0, 1)."""
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    maxc = rgb.max(axis=-1)
    minc = rgb.min(axis=-1)
    delta = maxc - minc
    safe = np.where(delta > 0, delta, 1.0)
    s = np.where(maxc > 0, delta / np.where(maxc > 0, maxc, 1.0), 0.0)
    rc = (maxc - r) / safe
    gc = (maxc - g) / safe
    bc = (maxc - b) / safe
    h = np.where(r == maxc, bc - gc, np.where(g == maxc, 2.0 + rc - bc, 4.0 + gc - rc))
    h = np.where(delta > 0, (h / 6.0) % 1.0, 0.0)
    return np.stack([h, s, maxc], axis=-1)


def hsv_to_rgb(hsv: np.ndarray) -> np.ndarray:
    """Inverse of rgb_to_hsv."""
    h, s, v = hsv[..., 0], hsv[..., 1], hsv[..., 2]
    i = np.floor(h * 6.0)
    f = h * 6.0 - i
    p = v * (1.0 - s)
    q = v * (1.0 - s * f)
    t = v * (1.0 - s * (1.0 - f))
    sector = i.astype(np.int64) % 6
    conds = [sector == k for k in range(6)]
    r = np.select(conds, [v, q, p, p, t, v])
    g = np.select(conds, [t, v, v, q, p, p])
    b = np.select(conds, [p, p, t, v, v, q])
    return np.stack([r, g, b], axis=-1)


def jitter_hsv(img: np.ndarray, hue: float, saturation: float, value: float) -> np.ndarray:
    """Shift hue by (hue - 1) turns, scale saturation and value, clamp to [0, 1]."""
    hsv = rgb_to_hsv(img)
    hsv[..., 0] = (hsv[..., 0] + (hue - 1.0)) % 1.0
    hsv[..., 1] = np.clip(hsv[..., 1] * saturation, 0.0, 1.0)
    hsv[..., 2] = np.clip(hsv[..., 2] * value, 0.0, 1.0)
    return np.clip(hsv_to_rgb(hsv), 0.0, 1.0)


def augment(
    img: np.ndarray,
    spec: AugmentSpec,
    rng: Prng | None = None,
    pca_basis: PcaBasis | None = None,
) -> np.ndarray:
    """
    Apply flip, HSV jitter and PCA noise in that order.

    Args:
        img: H x W x C image in [0, 1].
        spec: Which ops run and their parameters.
        rng: Random stream; defaults to Prng(spec.seed).
        pca_basis: Required when spec.pca is set.

    Returns:
        Augmented image in [0, 1].

    Raises:
        ShapeError: If HSV or PCA is enabled on a non-RGB image.
        ConfigError: If PCA is enabled without a basis.
    """
    out = as_image(img).copy()
    rng = rng if rng is not None else Prng(spec.seed)
    if (spec.hsb or spec.pca) and out.shape[2] != 3:
        raise ShapeError("HSV jitter and PCA noise need a 3-channel image")
    if spec.pca and pca_basis is None:
        raise ConfigError("PCA noise is enabled but no PCA basis was given")

    if spec.flip and rng.uniform() < spec.hflip_prob:
        out = out[:, ::-1, :].copy()
    if spec.hsb:
        lo, hi = spec.hsb_range
        hue, sat, val = (rng.uniform_range(lo, hi) for _ in range(3))
        out = jitter_hsv(out, hue, sat, val)
    if spec.pca:
        alphas = rng.normals(3, spec.pca_sigma)
        shift = pca_basis.eigvecs @ (alphas * pca_basis.eigvals)
        out = np.clip(out + shift, 0.0, 1.0)
    return out


def rgb_pca_from_pixels(pixels: np.ndarray) -> PcaBasis:
    """
    Eigendecomposition of the 3 x 3 covariance of N x 3 pixels.

    Eigenvalues are clamped at 0 and sorted in descending order.
    """
    pixels = np.asarray(pixels, dtype=np.float64).reshape(-1, 3)
    if pixels.shape[0] < 2:
        raise DataError(f"RGB PCA needs at least 2 pixels, got {pixels.shape[0]}")
    cov = np.cov(pixels, rowvar=False)
    eigvals, eigvecs = np.linalg.eigh(cov)
    order = np.argsort(eigvals)[::-1]
    return PcaBasis(eigvecs[:, order], np.maximum(eigvals[order], 0.0))


def compute_rgb_pca(
    m: DatasetManifest,
    sample_cap: int = 100_000,
    load_image: Callable[[Path], np.ndarray] = read_ppm,
) -> PcaBasis:
    """
    RGB PCA basis over the pixels of the manifest's images.

    When the images hold more than sample_cap pixels, sample_cap of them are
    taken at evenly spaced positions.

    Args:
        m: Manifest whose records are RGB images.
        sample_cap: Maximum pixel count.
        load_image: Reader for one record path.

    Returns:
        The PCA basis.
    """
    if sample_cap < 2:
        raise ConfigError(f"sample_cap must be at least 2, got {sample_cap}")
    chunks = []
    for i in range(len(m)):
        img = as_image(load_image(m.resolve(i)))
        if img.shape[2] != 3:
            raise ShapeError(f"{m.resolve(i)}: RGB PCA needs 3-channel images")
        chunks.append(img.reshape(-1, 3))
    pixels = np.concatenate(chunks, axis=0) if chunks else np.zeros((0, 3))
    if pixels.shape[0] > sample_cap:
        pick = np.linspace(0, pixels.shape[0] - 1, sample_cap).astype(np.int64)
        pixels = pixels[pick]
    basis = rgb_pca_from_pixels(pixels)
    logger.info("RGB PCA over %d pixels: eigenvalues %s", pixels.shape[0], np.round(basis.eigvals, 6))
    return basis
