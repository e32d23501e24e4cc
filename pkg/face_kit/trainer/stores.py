"""Feature sources for training: synthetic Gaussian blobs or aligned images."""

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from face_kit.align.images import read_ppm, resize
from face_kit.data.augment import AugmentSpec, PcaBasis, augment
from face_kit.data.manifest import DatasetManifest
from face_kit.errors import ConfigError, DataError
from face_kit.numerics import Prng

logger = logging.getLogger(__name__)


@dataclass
class BlobSpec:
    """
    Gaussian class clusters in input space.

    Class means sit on orthogonal axes so every pair of means is `separation`
    apart; each coordinate gets independent noise of std `sigma`.
    """

    num_classes: int = 10
    dim: int = 32
    per_class: int = 100
    separation: float = 4.0
    sigma: float = 0.3

    def __post_init__(self):
        if self.num_classes < 2 or self.per_class < 1:
            raise ConfigError("blobs need at least 2 classes and 1 sample per class")
        if self.dim < self.num_classes:
            raise ConfigError(f"blob dim {self.dim} must be at least the class count {self.num_classes}")
        if self.separation <= 0 or self.sigma <= 0:
            raise ConfigError("blob separation and sigma must be positive")

    def means(self) -> np.ndarray:
        out = np.zeros((self.num_classes, self.dim))
        out[np.arange(self.num_classes), np.arange(self.num_classes)] = self.separation / math.sqrt(2.0)
        return out


def make_blobs(spec: BlobSpec, rng: Prng) -> tuple[np.ndarray, np.ndarray]:
    """
    Sample per_class points per class, classes interleaved in record order.

    Returns:
        Tuple of (N x dim features, N labels).
    """
    labels = np.tile(np.arange(spec.num_classes), spec.per_class)
    noise = rng.normal_matrix(labels.shape[0], spec.dim, spec.sigma)
    return spec.means()[labels] + noise, labels


@dataclass
class ArrayStore:
    """In-memory features keyed by manifest path."""

    rows: dict[str, np.ndarray] = field(default_factory=dict)

    @classmethod
    def from_arrays(
        cls, features: np.ndarray, labels: np.ndarray, prefix: str = "blob"
    ) -> tuple["ArrayStore", DatasetManifest]:
        """Store plus a matching manifest with paths `<prefix>/<index>`."""
        paths = [f"{prefix}/{i:06d}" for i in range(features.shape[0])]
        store = cls({p: features[i] for i, p in enumerate(paths)})
        return store, DatasetManifest.from_original(paths, [int(v) for v in labels])

    @property
    def input_dim(self) -> int:
        return next(iter(self.rows.values())).shape[0]

    def features(self, manifest: DatasetManifest, indices: np.ndarray, step: int = 0) -> np.ndarray:
        try:
            return np.stack([self.rows[manifest.records[i].path] for i in indices])
        except KeyError as e:
            raise DataError(f"no features stored for record {e}") from e


@dataclass
class ImageStore:
    """
    Aligned images read from disk, resized and flattened into input vectors.

    With augmentation on, sample j of step t is augmented with the stream
    Prng(seed).split(t).split(j), so batch content depends only on (seed, step).
    """

    image_size: int = 16
    channels: int = 3
    augment_spec: AugmentSpec | None = None
    pca_basis: PcaBasis | None = None
    seed: int = 0
    _cache: dict[str, np.ndarray] = field(default_factory=dict, repr=False)

    @property
    def input_dim(self) -> int:
        return self.image_size * self.image_size * self.channels

    def _load(self, manifest: DatasetManifest, index: int) -> np.ndarray:
        path = manifest.resolve(index)
        key = str(path)
        if key not in self._cache:
            img = resize(read_ppm(path), self.image_size, self.image_size)
            if img.shape[2] != self.channels:
                raise DataError(f"{path}: expected {self.channels} channels, got {img.shape[2]}")
            self._cache[key] = img
        return self._cache[key]

    def features(self, manifest: DatasetManifest, indices: np.ndarray, step: int = 0) -> np.ndarray:
        step_rng = Prng(self.seed).split(step)
        rows = []
        for j, i in enumerate(indices):
            img = self._load(manifest, int(i))
            if self.augment_spec is not None:
                img = augment(img, self.augment_spec, step_rng.split(j), self.pca_basis)
            rows.append(img.reshape(-1))
        return np.stack(rows)
