"""Dataset manifests, balancing, sampling and augmentation."""

from face_kit.data.augment import (
    AugmentSpec,
    PcaBasis,
    augment,
    compute_rgb_pca,
    hsv_to_rgb,
    jitter_hsv,
    rgb_pca_from_pixels,
    rgb_to_hsv,
)
from face_kit.data.manifest import (
    MANIFEST_HEADER,
    DatasetManifest,
    ManifestRecord,
    classes_sidecar,
    filter_low_shot,
    load_manifest,
    write_manifest,
)
from face_kit.data.pairs import read_pairs, write_pairs
from face_kit.data.sampling import record_weights, weighted_sample

__all__ = [
    # Manifests
    "MANIFEST_HEADER",
    "ManifestRecord",
    "DatasetManifest",
    "load_manifest",
    "write_manifest",
    "classes_sidecar",
    "filter_low_shot",
    # Sampling
    "record_weights",
    "weighted_sample",
    # Augmentation
    "AugmentSpec",
    "PcaBasis",
    "augment",
    "rgb_to_hsv",
    "hsv_to_rgb",
    "jitter_hsv",
    "rgb_pca_from_pixels",
    "compute_rgb_pca",
    # Pairs
    "read_pairs",
    "write_pairs",
]
