"""
face_kit - face-embedding training and evaluation kit.

Landmark alignment, dataset balancing and augmentation, a zoo of margin-based
classification heads with analytic gradients, learning-rate schedules, a
simulated model-parallel softmax, toy-scale training and the k-fold
verification protocol.
"""

from face_kit.errors import (
    ConfigError,
    DataError,
    DivergenceError,
    FaceKitError,
    NumericError,
    ShapeError,
)

__version__ = "0.1.0"
__all__ = [
    "__version__",
    "FaceKitError",
    "ShapeError",
    "ConfigError",
    "DataError",
    "NumericError",
    "DivergenceError",
]
