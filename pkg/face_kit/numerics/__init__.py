"""Dense linear algebra, deterministic randomness and gradient checking."""

from face_kit.numerics.gradcheck import finite_diff_grad, relative_error
from face_kit.numerics.linalg import (
    DEFAULT_EPS,
    Mat,
    as_mat,
    gemm,
    l2_normalize_rows,
    normalize_backward,
    row_norms,
)
from face_kit.numerics.prng import Prng, SplitMix64

__all__ = [
    # Linear algebra
    "Mat",
    "DEFAULT_EPS",
    "as_mat",
    "gemm",
    "row_norms",
    "l2_normalize_rows",
    "normalize_backward",
    # Randomness
    "Prng",
    "SplitMix64",
    # Gradient checking
    "finite_diff_grad",
    "relative_error",
]
