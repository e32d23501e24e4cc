"""Finite-difference gradient oracle for the hand-written backward passes."""

from typing import Callable

import numpy as np

from face_kit.errors import NumericError


def finite_diff_grad(f: Callable[[np.ndarray], float], x: np.ndarray, h: float = 1e-5) -> np.ndarray:
    """
    Central-difference gradient of a scalar function.

    Each entry is (f(x + h e) - f(x - h e)) / 2h. The input is not modified.

    Args:
        f: Scalar function of an array shaped like x.
        x: Point at which to differentiate.
        h: Step size, must be positive.

    Returns:
        Array shaped like x.

    Raises:
        NumericError: If f is non-finite at a perturbed point.
    """
    if h <= 0:
        raise ValueError(f"h must be positive, got {h}")
    x = np.array(x, dtype=np.float64)
    grad = np.zeros_like(x)
    for idx in np.ndindex(*x.shape):
        original = x[idx]
        x[idx] = original + h
        f_plus = f(x)
        x[idx] = original - h
        f_minus = f(x)
        x[idx] = original
        if not (np.isfinite(f_plus) and np.isfinite(f_minus)):
            raise NumericError(f"f is not finite when perturbing entry {idx}")
        grad[idx] = (f_plus - f_minus) / (2.0 * h)
    return grad


def relative_error(a: np.ndarray, b: np.ndarray) -> float:
    """||a - b|| / max(||a|| + ||b||, 1e-12)."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    num = float(np.linalg.norm(a - b))
    den = max(float(np.linalg.norm(a) + np.linalg.norm(b)), 1e-12)
    return num / den
