"""Dense matrix helpers on float64 numpy arrays."""

import numpy as np

from face_kit.errors import NumericError, ShapeError

Mat = np.ndarray

DEFAULT_EPS = 1e-12


def as_mat(x, name: str = "matrix") -> Mat:
    """
    Convert input to a 2-D float64 array and validate it.

    Args:
        x: Array-like input.
        name: Name used in diagnostics.

    Returns:
        A C-contiguous float64 array of shape (rows, cols).

    Raises:
        ShapeError: If the input is not two-dimensional.
        NumericError: If any entry is not finite.
    """
    m = np.ascontiguousarray(x, dtype=np.float64)
    if m.ndim != 2:
        raise ShapeError(f"{name} must be 2-D, got shape {m.shape}")
    if not np.all(np.isfinite(m)):
        bad = np.argwhere(~np.isfinite(m))[0]
        raise NumericError(f"{name} has a non-finite entry at {tuple(int(i) for i in bad)}")
    return m


def gemm(a: Mat, b: Mat) -> Mat:
    """
    Matrix product with a shape check.

    Args:
        a: Left operand (n x k).
        b: Right operand (k x m).

    Returns:
        The (n x m) product.

    Raises:
        ShapeError: If a.cols != b.rows.
    """
    a = as_mat(a, "a")
    b = as_mat(b, "b")
    if a.shape[1] != b.shape[0]:
        raise ShapeError(
            f"gemm dimension mismatch: a is {a.shape[0]}x{a.shape[1]}, "
            f"b is {b.shape[0]}x{b.shape[1]} (a.cols must equal b.rows)"
        )
    return a @ b


def row_norms(m: Mat) -> np.ndarray:
    """Euclidean norm of every row."""
    return np.sqrt(np.einsum("ij,ij->i", m, m))


def l2_normalize_rows(m: Mat, eps: float = DEFAULT_EPS) -> Mat:
    """
    Divide every row by max(||row||, eps).

    A zero row stays zero.

    Args:
        m: Input matrix.
        eps: Norm floor, must be positive.

    Returns:
        Row-normalized copy of m.
    """
    if eps <= 0:
        raise ValueError(f"eps must be positive, got {eps}")
    m = np.asarray(m, dtype=np.float64)
    norms = np.maximum(row_norms(m), eps)
    return m / norms[:, None]


def normalize_backward(d_unit: Mat, unit: Mat, norms: np.ndarray, eps: float = DEFAULT_EPS) -> Mat:
    """
    Backpropagate through row normalization.

    Applies (I - u u^T) / ||x|| row by row, where u is the normalized row.
    Rows whose norm was clamped by eps pass the gradient through scaled by 1/eps.

    Args:
        d_unit: Gradient w.r.t. the normalized rows.
        unit: The normalized rows.
        norms: Row norms of the raw input (before clamping).
        eps: The clamp used in the forward pass.

    Returns:
        Gradient w.r.t. the raw rows.
    """
    clamped = np.maximum(norms, eps)
    radial = np.einsum("ij,ij->i", unit, d_unit)
    grad = (d_unit - unit * radial[:, None]) / clamped[:, None]
    degenerate = norms < eps
    if np.any(degenerate):
        grad[degenerate] = d_unit[degenerate] / eps
    return grad
