"""Exception types shared by every face_kit module."""


class FaceKitError(Exception):
    """Base class for all face_kit errors."""


class ShapeError(FaceKitError, ValueError):
    """Array shapes or dimensions do not line up."""


class ConfigError(FaceKitError, ValueError):
    """A configuration value is unknown, mistyped or out of range."""


class DataError(FaceKitError, ValueError):
    """Input data (manifest, pairs, landmarks, images) is malformed or empty."""


class NumericError(FaceKitError, ArithmeticError):
    """A computation produced or received non-finite values."""


class DivergenceError(NumericError):
    """Training loss exceeded the divergence guard."""
