"""SGD with momentum and weight decay."""

from dataclasses import dataclass, field

import numpy as np

from face_kit.errors import ConfigError, NumericError, ShapeError


@dataclass
class OptimState:
    """Momentum buffers keyed like the parameters, and the number of applied steps."""

    buffers: dict[str, np.ndarray] = field(default_factory=dict)
    step: int = 0


def sgd_step(
    params: dict[str, np.ndarray],
    grads: dict[str, np.ndarray],
    opt: OptimState,
    lr: float,
    momentum: float = 0.0,
    weight_decay: float = 0.0,
) -> dict[str, np.ndarray]:
    """
    One momentum SGD update: v <- momentum * v + g + wd * p; p <- p - lr * v.

    Args:
        params: Parameters by name; not modified.
        grads: Gradients for every parameter name.
        opt: Optimizer state, updated in place on success.
        lr: Learning rate, non-negative.
        momentum: Momentum coefficient.
        weight_decay: L2 coefficient.

    Returns:
        New parameter dict.

    Raises:
        NumericError: If a gradient is non-finite; opt is left untouched.
    """
    if lr < 0:
        raise ConfigError(f"learning rate must be non-negative, got {lr}")
    for name, p in params.items():
        if name not in grads:
            raise ShapeError(f"no gradient for parameter {name!r}")
        if grads[name].shape != p.shape:
            raise ShapeError(f"gradient for {name!r} has shape {grads[name].shape}, parameter {p.shape}")
        if not np.all(np.isfinite(grads[name])):
            raise NumericError(f"non-finite gradient for {name!r} at step {opt.step}; step rejected")

    updated = {}
    for name, p in params.items():
        v = opt.buffers.get(name)
        v = grads[name] + weight_decay * p if v is None else momentum * v + grads[name] + weight_decay * p
        opt.buffers[name] = v
        updated[name] = p - lr * v
    opt.step += 1
    return updated
