"""Knowledge distillation on classifier logits."""

import numpy as np

from face_kit.errors import ConfigError, ShapeError
from face_kit.heads.xent import log_partition, softmax_xent


def distill_loss(
    student_logits: np.ndarray,
    teacher_logits: np.ndarray,
    temperature: float,
    beta: float,
    labels: np.ndarray,
) -> tuple[float, np.ndarray]:
    """
    (1 - beta) * CE(student, labels) + beta * T^2 * KL(softmax(teacher/T) || softmax(student/T)).

    Args:
        student_logits: B x C student logits.
        teacher_logits: B x C teacher logits; treated as constants.
        temperature: Softening temperature T > 0.
        beta: Weight of the distillation term in [0, 1].
        labels: B labels.

    Returns:
        Tuple of (loss, d_student_logits).
    """
    if temperature <= 0:
        raise ConfigError(f"temperature must be positive, got {temperature}")
    if not 0.0 <= beta <= 1.0:
        raise ConfigError(f"beta must be in [0, 1], got {beta}")
    s = np.asarray(student_logits, dtype=np.float64)
    t = np.asarray(teacher_logits, dtype=np.float64)
    if s.shape != t.shape:
        raise ShapeError(f"student logits {s.shape} and teacher logits {t.shape} differ")

    ce, d_ce = softmax_xent(s, labels)
    batch = s.shape[0]
    s_t = s / temperature
    t_t = t / temperature
    log_ps = s_t - log_partition(s_t)[:, None]
    log_pt = t_t - log_partition(t_t)[:, None]
    p_t = np.exp(log_pt)
    kl = float(np.sum(p_t * (log_pt - log_ps))) / batch
    d_kl = (np.exp(log_ps) - p_t) / (temperature * batch)

    loss = (1.0 - beta) * ce + beta * temperature**2 * kl
    d_student = (1.0 - beta) * d_ce + beta * temperature**2 * d_kl
    return loss, d_student
