"""Learning-rate schedules and label-smoothing utilities."""

from face_kit.schedules.lr import SCHEDULE_KINDS, Schedule, lr_at, lr_table
from face_kit.schedules.smoothing import fit_free_logits, logit_gap, ls_optimal_gap, smooth_labels

__all__ = [
    "SCHEDULE_KINDS",
    "Schedule",
    "lr_at",
    "lr_table",
    "smooth_labels",
    "ls_optimal_gap",
    "logit_gap",
    "fit_free_logits",
]
