"""Toy-scale training: backbone, SGD, distillation, self-training and model files."""

from face_kit.trainer.backbone import BACKBONE_KINDS, Backbone
from face_kit.trainer.distill import distill_loss
from face_kit.trainer.loop import StepLog, Trainer, TrainerConfig, TrainResult, train
from face_kit.trainer.model import FaceModel
from face_kit.trainer.model_io import MAGIC, decode_tensors, encode_tensors, load_model, model_tensors, save_model
from face_kit.trainer.optim import OptimState, sgd_step
from face_kit.trainer.self_train import SelfTrainReport, self_train_filter
from face_kit.trainer.stores import ArrayStore, BlobSpec, ImageStore, make_blobs

__all__ = [
    # Model
    "BACKBONE_KINDS",
    "Backbone",
    "FaceModel",
    # Optimization
    "OptimState",
    "sgd_step",
    "distill_loss",
    # Loop
    "TrainerConfig",
    "Trainer",
    "TrainResult",
    "StepLog",
    "train",
    # Data sources
    "BlobSpec",
    "make_blobs",
    "ArrayStore",
    "ImageStore",
    # Self-training
    "SelfTrainReport",
    "self_train_filter",
    # Model files
    "MAGIC",
    "model_tensors",
    "encode_tensors",
    "decode_tensors",
    "save_model",
    "load_model",
]
