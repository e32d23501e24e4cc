"""
FEVL1 model files.

Layout (little-endian):
    magic  b"FEVL1"
    uint32 tensor count
    per tensor: uint16 name length, UTF-8 name, uint8 ndim, uint32 dims[ndim]
    then every tensor's float64 data in header order

Head settings travel as scalar tensors under "config.": enum fields as their
position in HeadKind, booleans as 0/1, numbers as they are.
"""

import logging
import struct
from dataclasses import fields
from pathlib import Path

import numpy as np

from face_kit.errors import DataError
from face_kit.heads import HeadConfig, HeadKind, HeadState
from face_kit.trainer.backbone import Backbone
from face_kit.trainer.model import FaceModel

logger = logging.getLogger(__name__)

MAGIC = b"FEVL1"
_STATE_SCALARS = ("adacos_scale", "curricular_t", "sphere_lambda")
_STATE_ARRAYS = ("centers", "adam_margins")
_KINDS = tuple(HeadKind)


def head_config_tensors(cfg: HeadConfig) -> dict[str, np.ndarray]:
    tensors = {}
    for f in fields(HeadConfig):
        value = getattr(cfg, f.name)
        if isinstance(value, HeadKind):
            value = _KINDS.index(value)
        tensors[f"config.{f.name}"] = np.array(float(value), dtype=np.float64)
    return tensors


def head_config_from_tensors(tensors: dict[str, np.ndarray], source: str = "<bytes>") -> HeadConfig | None:
    """The stored HeadConfig, or None for files written without head settings."""
    if "config.kind" not in tensors:
        return None
    base = HeadConfig()
    values = {}
    for f in fields(HeadConfig):
        key = f"config.{f.name}"
        if key not in tensors:
            continue
        value = float(tensors[key])
        default = getattr(base, f.name)
        if isinstance(default, HeadKind):
            index = int(value)
            if index != value or not 0 <= index < len(_KINDS):
                raise DataError(f"{source}: bad head kind index {value} in {key}")
            values[f.name] = _KINDS[index]
        elif isinstance(default, bool):
            values[f.name] = value != 0.0
        else:
            values[f.name] = value
    return HeadConfig(**values)


def model_tensors(model: FaceModel) -> dict[str, np.ndarray]:
    """All named tensors of a model in file order."""
    tensors = dict(model.parameters())
    for name in _STATE_SCALARS:
        tensors[f"state.{name}"] = np.array(getattr(model.head_state, name), dtype=np.float64)
    for name in _STATE_ARRAYS:
        tensors[f"state.{name}"] = np.asarray(getattr(model.head_state, name), dtype=np.float64)
    tensors.update(head_config_tensors(model.head_cfg))
    return tensors


def encode_tensors(tensors: dict[str, np.ndarray]) -> bytes:
    header = [MAGIC, struct.pack("<I", len(tensors))]
    payload = []
    for name, arr in tensors.items():
        raw = name.encode("utf-8")
        header.append(struct.pack("<H", len(raw)) + raw)
        header.append(struct.pack("<B", arr.ndim) + struct.pack(f"<{arr.ndim}I", *arr.shape))
        payload.append(np.ascontiguousarray(arr, dtype="<f8").tobytes())
    return b"".join(header + payload)


def decode_tensors(data: bytes, source: str = "<bytes>") -> dict[str, np.ndarray]:
    if not data.startswith(MAGIC):
        raise DataError(f"{source}: not a FEVL1 model file")
    try:
        pos = len(MAGIC)
        (count,) = struct.unpack_from("<I", data, pos)
        pos += 4
        specs = []
        for _ in range(count):
            (name_len,) = struct.unpack_from("<H", data, pos)
            pos += 2
            name = data[pos : pos + name_len].decode("utf-8")
            pos += name_len
            (ndim,) = struct.unpack_from("<B", data, pos)
            pos += 1
            dims = struct.unpack_from(f"<{ndim}I", data, pos)
            pos += 4 * ndim
            specs.append((name, dims))
        tensors = {}
        for name, dims in specs:
            size = int(np.prod(dims, dtype=np.int64))
            end = pos + 8 * size
            if end > len(data):
                raise DataError(f"{source}: truncated data for tensor {name}")
            tensors[name] = np.frombuffer(data[pos:end], dtype="<f8").astype(np.float64).reshape(dims)
            pos = end
    except (struct.error, UnicodeDecodeError) as e:
        raise DataError(f"{source}: corrupt header ({e})") from e
    if pos != len(data):
        raise DataError(f"{source}: {len(data) - pos} trailing bytes")
    return tensors


def save_model(path: str | Path, model: FaceModel) -> None:
    Path(path).write_bytes(encode_tensors(model_tensors(model)))
    logger.info("saved model to %s", path)


def load_model(path: str | Path, head_cfg: HeadConfig | None = None) -> FaceModel:
    """
    Read a FEVL1 file back into a FaceModel.

    The backbone kind follows from the stored tensors. The head settings the
    model was trained with win over head_cfg, which only applies to files
    that carry none (and defaults to HeadConfig()).
    """
    tensors = decode_tensors(Path(path).read_bytes(), str(path))
    stored_cfg = head_config_from_tensors(tensors, str(path))
    if stored_cfg is not None and head_cfg is not None and head_cfg != stored_cfg:
        logger.info(
            "%s: using stored head %s s=%g m=%g", path, stored_cfg.kind.value, stored_cfg.s, stored_cfg.m
        )
    try:
        backbone_params = {k.split(".", 1)[1]: v for k, v in tensors.items() if k.startswith("backbone.")}
        kind = "mlp" if "w2" in backbone_params else "linear"
        state = HeadState(
            adacos_scale=float(tensors["state.adacos_scale"]),
            curricular_t=float(tensors["state.curricular_t"]),
            sphere_lambda=float(tensors["state.sphere_lambda"]),
            centers=tensors["state.centers"],
            adam_margins=tensors["state.adam_margins"],
        )
        weights = tensors["head.weight"]
    except KeyError as e:
        raise DataError(f"{path}: missing tensor {e}") from e
    return FaceModel(Backbone(kind, backbone_params), weights, stored_cfg or head_cfg or HeadConfig(), state)
