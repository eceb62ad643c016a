"""Impedance-optical EIT toolkit: native simulation core plus dataset readers."""

from pathlib import Path
import json

import numpy as np

from ._core import (  # noqa: F401
    FORMAT_VERSION,
    FRAME_SIZE,
    IMAGE_SIDE,
    Error,
    Simulator,
    cross_gradient,
    full_scale_split,
    mssim,
    process_guidance,
    rie,
    split_sizes,
)


def load_dataset(path):
    """Return (manifest, voltages (N,104), truths (N,64,64), masks (N,64,64)) from a dataset directory."""
    root = Path(path)
    manifest = json.loads((root / "manifest.json").read_text())
    if manifest.get("version") != FORMAT_VERSION:
        raise ValueError(f"unsupported dataset version {manifest.get('version')}")
    n = manifest["n"]
    voltages = np.fromfile(root / "voltages.f32le", dtype="<f4").reshape(n, FRAME_SIZE)
    truths = np.fromfile(root / "truths.f32le", dtype="<f4").reshape(n, IMAGE_SIDE, IMAGE_SIDE)
    masks = np.fromfile(root / "masks.u8", dtype=np.uint8).reshape(n, IMAGE_SIDE, IMAGE_SIDE)
    return manifest, voltages, truths, masks


def load_split(path, name):
    """Row indices of the train, val or test split."""
    text = (Path(path) / f"{name}.idx").read_text().split()
    return np.array([int(t) for t in text], dtype=np.int64)


def write_predictions(path, images):
    """Write (N,64,64) predictions as little-endian float32, the layout the metrics command reads."""
    arr = np.ascontiguousarray(np.asarray(images, dtype="<f4").reshape(-1, IMAGE_SIDE * IMAGE_SIDE))
    arr.tofile(path)
