"""Heatmaps written as binary PPM (P6) images with a JSON sidecar.

Colour ramp: the value is clipped to [0, 1] and mapped piecewise-linearly
through black (0), red (1/3), yellow (2/3) and white (1). Cells holding NaN
are drawn mid grey. Column index grows with gamma0 (left to right) and row
index with gamma1 (bottom to top).
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

RAMP_STOPS = np.array([0.0, 1 / 3, 2 / 3, 1.0])
RAMP_COLOURS = np.array([[0, 0, 0], [255, 0, 0], [255, 255, 0], [255, 255, 255]], dtype=float)
NAN_COLOUR = (128, 128, 128)


def colourize(values: np.ndarray) -> np.ndarray:
    """Map an array of values in [0, 1] to uint8 RGB triples (shape + (3,))."""
    values = np.asarray(values, dtype=float)
    v = np.clip(np.nan_to_num(values, nan=0.0), 0.0, 1.0)
    rgb = np.stack([np.interp(v, RAMP_STOPS, RAMP_COLOURS[:, c]) for c in range(3)], axis=-1)
    rgb = np.rint(rgb).astype(np.uint8)
    rgb[np.isnan(values)] = NAN_COLOUR
    return rgb


def write_ppm(path: str | Path, rgb: np.ndarray) -> None:
    h, w, _ = rgb.shape
    with open(path, "wb") as fh:
        fh.write(f"P6\n{w} {h}\n255\n".encode("ascii"))
        fh.write(np.ascontiguousarray(rgb, dtype=np.uint8).tobytes())


def read_ppm(path: str | Path) -> np.ndarray:
    data = Path(path).read_bytes()
    parts = data.split(maxsplit=4)
    if parts[0] != b"P6":
        raise ValueError(f"{path}: not a binary PPM")
    w, h, maxval = int(parts[1]), int(parts[2]), int(parts[3])
    if maxval != 255:
        raise ValueError(f"{path}: unsupported maxval {maxval}")
    return np.frombuffer(parts[4][: w * h * 3], dtype=np.uint8).reshape(h, w, 3)


def write_heatmap(path: str | Path, grid: np.ndarray, gammas: np.ndarray, quantity: str, scale: int = 4) -> Path:
    """Render ``grid[i0, i1]`` (value at gammas[i0], gammas[i1]) and write its sidecar.

    Returns the sidecar path (``<image>.json``).
    """
    path = Path(path)
    img = colourize(grid.T[::-1])
    if scale > 1:
        img = img.repeat(scale, axis=0).repeat(scale, axis=1)
    write_ppm(path, img)
    meta = {
        "image": path.name,
        "quantity": quantity,
        "format": "PPM P6, 8-bit RGB",
        "x_axis": {"name": "gamma0", "min": float(gammas[0]), "max": float(gammas[-1]), "cells": len(gammas)},
        "y_axis": {"name": "gamma1", "min": float(gammas[0]), "max": float(gammas[-1]), "cells": len(gammas)},
        "orientation": "gamma0 increases left to right, gamma1 increases bottom to top",
        "pixels_per_cell": scale,
        "value_range": [0.0, 1.0],
        "ramp": {"stops": RAMP_STOPS.tolist(), "rgb": RAMP_COLOURS.astype(int).tolist(), "nan_rgb": list(NAN_COLOUR)},
    }
    side = path.with_name(path.name + ".json")
    side.write_text(json.dumps(meta, indent=1) + "\n")
    return side
