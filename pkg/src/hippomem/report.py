"""Report emission: curve CSVs, image grids, and the run manifest.

Everything written here is byte-deterministic for a fixed configuration and
seed (floats are serialized via repr, which is shortest-roundtrip), except
the manifest's created_at timestamp.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np
from PIL import Image

from .metrics import ForgettingCurve

CURVE_CSV_HEADER = "pattern_index,correlation,baseline,trend_fit"


def write_curve_csv(path, curve: ForgettingCurve) -> None:
    trend = curve.trend_values()
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(CURVE_CSV_HEADER + "\n")
        for i in range(len(curve)):
            fh.write(
                f"{int(curve.pattern_index[i])},{float(curve.correlation[i])!r},"
                f"{float(curve.baseline)!r},{float(trend[i])!r}\n"
            )


def write_rows_csv(path, header: list, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(repr(v) if isinstance(v, float) else str(v) for v in row))
            fh.write("\n")


def write_manifest(path, manifest: dict) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _to_gray(values: np.ndarray) -> np.ndarray:
    """Map pattern values to uint8: [0,1]-ranged data maps linearly, anything
    else (e.g. standardized pixels) is min-max scaled."""
    v = np.asarray(values, dtype=np.float64)
    lo, hi = v.min(), v.max()
    if lo >= 0.0 and hi <= 1.0:
        scaled = v
    elif hi > lo:
        scaled = (v - lo) / (hi - lo)
    else:
        scaled = np.zeros_like(v)
    return np.round(scaled * 255.0).astype(np.uint8)


def image_grid(patterns, image_shape, columns: int = 10, pad: int = 2) -> np.ndarray:
    """Tile flattened patterns into one grayscale grid image (uint8)."""
    x = np.asarray(patterns, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError("image_grid expects a stack of flattened images")
    rows_px, cols_px = image_shape
    if rows_px * cols_px != x.shape[1]:
        raise ValueError(f"image shape {image_shape} does not match dim {x.shape[1]}")
    count = x.shape[0]
    columns = min(columns, count)
    grid_rows = (count + columns - 1) // columns
    gray = _to_gray(x).reshape(count, rows_px, cols_px)
    height = grid_rows * (rows_px + pad) + pad
    width = columns * (cols_px + pad) + pad
    canvas = np.zeros((height, width), dtype=np.uint8)
    for i in range(count):
        r, c = divmod(i, columns)
        top = pad + r * (rows_px + pad)
        left = pad + c * (cols_px + pad)
        canvas[top : top + rows_px, left : left + cols_px] = gray[i]
    return canvas


def write_pgm(path, image: np.ndarray) -> None:
    """Binary (P5) PGM; no external dependency needed to inspect results."""
    img = np.asarray(image)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError("write_pgm expects a 2-D uint8 image")
    with open(path, "wb") as fh:
        fh.write(f"P5\n{img.shape[1]} {img.shape[0]}\n255\n".encode("ascii"))
        fh.write(img.tobytes())


def write_png(path, image: np.ndarray) -> None:
    img = np.asarray(image)
    if img.ndim != 2 or img.dtype != np.uint8:
        raise ValueError("write_png expects a 2-D uint8 image")
    Image.fromarray(img, mode="L").save(path, format="PNG")


@dataclass
class RunResults:
    """Everything one experiment run wants persisted."""

    manifest: dict
    curves: dict = field(default_factory=dict)  # name -> ForgettingCurve
    images: dict = field(default_factory=dict)  # name -> 2-D uint8 array
    tables: dict = field(default_factory=dict)  # name -> (header, rows)


def emit_report(results: RunResults, out_dir) -> list:
    """Write manifest, one CSV per curve, image grids, and extra tables.

    Returns the list of written paths.  An empty result set still writes the
    manifest.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        written = []
        manifest_path = out / "manifest.json"
        write_manifest(manifest_path, results.manifest)
        written.append(manifest_path)
        if results.curves:
            curve_dir = out / "curves"
            curve_dir.mkdir(exist_ok=True)
            for name in sorted(results.curves):
                path = curve_dir / f"{name}.csv"
                write_curve_csv(path, results.curves[name])
                written.append(path)
        if results.images:
            image_dir = out / "images"
            image_dir.mkdir(exist_ok=True)
            for name in sorted(results.images):
                for suffix, writer in ((".pgm", write_pgm), (".png", write_png)):
                    path = image_dir / f"{name}{suffix}"
                    writer(path, results.images[name])
                    written.append(path)
        if results.tables:
            table_dir = out / "tables"
            table_dir.mkdir(exist_ok=True)
            for name in sorted(results.tables):
                header, rows = results.tables[name]
                path = table_dir / f"{name}.csv"
                write_rows_csv(path, header, rows)
                written.append(path)
        return [str(p) for p in written]
    except OSError as exc:
        raise OSError(f"failed writing report under {out}: {exc}") from exc
