"""Pattern sources: synthetic generators and image-file loaders.

Synthetic patterns are binary with an exact active-unit count per pattern
(round(activity * dim) ones), which keeps activity statistics testable and
runs reproducible.  Image corpora come in through the standard IDX and
CIFAR-10 binary formats; matching writers exist so round-trips can be tested
without shipping datasets.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import DataError
from .seeding import as_generator


class DatasetKind(str, Enum):
    RAND = "rand"
    RAND_CORR = "rand-corr"
    MNIST = "mnist"
    CIFAR = "cifar"


@dataclass
class Dataset:
    """A stack of patterns, one per row, plus provenance."""

    patterns: np.ndarray  # (count, dim) float64
    kind: DatasetKind
    labels: np.ndarray = None  # (count,) int, image corpora only
    image_shape: tuple = None  # (rows, cols), image corpora only

    def __post_init__(self):
        self.patterns = np.asarray(self.patterns, dtype=np.float64)
        if self.patterns.ndim != 2:
            raise DataError(f"patterns must be 2-D, got ndim={self.patterns.ndim}")
        self.kind = DatasetKind(self.kind)

    def __len__(self) -> int:
        return self.patterns.shape[0]

    @property
    def dim(self) -> int:
        return self.patterns.shape[1]


def _active_count(activity: float, dim: int) -> int:
    return int(round(activity * dim))


def _random_k_subsets(rng: np.random.Generator, count: int, dim: int, k: int) -> np.ndarray:
    """(count, k) column indices, each row a uniform k-subset of range(dim)."""
    keys = rng.random((count, dim))
    return np.argpartition(keys, k - 1, axis=1)[:, :k]


def gen_rand(count: int, dim: int, activity: float, seed) -> Dataset:
    """Independent binary patterns with exactly round(activity*dim) ones each."""
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    k = _active_count(activity, dim)
    if not 0 < k < dim:
        raise ValueError(
            f"activity {activity} at dim {dim} gives {k} active units; need 0 < k < dim"
        )
    rng = as_generator(seed)
    patterns = np.zeros((count, dim), dtype=np.float64)
    cols = _random_k_subsets(rng, count, dim, k)
    patterns[np.repeat(np.arange(count), k), cols.ravel()] = 1.0
    return Dataset(patterns=patterns, kind=DatasetKind.RAND)


def gen_rand_corr(count: int, dim: int, activity: float, flip_fraction: float, seed) -> Dataset:
    """Markov chain of binary patterns: each step flips round(flip_fraction*dim)
    units, half of them ones-to-zero and half zeros-to-one, so the exact active
    count is conserved and consecutive patterns stay strongly correlated.
    """
    if count < 1:
        raise ValueError(f"count must be positive, got {count}")
    k_active = _active_count(activity, dim)
    if not 0 < k_active < dim:
        raise ValueError(
            f"activity {activity} at dim {dim} gives {k_active} active units; need 0 < k < dim"
        )
    k_flip = _active_count(flip_fraction, dim)
    if k_flip < 2 or k_flip % 2 != 0:
        raise ValueError(
            f"flip_fraction {flip_fraction} at dim {dim} gives {k_flip} flips; need an even count >= 2"
        )
    half = k_flip // 2
    if half > k_active or half > dim - k_active:
        raise ValueError(
            f"cannot flip {half} ones and {half} zeros in a pattern with "
            f"{k_active} ones out of {dim}"
        )
    rng = as_generator(seed)
    patterns = np.zeros((count, dim), dtype=np.float64)
    current = np.zeros(dim, dtype=np.float64)
    current[_random_k_subsets(rng, 1, dim, k_active)[0]] = 1.0
    patterns[0] = current
    for t in range(1, count):
        current = current.copy()
        ones = np.flatnonzero(current == 1.0)
        zeros = np.flatnonzero(current == 0.0)
        current[rng.choice(ones, size=half, replace=False)] = 0.0
        current[rng.choice(zeros, size=half, replace=False)] = 1.0
        patterns[t] = current
    return Dataset(patterns=patterns, kind=DatasetKind.RAND_CORR)


def _require_binary(x: np.ndarray, name: str) -> None:
    if not np.all((x == 0.0) | (x == 1.0)):
        raise ValueError(f"{name}: expected a binary (0/1) pattern")


def corrupt(pattern, flip_fraction: float, seed) -> np.ndarray:
    """Copy of a binary pattern with exactly round(flip_fraction*dim) distinct
    positions inverted.  flip_fraction 0 returns an unmodified copy.
    """
    x = np.asarray(pattern, dtype=np.float64)
    if x.ndim != 1:
        raise ValueError(f"corrupt expects one pattern, got ndim={x.ndim}")
    _require_binary(x, "corrupt")
    k = _active_count(flip_fraction, x.shape[0])
    if not 0 <= k <= x.shape[0]:
        raise ValueError(f"flip_fraction {flip_fraction} out of range for dim {x.shape[0]}")
    out = x.copy()
    if k == 0:
        return out
    rng = as_generator(seed)
    pos = rng.choice(x.shape[0], size=k, replace=False)
    out[pos] = 1.0 - out[pos]
    return out


def corrupt_rows(patterns, flip_fraction: float, seed) -> np.ndarray:
    """Row-wise `corrupt` with a fresh flip set drawn per row."""
    x = np.asarray(patterns, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"corrupt_rows expects a pattern stack, got ndim={x.ndim}")
    _require_binary(x, "corrupt_rows")
    count, dim = x.shape
    k = _active_count(flip_fraction, dim)
    out = x.copy()
    if k == 0:
        return out
    rng = as_generator(seed)
    cols = _random_k_subsets(rng, count, dim, k)
    rows = np.repeat(np.arange(count), k)
    out[rows, cols.ravel()] = 1.0 - out[rows, cols.ravel()]
    return out


def balanced_flip_rows(
    patterns, flip_fraction: float, seed, flips_on: int = None, flips_off: int = None
) -> np.ndarray:
    """Row-wise activity-conserving corruption: of the round(f*dim) flipped
    positions per row, half are active units cleared and half inactive units
    set (the same scheme gen_rand_corr steps with), so a row's active count
    moves by at most the parity remainder.  Unlike `corrupt_rows`, noisy rows
    keep the activity statistics the offsets were centered on.

    `flips_on` / `flips_off` override the per-side counts (both or neither);
    callers use this to cap the flips for rows too sparse for the nominal
    count.
    """
    x = np.asarray(patterns, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"balanced_flip_rows expects a pattern stack, got ndim={x.ndim}")
    _require_binary(x, "balanced_flip_rows")
    dim = x.shape[1]
    if (flips_on is None) != (flips_off is None):
        raise ValueError("flips_on and flips_off must be given together")
    if flips_on is None:
        k = _active_count(flip_fraction, dim)
        k_on, k_off = k // 2, k - k // 2
    else:
        k_on, k_off = int(flips_on), int(flips_off)
        if k_on < 0 or k_off < 0:
            raise ValueError(f"flip counts must be >= 0, got ({k_on}, {k_off})")
    out = x.copy()
    if k_on == 0 and k_off == 0:
        return out
    rng = as_generator(seed)
    for row in out:
        ones = np.flatnonzero(row == 1.0)
        zeros = np.flatnonzero(row == 0.0)
        if k_on > ones.size or k_off > zeros.size:
            raise ValueError(
                f"cannot flip {k_on} ones and {k_off} zeros in a row with "
                f"{ones.size} ones out of {dim}"
            )
        row[rng.choice(ones, size=k_on, replace=False)] = 0.0
        row[rng.choice(zeros, size=k_off, replace=False)] = 1.0
    return out


def make_sequence(dataset: Dataset, count: int, seed=None) -> tuple[np.ndarray, np.ndarray]:
    """Pick `count` patterns to store: the leading run for chain-generated data
    (order is the correlation structure), a random subset otherwise.

    Returns (patterns, indices into the dataset).
    """
    if not 0 < count <= len(dataset):
        raise ValueError(f"count must lie in [1, {len(dataset)}], got {count}")
    if dataset.kind == DatasetKind.RAND_CORR or count == len(dataset):
        indices = np.arange(count)
    else:
        if seed is None:
            raise ValueError("seed is required when selecting a random subset")
        rng = as_generator(seed)
        indices = rng.choice(len(dataset), size=count, replace=False)
    return dataset.patterns[indices].copy(), indices


# --- IDX (MNIST container) ---------------------------------------------------

_IDX_IMAGES_MAGIC = 0x00000803
_IDX_LABELS_MAGIC = 0x00000801


def _read_exact(buf: bytes, offset: int, size: int, path, what: str) -> bytes:
    if offset + size > len(buf):
        raise DataError(
            f"{path}: truncated while reading {what} at byte {offset} "
            f"(need {size} bytes, file has {len(buf) - offset} left)"
        )
    return buf[offset : offset + size]


def load_idx_images(path) -> np.ndarray:
    """Parse an IDX image file into a (count, rows, cols) uint8 array."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, = struct.unpack(">I", _read_exact(buf, 0, 4, path, "magic"))
    if magic != _IDX_IMAGES_MAGIC:
        raise DataError(
            f"{path}: bad magic 0x{magic:08x} at byte 0 (expected 0x{_IDX_IMAGES_MAGIC:08x})"
        )
    count, rows, cols = struct.unpack(">III", _read_exact(buf, 4, 12, path, "dimensions"))
    pixels = _read_exact(buf, 16, count * rows * cols, path, "pixel data")
    if len(buf) != 16 + count * rows * cols:
        raise DataError(f"{path}: {len(buf) - 16 - count * rows * cols} trailing bytes")
    return np.frombuffer(pixels, dtype=np.uint8).reshape(count, rows, cols)


def load_idx_labels(path) -> np.ndarray:
    """Parse an IDX label file into a (count,) uint8 array."""
    with open(path, "rb") as fh:
        buf = fh.read()
    magic, = struct.unpack(">I", _read_exact(buf, 0, 4, path, "magic"))
    if magic != _IDX_LABELS_MAGIC:
        raise DataError(
            f"{path}: bad magic 0x{magic:08x} at byte 0 (expected 0x{_IDX_LABELS_MAGIC:08x})"
        )
    count, = struct.unpack(">I", _read_exact(buf, 4, 4, path, "count"))
    labels = _read_exact(buf, 8, count, path, "label data")
    if len(buf) != 8 + count:
        raise DataError(f"{path}: {len(buf) - 8 - count} trailing bytes")
    return np.frombuffer(labels, dtype=np.uint8).copy()


def write_idx_images(path, images: np.ndarray) -> None:
    images = np.asarray(images)
    if images.ndim != 3 or images.dtype != np.uint8:
        raise ValueError("write_idx_images expects a (count, rows, cols) uint8 array")
    count, rows, cols = images.shape
    with open(path, "wb") as fh:
        fh.write(struct.pack(">IIII", _IDX_IMAGES_MAGIC, count, rows, cols))
        fh.write(images.tobytes())


def write_idx_labels(path, labels: np.ndarray) -> None:
    labels = np.asarray(labels)
    if labels.ndim != 1:
        raise ValueError("write_idx_labels expects a 1-D array")
    with open(path, "wb") as fh:
        fh.write(struct.pack(">II", _IDX_LABELS_MAGIC, labels.shape[0]))
        fh.write(labels.astype(np.uint8).tobytes())


def load_mnist(images_path, labels_path=None) -> Dataset:
    """Load an IDX image file (plus optional labels) as [0, 1]-scaled rows."""
    images = load_idx_images(images_path)
    count, rows, cols = images.shape
    labels = None
    if labels_path is not None:
        labels = load_idx_labels(labels_path)
        if labels.shape[0] != count:
            raise DataError(
                f"{labels_path}: {labels.shape[0]} labels for {count} images in {images_path}"
            )
    patterns = images.reshape(count, rows * cols).astype(np.float64) / 255.0
    return Dataset(
        patterns=patterns, kind=DatasetKind.MNIST, labels=labels, image_shape=(rows, cols)
    )


# --- CIFAR-10 binary ----------------------------------------------------------

_CIFAR_RECORD = 3073  # 1 label byte + 3 channels x 1024 pixels
_CIFAR_SIDE = 32


def cifar_grayscale(rgb: np.ndarray) -> np.ndarray:
    """Channel-mean grayscale: (count, 3, npix) uint8 -> (count, npix) float64."""
    rgb = np.asarray(rgb, dtype=np.float64)
    if rgb.ndim != 3 or rgb.shape[1] != 3:
        raise ValueError("cifar_grayscale expects a (count, 3, npix) array")
    return rgb.mean(axis=1)


def load_cifar(batch_paths) -> Dataset:
    """Load CIFAR-10 binary batches as grayscale rows, standardized per pixel
    position (zero mean, unit variance across the loaded set).
    """
    if isinstance(batch_paths, (str, bytes)) or not hasattr(batch_paths, "__iter__"):
        batch_paths = [batch_paths]
    raw = []
    labels = []
    for path in batch_paths:
        with open(path, "rb") as fh:
            buf = fh.read()
        if len(buf) == 0 or len(buf) % _CIFAR_RECORD != 0:
            raise DataError(
                f"{path}: size {len(buf)} is not a positive multiple of "
                f"{_CIFAR_RECORD}-byte records (offset {len(buf) - len(buf) % _CIFAR_RECORD})"
            )
        records = np.frombuffer(buf, dtype=np.uint8).reshape(-1, _CIFAR_RECORD)
        labels.append(records[:, 0].copy())
        raw.append(records[:, 1:].reshape(-1, 3, _CIFAR_SIDE * _CIFAR_SIDE))
    rgb = np.concatenate(raw, axis=0)
    labels = np.concatenate(labels, axis=0)
    gray = cifar_grayscale(rgb) / 255.0
    mean = gray.mean(axis=0)
    std = gray.std(axis=0)
    dead = np.flatnonzero(std == 0.0)
    if dead.size:
        raise DataError(
            f"cannot standardize: pixel position(s) {dead[:5].tolist()} are constant"
        )
    patterns = (gray - mean) / std
    return Dataset(
        patterns=patterns,
        kind=DatasetKind.CIFAR,
        labels=labels,
        image_shape=(_CIFAR_SIDE, _CIFAR_SIDE),
    )


def write_cifar_batch(path, labels: np.ndarray, rgb: np.ndarray) -> None:
    """Write records in CIFAR-10 binary layout; rgb is (count, 3, 1024) uint8."""
    labels = np.asarray(labels)
    rgb = np.asarray(rgb)
    if rgb.ndim != 3 or rgb.shape[1:] != (3, _CIFAR_SIDE * _CIFAR_SIDE) or rgb.dtype != np.uint8:
        raise ValueError("write_cifar_batch expects (count, 3, 1024) uint8 pixels")
    if labels.shape != (rgb.shape[0],):
        raise ValueError("one label per record required")
    records = np.empty((rgb.shape[0], _CIFAR_RECORD), dtype=np.uint8)
    records[:, 0] = labels.astype(np.uint8)
    records[:, 1:] = rgb.reshape(rgb.shape[0], -1)
    with open(path, "wb") as fh:
        fh.write(records.tobytes())


def export_csv(patterns, path) -> None:
    """Write binary patterns as CSV, one pattern per row of 0/1 integers."""
    x = np.asarray(patterns, dtype=np.float64)
    if x.ndim != 2:
        raise ValueError(f"export_csv expects a pattern stack, got ndim={x.ndim}")
    _require_binary(x, "export_csv")
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        for row in x.astype(np.int64):
            fh.write(",".join(map(str, row)))
            fh.write("\n")
