"""Retrieval quality metrics and forgetting curves.

Correlation against ground truth is the primary measure; the trivial
"always answer the mean stored pattern" reader sets the baseline every curve
is compared against.  Constant vectors make Pearson undefined and raise
instead of propagating NaN, because a silent NaN would corrupt curve means.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import ConfigError, UndefinedCorrelationError


def _center_rows(x: np.ndarray, what: str) -> np.ndarray:
    centered = x - x.mean(axis=1, keepdims=True)
    norms = np.sqrt(np.einsum("ij,ij->i", centered, centered))
    dead = np.flatnonzero(norms == 0.0)
    if dead.size:
        raise UndefinedCorrelationError(
            f"{what}: pattern(s) {dead[:5].tolist()} are constant; correlation undefined"
        )
    return centered / norms[:, None]


def pearson(a, b) -> float:
    """Pearson correlation between two equal-length, non-constant vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.ndim != 1 or b.ndim != 1:
        raise ValueError("pearson expects two 1-D vectors")
    if a.shape != b.shape:
        raise ValueError(f"length mismatch: {a.shape[0]} vs {b.shape[0]}")
    if a.shape[0] < 2:
        raise ValueError("pearson needs at least 2 elements")
    na = _center_rows(a[None, :], "first argument")[0]
    nb = _center_rows(b[None, :], "second argument")[0]
    return float(np.clip(na @ nb, -1.0, 1.0))


def pearson_rows(a, b) -> np.ndarray:
    """Row-wise Pearson correlation between two aligned pattern stacks."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape or a.ndim != 2:
        raise ValueError(f"aligned 2-D stacks required, got {a.shape} vs {b.shape}")
    na = _center_rows(a, "retrieved")
    nb = _center_rows(b, "ground truth")
    return np.clip(np.einsum("ij,ij->i", na, nb), -1.0, 1.0)


def mean_pattern(patterns) -> np.ndarray:
    patterns = np.asarray(patterns, dtype=np.float64)
    if patterns.ndim != 2 or patterns.shape[0] == 0:
        raise ValueError("mean_pattern expects a nonempty pattern stack")
    return patterns.mean(axis=0)


def baseline_correlation(retrieved, ground_truth) -> float:
    """Mean correlation of each retrieved pattern with the mean ground-truth
    pattern: what ignoring the cue entirely would score.
    """
    retrieved = np.asarray(retrieved, dtype=np.float64)
    truth = np.asarray(ground_truth, dtype=np.float64)
    if retrieved.ndim != 2 or truth.ndim != 2:
        raise ValueError("baseline_correlation expects 2-D pattern stacks")
    if retrieved.shape[0] != truth.shape[0] or retrieved.shape[0] == 0:
        raise ValueError("retrieved and ground truth must be nonempty and aligned")
    mean = mean_pattern(truth)
    tiled = np.broadcast_to(mean, retrieved.shape)
    return float(pearson_rows(retrieved, tiled).mean())


def ols_trend(indices, values) -> tuple[float, float]:
    """Least-squares line through (index, value) points -> (slope, intercept)."""
    x = np.asarray(indices, dtype=np.float64)
    y = np.asarray(values, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1 or x.shape[0] < 2:
        raise ValueError("trendline needs >= 2 aligned points")
    slope, intercept = np.polyfit(x, y, deg=1)
    return float(slope), float(intercept)


class CurveMode(str, Enum):
    ENCODER = "encoder"
    DECODER = "decoder"
    ENCODE_DECODE = "encode_decode"
    RECALL = "recall"
    FULL_RECALL = "full_recall"


@dataclass
class ForgettingCurve:
    """Per-stored-pattern retrieval quality, ordered by age.

    `pattern_index` counts age: 0 is the most recently stored pattern, so a
    forgetting curve falls (negative trend slope) as memories get older.
    `abs_error` / `sq_error` carry the per-index mean absolute and squared
    element errors; correlation can rank retrievals differently from them.
    """

    pattern_index: np.ndarray  # (T,) age rank, newest first
    correlation: np.ndarray  # (T,)
    baseline: float
    slope: float
    intercept: float
    mode: CurveMode
    transitions: int  # transition count used (0 where not applicable)
    abs_error: np.ndarray  # (T,)
    sq_error: np.ndarray  # (T,)

    def __post_init__(self):
        self.pattern_index = np.asarray(self.pattern_index, dtype=np.int64)
        self.correlation = np.asarray(self.correlation, dtype=np.float64)
        self.abs_error = np.asarray(self.abs_error, dtype=np.float64)
        self.sq_error = np.asarray(self.sq_error, dtype=np.float64)
        n = self.pattern_index.shape[0]
        for name in ("correlation", "abs_error", "sq_error"):
            if getattr(self, name).shape != (n,):
                raise ConfigError(f"ForgettingCurve.{name}: length != {n}")
        if not np.all(np.isfinite(self.correlation)):
            raise ConfigError("ForgettingCurve: non-finite correlations")
        self.mode = CurveMode(self.mode)

    def __len__(self) -> int:
        return self.pattern_index.shape[0]

    def trend_values(self) -> np.ndarray:
        return self.slope * self.pattern_index.astype(np.float64) + self.intercept

    def mean(self, newest_fraction: float = 1.0) -> float:
        """Mean correlation over the newest fraction of stored patterns."""
        if not 0.0 < newest_fraction <= 1.0:
            raise ValueError(f"newest_fraction must be in (0, 1], got {newest_fraction}")
        stop = max(1, int(round(newest_fraction * len(self))))
        return float(self.correlation[:stop].mean())

    def mean_oldest(self, oldest_fraction: float) -> float:
        """Mean correlation over the oldest fraction of stored patterns."""
        if not 0.0 < oldest_fraction <= 1.0:
            raise ValueError(f"oldest_fraction must be in (0, 1], got {oldest_fraction}")
        n = len(self)
        start = n - max(1, int(round(oldest_fraction * n)))
        return float(self.correlation[start:].mean())

    def mean_excluding_earliest(self, skip_fraction: float = 0.05) -> float:
        """Mean correlation with the earliest-stored patterns dropped (those
        outliers would otherwise dominate short curves)."""
        n = len(self)
        stop = max(1, n - int(round(skip_fraction * n)))
        return float(self.correlation[:stop].mean())

    def at_age(self, age: int) -> float:
        """Correlation for the pattern stored `age` steps before the newest."""
        return float(self.correlation[age])

    def summary(self) -> dict:
        return {
            "mode": self.mode.value,
            "transitions": int(self.transitions),
            "count": len(self),
            "mean": self.mean(),
            "mean_excl_earliest_5pct": self.mean_excluding_earliest(0.05),
            "mean_newest_half": self.mean(0.5),
            "newest": float(self.correlation[0]),
            "baseline": self.baseline,
            "slope": self.slope,
            "intercept": self.intercept,
            "mean_abs_error": float(self.abs_error.mean()),
            "mean_sq_error": float(self.sq_error.mean()),
        }


def trendline(curve: ForgettingCurve) -> tuple[float, float]:
    """Least-squares (slope, intercept) of a curve's (index, correlation) points."""
    return ols_trend(curve.pattern_index, curve.correlation)


def max_correlation_profile(patterns) -> np.ndarray:
    """For each pattern, its highest correlation with any other pattern in the
    stack; near-1 entries flag doppelgangers that recall can confuse.
    """
    x = np.asarray(patterns, dtype=np.float64)
    if x.ndim != 2 or x.shape[0] < 2:
        raise ValueError("max_correlation_profile needs >= 2 patterns")
    normed = _center_rows(x, "patterns")
    gram = normed @ normed.T
    np.fill_diagonal(gram, -np.inf)
    return np.clip(gram.max(axis=1), -1.0, 1.0)


def retrieve(model, store, mode, transitions: int = None, cues=None):
    """Run one retrieval pipeline over all stored indices.

    Returns (retrieved, truth, transitions_used); rows align with storage
    order.  See forgetting_curve for the mode semantics.
    """
    mode = CurveMode(mode)
    ec_truth = store.ec
    ca3_truth = store.ca3()
    if cues is None:
        cues = ec_truth
    else:
        cues = np.asarray(cues, dtype=np.float64)
        if cues.shape != ec_truth.shape:
            raise ConfigError(f"cues shape {cues.shape} != stored shape {ec_truth.shape}")
    if mode == CurveMode.ENCODER:
        return model.encode(cues), ca3_truth, 0
    if mode == CurveMode.DECODER:
        return model.decode(ca3_truth), ec_truth, 0
    if mode == CurveMode.ENCODE_DECODE:
        return model.decode(model.encode(cues)), ec_truth, 0
    if mode in (CurveMode.RECALL, CurveMode.FULL_RECALL):
        length = store.intrinsic.length
        if len(store) != length:
            raise ConfigError(
                f"recall-mode curves need the full cycle stored: "
                f"{len(store)} stored vs intrinsic length {length}"
            )
        if mode == CurveMode.FULL_RECALL:
            transitions = length
        elif transitions is None or transitions < 1:
            raise ValueError("recall mode requires transitions >= 1")
        # Row t of the state matrix holds the trajectory that lands on index t
        # after `transitions` steps, i.e. the cue from index (t - k) mod T.
        states = np.roll(model.encode(cues), transitions % len(store), axis=0)
        for _ in range(transitions):
            states = model.transition(states)
        return model.decode(states), ec_truth, transitions
    raise ConfigError(f"unknown curve mode: {mode!r}")


def forgetting_curve(model, store, mode, transitions: int = None, cues=None) -> ForgettingCurve:
    """Retrieval quality per stored pattern for one pipeline mode.

    Modes: encoder (EC->CA3 vs intrinsic truth), decoder (ground-truth CA3
    -> EC), encode_decode (round trip, no dynamics), recall (encode, k
    recurrent steps, decode), full_recall (k = intrinsic length, cycle
    closure).  `cues` substitutes (possibly corrupted) cue patterns for the
    stored ground truth on the encode side; correlations are always against
    the clean truth.  Pure read: the model is never mutated.
    """
    mode = CurveMode(mode)
    retrieved, truth, used = retrieve(model, store, mode, transitions, cues)
    err = retrieved - truth
    # retrieve() aligns rows with storage order; the curve is indexed by age.
    corr = pearson_rows(retrieved, truth)[::-1]
    ages = np.arange(len(store))
    slope, intercept = ols_trend(ages, corr)
    return ForgettingCurve(
        pattern_index=ages,
        correlation=corr,
        baseline=baseline_correlation(retrieved, truth),
        slope=slope,
        intercept=intercept,
        mode=mode,
        transitions=used,
        abs_error=np.abs(err).mean(axis=1)[::-1],
        sq_error=(err**2).mean(axis=1)[::-1],
    )
