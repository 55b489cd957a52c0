"""Capacity and tokens-per-frame arithmetic plus histogram binning."""

from __future__ import annotations

from typing import Sequence

import numpy as np

from .errors import ConfigError

HISTOGRAM_BINS = 16


def tokens_per_frame_bound(b_max: int, f_max: int) -> float:
    """Theoretical ceiling on average tokens per frame: b_max / f_max."""
    if f_max == 0:
        raise ZeroDivisionError("f_max is zero")
    if f_max < 0:
        raise ConfigError(f"f_max must be >= 1, got {f_max}")
    return b_max / f_max


def tokens_per_frame_range(k_min: int, k_max: int, window: int) -> tuple[float, float]:
    """Achievable per-frame dynamic range for a segment window of frames."""
    if window < 1:
        raise ConfigError(f"window must be >= 1, got {window}")
    return k_min / window, k_max / window


def dataset_avg_capacity(
    n_samples: int, b: int, segment_counts: Sequence[int]
) -> float:
    """Dataset-level average expected capacity per segment:
    (n_samples * b) / sum of segment counts."""
    total_segments = sum(segment_counts)
    if total_segments == 0:
        raise ZeroDivisionError("total segment count is zero")
    return (n_samples * b) / total_segments


def allocation_histogram(
    budgets: Sequence[int], k_max: int, bins: int = HISTOGRAM_BINS
) -> tuple[tuple[float, ...], tuple[int, ...]]:
    """Histogram of per-segment budgets over fixed-width bins on [0, k_max].

    Bin width is k_max / bins; the last bin is closed so a budget of
    exactly k_max is counted. Counts sum to len(budgets).
    """
    counts, edges = np.histogram(
        np.asarray(budgets, dtype=float), bins=bins, range=(0.0, float(k_max))
    )
    return tuple(float(e) for e in edges), tuple(int(c) for c in counts)
