"""Rolling application of the window test across a return series.

The window advances one observation at a time (stride 1 unless asked
otherwise); each position yields one WindowResult attributed to the
1-based index of its last observation. Window evaluations are independent
pure functions, so they may be farmed out to worker processes; results are
merged in end-index order and are identical for any worker count.
"""

from __future__ import annotations

import concurrent.futures
from dataclasses import dataclass

import numpy as np

from .errors import EmptyInput, InputError, SeriesTooShort
from .portmanteau import WindowConfig, WindowResult, window_test

LINEAR = "linear"
NONLINEAR = "nonlinear"


@dataclass(frozen=True)
class RollingResult:
    """All window records for one series/configuration, in end-index order.

    At stride 1 there are series_length - n + 1 records with end indices
    n, n+1, ..., series_length.
    """

    cfg: WindowConfig
    records: tuple[WindowResult, ...]
    series_length: int
    stride: int = 1


def _as_return_array(r) -> np.ndarray:
    values = getattr(r, "returns", r)
    return np.asarray(values, dtype=float)


def _roll_range(args) -> list[WindowResult]:
    arr, cfg, ends = args
    n = cfg.n
    return [window_test(arr[e - n : e], cfg, end_index=e) for e in ends]


def roll(r, cfg: WindowConfig, stride: int = 1, workers: int = 1) -> RollingResult:
    """Evaluate the window test at every position of the series.

    ``r`` may be a ReturnSeries or any real sequence. ``workers`` > 1
    distributes contiguous blocks of windows over processes; the output is
    bit-identical to the sequential run.
    """
    arr = _as_return_array(r)
    length = arr.size
    if stride < 1:
        raise InputError(f"stride must be >= 1, got {stride}")
    if length < cfg.n:
        raise SeriesTooShort(f"series length {length} < window length {cfg.n}")
    ends = list(range(cfg.n, length + 1, stride))
    if workers > 1 and len(ends) > 1:
        chunks = max(1, len(ends) // (4 * workers))
        tasks = [
            (arr, cfg, ends[i : i + chunks]) for i in range(0, len(ends), chunks)
        ]
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(_roll_range, tasks))
        records = tuple(rec for part in parts for rec in part)
    else:
        records = tuple(_roll_range((arr, cfg, ends)))
    return RollingResult(cfg, records, length, stride)


def significance_series(res: RollingResult, which: str, alpha: float) -> np.ndarray:
    """Boolean flags, one per window: p-value strictly below alpha.

    Degenerate windows are never significant.
    """
    if which not in (LINEAR, NONLINEAR):
        raise InputError(f"which must be 'linear' or 'nonlinear', got {which!r}")
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    if which == LINEAR:
        values = [rec.p_xx for rec in res.records]
    else:
        values = [rec.p_xxx for rec in res.records]
    flags = np.asarray(values) < alpha
    flags &= np.array([not rec.degenerate for rec in res.records])
    return flags


def percent_significant(flags) -> float:
    """Fraction of true flags (the rolling-window inefficiency indicator)."""
    flags = np.asarray(flags, dtype=bool)
    if flags.size == 0:
        raise EmptyInput("no significance flags")
    return float(np.count_nonzero(flags)) / flags.size
