"""Correlation-gated next-step sign predictor and its hit-rate evaluation.

When the rolling window ending at t shows a significant lag-1 correlation
(p_xx below alpha), the next return's direction is predicted as
sign(C_xx(1) * x(t)): positive correlation continues the last move,
negative correlation reverses it. All other windows predict nothing. Only
the linear gate generates predictions; windows significant solely in the
bicorrelation test stay silent.

Predictions are strictly causal: the record targeting t+1 uses only
observations up to t.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .clusters import ClusterTable
from .errors import InputError
from .rolling import RollingResult


@dataclass(frozen=True)
class PredictionRecord:
    """One next-step call: target index, direction, outcome, and the gate
    p-value. ``hit`` is defined only when both signs are nonzero."""

    target_index: int
    predicted: int
    actual_sign: int
    p_xx_at_t: float
    cluster_id: int | None = None
    hit: bool | None = None


@dataclass(frozen=True)
class HitRateSummary:
    predictions_made: int
    hits: int
    misses: int
    skipped_zero_actual: int
    hit_rate: float | None


def _sign(v: float) -> int:
    v = float(v)
    return int(v > 0.0) - int(v < 0.0)


def predict_next(c_xx_lag1: float, x_t: float, p_xx: float, alpha: float) -> int:
    """sign(c_xx_lag1 * x_t) when p_xx < alpha, otherwise 0."""
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    if p_xx >= alpha:
        return 0
    return _sign(c_xx_lag1 * x_t)


def run_predictions(r, res: RollingResult, alpha: float) -> list[PredictionRecord]:
    """One PredictionRecord per window that still has a next observation.

    x(t) is the standardized last value of the window ending at t;
    standardization has positive scale, so only the demeaned value matters
    for the sign. Records carry no cluster annotation; see
    ``annotate_clusters``.
    """
    if not 0.0 < alpha < 1.0:
        raise InputError(f"alpha must lie in (0, 1), got {alpha}")
    arr = np.asarray(getattr(r, "returns", r), dtype=float)
    if arr.size != res.series_length:
        raise InputError(
            f"series length {arr.size} != rolling series_length {res.series_length}"
        )
    n = res.cfg.n
    cums = np.concatenate([[0.0], np.cumsum(arr)])
    records = []
    for rec in res.records:
        t = rec.end_index
        if t + 1 > arr.size:
            continue
        window_mean = (cums[t] - cums[t - n]) / n
        x_t = arr[t - 1] - window_mean
        predicted = 0
        if not rec.degenerate and rec.p_xx < alpha:
            predicted = _sign(rec.c_xx_lag1 * x_t)
        actual = _sign(arr[t])
        hit = (predicted == actual) if predicted != 0 and actual != 0 else None
        records.append(PredictionRecord(t + 1, predicted, actual, rec.p_xx, None, hit))
    return records


def annotate_clusters(
    records: list[PredictionRecord], table: ClusterTable
) -> list[PredictionRecord]:
    """Attach to each record the id of the cluster holding its source window
    (the window ending at target_index - 1), if any."""
    starts = [c.start for c in table.clusters]
    ends = [c.end for c in table.clusters]
    out = []
    for rec in records:
        t = rec.target_index - 1
        idx = np.searchsorted(starts, t, side="right") - 1
        cluster_id = None
        if idx >= 0 and starts[idx] <= t <= ends[idx]:
            cluster_id = int(idx)
        out.append(replace(rec, cluster_id=cluster_id))
    return out


def hit_rate(records: list[PredictionRecord]) -> HitRateSummary:
    """Share of decided predictions whose sign matched the realized return.

    Zero actual returns cannot be scored; they are counted separately and
    excluded from the denominator. With no decided predictions the rate is
    reported as absent.
    """
    made = hits = misses = skipped = 0
    for rec in records:
        if rec.predicted == 0:
            continue
        made += 1
        if rec.actual_sign == 0:
            skipped += 1
        elif rec.hit:
            hits += 1
        else:
            misses += 1
    decided = hits + misses
    rate = hits / decided if decided else None
    return HitRateSummary(made, hits, misses, skipped, rate)


def cumulative_hit_rate(
    records: list[PredictionRecord],
) -> list[tuple[int, float]]:
    """Running hits/decisions after each decided prediction, plot-ready."""
    out = []
    hits = decided = 0
    for rec in records:
        if rec.hit is None:
            continue
        decided += 1
        hits += int(rec.hit)
        out.append((rec.target_index, hits / decided))
    return out


@dataclass(frozen=True)
class ClusterHitRate:
    cluster_id: int
    size: int
    decisions: int
    hits: int

    @property
    def hit_rate(self) -> float:
        return self.hits / self.decisions


def hit_rate_by_cluster(
    records: list[PredictionRecord], table: ClusterTable
) -> list[ClusterHitRate]:
    """Per-cluster hit rate: one entry per cluster with >= 1 decided
    prediction, keyed by cluster size for the size-vs-skill view."""
    if any(rec.cluster_id is None and rec.predicted != 0 for rec in records):
        records = annotate_clusters(records, table)
    decisions = {}
    hits = {}
    for rec in records:
        if rec.hit is None or rec.cluster_id is None:
            continue
        decisions[rec.cluster_id] = decisions.get(rec.cluster_id, 0) + 1
        hits[rec.cluster_id] = hits.get(rec.cluster_id, 0) + int(rec.hit)
    return [
        ClusterHitRate(cid, table.clusters[cid].size, decisions[cid], hits[cid])
        for cid in sorted(decisions)
    ]
