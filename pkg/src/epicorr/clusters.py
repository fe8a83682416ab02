"""Clusters of consecutive significant windows and their size distribution.

A cluster is a maximal run of true flags; its size counts rolling-window
positions (hours, for hourly data at stride 1). Positions are expressed in
the caller's coordinate system via ``offset``: flag i sits at position
offset + i, so feeding the rolling engine's flags with offset = n yields
cluster bounds in end-index coordinates.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyTable
from .rolling import LINEAR

_VALID_WHICH = (LINEAR, "nonlinear")


@dataclass(frozen=True)
class Cluster:
    start: int
    end: int

    @property
    def size(self) -> int:
        return self.end - self.start + 1


@dataclass(frozen=True)
class ClusterTable:
    clusters: tuple[Cluster, ...]
    total_positions: int
    which: str = LINEAR

    def sizes(self) -> list[int]:
        return [c.size for c in self.clusters]


@dataclass(frozen=True)
class SizeDistribution:
    """Empirical CCDF of cluster sizes, ready for log-log plotting.

    ccdf maps each observed size to the fraction of clusters at least that
    large; it is 1 at the smallest size and non-increasing.
    """

    sizes: tuple[int, ...]
    ccdf: dict[int, float]


def extract_clusters(flags, offset: int = 0, which: str = LINEAR) -> ClusterTable:
    """Run-length encode the maximal runs of true flags."""
    if which not in _VALID_WHICH:
        raise ValueError(f"which must be one of {_VALID_WHICH}, got {which!r}")
    flags = np.asarray(flags, dtype=bool)
    clusters: list[Cluster] = []
    run_start = None
    for i, flag in enumerate(flags):
        if flag and run_start is None:
            run_start = i
        elif not flag and run_start is not None:
            clusters.append(Cluster(offset + run_start, offset + i - 1))
            run_start = None
    if run_start is not None:
        clusters.append(Cluster(offset + run_start, offset + flags.size - 1))
    return ClusterTable(tuple(clusters), int(flags.size), which)


def size_distribution(table: ClusterTable) -> SizeDistribution:
    """Complementary CDF over the cluster sizes of a table."""
    if not table.clusters:
        raise EmptyTable("no clusters")
    sizes = sorted(table.sizes())
    total = len(sizes)
    arr = np.asarray(sizes)
    ccdf = {
        int(s): float(np.count_nonzero(arr >= s)) / total
        for s in sorted(set(sizes))
    }
    return SizeDistribution(tuple(sizes), ccdf)
