"""Price ingestion, log returns, and distributional summary statistics.

The pipeline consumes plain CSV price files (one instrument per file) and
reduces them to log-return series. ``summary_stats`` reports the usual
moment table together with the Jarque-Bera normality statistic.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass, fields

import numpy as np

from .errors import (
    DegenerateSeries,
    InputError,
    MalformedRow,
    NonPositivePrice,
    TooShort,
)
from .portmanteau import chi_square_sf


@dataclass(frozen=True, eq=False)
class PriceSeries:
    """Nominal prices, optionally timestamped with epoch seconds."""

    prices: np.ndarray
    timestamps: np.ndarray | None = None
    label: str = ""

    def __post_init__(self):
        prices = np.asarray(self.prices, dtype=float)
        object.__setattr__(self, "prices", prices)
        if prices.ndim != 1 or prices.size < 2:
            raise TooShort("need at least 2 prices")
        if not np.all(np.isfinite(prices)) or np.any(prices <= 0.0):
            raise InputError("prices must be finite and strictly positive")
        if self.timestamps is not None:
            ts = np.asarray(self.timestamps, dtype=float)
            object.__setattr__(self, "timestamps", ts)
            if ts.shape != prices.shape:
                raise InputError("timestamps must match prices in length")
            if np.any(np.diff(ts) <= 0.0):
                raise InputError("timestamps must be strictly increasing")

    def __len__(self) -> int:
        return int(self.prices.size)


@dataclass(frozen=True, eq=False)
class ReturnSeries:
    """Logarithmic returns; one element shorter than the parent prices."""

    returns: np.ndarray
    label: str = ""

    def __post_init__(self):
        r = np.asarray(self.returns, dtype=float)
        object.__setattr__(self, "returns", r)
        if r.ndim != 1 or r.size < 1:
            raise TooShort("need at least 1 return")
        if not np.all(np.isfinite(r)):
            raise InputError("returns must all be finite")

    def __len__(self) -> int:
        return int(self.returns.size)


@dataclass(frozen=True)
class SummaryStats:
    """Moment summary of a return series (kurtosis is raw, Gaussian = 3)."""

    count: int
    mean: float
    median: float
    max: float
    min: float
    std_dev: float
    skewness: float
    kurtosis: float
    jb_statistic: float
    jb_pvalue: float

    def as_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def _as_text_stream(source) -> io.TextIOBase:
    if isinstance(source, bytes):
        return io.StringIO(source.decode("utf-8"))
    if isinstance(source, str):
        return io.StringIO(source)
    if hasattr(source, "read"):
        probe = source.read(0)
        if isinstance(probe, bytes):
            return io.TextIOWrapper(source, encoding="utf-8")
        return source
    raise InputError(f"cannot read prices from {type(source).__name__}")


def _resolve_column(spec, header_row, line: int, what: str) -> int:
    if isinstance(spec, int):
        return spec
    if header_row is None:
        raise InputError(f"{what} selected by name {spec!r} but header=False")
    try:
        return header_row.index(spec)
    except ValueError:
        raise MalformedRow(line, f"no column named {spec!r}") from None


def parse_price_csv(
    source,
    *,
    delimiter: str = ",",
    header: bool = False,
    price_column: int | str = 0,
    timestamp_column: int | str | None = None,
    label: str = "",
) -> PriceSeries:
    """Parse a UTF-8 CSV of prices into a PriceSeries.

    Columns may be addressed by index or, when ``header`` is set, by name.
    The first unparsable or non-positive row aborts the parse with the
    offending 1-based line number; blank lines are skipped.
    """
    reader = csv.reader(_as_text_stream(source), delimiter=delimiter)
    header_row = None
    prices: list[float] = []
    stamps: list[float] = []
    price_idx = ts_idx = None
    prev_ts = -math.inf
    for line, row in enumerate(reader, start=1):
        if not row or all(cell.strip() == "" for cell in row):
            continue
        if header and header_row is None:
            header_row = [cell.strip() for cell in row]
            continue
        if price_idx is None:
            price_idx = _resolve_column(price_column, header_row, line, "price column")
            if timestamp_column is not None:
                ts_idx = _resolve_column(
                    timestamp_column, header_row, line, "timestamp column"
                )
        if price_idx >= len(row):
            raise MalformedRow(line, f"missing column {price_idx}")
        try:
            price = float(row[price_idx])
        except ValueError:
            raise MalformedRow(line, f"bad price {row[price_idx]!r}") from None
        if not math.isfinite(price):
            raise MalformedRow(line, f"non-finite price {row[price_idx]!r}")
        if price <= 0.0:
            raise NonPositivePrice(line)
        if ts_idx is not None:
            if ts_idx >= len(row):
                raise MalformedRow(line, f"missing column {ts_idx}")
            try:
                ts = float(row[ts_idx])
            except ValueError:
                raise MalformedRow(line, f"bad timestamp {row[ts_idx]!r}") from None
            if not math.isfinite(ts) or ts <= prev_ts:
                raise MalformedRow(line, "timestamps must be strictly increasing")
            prev_ts = ts
            stamps.append(ts)
        prices.append(price)
    if len(prices) < 2:
        raise TooShort(f"need at least 2 valid price rows, got {len(prices)}")
    return PriceSeries(
        np.array(prices),
        np.array(stamps) if stamps else None,
        label=label,
    )


def log_returns(p: PriceSeries) -> ReturnSeries:
    """First differences of log prices: r(t) = ln(P(t+1) / P(t))."""
    return ReturnSeries(np.diff(np.log(p.prices)), label=p.label)


def summary_stats(r: ReturnSeries) -> SummaryStats:
    """Moment table plus the Jarque-Bera normality test.

    Central moments use the biased divide-by-n estimators; skewness is
    m3/m2^1.5, kurtosis the raw m4/m2^2, and
    JB = (n/6) * (skew^2 + (kurt - 3)^2 / 4) with a chi2(2) null. The
    reported std_dev alone uses the divide-by-(n-1) convention.
    """
    x = np.asarray(r.returns, dtype=float)
    n = x.size
    if n < 4:
        raise TooShort(f"need at least 4 returns, got {n}")
    mean = float(x.mean())
    d = x - mean
    m2 = float(np.mean(d * d))
    if m2 == 0.0:
        raise DegenerateSeries("all returns identical")
    m3 = float(np.mean(d * d * d))
    m4 = float(np.mean(d * d * d * d))
    skew = m3 / m2**1.5
    kurt = m4 / (m2 * m2)
    jb = jarque_bera_statistic(n, skew, kurt)
    return SummaryStats(
        count=n,
        mean=mean,
        median=float(np.median(x)),
        max=float(x.max()),
        min=float(x.min()),
        std_dev=math.sqrt(float(d @ d) / (n - 1)),
        skewness=skew,
        kurtosis=kurt,
        jb_statistic=jb,
        jb_pvalue=chi_square_sf(jb, 2),
    )


def jarque_bera_statistic(n: int, skewness: float, kurtosis: float) -> float:
    """JB = (n/6) * (skew^2 + (kurt - 3)^2 / 4), kurtosis raw."""
    return (n / 6.0) * (skewness**2 + 0.25 * (kurtosis - 3.0) ** 2)
