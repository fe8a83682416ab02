#!/usr/bin/env python3
"""Sweep the rolling tests over a grid of window lengths.

For each n in the grid, rolls both portmanteau tests across the input price
series and records the fraction of significant windows, giving the
percentage-vs-window-length view of market inefficiency for one instrument.

Example:
    python scripts/sweep_window_lengths.py --input prices.csv --output sweep.csv
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from epicorr.errors import EpicorrError
from epicorr.ingest import log_returns, parse_price_csv
from epicorr.portmanteau import WindowConfig
from epicorr.rolling import percent_significant, roll, significance_series
from epicorr.serialize import write_table

DEFAULT_GRID = "8,16,32,64,128,256,512,1024"


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--input", required=True, help="price CSV")
    parser.add_argument("--n-grid", default=DEFAULT_GRID)
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--workers", type=int, default=2)
    parser.add_argument("--output", default="sweep.csv")
    args = parser.parse_args()

    with open(args.input, "rb") as fh:
        returns = log_returns(parse_price_csv(fh))
    grid = [int(v) for v in args.n_grid.split(",")]

    rows = []
    for n in grid:
        if n > len(returns):
            print(f"n={n}: skipped (series has only {len(returns)} returns)")
            continue
        res = roll(returns, WindowConfig(n), workers=args.workers)
        linear = percent_significant(significance_series(res, "linear", args.alpha))
        nonlinear = percent_significant(
            significance_series(res, "nonlinear", args.alpha)
        )
        rows.append([n, len(res.records), linear, nonlinear])
        print(
            f"n={n}: {len(res.records)} windows, "
            f"linear {linear:.2%}, nonlinear {nonlinear:.2%}"
        )
    write_table(args.output, ["n", "windows", "pct_linear", "pct_nonlinear"], rows)
    print(f"wrote {args.output}")
    return 0


if __name__ == "__main__":
    try:
        sys.exit(main())
    except EpicorrError as exc:
        print(f"error: {exc}", file=sys.stderr)
        sys.exit(2)
