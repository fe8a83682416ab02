"""Command-line frontend.

Subcommands mirror the pipeline stages: ``summary``, ``roll``, ``clusters``,
``plfit``, ``predict``, ``simulate``. Each run writes its artifacts plus a
``<command>_manifest.json`` recording the resolved parameters, so any run
can be reproduced byte-for-byte from its manifest. Worker count comes from
``--workers`` or the EPICORR_WORKERS environment variable (1 means strictly
sequential) and never affects output bytes.

Exit codes: 0 success, 2 input error, 3 statistical precondition failure,
4 internal numerical breakdown.
"""

from __future__ import annotations

import argparse
import csv
import json
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .clusters import extract_clusters, size_distribution
from .errors import EpicorrError, InputError, NumericalError, StatisticalError
from .ingest import log_returns, parse_price_csv, summary_stats
from .portmanteau import WindowConfig
from .powerlaw import fit_with_bootstrap
from .predictor import (
    annotate_clusters,
    cumulative_hit_rate,
    hit_rate,
    hit_rate_by_cluster,
    run_predictions,
)
from .rolling import percent_significant, roll, significance_series
from .serialize import dumps_json, table_extension, write_json, write_table
from .synth import GeneratorSpec, generate

WINDOW_COLUMNS = [
    "end_index",
    "c_xx_lag1",
    "h_xx",
    "p_xx",
    "ar_order",
    "h_xxx",
    "p_xxx",
    "degenerate",
]


def _default_workers() -> int:
    raw = os.environ.get("EPICORR_WORKERS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        return 1


def _column_spec(value: str):
    try:
        return int(value)
    except ValueError:
        return value


def _add_io_options(parser, needs_input=True):
    if needs_input:
        parser.add_argument("--input", required=True, help="input file path")
    parser.add_argument("--output-dir", default=".", help="artifact directory")
    parser.add_argument(
        "--format", choices=("csv", "json"), default="csv",
        help="tabular artifact format",
    )


def _add_csv_options(parser):
    parser.add_argument("--delimiter", default=",")
    parser.add_argument("--header", action="store_true",
                        help="first row is a header")
    parser.add_argument("--price-column", type=_column_spec, default=0,
                        help="price column index or (with --header) name")
    parser.add_argument("--timestamp-column", type=_column_spec, default=None)


def _add_window_options(parser):
    parser.add_argument("--n", type=int, required=True, help="window length")
    parser.add_argument("--L", type=int, default=2, help="number of lags")
    parser.add_argument("--alpha", type=float, default=0.05)
    parser.add_argument("--ar-max-order", type=int, default=None)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="epicorr",
        description="Episodic serial-dependence scanner for return series",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("summary", help="moment table and normality test")
    _add_io_options(p)
    _add_csv_options(p)
    p.set_defaults(run=cmd_summary)

    p = sub.add_parser("roll", help="rolling window tests")
    _add_io_options(p)
    _add_csv_options(p)
    _add_window_options(p)
    p.add_argument("--stride", type=int, default=1)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(run=cmd_roll)

    p = sub.add_parser("clusters", help="significant-window clusters and CCDF")
    _add_io_options(p)
    p.add_argument("--which", choices=("linear", "nonlinear"), default="linear")
    p.add_argument("--alpha", type=float, default=0.05)
    p.set_defaults(run=cmd_clusters)

    p = sub.add_parser("plfit", help="power-law fit of cluster sizes")
    _add_io_options(p)
    p.add_argument("--reps", type=int, default=1000,
                   help="bootstrap repetitions")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-tail", type=int, default=10)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(run=cmd_plfit)

    p = sub.add_parser("predict", help="correlation-gated sign predictions")
    _add_io_options(p)
    _add_csv_options(p)
    _add_window_options(p)
    p.add_argument("--workers", type=int, default=None)
    p.set_defaults(run=cmd_predict)

    p = sub.add_parser("simulate", help="seeded synthetic series")
    _add_io_options(p, needs_input=False)
    p.add_argument("--kind", choices=("gaussian", "ar"), default="gaussian")
    p.add_argument("--length", type=int, required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--ar-coeffs", default=None,
                   help="comma-separated AR coefficients")
    p.add_argument("--innovation-sd", type=float, default=1.0)
    p.add_argument("--burn-in", type=int, default=None)
    p.add_argument("--as-prices", action="store_true",
                   help="emit exp(cumsum) prices for pipeline input")
    p.set_defaults(run=cmd_simulate)
    return parser


def _out_dir(args) -> Path:
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(args, out: Path, parameters: dict, artifacts: list[str]):
    manifest = {
        "command": args.command,
        "input": getattr(args, "input", None),
        "parameters": parameters,
        "artifacts": artifacts,
        "version": __version__,
    }
    write_json(out / f"{args.command}_manifest.json", manifest)


def _load_prices(args):
    with open(args.input, "rb") as fh:
        return parse_price_csv(
            fh,
            delimiter=args.delimiter,
            header=args.header,
            price_column=args.price_column,
            timestamp_column=args.timestamp_column,
            label=Path(args.input).name,
        )


def _csv_ingest_params(args) -> dict:
    return {
        "delimiter": args.delimiter,
        "header": args.header,
        "price_column": args.price_column,
        "timestamp_column": args.timestamp_column,
    }


def cmd_summary(args) -> int:
    out = _out_dir(args)
    stats = summary_stats(log_returns(_load_prices(args)))
    payload = stats.as_dict()
    write_json(out / "summary.json", payload)
    sys.stdout.write(dumps_json(payload))
    _write_manifest(args, out, _csv_ingest_params(args), ["summary.json"])
    return 0


def _window_config(args) -> WindowConfig:
    return WindowConfig(
        n=args.n, L=args.L, alpha=args.alpha, ar_max_order=args.ar_max_order
    )


def _resolved_workers(args) -> int:
    return args.workers if args.workers is not None else _default_workers()


def cmd_roll(args) -> int:
    out = _out_dir(args)
    cfg = _window_config(args)
    returns = log_returns(_load_prices(args))
    result = roll(returns, cfg, stride=args.stride, workers=_resolved_workers(args))
    rows = [
        [
            rec.end_index,
            rec.c_xx_lag1,
            rec.h_xx,
            rec.p_xx,
            rec.ar_order,
            rec.h_xxx,
            rec.p_xxx,
            rec.degenerate,
        ]
        for rec in result.records
    ]
    name = "windows" + table_extension(args.format)
    write_table(out / name, WINDOW_COLUMNS, rows, args.format)
    params = _csv_ingest_params(args) | {
        "n": cfg.n,
        "L": cfg.L,
        "alpha": cfg.alpha,
        "ar_max_order": cfg.ar_max_order,
        "stride": args.stride,
        "format": args.format,
    }
    _write_manifest(args, out, params, [name])
    return 0


def _read_table(path: Path) -> list[dict]:
    if path.suffix == ".json":
        rows = json.loads(path.read_text())
        if not isinstance(rows, list):
            raise InputError(f"{path}: expected a JSON array of rows")
        return rows
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _read_window_rows(path: Path) -> list[dict]:
    rows = _read_table(path)
    if not rows:
        raise InputError(f"{path}: no window records")
    parsed = []
    try:
        for row in rows:
            parsed.append(
                {
                    "end_index": int(row["end_index"]),
                    "p_xx": float(row["p_xx"]),
                    "p_xxx": float(row["p_xxx"]),
                    "degenerate": row["degenerate"] in (True, "true"),
                }
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{path}: not a window-results table ({exc})") from None
    return parsed


def cmd_clusters(args) -> int:
    out = _out_dir(args)
    rows = _read_window_rows(Path(args.input))
    ends = [row["end_index"] for row in rows]
    if any(b - a != 1 for a, b in zip(ends, ends[1:])):
        raise InputError(
            "cluster analysis requires consecutive windows (stride 1)"
        )
    key = "p_xx" if args.which == "linear" else "p_xxx"
    flags = np.array(
        [(not row["degenerate"]) and row[key] < args.alpha for row in rows]
    )
    table = extract_clusters(flags, offset=ends[0], which=args.which)
    cluster_rows = [
        [i, c.start, c.end, c.size] for i, c in enumerate(table.clusters)
    ]
    ext = table_extension(args.format)
    cluster_name, ccdf_name = "clusters" + ext, "ccdf" + ext
    write_table(out / cluster_name, ["cluster_id", "start", "end", "size"],
                cluster_rows, args.format)
    if table.clusters:
        dist = size_distribution(table)
        ccdf_rows = [[s, f] for s, f in dist.ccdf.items()]
    else:
        ccdf_rows = []
    write_table(out / ccdf_name, ["size", "ccdf"], ccdf_rows, args.format)
    pct = percent_significant(flags)
    sys.stdout.write(f"percent_significant={pct:.17g}\n")
    params = {"which": args.which, "alpha": args.alpha, "format": args.format}
    _write_manifest(args, out, params, [cluster_name, ccdf_name])
    return 0


def cmd_plfit(args) -> int:
    out = _out_dir(args)
    rows = _read_table(Path(args.input))
    try:
        sizes = [int(row["size"]) for row in rows]
    except (KeyError, TypeError, ValueError) as exc:
        raise InputError(f"{args.input}: not a cluster table ({exc})") from None
    fit = fit_with_bootstrap(
        sizes,
        reps=args.reps,
        seed=args.seed,
        min_tail=args.min_tail,
        workers=_resolved_workers(args),
    )
    report = {
        "x_min": fit.x_min_hat,
        "alpha": fit.alpha_hat,
        "ks": fit.ks_distance,
        "n_tail": fit.n_tail,
        "n_total": fit.n_total,
        "bootstrap_p": fit.bootstrap_p,
        "reps": fit.reps,
        "seed": args.seed,
    }
    write_json(out / "plfit.json", report)
    sys.stdout.write(dumps_json(report))
    params = {"reps": args.reps, "seed": args.seed, "min_tail": args.min_tail}
    _write_manifest(args, out, params, ["plfit.json"])
    return 0


def cmd_predict(args) -> int:
    out = _out_dir(args)
    cfg = _window_config(args)
    returns = log_returns(_load_prices(args))
    result = roll(returns, cfg, workers=_resolved_workers(args))
    flags = significance_series(result, "linear", args.alpha)
    table = extract_clusters(flags, offset=cfg.n, which="linear")
    records = annotate_clusters(
        run_predictions(returns, result, args.alpha), table
    )
    ext = table_extension(args.format)
    pred_name = "predictions" + ext
    write_table(
        out / pred_name,
        ["target_index", "predicted", "actual_sign", "p_xx", "cluster_id", "hit"],
        [
            [r.target_index, r.predicted, r.actual_sign, r.p_xx_at_t,
             r.cluster_id, r.hit]
            for r in records
        ],
        args.format,
    )
    summary = hit_rate(records)
    payload = {
        "predictions_made": summary.predictions_made,
        "hits": summary.hits,
        "misses": summary.misses,
        "skipped_zero_actual": summary.skipped_zero_actual,
    }
    if summary.hit_rate is not None:
        payload["hit_rate"] = summary.hit_rate
    write_json(out / "hit_rate.json", payload)
    cum_name = "cumulative_hit_rate" + ext
    write_table(
        out / cum_name,
        ["target_index", "running_hit_rate"],
        cumulative_hit_rate(records),
        args.format,
    )
    by_cluster_name = "cluster_hit_rates" + ext
    write_table(
        out / by_cluster_name,
        ["cluster_id", "size", "decisions", "hit_rate"],
        [
            [c.cluster_id, c.size, c.decisions, c.hit_rate]
            for c in hit_rate_by_cluster(records, table)
        ],
        args.format,
    )
    params = _csv_ingest_params(args) | {
        "n": cfg.n,
        "L": cfg.L,
        "alpha": args.alpha,
        "ar_max_order": cfg.ar_max_order,
        "format": args.format,
    }
    artifacts = [pred_name, "hit_rate.json", cum_name, by_cluster_name]
    _write_manifest(args, out, params, artifacts)
    return 0


def cmd_simulate(args) -> int:
    out = _out_dir(args)
    coeffs = None
    if args.ar_coeffs is not None:
        try:
            coeffs = tuple(float(v) for v in args.ar_coeffs.split(","))
        except ValueError:
            raise InputError(f"bad --ar-coeffs {args.ar_coeffs!r}") from None
    spec = GeneratorSpec(
        kind=args.kind,
        length=args.length,
        seed=args.seed,
        ar_coefficients=coeffs,
        innovation_sd=args.innovation_sd,
        burn_in=args.burn_in,
    )
    values = generate(spec).returns
    if args.as_prices:
        values = np.exp(np.concatenate([[0.0], np.cumsum(values)]))
    name = "simulated" + table_extension(args.format)
    if args.format == "csv":
        # headerless single column so the pipeline can ingest it directly
        Path(out / name).write_text(
            "".join(f"{v:.17g}\n" for v in values)
        )
    else:
        write_json(out / name, [float(v) for v in values])
    params = {
        "kind": args.kind,
        "length": args.length,
        "seed": args.seed,
        "ar_coeffs": list(coeffs) if coeffs else None,
        "innovation_sd": args.innovation_sd,
        "burn_in": spec.resolved_burn_in(),
        "as_prices": args.as_prices,
        "format": args.format,
    }
    _write_manifest(args, out, params, [name])
    return 0


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.run(args)
    except InputError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except StatisticalError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 3
    except (NumericalError, FloatingPointError) as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 4
    except EpicorrError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2
    except OSError as exc:
        sys.stderr.write(f"error: {exc}\n")
        return 2


def entrypoint() -> None:
    sys.exit(main())
