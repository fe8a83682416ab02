"""Episodic serial-dependence scanner for financial return series.

Rolls correlation/bicorrelation portmanteau tests across a return series,
extracts clusters of significant windows, fits discrete power laws to the
cluster-size distribution with bootstrap goodness of fit, and scores a
correlation-gated next-step sign predictor over the detected episodes.
"""

__version__ = "0.1.0"

from .clusters import Cluster, ClusterTable, SizeDistribution, extract_clusters, size_distribution
from .ingest import (
    PriceSeries,
    ReturnSeries,
    SummaryStats,
    log_returns,
    parse_price_csv,
    summary_stats,
)
from .portmanteau import (
    ARModel,
    StandardizedWindow,
    WindowConfig,
    WindowResult,
    chi_square_sf,
    fit_ar_ladder,
    h_xx,
    h_xxx,
    prewhiten,
    sample_bicorrelation,
    sample_correlation,
    select_ar_order_bic,
    standardize,
    window_test,
)
from .powerlaw import (
    PowerLawFit,
    bootstrap_pvalue,
    fit_alpha_discrete,
    fit_powerlaw,
    fit_with_bootstrap,
    hurwitz_zeta,
    ks_distance,
    sample_powerlaw,
)
from .predictor import (
    HitRateSummary,
    PredictionRecord,
    annotate_clusters,
    cumulative_hit_rate,
    hit_rate,
    hit_rate_by_cluster,
    predict_next,
    run_predictions,
)
from .rolling import RollingResult, percent_significant, roll, significance_series
from .synth import GeneratorSpec, ar_series, gaussian_series, generate, substream
