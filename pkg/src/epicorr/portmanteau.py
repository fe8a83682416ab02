"""Window-level dependence statistics.

Implements the windowed correlation/bicorrelation portmanteau tests in the
tradition of Hinich (1996): a window is standardized to zero mean and unit
standard deviation, the lag-aggregated squared sample correlations H_xx and
squared sample bicorrelations H_xxx are compared against their chi-square
nulls, and the bicorrelation test is run on the residuals of an AR(p)
prewhitening fit (Yule-Walker via Levinson-Durbin, order selected by the
Schwarz Bayesian criterion) so that surviving structure is attributable to
non-linearity.

All operations are pure functions; kernels accept any real-valued sequence
and do not verify that the caller standardized it.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    DegenerateWindow,
    InputError,
    InvalidDof,
    LagOrderViolation,
    LagOutOfRange,
    NumericalBreakdown,
)

_MACHEP = 2.220446049250313e-16
_LOG_VAR_FLOOR = 1e-300  # keeps BIC finite when a fit is numerically exact


@dataclass(frozen=True)
class WindowConfig:
    """Parameters of one rolling test: window length n, lag count L,
    rejection level alpha, and the AR order search ceiling."""

    n: int
    L: int = 2
    alpha: float = 0.05
    ar_max_order: int | None = None

    def __post_init__(self):
        if self.n < 4:
            raise InputError(f"window length must be >= 4, got {self.n}")
        if not 1 <= self.L < self.n:
            raise InputError(f"need 1 <= L < n, got L={self.L}, n={self.n}")
        if not 0.0 < self.alpha < 1.0:
            raise InputError(f"alpha must lie in (0, 1), got {self.alpha}")
        if self.ar_max_order is None:
            object.__setattr__(self, "ar_max_order", default_ar_max_order(self.n))
        # prewhitening must leave room for the L-lag bicorrelation test
        if not 1 <= self.ar_max_order <= self.n - self.L - 1:
            raise InputError(
                f"need 1 <= ar_max_order <= n - L - 1, got {self.ar_max_order}"
            )

    @property
    def b_equivalent(self) -> float:
        """Exponent b such that L = n**b (informational only)."""
        return math.log(self.L) / math.log(self.n)


def default_ar_max_order(n: int) -> int:
    """Order-search ceiling: n/4 capped at 24, at least 1."""
    return max(1, min(n // 4, 24))


@dataclass(frozen=True, eq=False)
class StandardizedWindow:
    """A window rescaled to zero mean and unit (divide-by-n) std deviation."""

    values: np.ndarray
    offset: int = 0


@dataclass(frozen=True)
class ARModel:
    """One rung of the Yule-Walker ladder.

    ``coefficients`` are (a_1, ..., a_p) in x(t) = sum_i a_i x(t-i) + e(t);
    the last coefficient is the order-p reflection coefficient.
    """

    order: int
    coefficients: tuple[float, ...]
    residual_variance: float
    bic: float


@dataclass(frozen=True)
class WindowResult:
    """Per-window test record; degenerate windows report p-values of 1."""

    end_index: int
    c_xx_lag1: float
    h_xx: float
    p_xx: float
    ar_order: int
    h_xxx: float
    p_xxx: float
    degenerate: bool


def _standardized_values(window) -> np.ndarray:
    x = np.asarray(window, dtype=float)
    n = x.size
    if n < 2:
        raise InputError(f"window must hold at least 2 values, got {n}")
    x = x - x.mean()
    sd = math.sqrt(float(x @ x) / n)
    if sd == 0.0:
        raise DegenerateWindow("constant window")
    return x / sd


def standardize(window, offset: int = 0) -> StandardizedWindow:
    """Rescale a window to zero mean and unit standard deviation.

    The divide-by-n convention is used so that sum(x**2) == n exactly, which
    the chi-square calibration of the H statistics assumes. Raises
    DegenerateWindow for a constant window.
    """
    return StandardizedWindow(_standardized_values(window), offset)


def sample_correlation(x, r: int) -> float:
    """Lag-r sample correlation (1/(n-r)) * sum_t x(t) x(t+r)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 1 <= r < n:
        raise LagOutOfRange(f"need 1 <= r < n, got r={r}, n={n}")
    return float(x[: n - r] @ x[r:]) / (n - r)


def sample_bicorrelation(x, r: int, s: int) -> float:
    """Lag-(r, s) sample bicorrelation (1/(n-s)) * sum_t x(t) x(t+r) x(t+s)."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if r >= s:
        raise LagOrderViolation(f"need r < s, got r={r}, s={s}")
    if not 0 < r or not s < n:
        raise LagOutOfRange(f"need 0 < r < s < n, got r={r}, s={s}, n={n}")
    m = n - s
    return float(np.sum(x[:m] * x[r : r + m] * x[s:])) / m


def h_xx(x, L: int) -> float:
    """Correlation portmanteau statistic sum_r (n-r) C_xx(r)^2, chi2(L) null."""
    x = np.asarray(x, dtype=float)
    n = x.size
    if not 1 <= L < n:
        raise LagOutOfRange(f"need 1 <= L < n, got L={L}, n={n}")
    total = 0.0
    for r in range(1, L + 1):
        c = sample_correlation(x, r)
        total += (n - r) * c * c
    return total


def h_xxx(x, L: int) -> float:
    """Bicorrelation portmanteau statistic, chi2((L-1)L/2) null.

    H_xxx = sum_{s=2..L} sum_{r=1..s-1} (n-s) C_xxx(r, s)^2.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if L < 2:
        raise LagOutOfRange(f"need L >= 2, got L={L}")
    if L >= n:
        raise LagOutOfRange(f"need L < n, got L={L}, n={n}")
    total = 0.0
    for s in range(2, L + 1):
        for r in range(1, s):
            c = sample_bicorrelation(x, r, s)
            total += (n - s) * c * c
    return total


def h_xxx_dof(L: int) -> int:
    """Degrees of freedom of the H_xxx null: one per (r, s) lag pair."""
    return (L - 1) * L // 2


# --- chi-square survival ------------------------------------------------------

def _gamma_p_series(a: float, x: float) -> float:
    # Lower regularized incomplete gamma P(a, x) by its power series.
    ax = a * math.log(x) - x - math.lgamma(a)
    if ax < -745.0:
        return 0.0
    term = 1.0
    total = 1.0
    rank = a
    while True:
        rank += 1.0
        term *= x / rank
        total += term
        if term <= total * _MACHEP:
            return total * math.exp(ax) / a


def _gamma_q_contfrac(a: float, x: float) -> float:
    # Upper regularized incomplete gamma Q(a, x) by continued fraction
    # (Legendre form, evaluated with the classic two-term recurrence).
    ax = a * math.log(x) - x - math.lgamma(a)
    if ax < -745.0:
        return 0.0
    ax = math.exp(ax)
    y = 1.0 - a
    z = x + y + 1.0
    c = 0.0
    pkm2, qkm2 = 1.0, x
    pkm1, qkm1 = x + 1.0, z * x
    ans = pkm1 / qkm1
    while True:
        c += 1.0
        y += 1.0
        z += 2.0
        yc = y * c
        pk = pkm1 * z - pkm2 * yc
        qk = qkm1 * z - qkm2 * yc
        if qk != 0.0:
            r = pk / qk
            t = abs((ans - r) / r)
            ans = r
        else:
            t = 1.0
        pkm2, pkm1 = pkm1, pk
        qkm2, qkm1 = qkm1, qk
        if abs(pk) > 1e292:
            pkm2 *= 1e-292
            pkm1 *= 1e-292
            qkm2 *= 1e-292
            qkm1 *= 1e-292
        if t <= _MACHEP:
            return ans * ax


def chi_square_sf(value: float, dof: int) -> float:
    """Chi-square survival function P(X >= value) for X ~ chi2(dof).

    Evaluated through the regularized incomplete gamma function: a power
    series for the lower tail when value < dof + 1 and a continued fraction
    for the upper tail otherwise, both iterated to machine precision.
    """
    if isinstance(dof, bool) or not isinstance(dof, (int, np.integer)) or dof < 1:
        raise InvalidDof(f"dof must be a positive integer, got {dof!r}")
    value = float(value)
    if not value >= 0.0:
        raise InputError(f"chi-square value must be >= 0, got {value}")
    a = 0.5 * dof
    x = 0.5 * value
    if x == 0.0:  # includes denormals that underflow when halved
        return 1.0
    if value < dof + 1:
        return min(1.0, max(0.0, 1.0 - _gamma_p_series(a, x)))
    return _gamma_q_contfrac(a, x)


# --- AR prewhitening ----------------------------------------------------------

def fit_ar_ladder(x, p_max: int) -> list[ARModel]:
    """Fit AR(1)..AR(p_max) by Levinson-Durbin on the biased autocovariances.

    One pass yields every order; the divide-by-n autocovariance estimator
    keeps the Toeplitz system positive semi-definite, so all reflection
    coefficients stay within [-1, 1] up to rounding. residual_variance is
    non-increasing in the order.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    if p_max < 1:
        raise InputError(f"p_max must be >= 1, got {p_max}")
    if p_max > n - 2:
        raise InputError(f"need p_max <= n - 2, got p_max={p_max}, n={n}")

    acov = np.empty(p_max + 1)
    for r in range(p_max + 1):
        acov[r] = float(x[: n - r] @ x[r:]) / n
    if acov[0] == 0.0:
        raise DegenerateWindow("zero lag-0 autocovariance")

    log_n = math.log(n)
    a = np.zeros(p_max)
    sigma2 = acov[0]
    models: list[ARModel] = []
    for p in range(1, p_max + 1):
        k = (acov[p] - float(a[: p - 1] @ acov[p - 1 : 0 : -1])) / sigma2
        if abs(k) > 1.0 + 1e-12:
            raise NumericalBreakdown(
                f"reflection coefficient {k!r} at order {p} exceeds 1"
            )
        if p > 1:
            a[: p - 1] = a[: p - 1] - k * a[p - 2 :: -1]
        a[p - 1] = k
        sigma2 = max(sigma2 * (1.0 - k * k), 0.0)
        bic = n * math.log(max(sigma2, _LOG_VAR_FLOOR)) + p * log_n
        models.append(ARModel(p, tuple(a[:p]), sigma2, bic))
    return models


def select_ar_order_bic(ladder: list[ARModel], n: int) -> int:
    """Pick the order minimizing n*ln(sigma2_p) + p*ln(n), ties to smaller p."""
    if not ladder:
        raise InputError("empty AR ladder")
    log_n = math.log(n)
    best_order = ladder[0].order
    best_bic = math.inf
    for model in ladder:
        bic = n * math.log(max(model.residual_variance, _LOG_VAR_FLOOR))
        bic += model.order * log_n
        if bic < best_bic:
            best_bic = bic
            best_order = model.order
    return best_order


def prewhiten(x, model: ARModel) -> np.ndarray:
    """Filter out the fitted AR component and re-standardize the residuals.

    e(t) = x(t) - sum_i a_i x(t-i), defined for t = p+1..n, then rescaled to
    zero mean and unit standard deviation so the bicorrelation null
    calibration applies. Output length is n - p.
    """
    x = np.asarray(x, dtype=float)
    n = x.size
    p = model.order
    if p >= n:
        raise InputError(f"model order {p} too large for window of length {n}")
    e = x[p:].copy()
    for i, a_i in enumerate(model.coefficients, start=1):
        e -= a_i * x[p - i : n - i]
    return _standardized_values(e)


def window_test(window, cfg: WindowConfig, end_index: int = 0) -> WindowResult:
    """Run the full two-stage test on one raw window of length cfg.n.

    The correlation test runs on the standardized window; the bicorrelation
    test runs on re-standardized AR residuals, with the residual count n - p
    replacing n in the H_xxx weights. Constant windows produce a degenerate
    record (statistics 0, p-values 1) instead of an error so that rolling
    output length stays deterministic.
    """
    window = np.asarray(window, dtype=float)
    if window.size != cfg.n:
        raise InputError(f"window length {window.size} != cfg.n {cfg.n}")
    try:
        x = _standardized_values(window)
        c1 = sample_correlation(x, 1)
        stat_xx = h_xx(x, cfg.L)
        p_xx = chi_square_sf(stat_xx, cfg.L)
        ladder = fit_ar_ladder(x, cfg.ar_max_order)
        order = select_ar_order_bic(ladder, cfg.n)
        resid = prewhiten(x, ladder[order - 1])
        stat_xxx = h_xxx(resid, cfg.L)
        p_xxx = chi_square_sf(stat_xxx, h_xxx_dof(cfg.L))
    except DegenerateWindow:
        return WindowResult(end_index, 0.0, 0.0, 1.0, 0, 0.0, 1.0, True)
    return WindowResult(end_index, c1, stat_xx, p_xx, order, stat_xxx, p_xxx, False)
