"""Discrete power-law fitting for cluster-size distributions.

Follows the Clauset-Shalizi-Newman recipe: the exponent is the discrete
maximum-likelihood estimate p(x) = x^(-alpha) / zeta(alpha, x_min), the
lower bound x_min is the candidate minimizing the Kolmogorov-Smirnov
distance between the tail and its fitted model, and goodness of fit comes
from a semi-parametric bootstrap that redraws tail samples from the fitted
law, body samples from the empirical data, and refits everything on each
replicate.

The log-likelihood is strictly concave in alpha (log zeta is convex), so a
fixed-iteration golden-section search on (1.01, 6] finds the unique
maximum; hitting the boundary of that interval is reported as an error,
never clamped.
"""

from __future__ import annotations

import concurrent.futures
import math
from dataclasses import dataclass, replace

import numpy as np
from scipy.special import zeta as _zeta

from .errors import (
    AlphaOutOfRange,
    DegenerateSample,
    EmptyTail,
    InputError,
    InsufficientData,
    NoInteriorMaximum,
    NumericalBreakdown,
)
from .synth import substream

ALPHA_SEARCH_LO = 1.01
ALPHA_SEARCH_HI = 6.0
_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0
# (hi - lo) * _GOLDEN**k <= 1e-6  =>  k = 33 for the (1.01, 6] interval
_GOLDEN_ITERS = 33
_BOUNDARY_PROBE = 1e-4
_TABLE_CAP = 1 << 22


@dataclass(frozen=True)
class PowerLawFit:
    """Fitted lower bound and exponent with the KS distance of the tail."""

    x_min_hat: int
    alpha_hat: float
    ks_distance: float
    n_tail: int
    n_total: int
    bootstrap_p: float | None = None
    reps: int = 0


def hurwitz_zeta(alpha, x_min=1):
    """Hurwitz zeta sum_{k>=0} (k + x_min)^(-alpha), the discrete power-law
    normalizer.

    Delegates to scipy's Cephes routine (direct summation with an
    Euler-Maclaurin tail), accurate to ~1e-14 relative over the supported
    range alpha > 1, x_min >= 1. Broadcasts over array arguments.
    """
    alpha_arr = np.asarray(alpha, dtype=float)
    x_arr = np.asarray(x_min, dtype=float)
    if not np.all(alpha_arr > 1.0):
        raise AlphaOutOfRange(f"alpha must exceed 1, got {alpha!r}")
    if not np.all(x_arr >= 1.0):
        raise InputError(f"x_min must be >= 1, got {x_min!r}")
    out = _zeta(alpha_arr, x_arr)
    if np.isscalar(alpha) and np.isscalar(x_min):
        return float(out)
    return out


def continuous_alpha_estimate(samples, x_min: int) -> float:
    """Continuous-approximation exponent 1 + n / sum(ln(x / (x_min - 1/2))).

    Cheap starting guess only; the discrete MLE below is the estimator.
    """
    x = np.asarray(samples, dtype=float)
    return 1.0 + x.size / float(np.sum(np.log(x / (x_min - 0.5))))


def _alpha_mle_grid(n_tail, log_sums, x_mins):
    """Vectorized golden-section MLE of alpha for several (x_min, tail) pairs.

    Returns (alpha_hat, boundary) arrays; boundary marks pairs whose
    likelihood is maximized at an endpoint of the search interval.
    """
    n_tail = np.asarray(n_tail, dtype=float)
    log_sums = np.asarray(log_sums, dtype=float)
    x_mins = np.asarray(x_mins, dtype=float)

    def neg_loglik(alpha):
        return n_tail * np.log(_zeta(alpha, x_mins)) + alpha * log_sums

    shape = np.broadcast_shapes(n_tail.shape, log_sums.shape, x_mins.shape)
    lo = np.full(shape, ALPHA_SEARCH_LO)
    hi = np.full(shape, ALPHA_SEARCH_HI)
    # concavity: an endpoint is the maximum iff the likelihood does not
    # improve a small step into the interior
    boundary = neg_loglik(lo) <= neg_loglik(lo + _BOUNDARY_PROBE)
    boundary |= neg_loglik(hi) <= neg_loglik(hi - _BOUNDARY_PROBE)

    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1 = neg_loglik(x1)
    f2 = neg_loglik(x2)
    for _ in range(_GOLDEN_ITERS):
        keep_left = f1 < f2
        lo = np.where(keep_left, lo, x1)
        hi = np.where(keep_left, x2, hi)
        fresh = np.where(keep_left, hi - _GOLDEN * (hi - lo), lo + _GOLDEN * (hi - lo))
        f_fresh = neg_loglik(fresh)
        x1, x2 = (
            np.where(keep_left, fresh, x2),
            np.where(keep_left, x1, fresh),
        )
        f1, f2 = (
            np.where(keep_left, f_fresh, f2),
            np.where(keep_left, f1, f_fresh),
        )
    return (lo + hi) / 2.0, boundary


def fit_alpha_discrete(samples, x_min: int) -> float:
    """Discrete power-law MLE of alpha for a fixed lower bound.

    Maximizes -n ln zeta(alpha, x_min) - alpha sum(ln x) over the interval
    (1.01, 6] by golden-section search (tolerance 1e-6). Raises
    NoInteriorMaximum when the optimum sits on the interval boundary and
    DegenerateSample when every sample equals x_min's floor value.
    """
    x = np.asarray(samples, dtype=float)
    if x.size < 2:
        raise InsufficientData(f"need at least 2 samples, got {x.size}")
    if np.any(x < x_min):
        raise InputError("every sample must be >= x_min")
    if np.all(x == x[0]):
        raise DegenerateSample("all samples equal; alpha unidentifiable")
    alpha, boundary = _alpha_mle_grid(
        np.array([x.size]), np.array([np.sum(np.log(x))]), np.array([x_min])
    )
    if bool(boundary[0]):
        raise NoInteriorMaximum(
            f"likelihood maximized at the boundary of "
            f"({ALPHA_SEARCH_LO}, {ALPHA_SEARCH_HI}]"
        )
    return float(alpha[0])


def ks_distance(samples, x_min: int, alpha: float) -> float:
    """Max |empirical CDF - model CDF| over the observed support >= x_min,
    with model CDF(x) = 1 - zeta(alpha, x+1) / zeta(alpha, x_min)."""
    if not alpha > 1.0:
        raise AlphaOutOfRange(f"alpha must exceed 1, got {alpha}")
    x = np.asarray(samples)
    tail = np.sort(x[x >= x_min])
    if tail.size == 0:
        raise EmptyTail(f"no samples at or above x_min={x_min}")
    values, counts = np.unique(tail, return_counts=True)
    empirical = np.cumsum(counts) / tail.size
    model = 1.0 - _zeta(alpha, values.astype(float) + 1.0) / _zeta(alpha, float(x_min))
    return float(np.abs(empirical - model).max())


def fit_powerlaw(samples, min_tail: int = 10) -> PowerLawFit:
    """Joint (x_min, alpha) fit by KS minimization over candidate bounds.

    Every distinct sample value whose tail holds at least ``min_tail``
    samples (and more than one distinct value) is a candidate x_min; each
    candidate gets its own MLE exponent, and the candidate with the
    smallest tail KS distance wins, ties going to the smaller bound.
    """
    x = np.sort(np.asarray(samples, dtype=int))
    if x.size < 10 or np.unique(x).size < 2:
        raise InsufficientData(
            f"need >= 10 samples with >= 2 distinct values, got {x.size}"
        )
    if np.any(x < 1):
        raise InputError("samples must be positive integers")
    n = x.size
    distinct, first_idx = np.unique(x, return_index=True)
    first_ext = np.append(first_idx, n)
    tail_counts = n - first_idx
    # candidate needs min_tail samples and a second distinct value above it
    usable = (tail_counts >= max(2, min_tail)) & (distinct < distinct[-1])
    cand_pos = np.nonzero(usable)[0]
    if cand_pos.size == 0:
        raise InsufficientData(
            f"no x_min candidate retains {min_tail} tail samples"
        )

    logs = np.log(x.astype(float))
    suffix_logsum = np.concatenate([np.cumsum(logs[::-1])[::-1], [0.0]])
    cand_xmin = distinct[cand_pos]
    cand_ntail = tail_counts[cand_pos]
    cand_logsum = suffix_logsum[first_idx[cand_pos]]
    alphas, boundary = _alpha_mle_grid(cand_ntail, cand_logsum, cand_xmin)
    if np.all(boundary):
        raise NoInteriorMaximum(
            "every x_min candidate pushed alpha to the search boundary"
        )

    best = None
    for j, pos in enumerate(cand_pos):
        if boundary[j]:
            continue
        alpha = float(alphas[j])
        n_tail = int(cand_ntail[j])
        values = distinct[pos:].astype(float)
        empirical = (first_ext[pos + 1 :] - first_idx[pos]) / n_tail
        model = 1.0 - _zeta(alpha, values + 1.0) / _zeta(alpha, float(cand_xmin[j]))
        dist = float(np.abs(empirical - model).max())
        if best is None or dist < best[0]:
            best = (dist, int(cand_xmin[j]), alpha, n_tail)
    dist, x_min_hat, alpha_hat, n_tail = best
    return PowerLawFit(x_min_hat, alpha_hat, dist, n_tail, n)


def sample_powerlaw(alpha: float, x_min: int, count: int, rng) -> np.ndarray:
    """Exact inverse-transform draws from the discrete power law.

    The CDF is accumulated over an integer support table that doubles until
    it covers the largest uniform draw, and each draw is placed by binary
    search; the rare draw beyond the table cap falls back to a per-draw
    doubling-and-bisection walk on the zeta CCDF. Identical (rng state,
    count) give identical output.
    """
    if not alpha > 1.0:
        raise AlphaOutOfRange(f"alpha must exceed 1, got {alpha}")
    if x_min < 1:
        raise InputError(f"x_min must be >= 1, got {x_min}")
    if count < 0:
        raise InputError(f"count must be >= 0, got {count}")
    if count == 0:
        return np.empty(0, dtype=int)
    u = rng.random(count)
    z0 = _zeta(alpha, float(x_min))
    u_max = u.max()
    size = 64
    while True:
        upper = np.arange(x_min + 1, x_min + size + 1, dtype=float)
        cdf = np.maximum.accumulate(1.0 - _zeta(alpha, upper) / z0)
        if cdf[-1] > u_max or size >= _TABLE_CAP:
            break
        size *= 2
    draws = x_min + np.searchsorted(cdf, u, side="right")
    overflow = u >= cdf[-1]
    if np.any(overflow):
        for i in np.nonzero(overflow)[0]:
            draws[i] = _invert_ccdf(alpha, x_min, z0, float(u[i]), x_min + size)
    return draws


def _invert_ccdf(alpha, x_min, z0, u, start):
    # smallest x with CDF(x) >= u, i.e. zeta(alpha, x+1) <= (1-u) * z0
    target = (1.0 - u) * z0
    lo = start
    hi = 2 * lo
    while _zeta(alpha, float(hi + 1)) > target:
        lo = hi
        hi *= 2
        if hi > 1 << 62:
            return hi
    while hi - lo > 1:
        mid = (lo + hi) // 2
        if _zeta(alpha, float(mid + 1)) <= target:
            hi = mid
        else:
            lo = mid
    return hi


def _bootstrap_rep(args) -> float:
    (body, n, p_tail, alpha, x_min, min_tail, seed, rep) = args
    rng = substream(seed, rep)
    for _ in range(100):
        take_tail = rng.random(n) < p_tail
        k = int(np.count_nonzero(take_tail))
        synth = np.empty(n, dtype=int)
        synth[take_tail] = sample_powerlaw(alpha, x_min, k, rng)
        if k < n:
            synth[~take_tail] = rng.choice(body, size=n - k, replace=True)
        try:
            refit = fit_powerlaw(synth, min_tail=min_tail)
        except (InsufficientData, NoInteriorMaximum):
            continue
        return refit.ks_distance
    raise NumericalBreakdown("bootstrap replicate failed to produce a fit")


def bootstrap_pvalue(
    samples,
    fit: PowerLawFit,
    reps: int,
    seed: int,
    min_tail: int = 10,
    workers: int = 1,
) -> float:
    """Semi-parametric bootstrap p-value for the power-law hypothesis.

    Each replicate rebuilds a dataset of the original size (tail samples
    from the fitted law with probability n_tail/n, body samples resampled
    from the empirical data below x_min_hat), refits both x_min and alpha,
    and contributes its KS distance; p is the fraction of replicate
    distances at or above the observed one. Replicate ``rep`` draws from
    the (seed, rep) sub-stream, so p is identical under any scheduling.
    """
    if reps < 100:
        raise InputError(f"need reps >= 100, got {reps}")
    x = np.asarray(samples, dtype=int)
    n = x.size
    body = x[x < fit.x_min_hat]
    p_tail = fit.n_tail / n
    tasks = [
        (body, n, p_tail, fit.alpha_hat, fit.x_min_hat, min_tail, seed, rep)
        for rep in range(reps)
    ]
    if workers > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=workers) as pool:
            ks_values = list(pool.map(_bootstrap_rep, tasks, chunksize=32))
    else:
        ks_values = [_bootstrap_rep(t) for t in tasks]
    exceed = sum(1 for v in ks_values if v >= fit.ks_distance)
    return exceed / reps


def fit_with_bootstrap(
    samples, reps: int, seed: int, min_tail: int = 10, workers: int = 1
) -> PowerLawFit:
    """Convenience wrapper: fit, then attach the bootstrap p-value."""
    fit = fit_powerlaw(samples, min_tail=min_tail)
    p = bootstrap_pvalue(samples, fit, reps, seed, min_tail=min_tail, workers=workers)
    return replace(fit, bootstrap_p=p, reps=reps)
