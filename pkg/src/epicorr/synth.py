"""Seeded synthetic series: Gaussian white noise and stationary AR(p).

Randomness comes from numpy's PCG64 counter-based generator; normal draws
use numpy's ziggurat ``standard_normal``. Every consumer owns a sub-stream
derived from (master seed, stream index) via ``SeedSequence`` spawn keys,
so output is reproducible bit-for-bit for a given seed regardless of how
many consumers run or in what order.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.signal import lfilter

from .errors import InputError, NonStationaryCoefficients
from .ingest import ReturnSeries


def substream(seed: int, index: int) -> np.random.Generator:
    """Independent PCG64 stream number ``index`` under a master seed."""
    return np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(index,)))
    )


def _check_stationary(coefficients: tuple[float, ...]) -> None:
    # Characteristic polynomial 1 - a1 z - ... - ap z^p must have all roots
    # strictly outside the unit circle.
    coefs = np.asarray(coefficients, dtype=float)
    if coefs.size == 0 or not coefs.any():
        return
    roots = np.roots(np.concatenate([-coefs[::-1], [1.0]]))
    if roots.size and np.min(np.abs(roots)) <= 1.0:
        raise NonStationaryCoefficients(
            f"AR coefficients {tuple(coefs)} are not stationary"
        )


@dataclass(frozen=True)
class GeneratorSpec:
    """Recipe for one deterministic synthetic series."""

    kind: str
    length: int
    seed: int
    ar_coefficients: tuple[float, ...] | None = None
    innovation_sd: float = 1.0
    burn_in: int | None = None

    def __post_init__(self):
        if self.kind not in ("gaussian", "ar"):
            raise InputError(f"kind must be 'gaussian' or 'ar', got {self.kind!r}")
        if self.length < 1:
            raise InputError(f"length must be >= 1, got {self.length}")
        if not self.innovation_sd > 0.0:
            raise InputError(f"innovation_sd must be > 0, got {self.innovation_sd}")
        if self.burn_in is not None and self.burn_in < 0:
            raise InputError(f"burn_in must be >= 0, got {self.burn_in}")
        if self.kind == "ar":
            if self.ar_coefficients is None:
                raise InputError("kind='ar' requires ar_coefficients")
            coefs = tuple(float(a) for a in self.ar_coefficients)
            object.__setattr__(self, "ar_coefficients", coefs)
            _check_stationary(coefs)

    def resolved_burn_in(self) -> int:
        if self.burn_in is not None:
            return self.burn_in
        if self.kind == "ar":
            return max(100, 10 * len(self.ar_coefficients))
        return 0


def gaussian_series(spec: GeneratorSpec) -> ReturnSeries:
    """I.i.d. N(0, innovation_sd^2) draws; identical for identical spec."""
    if spec.kind != "gaussian":
        raise InputError(f"expected kind='gaussian', got {spec.kind!r}")
    rng = substream(spec.seed, 0)
    burn = spec.resolved_burn_in()
    values = spec.innovation_sd * rng.standard_normal(burn + spec.length)
    return ReturnSeries(values[burn:], label=f"gaussian(seed={spec.seed})")


def ar_series(spec: GeneratorSpec) -> ReturnSeries:
    """Stationary AR(p) recursion x(t) = sum_i a_i x(t-i) + e(t).

    Starts from zero state and discards the first burn_in samples
    (default 10x the order, at least 100) so the retained stretch is
    effectively a draw from the stationary distribution.
    """
    if spec.kind != "ar":
        raise InputError(f"expected kind='ar', got {spec.kind!r}")
    rng = substream(spec.seed, 0)
    burn = spec.resolved_burn_in()
    innovations = spec.innovation_sd * rng.standard_normal(burn + spec.length)
    denom = np.concatenate([[1.0], -np.asarray(spec.ar_coefficients, dtype=float)])
    values = lfilter([1.0], denom, innovations)
    label = f"ar{tuple(spec.ar_coefficients)}(seed={spec.seed})"
    return ReturnSeries(values[burn:], label=label)


def generate(spec: GeneratorSpec) -> ReturnSeries:
    """Dispatch on spec.kind."""
    if spec.kind == "gaussian":
        return gaussian_series(spec)
    return ar_series(spec)
