"""Time distributions for control-loop phases and environment dynamics.

Every distribution answers one question: given the current time, when is the
next occurrence? Interval distributions (:class:`Exponential`,
:class:`Weibull`, :class:`Fixed`, :class:`Reciprocal`) add a positive sampled
interval to ``now``; :class:`DiracComb` is phase-locked to ``start + n*period``;
:class:`Asap` returns ``now`` and is scheduled on the chained priority tier.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import brentq
from scipy.special import gammaln

from .kernel import TIME_EPS, RngStream

__all__ = [
    "TimeDistribution",
    "Exponential",
    "Weibull",
    "Fixed",
    "Reciprocal",
    "DiracComb",
    "Asap",
    "next_occurrence",
    "weibull_cv",
    "weibull_from_moments",
    "cycle_interval",
]

# Shape bracket for moment matching. CV(0.1) is about 428, CV(1e6) about 1.3e-6.
K_MIN = 0.1
K_MAX = 1e6


class TimeDistribution:
    asap = False

    def next_occurrence(self, now: float, rng: RngStream | None = None) -> float:
        raise NotImplementedError


class IntervalDistribution(TimeDistribution):
    """Next occurrence is ``now`` plus a strictly positive sampled interval."""

    def sample(self, rng: RngStream) -> float:
        raise NotImplementedError

    def sample_many(self, rng: RngStream, n: int) -> np.ndarray:
        return np.array([self.sample(rng) for _ in range(n)])

    def next_occurrence(self, now, rng=None):
        return now + self.sample(rng)

    @property
    def mean(self) -> float:
        raise NotImplementedError


def _positive(value, name):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ValueError(f"{name} must be a positive finite number, got {value!r}")
    return float(value)


@dataclass(frozen=True)
class Exponential(IntervalDistribution):
    rate: float

    def __post_init__(self):
        _positive(self.rate, "rate")

    def sample(self, rng):
        # 1 - u lies in (0, 1], so the log is finite; clamp keeps the interval > 0.
        return max(-math.log1p(-rng.uniform()) / self.rate, TIME_EPS)

    def sample_many(self, rng, n):
        return np.maximum(-np.log1p(-rng.gen.random(n)) / self.rate, TIME_EPS)

    @property
    def mean(self):
        return 1.0 / self.rate


@dataclass(frozen=True)
class Weibull(IntervalDistribution):
    shape: float
    scale: float

    def __post_init__(self):
        _positive(self.shape, "shape")
        _positive(self.scale, "scale")

    def sample(self, rng):
        u = rng.uniform()
        return max(self.scale * (-math.log1p(-u)) ** (1.0 / self.shape), TIME_EPS)

    def sample_many(self, rng, n):
        u = rng.gen.random(n)
        return np.maximum(self.scale * (-np.log1p(-u)) ** (1.0 / self.shape), TIME_EPS)

    @property
    def mean(self):
        return self.scale * math.exp(gammaln(1 + 1 / self.shape))

    @property
    def std(self):
        return self.mean * weibull_cv(self.shape)


@dataclass(frozen=True)
class Fixed(IntervalDistribution):
    """Degenerate interval distribution: always ``interval``."""

    interval: float

    def __post_init__(self):
        _positive(self.interval, "interval")

    def sample(self, rng=None):
        return self.interval

    def sample_many(self, rng, n):
        return np.full(n, self.interval)

    @property
    def mean(self):
        return self.interval


@dataclass(frozen=True)
class Reciprocal(IntervalDistribution):
    """Samples a rate from ``rate_dist`` and waits ``1 / rate``."""

    rate_dist: IntervalDistribution

    def sample(self, rng):
        return 1.0 / self.rate_dist.sample(rng)

    def sample_many(self, rng, n):
        return 1.0 / self.rate_dist.sample_many(rng, n)

    @property
    def mean(self):
        d = self.rate_dist
        if isinstance(d, Fixed):
            return 1.0 / d.interval
        if isinstance(d, Weibull):
            if d.shape <= 1:
                return math.inf
            return math.exp(gammaln(1 - 1 / d.shape)) / d.scale
        raise NotImplementedError(type(d).__name__)


@dataclass(frozen=True)
class DiracComb(TimeDistribution):
    start: float
    period: float

    def __post_init__(self):
        if not (math.isfinite(self.start) and self.start >= 0):
            raise ValueError(f"start must be finite and >= 0, got {self.start!r}")
        _positive(self.period, "period")

    def next_occurrence(self, now, rng=None):
        if now < self.start - TIME_EPS:
            return self.start
        n = math.floor((now - self.start) / self.period + TIME_EPS) + 1
        t = self.start + n * self.period
        # guard against float rounding landing on or before now
        while t <= now + TIME_EPS:
            n += 1
            t = self.start + n * self.period
        return t


@dataclass(frozen=True)
class Asap(TimeDistribution):
    asap = True

    def next_occurrence(self, now, rng=None):
        return now


def next_occurrence(d: TimeDistribution, now: float, rng: RngStream | None = None) -> float:
    if not math.isfinite(now):
        raise ValueError(f"now must be finite, got {now!r}")
    return d.next_occurrence(now, rng)


def weibull_cv(shape: float) -> float:
    """Coefficient of variation of a Weibull with the given shape."""
    log_ratio = gammaln(1 + 2 / shape) - 2 * gammaln(1 + 1 / shape)
    return math.sqrt(math.expm1(log_ratio))


def weibull_from_moments(mean: float, sd: float) -> IntervalDistribution:
    """Weibull with the requested mean and standard deviation.

    ``sd == 0`` yields :class:`Fixed` ``(mean)``. The shape is found by
    root-finding on the coefficient of variation, which is monotone
    decreasing in the shape; the scale then follows from the mean.
    """
    _positive(mean, "mean")
    if not (math.isfinite(sd) and sd >= 0):
        raise ValueError(f"sd must be finite and >= 0, got {sd!r}")
    if sd == 0:
        return Fixed(mean)
    cv = sd / mean
    if cv > weibull_cv(K_MIN):
        raise ValueError(
            f"coefficient of variation {cv:.4g} is outside the solvable range (<= {weibull_cv(K_MIN):.4g})")
    if cv < weibull_cv(K_MAX):
        # Gumbel limit: sd(log X) = pi / (sqrt(6) k) and CV ~ sd(log X) for tiny spreads
        k = math.pi / (math.sqrt(6) * cv)
    else:
        k = brentq(lambda kk: weibull_cv(kk) - cv, K_MIN, K_MAX, xtol=1e-14, rtol=1e-14, maxiter=500)
    scale = mean / math.exp(gammaln(1 + 1 / k))
    return Weibull(k, scale)


def cycle_interval(freq: float, drift: float, reading: str = "frequency") -> IntervalDistribution:
    """Inter-cycle interval for an agent running at ``freq`` Hz with relative drift.

    ``reading="frequency"`` samples a frequency from Weibull(mean f, sd f*drift)
    and waits its reciprocal; ``reading="interval"`` samples the interval
    directly from Weibull(mean 1/f, sd drift/f).
    """
    _positive(freq, "freq")
    if reading == "frequency":
        return Reciprocal(weibull_from_moments(freq, freq * drift))
    if reading == "interval":
        return weibull_from_moments(1.0 / freq, drift / freq)
    raise ValueError(f"unknown drift reading {reading!r}; expected 'frequency' or 'interval'")
