"""
Synthetic portfolios with known truth, and the two simple forecasting models used
as reproducible reference points.

Known-rate portfolios: predictions are the true Poisson rates (possibly scaled by a
bias multiplier); graded portfolios draw the observations from the gamma-Poisson
mixture of a grade instead, so their variance is mu + f mu^gamma.
Panels hold daily counts per series, from which the naive 1-day-ahead and the
simple 28-day weekday-average models derive prediction/observation pairs.
"""
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from ForecastRating.ForecastMetrics import ACTUAL_COLUMN, ID_COLUMN, PairSet
from ForecastRating.GradeLadder import GradeLadder, grade_variance
from ForecastRating.RatingErrors import ConfigError, InsufficientHistory
from . import GlobalSettings

logger = logging.getLogger(__name__)

DAYS_PER_WEEK = 7
SIMPLE_WINDOW_DAYS = 28


@dataclass(frozen=True)
class GenSpec: # pylint: disable=too-many-instance-attributes
    """
    How to draw a synthetic portfolio. Rates are log-uniform on [rate_min, rate_max]
    unless explicit rates are given; grade None means Poisson observations.
    """

    seed: int = 0
    n_series: int = 1000
    rate_min: float = 0.05
    rate_max: float = 50.0
    rates: tuple = None
    grade: str = None
    bias_multiplier: float = 1.0
    ladder: GradeLadder = field(default_factory=GradeLadder.default)

    def __post_init__(self):
        problems = []
        if not isinstance(self.seed, (int, np.integer)) or self.seed < 0:
            problems.append("seed must be an integer >= 0")
        if self.n_series < 1:
            problems.append("n_series must be >= 1")
        if self.rates is None:
            if not 0 < self.rate_min <= self.rate_max:
                problems.append("rate bounds need 0 < rate_min <= rate_max")
            highest = self.rate_max
        else:
            rates = np.asarray(self.rates, dtype=np.float64)
            if rates.size == 0 or np.any(~(rates > 0)):
                problems.append("explicit rates must be positive")
            highest = float(np.max(rates)) if rates.size else 0.0
        if highest * max(self.bias_multiplier, 1.0) > GlobalSettings.MAX_RATE:
            problems.append("rates and predictions must not exceed " + str(GlobalSettings.MAX_RATE))
        if not self.bias_multiplier > 0:
            problems.append("bias_multiplier must be positive")
        if self.grade is not None and self.grade not in self.ladder.names:
            problems.append("unknown grade '" + str(self.grade) + "', expected one of "
                            + ", ".join(self.ladder.names))
        if problems:
            raise ConfigError(problems)

    def generator(self):
        return np.random.default_rng(self.seed)

    def draw_rates(self, rng):
        """n_series true rates; explicit rates are cycled to length n_series"""
        if self.rates is not None:
            return np.resize(np.asarray(self.rates, dtype=np.float64), self.n_series)
        low, high = np.log(self.rate_min), np.log(self.rate_max)
        return np.exp(rng.uniform(low, high, self.n_series))


@dataclass
class SeriesPanel:
    """
    Daily counts of many series: counts[i, t] is the count of series ids[i] on day t.
    groups maps a label name to one value per series.
    """

    ids: np.ndarray
    counts: np.ndarray
    groups: dict = field(default_factory=dict)
    weekdays: np.ndarray = None # weekday index 0..6 per day
    dates: np.ndarray = None

    def __post_init__(self):
        self.ids = np.asarray(self.ids).astype(str)
        self.counts = np.asarray(self.counts)
        if self.counts.ndim != 2 or self.counts.shape[0] != len(self.ids):
            raise ValueError("counts must have one row per series")
        if np.any(self.counts < 0) or np.any(self.counts != np.floor(self.counts)):
            raise ValueError("counts must be nonnegative integers")
        self.counts = self.counts.astype(np.int64)
        if self.weekdays is None:
            self.weekdays = np.arange(self.n_days) % DAYS_PER_WEEK
        self.weekdays = np.asarray(self.weekdays, dtype=np.int64)
        if len(self.weekdays) != self.n_days:
            raise ValueError("one weekday per day expected")

    @property
    def n_series(self):
        return self.counts.shape[0]

    @property
    def n_days(self):
        return self.counts.shape[1]

    def slice_days(self, start, stop):
        """The panel restricted to days start..stop-1"""
        dates = None if self.dates is None else self.dates[start:stop]
        return SeriesPanel(self.ids, self.counts[:, start:stop], dict(self.groups),
                           self.weekdays[start:stop], dates)

    def to_frame(self):
        """Long format: one row per series and day"""
        frame = pd.DataFrame({
            ID_COLUMN: np.repeat(self.ids, self.n_days),
            "day": np.tile(np.arange(self.n_days), self.n_series),
            "weekday": np.tile(self.weekdays, self.n_series),
            ACTUAL_COLUMN: self.counts.ravel(),
        })
        if self.dates is not None:
            frame["date"] = np.tile(self.dates, self.n_series)
        for name, values in self.groups.items():
            frame[name] = np.repeat(np.asarray(values), self.n_days)
        return frame

    def pairs(self, predictions, first_day):
        """
        PairSet of predictions[i, k] against the count of series i on day first_day + k
        """
        predictions = np.asarray(predictions, dtype=np.float64)
        n_days = predictions.shape[1]
        days = np.arange(first_day, first_day + n_days)
        ids = np.char.add(np.char.add(np.repeat(self.ids, n_days), "@"),
                          np.tile(days.astype(str), self.n_series))
        groups = {name: np.repeat(np.asarray(values), n_days) for name, values in self.groups.items()}
        return PairSet.from_arrays(predictions.ravel(), self.counts[:, first_day:first_day + n_days].ravel(),
                                   ids, groups)


def _series_ids(n):
    return np.char.add("s", np.arange(n).astype(str))


def _graded_counts(rng, mu, ladder, grade):
    """gamma-Poisson draws with mean mu and variance mu + f mu^gamma"""
    extra = grade_variance(ladder, grade, mu) - mu
    shape = mu ** 2 / extra
    scale = extra / mu
    return rng.poisson(rng.gamma(shape, scale))


def gen_poisson_pairs(spec):
    """
    One pair per series: prediction = true rate * bias_multiplier, actual ~ Poisson(true rate)
    """
    rng = spec.generator()
    rates = spec.draw_rates(rng)
    actuals = rng.poisson(rates)
    logger.info("drew %d Poisson pairs (seed %d)", spec.n_series, spec.seed)
    return PairSet.from_arrays(rates * spec.bias_multiplier, actuals, _series_ids(spec.n_series))


def gen_graded_pairs(spec):
    """
    One pair per series with observations overdispersed like spec.grade.
    The perfect grade (or no grade) falls back to gen_poisson_pairs.
    """
    if spec.grade is None or spec.ladder.strength(spec.grade) <= 0:
        return gen_poisson_pairs(spec)
    rng = spec.generator()
    rates = spec.draw_rates(rng)
    actuals = _graded_counts(rng, rates, spec.ladder, spec.grade)
    logger.info("drew %d pairs of grade %s (seed %d)", spec.n_series, spec.grade, spec.seed)
    return PairSet.from_arrays(rates * spec.bias_multiplier, actuals, _series_ids(spec.n_series))


def gen_poisson_panel(spec, n_days, weekday_amplitude=0.0):
    """
    A stationary panel of n_series x n_days counts. Each series keeps its rate, optionally
    modulated by a weekly sine of relative amplitude weekday_amplitude; with a grade the
    daily counts are overdispersed like that grade.
    """
    if n_days < 1:
        raise ConfigError(["n_days must be >= 1"])
    if not 0 <= weekday_amplitude < 1:
        raise ConfigError(["weekday_amplitude must be in [0, 1)"])
    rng = spec.generator()
    rates = spec.draw_rates(rng)
    weekdays = np.arange(n_days) % DAYS_PER_WEEK
    pattern = 1.0 + weekday_amplitude * np.sin(2.0 * np.pi * np.arange(DAYS_PER_WEEK) / DAYS_PER_WEEK)
    mu = rates[:, None] * pattern[weekdays][None, :]
    if spec.grade is None or spec.ladder.strength(spec.grade) <= 0:
        counts = rng.poisson(mu)
    else:
        counts = _graded_counts(rng, mu, spec.ladder, spec.grade)
    logger.info("drew a panel of %d series over %d days", spec.n_series, n_days)
    return SeriesPanel(_series_ids(spec.n_series), counts, {}, weekdays)


def naive_one_day_model(panel):
    """Yesterday's count as today's prediction, for every day that has a yesterday"""
    if panel.n_days < 2:
        raise InsufficientHistory("the naive model needs at least 2 days, got " + str(panel.n_days))
    return panel.pairs(panel.counts[:, :-1], 1)


def simple_28_day_model(panel, horizon_days=SIMPLE_WINDOW_DAYS):
    """
    Forecasts the last horizon_days days of the panel from the 28 days before them:
    the prediction for a day is the mean count of the same weekday in that window.
    """
    if horizon_days < 1:
        raise ConfigError(["horizon_days must be >= 1"])
    if panel.n_days < SIMPLE_WINDOW_DAYS + horizon_days:
        raise InsufficientHistory("the simple 28-day model needs %d days of history and horizon, got %d"
                                  % (SIMPLE_WINDOW_DAYS + horizon_days, panel.n_days))
    origin = panel.n_days - horizon_days
    window = panel.counts[:, origin - SIMPLE_WINDOW_DAYS:origin]
    window_weekdays = panel.weekdays[origin - SIMPLE_WINDOW_DAYS:origin]

    weekday_means = np.zeros((panel.n_series, DAYS_PER_WEEK))
    for weekday in range(DAYS_PER_WEEK):
        columns = window_weekdays == weekday
        if np.any(columns):
            weekday_means[:, weekday] = window[:, columns].mean(axis=1)
    predictions = weekday_means[:, panel.weekdays[origin:]]
    return panel.pairs(predictions, origin)
