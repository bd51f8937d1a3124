"""
This Module defines the quality grades ("perfect" ... "unacceptable") and the
reference value of every metric under each grade.

A grade is defined at the reference rate 10 by a variance and a bias factor.
The variance is carried to other rates with
    variance(mu) = mu + f * mu^gamma,   f = (variance_at_10 - 10) / 10^gamma
and observations of that grade follow the negative binomial with that mean and
variance (Poisson for "perfect"). The forecast itself stays Poisson(mu): only
reality degrades, not the predictive distribution.
"""
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from RatingUtils import GlobalSettings
from RatingUtils.GlobalSettings import GradeTable
from . import CountDistributions as cd
from .ForecastMetrics import MetricKind
from .RatingErrors import ConfigError, EmptyInput, UnknownMetric

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Grade:
    """
    One rung of the quality ladder
    """

    name: str
    variance_at_10: float
    bias_factor: float


@dataclass(frozen=True)
class GradeLadder:
    """
    The ordered grades (best first) and the overdispersion exponent gamma.
    """

    grades: tuple
    gamma: float = GlobalSettings.GAMMA
    reference_rate: float = GlobalSettings.REFERENCE_RATE

    def __post_init__(self):
        problems = []
        if len(self.grades) < 2:
            problems.append("the ladder needs at least two grades")
        else:
            best = self.grades[0]
            if best.variance_at_10 != self.reference_rate:
                problems.append("the best grade must have variance_at_10 = " + str(self.reference_rate))
            if best.bias_factor != 1.0:
                problems.append("the best grade must have bias_factor = 1")
            for worse, better in zip(self.grades[1:], self.grades[:-1]):
                if not worse.variance_at_10 > better.variance_at_10:
                    problems.append("variance_at_10 must increase from " + better.name + " to " + worse.name)
                if not worse.bias_factor > better.bias_factor:
                    problems.append("bias_factor must increase from " + better.name + " to " + worse.name)
            if len({g.name for g in self.grades}) != len(self.grades):
                problems.append("grade names must be unique")
        if not self.gamma > 0:
            problems.append("gamma must be positive")
        if problems:
            raise ConfigError(problems)

    @classmethod
    def default(cls, gamma=GlobalSettings.GAMMA):
        return cls.from_table({name: {"variance_at_10": v, "bias_factor": b}
                               for name, v, b in zip(GradeTable.NAMES, GradeTable.VARIANCE_AT_10,
                                                     GradeTable.BIAS_FACTOR)}, gamma)

    @classmethod
    def from_table(cls, table, gamma=GlobalSettings.GAMMA):
        """
        table maps grade name -> {"variance_at_10": ..., "bias_factor": ...}, best grade first
        """
        grades = tuple(Grade(str(name), float(row["variance_at_10"]), float(row["bias_factor"]))
                       for name, row in table.items())
        return cls(grades, float(gamma))

    def to_table(self):
        return {g.name: {"variance_at_10": g.variance_at_10, "bias_factor": g.bias_factor}
                for g in self.grades}

    @property
    def names(self):
        return tuple(g.name for g in self.grades)

    @property
    def perfect(self):
        return self.grades[0]

    def grade(self, name):
        if isinstance(name, Grade):
            return name
        for g in self.grades:
            if g.name == name:
                return g
        raise KeyError("no grade named " + str(name))

    def strength(self, grade):
        """f in variance = mu + f mu^gamma, fixed by the variance at the reference rate"""
        grade = self.grade(grade)
        return (grade.variance_at_10 - self.reference_rate) / self.reference_rate ** self.gamma

    @property
    def anchor_scores(self):
        """Equally spaced scores, 100 for the best grade down to 0 for the worst"""
        last = len(self.grades) - 1
        return np.array([100.0 * (last - i) / last for i in range(len(self.grades))])

    @property
    def bias_factors(self):
        return np.array([g.bias_factor for g in self.grades])


@dataclass(frozen=True)
class ReferencePoint:
    """Expected metric value under one grade at one rate"""

    metric: MetricKind
    grade: str
    rate: float
    value: float


@dataclass(frozen=True)
class ReferenceCurve:
    """Expected metric value under one grade along a grid of rates"""

    metric: MetricKind
    grade: str
    rates: np.ndarray
    values: np.ndarray
    variances: np.ndarray

    def points(self):
        for rate, value in zip(self.rates, self.values):
            yield ReferencePoint(self.metric, self.grade, float(rate), float(value))


def grade_variance(ladder, grade, mu):
    """mu + f(grade) mu^gamma; exactly mu for the perfect grade"""
    mu = np.asarray(mu, dtype=np.float64)
    f = ladder.strength(grade)
    value = mu + f * mu ** ladder.gamma if f > 0 else mu
    return float(value) if np.ndim(value) == 0 else value


def _expected_abs_terms(kind, mu, grade, ladder, policy):
    """
    Expected per-pair term sum(|...|) of the absolute counterpart of kind, per rate,
    with observations drawn from the grade's distribution and forecast Poisson(mu).
    """
    mu = np.atleast_1d(np.asarray(mu, dtype=np.float64))
    variance = np.atleast_1d(grade_variance(ladder, grade, mu))
    overdispersed = ladder.strength(grade) > 0
    if kind.absolute is MetricKind.MAE:
        medians = cd.poisson_median(mu)
        if not overdispersed:
            return cd.poisson_abs_dev(mu, medians)
        return cd.nb_abs_dev(mu, variance, medians)
    if kind.absolute is MetricKind.MRPS:
        spread = cd.poisson_abs_diff_iid(mu)
        if not overdispersed:
            # E|X - S| with S an independent copy of X
            return 0.5 * spread
        return np.maximum(cd.cross_abs_dev(mu, mu, variance, policy) - 0.5 * spread, 0.0)
    raise UnknownMetric(kind.name + " has no reference expectation")


def expected_metric_under_grade(kind, mu, grade, ladder=None, policy=cd.DEFAULT_POLICY):
    """
    Expected value of the metric for predictions mu when observations follow the grade.
    Relative kinds divide by mu, the expected observation. For BIAS_FACTOR the grade's
    bias factor is returned. Accepts a scalar or an array of rates.
    """
    kind = MetricKind.parse(kind)
    ladder = ladder or GradeLadder.default()
    grade = ladder.grade(grade)
    if kind is MetricKind.BIAS_FACTOR:
        value = np.full(np.shape(mu), grade.bias_factor, dtype=np.float64)
    else:
        cd.check_rate(mu)
        value = _expected_abs_terms(kind, mu, grade, ladder, policy)
        if kind.is_relative:
            value = value / np.asarray(mu, dtype=np.float64)
        value = value.reshape(np.shape(mu))
    return float(value) if np.ndim(value) == 0 else value


def reference_curve(kind, grade, rate_grid, ladder=None, policy=cd.DEFAULT_POLICY):
    """Pointwise expected_metric_under_grade along an ascending positive grid"""
    rates = np.asarray(rate_grid, dtype=np.float64)
    if rates.ndim != 1 or len(rates) == 0 or np.any(rates <= 0) or np.any(np.diff(rates) <= 0):
        raise ValueError("rate grid must be positive and strictly ascending")
    ladder = ladder or GradeLadder.default()
    grade = ladder.grade(grade)
    kind = MetricKind.parse(kind)
    values = np.atleast_1d(expected_metric_under_grade(kind, rates, grade, ladder, policy))
    return ReferenceCurve(kind, grade.name, rates, values,
                          np.atleast_1d(grade_variance(ladder, grade, rates)))


def reference_curves(kinds, rate_grid, ladder=None, policy=cd.DEFAULT_POLICY):
    """A tidy table with one row per (metric, grade, rate)"""
    ladder = ladder or GradeLadder.default()
    frames = []
    for kind in (MetricKind.parse(k) for k in kinds):
        for grade in ladder.grades:
            curve = reference_curve(kind, grade, rate_grid, ladder, policy)
            frames.append(pd.DataFrame({"metric": kind.name, "grade": grade.name, "rate": curve.rates,
                                        "variance": curve.variances, "value": curve.values}))
    return pd.concat(frames, ignore_index=True)


def log_grid(low, high, points):
    """points log-spaced rates from low to high"""
    if not (0 < low <= high) or points < 1:
        raise ValueError("rate grid needs 0 < low <= high and at least one point")
    if high > GlobalSettings.MAX_RATE:
        raise ValueError("rate grid must end at or below " + str(GlobalSettings.MAX_RATE))
    if points == 1:
        return np.array([float(low)])
    return np.geomspace(low, high, int(points))


class ReferenceTable():
    """
    Per-pair reference expectations for a fixed set of predictions.
    Expectations are computed once per distinct rate and grade, lazily per metric,
    and then aggregated over any subset of the pairs (a bucket, a group, all).
    """

    def __init__(self, predictions, ladder=None, policy=cd.DEFAULT_POLICY):
        self.predictions = np.asarray(predictions, dtype=np.float64)
        if len(self.predictions) == 0:
            raise EmptyInput("no pairs")
        self.ladder = ladder or GradeLadder.default()
        self.policy = policy
        self.rates, self.inverse = np.unique(self.predictions, return_inverse=True)
        cd.check_rate(self.rates)
        self._cache = {}

    def per_pair(self, kind, grade):
        """Expected absolute per-pair term of kind (MAE or MRPS family) under grade"""
        kind = MetricKind.parse(kind).absolute
        grade = self.ladder.grade(grade)
        key = (kind, grade.name)
        if key not in self._cache:
            logger.debug("computing %s references for %s at %d distinct rates",
                         kind.name, grade.name, len(self.rates))
            self._cache[key] = _expected_abs_terms(kind, self.rates, grade, self.ladder, self.policy)
        return self._cache[key][self.inverse]

    def aggregate(self, kind, grade, selector=None):
        """
        The reference value of the metric over the selected pairs: the mean of the
        per-pair expectations for MAE/MRPS, their sum over the summed predictions for
        RMAE/RMRPS. BIAS_FACTOR returns the grade's bias factor.
        """
        kind = MetricKind.parse(kind)
        grade = self.ladder.grade(grade)
        if kind is MetricKind.BIAS_FACTOR:
            return grade.bias_factor
        terms = self.per_pair(kind, grade)
        predictions = self.predictions
        if selector is not None:
            terms = terms[selector]
            predictions = predictions[selector]
        if len(terms) == 0:
            raise EmptyInput("no pairs selected")
        if kind.is_relative:
            return float(np.sum(terms) / np.sum(predictions))
        return float(np.mean(terms))

    def grade_values(self, kind, selector=None):
        """{grade name: reference value} in ladder order"""
        return {g.name: self.aggregate(kind, g, selector) for g in self.ladder.grades}


def expected_bucket_reference(kind, bucket, grade, ladder=None, center_rate=False,
                              policy=cd.DEFAULT_POLICY):
    """
    Reference value of the metric over one bucket. By default every prediction is
    evaluated on its own; center_rate=True evaluates all of them at 10^R.
    """
    predictions = bucket.pairs.predictions
    if center_rate:
        predictions = np.full(len(predictions), bucket.center_rate)
    return ReferenceTable(predictions, ladder, policy).aggregate(kind, grade)


def expected_overall_reference(kind, pairs, grade, ladder=None, policy=cd.DEFAULT_POLICY):
    """Reference value of the metric over a whole (clipped) PairSet"""
    if len(pairs) == 0:
        raise EmptyInput("no pairs")
    return ReferenceTable(pairs.predictions, ladder, policy).aggregate(kind, grade)
