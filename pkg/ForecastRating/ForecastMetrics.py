"""
This Module handles the forecast metrics: the per-pair error terms, their aggregation
to MAE, RMAE, MRPS, RMRPS, and the bias factor.

A forecast is a predicted Poisson rate r_j, its observation is a count s_j.
    MAE   = mean |s_j - median(Poisson(r_j))|
    RMAE  = sum |s_j - median(Poisson(r_j))| / sum s_j
    MRPS  = mean RPS(s_j, r_j),  RPS = E|X - s_j| - 1/2 E|X - Y|, X, Y ~ Poisson(r_j)
    RMRPS = sum RPS(s_j, r_j) / sum s_j
    bias factor = sum r_j / sum s_j
"""
# -*- coding: utf-8 -*-

import enum
import logging
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from RatingUtils import GlobalSettings
from . import CountDistributions as cd
from .RatingErrors import (EmptyInput, NegativeValue, NonIntegerActual, SchemaMismatch,
                           UnknownMetric, ZeroActualTotal)

logger = logging.getLogger(__name__)

ID_COLUMN = "id"
PREDICTION_COLUMN = "prediction"
ACTUAL_COLUMN = "actual"
REQUIRED_COLUMNS = (ID_COLUMN, PREDICTION_COLUMN, ACTUAL_COLUMN)


class MetricKind(enum.Enum):
    """
    The closed set of metrics the rating understands
    """

    MAE = "MAE"
    RMAE = "RMAE"
    MRPS = "MRPS"
    RMRPS = "RMRPS"
    BIAS_FACTOR = "BIAS_FACTOR"

    @property
    def is_relative(self):
        return self in (MetricKind.RMAE, MetricKind.RMRPS)

    @property
    def is_error_metric(self):
        return self is not MetricKind.BIAS_FACTOR

    @property
    def absolute(self):
        """MAE for RMAE, MRPS for RMRPS, the kind itself otherwise"""
        return {MetricKind.RMAE: MetricKind.MAE, MetricKind.RMRPS: MetricKind.MRPS}.get(self, self)

    @classmethod
    def parse(cls, name):
        if isinstance(name, MetricKind):
            return name
        try:
            return cls[str(name).strip().upper()]
        except KeyError:
            raise UnknownMetric("unknown metric '" + str(name) + "', expected one of "
                                + ", ".join(kind.name for kind in cls))


@dataclass(frozen=True)
class PredictionPair:
    """
    One forecasted rate with its observed count and group labels
    """

    id: str
    prediction: float
    actual: int
    groups: dict = field(default_factory=dict)

    def __post_init__(self):
        if not np.isfinite(self.prediction) or self.prediction < 0:
            raise NegativeValue("prediction of pair " + str(self.id) + " must be finite and >= 0")
        if self.actual < 0:
            raise NegativeValue("actual of pair " + str(self.id) + " must be >= 0")
        if float(self.actual) != int(self.actual):
            raise NonIntegerActual("actual of pair " + str(self.id) + " is not an integer")


@dataclass(frozen=True)
class MetricValue:
    """
    An aggregated metric together with the totals it was computed from.
    Values of disjoint pair sets combine exactly via combine().
    """

    kind: MetricKind
    value: float
    n: int
    total_actual: int
    total_prediction: float

    def combine(self, other):
        """The metric value of the union of both underlying pair sets"""
        if other.kind is not self.kind:
            raise ValueError("cannot combine " + self.kind.name + " with " + other.kind.name)
        n = self.n + other.n
        total_actual = self.total_actual + other.total_actual
        total_prediction = self.total_prediction + other.total_prediction
        if self.kind is MetricKind.BIAS_FACTOR:
            value = total_prediction / total_actual
        elif self.kind.is_relative:
            value = (self.value * self.total_actual + other.value * other.total_actual) / total_actual
        else:
            value = (self.value * self.n + other.value * other.n) / n
        return MetricValue(self.kind, value, n, total_actual, total_prediction)


def _validate_values(predictions, actuals, lines=None):
    predictions = np.asarray(predictions, dtype=np.float64)
    actuals_raw = np.asarray(actuals, dtype=np.float64)
    bad = ~np.isfinite(predictions) | (predictions < 0) | ~np.isfinite(actuals_raw) | (actuals_raw < 0)
    if np.any(bad):
        raise NegativeValue("predictions and actuals must be finite and nonnegative"
                            + _line_hint(bad, lines))
    fractional = actuals_raw != np.floor(actuals_raw)
    if np.any(fractional):
        raise NonIntegerActual("actuals must be integer counts" + _line_hint(fractional, lines))
    return predictions, actuals_raw.astype(np.int64)


def _line_hint(mask, lines):
    idx = np.flatnonzero(mask)
    where = idx if lines is None else np.asarray(lines)[idx]
    shown = ", ".join(str(int(i)) for i in where[:20])
    return " (" + ("lines " if lines is not None else "rows ") + shown + ("..." if len(idx) > 20 else "") + ")"


class PairSet():
    """
    A columnar collection of PredictionPairs backed by a pandas DataFrame with
    columns id, prediction, actual and any number of group label columns.
    """

    def __init__(self, frame, group_columns=(), lines=None):
        missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
        missing += [c for c in group_columns if c not in frame.columns]
        if missing:
            raise SchemaMismatch("pair table does not match the expected schema", missing=missing)

        predictions, actuals = _validate_values(frame[PREDICTION_COLUMN].to_numpy(),
                                                frame[ACTUAL_COLUMN].to_numpy(), lines)
        columns = list(REQUIRED_COLUMNS) + list(group_columns)
        self.frame = frame[columns].copy()
        self.frame[ID_COLUMN] = self.frame[ID_COLUMN].astype(str)
        self.frame[PREDICTION_COLUMN] = predictions
        self.frame[ACTUAL_COLUMN] = actuals
        self.frame.reset_index(drop=True, inplace=True)
        self.group_columns = tuple(group_columns)

    @classmethod
    def from_arrays(cls, predictions, actuals, ids=None, groups=None):
        """
        groups maps a label name to an array (or a scalar) of label values
        """
        predictions = np.asarray(predictions, dtype=np.float64)
        if ids is None:
            ids = np.arange(len(predictions)).astype(str)
        frame = pd.DataFrame({ID_COLUMN: ids, PREDICTION_COLUMN: predictions,
                              ACTUAL_COLUMN: np.asarray(actuals)})
        groups = groups or {}
        for name, values in groups.items():
            frame[name] = values
        return cls(frame, tuple(groups.keys()))

    @classmethod
    def from_records(cls, pairs):
        pairs = list(pairs)
        group_columns = []
        for pair in pairs:
            for name in pair.groups:
                if name not in group_columns:
                    group_columns.append(name)
        frame = pd.DataFrame({
            ID_COLUMN: [p.id for p in pairs],
            PREDICTION_COLUMN: np.array([p.prediction for p in pairs], dtype=np.float64),
            ACTUAL_COLUMN: np.array([p.actual for p in pairs], dtype=np.int64),
        })
        for name in group_columns:
            frame[name] = [p.groups.get(name) for p in pairs]
        return cls(frame, tuple(group_columns))

    def __len__(self):
        return len(self.frame)

    def __iter__(self):
        for row in self.frame.itertuples(index=False):
            values = row._asdict()
            groups = {name: values[name] for name in self.group_columns}
            yield PredictionPair(values[ID_COLUMN], float(values[PREDICTION_COLUMN]),
                                 int(values[ACTUAL_COLUMN]), groups)

    @property
    def ids(self):
        return self.frame[ID_COLUMN].to_numpy()

    @property
    def predictions(self):
        return self.frame[PREDICTION_COLUMN].to_numpy(dtype=np.float64)

    @property
    def actuals(self):
        return self.frame[ACTUAL_COLUMN].to_numpy(dtype=np.int64)

    @property
    def total_prediction(self):
        return float(np.sum(self.predictions))

    @property
    def total_actual(self):
        return int(np.sum(self.actuals))

    def subset(self, selector):
        """A new PairSet of the rows picked by a boolean mask or index array"""
        return PairSet(self.frame.iloc[np.asarray(selector)] if np.asarray(selector).dtype != bool
                       else self.frame[np.asarray(selector)], self.group_columns)

    def clipped(self, floor=GlobalSettings.CLIP_FLOOR):
        """A copy with every prediction below floor raised to floor"""
        low = self.predictions < floor
        if np.any(low):
            logger.info("clipping %d predictions below %g", int(np.sum(low)), floor)
        frame = self.frame.copy()
        frame[PREDICTION_COLUMN] = np.maximum(self.predictions, floor)
        return PairSet(frame, self.group_columns)

    def concat(self, *others):
        group_columns = list(self.group_columns)
        for other in others:
            group_columns += [c for c in other.group_columns if c not in group_columns]
        frame = pd.concat([self.frame] + [o.frame for o in others], ignore_index=True, sort=False)
        return PairSet(frame, tuple(group_columns))

    def group_by(self, columns):
        """
        Yields (label tuple, PairSet) per distinct combination of the given columns.
        With no columns the whole set is yielded once under the label ("all",).
        Every pair lands in exactly one group; a missing label reads as "".
        """
        columns = list(columns)
        if not columns:
            yield ("all",), self
            return
        missing = [c for c in columns if c not in self.frame.columns]
        if missing:
            raise SchemaMismatch("unknown group-by columns", missing=missing)
        for key, frame in self.frame.groupby(columns, sort=True, dropna=False):
            key = key if isinstance(key, tuple) else (key,)
            yield tuple("" if pd.isna(k) else str(k) for k in key), PairSet(frame, self.group_columns)


def _as_counts(actual):
    actual = np.asarray(actual, dtype=np.float64)
    if np.any(actual < 0):
        raise NegativeValue("actuals must be >= 0")
    if np.any(actual != np.floor(actual)):
        raise NonIntegerActual("actuals must be integer counts")
    return actual


def _scalar_or_array(value):
    return float(value) if np.ndim(value) == 0 else value


def mae_term(prediction, actual, clip=GlobalSettings.CLIP_FLOOR):
    """
    |s - median(Poisson(r))|, with the prediction floored at clip.
    Works elementwise on arrays.
    """
    rate = np.maximum(np.asarray(prediction, dtype=np.float64), clip)
    counts = _as_counts(actual)
    return _scalar_or_array(np.abs(counts - cd.poisson_median(rate)))


def rps(prediction, actual, clip=GlobalSettings.CLIP_FLOOR):
    """
    Discrete ranked probability score of the Poisson(r) forecast against count s:
    E|X - s| - 1/2 E|X - Y|. The second term is evaluated once per distinct rate.
    """
    rate = np.maximum(np.asarray(prediction, dtype=np.float64), clip)
    counts = _as_counts(actual)
    rate, counts = np.broadcast_arrays(rate, counts)
    unique_rates, inverse = np.unique(rate, return_inverse=True)
    spread = cd.poisson_abs_diff_iid(unique_rates)[inverse.reshape(rate.shape)]
    value = np.maximum(cd.poisson_abs_dev(rate, counts) - 0.5 * spread, 0.0)
    return _scalar_or_array(value)


def metric_terms(pairs, kind, clip=GlobalSettings.CLIP_FLOOR):
    """Per-pair terms whose sum enters the metric: mae_term for (R)MAE, rps for (R)MRPS"""
    kind = MetricKind.parse(kind)
    if kind in (MetricKind.MAE, MetricKind.RMAE):
        return np.atleast_1d(mae_term(pairs.predictions, pairs.actuals, clip))
    if kind in (MetricKind.MRPS, MetricKind.RMRPS):
        return np.atleast_1d(rps(pairs.predictions, pairs.actuals, clip))
    raise UnknownMetric(kind.name + " has no per-pair terms")


def aggregate(pairs, kind, clip=GlobalSettings.CLIP_FLOOR, terms=None):
    """
    Aggregates a PairSet into one MetricValue.
    Raises EmptyInput on no pairs and ZeroActualTotal for relative kinds and the
    bias factor when the actuals sum to zero.
    """
    kind = MetricKind.parse(kind)
    n = len(pairs)
    if n == 0:
        raise EmptyInput("no pairs")
    predictions = np.maximum(pairs.predictions, clip)
    total_prediction = float(np.sum(predictions))
    total_actual = int(np.sum(pairs.actuals))
    if (kind.is_relative or kind is MetricKind.BIAS_FACTOR) and total_actual == 0:
        raise ZeroActualTotal(kind.name + " is undefined when the actuals sum to zero")

    if kind is MetricKind.BIAS_FACTOR:
        value = total_prediction / total_actual
    else:
        if terms is None:
            terms = metric_terms(pairs, kind, clip)
        total = float(np.sum(terms))
        value = total / total_actual if kind.is_relative else total / n
    return MetricValue(kind, value, n, total_actual, total_prediction)


def metric_values(pairs, kinds, clip=GlobalSettings.CLIP_FLOOR):
    """
    Several metrics in one pass, sharing the per-pair terms.
    Kinds that are undefined for the set (zero actual total) are left out.
    """
    out = {}
    cache = {}
    for kind in (MetricKind.parse(k) for k in kinds):
        terms = None
        if kind.is_error_metric:
            if kind.absolute not in cache:
                cache[kind.absolute] = metric_terms(pairs, kind.absolute, clip)
            terms = cache[kind.absolute]
        try:
            out[kind] = aggregate(pairs, kind, clip, terms)
        except ZeroActualTotal:
            logger.warning("%s left out, the actuals sum to zero", kind.name)
    return out


def metric_sigma(pairs, kind, clip=GlobalSettings.CLIP_FLOOR):
    """
    Standard error of an aggregated error metric, estimated from the spread of the
    per-pair terms. Relative kinds are scaled by the mean actual.
    """
    kind = MetricKind.parse(kind)
    terms = metric_terms(pairs, kind, clip)
    if len(terms) < 2:
        return float("inf")
    sigma = float(np.std(terms, ddof=1) / np.sqrt(len(terms)))
    if kind.is_relative:
        mean_actual = pairs.total_actual / len(pairs)
        if mean_actual == 0:
            raise ZeroActualTotal(kind.name + " is undefined when the actuals sum to zero")
        sigma /= mean_actual
    return sigma


def poisson_expected_metric(kind, rates, clip=GlobalSettings.CLIP_FLOOR):
    """
    The value a metric takes on average when the observations really are Poisson with
    the predicted rates, i.e. the best value any forecast can expect for these rates.
    Relative kinds divide by the summed rates.
    """
    kind = MetricKind.parse(kind)
    rates = np.atleast_1d(np.maximum(np.asarray(rates, dtype=np.float64), clip))
    if len(rates) == 0:
        raise EmptyInput("no pairs")
    if kind is MetricKind.BIAS_FACTOR:
        return 1.0
    unique_rates, inverse = np.unique(rates, return_inverse=True)
    if kind.absolute is MetricKind.MAE:
        terms = cd.poisson_abs_dev(unique_rates, cd.poisson_median(unique_rates))
    else:
        terms = 0.5 * cd.poisson_abs_diff_iid(unique_rates)
    terms = terms[inverse]
    if kind.is_relative:
        return float(np.sum(terms) / np.sum(rates))
    return float(np.mean(terms))
