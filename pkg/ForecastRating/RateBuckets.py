"""
This Module groups prediction/observation pairs into logarithmically spaced buckets
of the predicted rate. A pair with prediction r lands in the bucket

    R = round(n_bins * log10(r)) / n_bins

so every decade is split into n_bins buckets. Buckets are judged separately because
the ideal value of every metric depends on the rate.
"""
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass

import numpy as np
import pandas as pd

from RatingUtils import GlobalSettings
from .RatingErrors import EmptyInput, NonPositivePrediction

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class BucketKey:
    """
    The rounded log10 prediction R of a bucket, stored exactly as R * n_bins
    """

    numerator: int
    n_bins: int

    @property
    def R(self): # pylint: disable=invalid-name
        return self.numerator / self.n_bins

    @property
    def center_rate(self):
        return 10.0 ** self.R

    def __str__(self):
        return "%g" % self.R


def round_half_away(x):
    x = np.asarray(x, dtype=np.float64)
    return np.sign(x) * np.floor(np.abs(x) + 0.5)


def bucket_numerators(predictions, n_bins=GlobalSettings.N_BINS):
    """round(n_bins * log10(r)) for every prediction, as integers"""
    if int(n_bins) != n_bins or n_bins < 1:
        raise ValueError("n_bins must be a positive integer, got " + str(n_bins))
    predictions = np.asarray(predictions, dtype=np.float64)
    if np.any(~(predictions > 0)):
        raise NonPositivePrediction("bucket keys need positive (clipped) predictions")
    return round_half_away(n_bins * np.log10(predictions)).astype(np.int64)


def bucket_key(prediction, n_bins=GlobalSettings.N_BINS):
    """The BucketKey of a single positive prediction"""
    return BucketKey(int(bucket_numerators(prediction, n_bins)), int(n_bins))


@dataclass(frozen=True)
class Bucket:
    """
    All pairs sharing one BucketKey, with their totals
    """

    key: BucketKey
    pairs: object # PairSet
    total_prediction: float
    total_actual: int

    @classmethod
    def of(cls, key, pairs):
        return cls(key, pairs, pairs.total_prediction, pairs.total_actual)

    @property
    def n(self):
        return len(self.pairs)

    @property
    def center_rate(self):
        return self.key.center_rate

    @property
    def bias_factor(self):
        """sum of predictions / sum of actuals, inf for a bucket without sales"""
        if self.total_actual == 0:
            return float("inf")
        return self.total_prediction / self.total_actual


def partition(pairs, n_bins=GlobalSettings.N_BINS):
    """
    Splits a (clipped) PairSet into buckets, sorted by R.
    The buckets are disjoint and cover every pair.
    """
    if len(pairs) == 0:
        raise EmptyInput("no pairs")
    numerators = bucket_numerators(pairs.predictions, n_bins)
    buckets = []
    for numerator in np.unique(numerators):
        key = BucketKey(int(numerator), int(n_bins))
        buckets.append(Bucket.of(key, pairs.subset(numerators == numerator)))
    logger.info("partitioned %d pairs into %d buckets (%d per decade)", len(pairs), len(buckets), n_bins)
    return buckets


def merge_buckets(buckets, n_bins):
    """
    Re-keys the pairs of the given buckets at a coarser n_bins and merges them.
    Merging is exact (same pairs per coarse bucket as a direct partition) when the
    fine n_bins is an odd multiple of the coarse one, because then every coarse
    bucket boundary is also a fine boundary.
    """
    if not buckets:
        raise EmptyInput("no buckets")
    merged = buckets[0].pairs.concat(*[b.pairs for b in buckets[1:]])
    return partition(merged, n_bins)


def bucket_table(buckets):
    """One row per bucket with key and totals"""
    return pd.DataFrame({
        "R": [b.key.R for b in buckets],
        "center_rate": [b.center_rate for b in buckets],
        "n": [b.n for b in buckets],
        "total_prediction": [b.total_prediction for b in buckets],
        "total_actual": [b.total_actual for b in buckets],
        "bias_factor": [b.bias_factor for b in buckets],
    })
