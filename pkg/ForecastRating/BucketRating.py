"""
This Module turns achieved bucket metrics into scores and grades.

Every bucket is rated twice:
  - noise: the achieved metric is placed between the reference values of the
    grades and the anchor scores (100 for perfect ... 0 for unacceptable) are
    interpolated linearly,
  - bias: the bucket's bias factor, folded to >= 1, is placed on the ladder's
    bias factors the same way.
Bucket scores are combined into overall scores by a sales-weighted mean, and the
overall metrics are put into context by their expectation under every grade.
"""
# -*- coding: utf-8 -*-

import logging
from dataclasses import dataclass, field

import numpy as np

from RatingUtils import GlobalSettings
from .ForecastMetrics import MetricKind, aggregate, metric_values
from .GradeLadder import GradeLadder, ReferenceTable
from .RateBuckets import BucketKey, bucket_numerators, partition
from .RatingErrors import EmptyInput, NoRatableBuckets, NonMonotoneReferences

logger = logging.getLogger(__name__)


class RatingFlags(): # pylint: disable=too-few-public-methods
    """
    Diagnostics attached to a bucket rating
    """

    SUB_POISSONIAN = "SUB_POISSONIAN" # achieved metric better than the Poisson ideal
    ZERO_ACTUALS = "ZERO_ACTUALS" # predictions but not a single sale
    LOW_EVIDENCE = "LOW_EVIDENCE" # no sales and too few predicted to judge; excluded
    FLAT_REFERENCES = "FLAT_REFERENCES" # every grade expects the same value; noise not scored

    def __init__(self):
        pass


@dataclass(frozen=True)
class BucketRating:
    """
    Scores of one bucket. Scores are None when the bucket is excluded (LOW_EVIDENCE).
    references maps (MetricKind, grade name) -> reference value.
    """

    key: BucketKey
    n: int
    total_prediction: float
    total_actual: int
    achieved: dict
    references: dict
    noise_score: float
    bias_score: float
    weight: float
    flags: frozenset = field(default_factory=frozenset)

    @property
    def excluded(self):
        return RatingFlags.LOW_EVIDENCE in self.flags

    @property
    def bias_factor(self):
        if self.total_actual == 0:
            return float("inf")
        return self.total_prediction / self.total_actual


@dataclass(frozen=True)
class OverallRating:
    """
    The summary of a portfolio (or one group of it)
    """

    noise_metric: MetricKind
    noise_score: float
    noise_label: str
    bias_score: float
    bias_label: str
    bias_factor: float
    achieved: dict # MetricKind -> overall achieved value
    contexts: dict # MetricKind -> {grade name: overall reference value}


@dataclass(frozen=True)
class PortfolioRating:
    overall: OverallRating
    buckets: list


def interpolate_score(achieved, references, anchors=None,
                      sub_poissonian_policy=GlobalSettings.SUB_POISSONIAN_POLICY):
    """
    Places achieved between reference values given in grade order (best first) and
    interpolates the anchor scores. Returns (score, flags).
    Below the best reference the score is 100 with SUB_POISSONIAN (policy "flag"),
    or the configured critical score. Above the worst reference it is 0.
    """
    values = np.asarray(list(references.values()) if isinstance(references, dict) else references,
                        dtype=np.float64)
    if len(values) < 2 or np.any(~np.isfinite(values)) or np.any(np.diff(values) <= 0):
        raise NonMonotoneReferences("reference values must increase strictly along the grades: "
                                    + str(values.tolist()))
    if anchors is None:
        last = len(values) - 1
        anchors = [100.0 * (last - i) / last for i in range(len(values))]
    anchors = np.asarray(anchors, dtype=np.float64)

    if achieved < values[0]:
        flags = frozenset([RatingFlags.SUB_POISSONIAN])
        if sub_poissonian_policy == "flag":
            return 100.0, flags
        return float(sub_poissonian_policy), flags
    if achieved >= values[-1]:
        return 0.0, frozenset()
    return float(np.interp(achieved, values, anchors)), frozenset()


def bias_score_from_totals(total_prediction, total_actual, ladder=None,
                           low_evidence=GlobalSettings.LOW_EVIDENCE_PREDICTION):
    """
    Score of the folded bias factor max(b, 1/b), b = total_prediction / total_actual.
    Returns (score, flags); score is None for an excluded bucket.
    """
    ladder = ladder or GradeLadder.default()
    if total_actual == 0:
        if total_prediction >= low_evidence:
            return 0.0, frozenset([RatingFlags.ZERO_ACTUALS])
        return None, frozenset([RatingFlags.LOW_EVIDENCE])
    folded = max(total_prediction / total_actual, total_actual / total_prediction)
    score, _ = interpolate_score(folded, ladder.bias_factors, ladder.anchor_scores)
    return score, frozenset()


def bias_bucket_score(bucket, ladder=None, low_evidence=GlobalSettings.LOW_EVIDENCE_PREDICTION):
    """Bias score of a Bucket, see bias_score_from_totals"""
    return bias_score_from_totals(bucket.total_prediction, bucket.total_actual, ladder, low_evidence)


def overall_score(bucket_ratings, score="noise_score"):
    """
    Weighted mean of the bucket scores, weights = bucket sales. If none of the rated
    buckets has sales, their predicted totals are the weights. Excluded buckets are skipped.
    """
    rated = [b for b in bucket_ratings if getattr(b, score) is not None]
    if not rated:
        raise NoRatableBuckets("no bucket could be rated")
    scores = np.array([getattr(b, score) for b in rated])
    weights = np.array([b.weight for b in rated], dtype=np.float64)
    if np.sum(weights) <= 0:
        weights = np.array([b.total_prediction for b in rated], dtype=np.float64)
    if np.sum(weights) <= 0:
        raise NoRatableBuckets("rated buckets carry no weight")
    return float(np.sum(scores * weights) / np.sum(weights))


def grade_label(score, ladder=None):
    """The grade whose anchor score is nearest, ties going to the better grade"""
    ladder = ladder or GradeLadder.default()
    if score is None:
        return None
    distances = np.round(np.abs(ladder.anchor_scores - float(score)), 9)
    return ladder.names[int(np.argmin(distances))]


def contextualize_overall(kind, pairs, ladder=None, table=None, clip=GlobalSettings.CLIP_FLOOR):
    """
    The achieved overall metric together with its expectation under every grade.
    Returns (achieved, {grade name: reference}). Pairs must be clipped already when a
    ReferenceTable over them is passed.
    """
    if len(pairs) == 0:
        raise EmptyInput("no pairs")
    kind = MetricKind.parse(kind)
    ladder = ladder or GradeLadder.default()
    if table is None:
        table = ReferenceTable(np.maximum(pairs.predictions, clip), ladder)
    achieved = aggregate(pairs, kind, clip).value
    return achieved, table.grade_values(kind)


def _noise_rating(kind, bucket, achieved, table, selector, config):
    """(score, flags, references used) of one bucket"""
    if bucket.total_actual == 0:
        # relative kinds are undefined without sales
        kind = kind.absolute
        achieved = aggregate(bucket.pairs, kind, config.clip_floor).value
    references = table.grade_values(kind, selector)
    values = np.array(list(references.values()))
    if np.allclose(values, values[0], rtol=1e-12, atol=0.0):
        # MAE below rate ln 2: the median forecast is 0 and every grade expects mu
        return None, frozenset([RatingFlags.FLAT_REFERENCES]), references
    score, flags = interpolate_score(achieved, references, table.ladder.anchor_scores,
                                     config.sub_poissonian_policy)
    return score, flags, references


def rate_buckets(pairs, config, table=None):
    """
    Rates every bucket of a PairSet. config supplies n_bins, clip_floor, ladder,
    noise_metric, metrics, sub_poissonian_policy, low_evidence_prediction, center_rate.
    """
    if len(pairs) == 0:
        raise EmptyInput("no pairs")
    clipped = pairs.clipped(config.clip_floor)
    numerators = bucket_numerators(clipped.predictions, config.n_bins)
    if table is None:
        table = _reference_table(clipped, numerators, config)
    noise_kind = MetricKind.parse(config.noise_metric)
    kinds = [MetricKind.parse(k) for k in config.metrics]

    ratings = []
    for bucket in partition(clipped, config.n_bins):
        selector = numerators == bucket.key.numerator
        achieved = {k: v.value for k, v in metric_values(bucket.pairs, kinds, config.clip_floor).items()}
        bias_score, flags = bias_bucket_score(bucket, table.ladder, config.low_evidence_prediction)
        references = {}
        noise_score = None
        if RatingFlags.LOW_EVIDENCE not in flags:
            if noise_kind in achieved or bucket.total_actual == 0:
                noise_value = achieved.get(noise_kind)
            else:
                noise_value = aggregate(bucket.pairs, noise_kind, config.clip_floor).value
            noise_score, noise_flags, noise_refs = _noise_rating(noise_kind, bucket, noise_value,
                                                                 table, selector, config)
            flags = flags | noise_flags
            for kind in set(kinds + [noise_kind]):
                if kind.is_error_metric:
                    for grade, value in table.grade_values(kind, selector).items():
                        references[(kind, grade)] = value
            if bucket.total_actual == 0:
                for grade, value in noise_refs.items():
                    references[(noise_kind.absolute, grade)] = value
        ratings.append(BucketRating(bucket.key, bucket.n, bucket.total_prediction, bucket.total_actual,
                                    achieved, references, noise_score, bias_score,
                                    float(bucket.total_actual), flags))

    sub = sum(1 for r in ratings if RatingFlags.SUB_POISSONIAN in r.flags)
    if sub:
        logger.warning("%d of %d buckets are better than Poisson", sub, len(ratings))
    zero = sum(1 for r in ratings if RatingFlags.ZERO_ACTUALS in r.flags)
    if zero:
        logger.warning("%d buckets have predictions but no sales", zero)
    flat = sum(1 for r in ratings if RatingFlags.FLAT_REFERENCES in r.flags)
    if flat:
        logger.warning("%s cannot separate the grades in %d buckets", noise_kind.name, flat)
    return ratings


def _overall_or_none(buckets, score, allow_unrated):
    try:
        return overall_score(buckets, score)
    except NoRatableBuckets:
        if not allow_unrated:
            raise
        logger.warning("no bucket contributes a %s", score.replace("_", " "))
        return None


def format_score(score, label):
    """"66.4% (good)", or "unrated" for a missing score"""
    if score is None:
        return "unrated"
    return "%.1f%% (%s)" % (score, label)


def _reference_table(clipped, numerators, config):
    predictions = clipped.predictions
    if getattr(config, "center_rate", False):
        predictions = 10.0 ** (numerators / float(config.n_bins))
    return ReferenceTable(predictions, config.ladder)


def rate_portfolio(pairs, config, allow_unrated=False):
    """
    The whole rating of one PairSet: bucket ratings, overall noise and bias scores
    with labels, overall metrics and their grade contexts.
    An overall score no bucket contributes to raises NoRatableBuckets, or is None
    (label None) with allow_unrated.
    """
    if len(pairs) == 0:
        raise EmptyInput("no pairs")
    clipped = pairs.clipped(config.clip_floor)
    numerators = bucket_numerators(clipped.predictions, config.n_bins)
    table = _reference_table(clipped, numerators, config)
    buckets = rate_buckets(clipped, config, table)

    ladder = table.ladder
    noise_kind = MetricKind.parse(config.noise_metric)
    noise = _overall_or_none(buckets, "noise_score", allow_unrated)
    bias = _overall_or_none(buckets, "bias_score", allow_unrated)

    achieved = {}
    contexts = {}
    for kind in (MetricKind.parse(k) for k in config.metrics):
        if kind.is_relative and clipped.total_actual == 0:
            continue
        if kind is MetricKind.BIAS_FACTOR and clipped.total_actual == 0:
            continue
        value, context = contextualize_overall(kind, clipped, ladder, table, config.clip_floor)
        achieved[kind] = value
        contexts[kind] = context

    bias_factor = (clipped.total_prediction / clipped.total_actual
                   if clipped.total_actual else float("inf"))
    overall = OverallRating(noise_kind, noise, grade_label(noise, ladder), bias,
                            grade_label(bias, ladder), bias_factor, achieved, contexts)
    logger.info("noise %s %s, bias %s", noise_kind.name, format_score(noise, overall.noise_label),
                format_score(bias, overall.bias_label))
    return PortfolioRating(overall, buckets)
