# -*- coding: utf-8 -*-

from ..BucketRating import (BucketRating, RatingFlags, bias_bucket_score, bias_score_from_totals,
                            contextualize_overall, grade_label, interpolate_score, overall_score, rate_buckets,
                            rate_portfolio)
from ..ForecastMetrics import MetricKind, PairSet
from ..GradeLadder import GradeLadder
from ..RateBuckets import BucketKey, partition
from ..RatingErrors import EmptyInput, NoRatableBuckets, NonMonotoneReferences
from RatingUtils.RunConfig import RunConfig

import numpy as np

import unittest


def rating(score, weight, total_prediction=1.0, flags=()):
    return BucketRating(BucketKey(0, 4), 1, total_prediction, int(weight), {}, {}, score, score,
                        float(weight), frozenset(flags))


class InterpolationTestSuite(unittest.TestCase):
    """Placing an achieved value between grade references."""

    def test_linear_between_references(self):
        self.assertEqual(interpolate_score(1.5, [1.0, 2.0, 3.0]), (75.0, frozenset()))
        self.assertEqual(interpolate_score(2.0, [1.0, 2.0, 3.0])[0], 50.0)
        self.assertEqual(interpolate_score(1.0, [1.0, 2.0, 3.0]), (100.0, frozenset()))

    def test_outside_the_ladder(self):
        self.assertEqual(interpolate_score(0.5, [1.0, 2.0, 3.0]),
                         (100.0, frozenset([RatingFlags.SUB_POISSONIAN])))
        self.assertEqual(interpolate_score(0.5, [1.0, 2.0, 3.0], sub_poissonian_policy=0.0)[0], 0.0)
        self.assertEqual(interpolate_score(3.0, [1.0, 2.0, 3.0])[0], 0.0)
        self.assertEqual(interpolate_score(30.0, [1.0, 2.0, 3.0])[0], 0.0)

    def test_non_monotone(self):
        for references in ([1.0, 1.0, 2.0], [2.0, 1.0, 3.0], [1.0]):
            with self.assertRaises(NonMonotoneReferences):
                interpolate_score(1.0, references)

    def test_accepts_grade_mapping(self):
        references = dict(zip(GradeLadder.default().names, [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0]))
        score, _ = interpolate_score(2.5, references)
        self.assertAlmostEqual(score, 75.0)

    def test_scale_coherence(self):
        references = np.array([0.3, 0.5, 0.9, 1.4])
        for scale in (0.001, 7.0, 1e4):
            self.assertAlmostEqual(interpolate_score(0.7 * scale, references * scale)[0],
                                   interpolate_score(0.7, references)[0], places=9)


class BiasTestSuite(unittest.TestCase):

    def test_unbiased_is_perfect(self):
        self.assertEqual(bias_score_from_totals(100.0, 100), (100.0, frozenset()))

    def test_anchor(self):
        self.assertAlmostEqual(bias_score_from_totals(103.0, 100)[0], 200.0 / 3)
        self.assertAlmostEqual(bias_score_from_totals(120.0, 100)[0], 100.0 / 3)

    def test_symmetry(self):
        for prediction, actual in ((103.0, 100), (117.0, 91), (5.0, 1), (1000.5, 999)):
            self.assertEqual(bias_score_from_totals(prediction, actual)[0],
                             bias_score_from_totals(float(actual), prediction)[0])

    def test_beyond_worst_grade(self):
        self.assertEqual(bias_score_from_totals(500.0, 100)[0], 0.0)
        self.assertEqual(bias_score_from_totals(20.0, 100)[0], 0.0)

    def test_zero_actuals(self):
        self.assertEqual(bias_score_from_totals(10.0, 0), (0.0, frozenset([RatingFlags.ZERO_ACTUALS])))
        self.assertEqual(bias_score_from_totals(1.0, 0), (None, frozenset([RatingFlags.LOW_EVIDENCE])))

    def test_bucket(self):
        bucket = partition(PairSet.from_arrays([10.0, 10.6], [10, 10]), 4)[0]
        self.assertAlmostEqual(bias_bucket_score(bucket)[0], 200.0 / 3)


class LabelTestSuite(unittest.TestCase):

    def test_published_labels(self):
        for score, label in ((66.4, "good"), (57.4, "ok"), (41.0, "fair"), (87.6, "excellent"),
                             (46.3, "ok"), (91.3, "excellent"), (98.2, "perfect"), (99.9, "perfect"),
                             (8.3, "unacceptable"), (20.0, "insufficient")):
            self.assertEqual(grade_label(score), label, score)

    def test_ties_go_to_the_better_grade(self):
        self.assertEqual(grade_label(75.0), "excellent")
        self.assertEqual(grade_label(25.0), "fair")
        self.assertIsNone(grade_label(None))


class OverallTestSuite(unittest.TestCase):

    def test_weighted_by_sales(self):
        self.assertAlmostEqual(overall_score([rating(100.0, 3), rating(0.0, 1)]), 75.0)

    def test_excluded_buckets_are_skipped(self):
        ratings = [rating(80.0, 2), rating(None, 0, flags=[RatingFlags.LOW_EVIDENCE])]
        self.assertAlmostEqual(overall_score(ratings), 80.0)
        with self.assertRaises(NoRatableBuckets):
            overall_score([rating(None, 0, flags=[RatingFlags.LOW_EVIDENCE])])

    def test_falls_back_to_prediction_weights(self):
        ratings = [rating(0.0, 0, total_prediction=30.0), rating(100.0, 0, total_prediction=10.0)]
        self.assertAlmostEqual(overall_score(ratings), 25.0)


class PortfolioTestSuite(unittest.TestCase):
    """Bucket and portfolio ratings on small synthetic portfolios."""

    def setUp(self):
        rng = np.random.default_rng(5)
        rates = np.exp(rng.uniform(np.log(1.0), np.log(30.0), 4000))
        self.pairs = PairSet.from_arrays(rates, rng.poisson(rates))
        self.config = RunConfig()

    def test_rate_buckets(self):
        ratings = rate_buckets(self.pairs, self.config)
        self.assertEqual(sum(r.n for r in ratings), len(self.pairs))
        self.assertEqual([r.key for r in ratings], sorted(r.key for r in ratings))
        for r in ratings:
            self.assertTrue(0.0 <= r.noise_score <= 100.0)
            self.assertTrue(0.0 <= r.bias_score <= 100.0)
            self.assertEqual(r.weight, r.total_actual)
            self.assertEqual(len([key for key in r.references if key[0] is MetricKind.RMRPS]), 7)

    def test_rate_portfolio(self):
        result = rate_portfolio(self.pairs, self.config)
        overall = result.overall
        self.assertIs(overall.noise_metric, MetricKind.RMRPS)
        self.assertIn(overall.noise_label, ("perfect", "excellent"))
        self.assertGreater(overall.noise_score, 85.0)
        self.assertAlmostEqual(overall.bias_factor, self.pairs.total_prediction / self.pairs.total_actual)
        self.assertEqual(sorted(k.name for k in overall.contexts), sorted(self.config.metrics))
        self.assertEqual(list(overall.contexts[MetricKind.MRPS]), list(self.config.ladder.names))

    def test_context(self):
        achieved, references = contextualize_overall("RMRPS", self.pairs)
        self.assertTrue(references["perfect"] < references["good"] < references["unacceptable"])
        self.assertGreater(achieved, 0.0)
        with self.assertRaises(EmptyInput):
            contextualize_overall("MAE", PairSet.from_arrays([], []))

    def test_zero_actual_buckets(self):
        pairs = self.pairs.concat(PairSet.from_arrays([1000.0] * 3, [0, 0, 0], ids=["z1", "z2", "z3"]),
                                  PairSet.from_arrays([0.001, 0.002], [0, 0], ids=["l1", "l2"]))
        ratings = {r.key.R: r for r in rate_buckets(pairs, self.config)}
        zero = ratings[3.0]
        self.assertIn(RatingFlags.ZERO_ACTUALS, zero.flags)
        self.assertEqual(zero.bias_score, 0.0)
        self.assertTrue(0.0 <= zero.noise_score <= 100.0)
        low = ratings[-2.0]
        self.assertIn(RatingFlags.LOW_EVIDENCE, low.flags)
        self.assertTrue(low.excluded)
        self.assertIsNone(low.noise_score)
        self.assertIsNone(low.bias_score)
        result = rate_portfolio(pairs, self.config)
        self.assertTrue(0.0 <= result.overall.noise_score <= 100.0)

    def test_flat_references(self):
        config = self.config.with_overrides(noise_metric="MAE")
        ratings = rate_buckets(PairSet.from_arrays([0.3, 0.3, 0.31], [0, 1, 0]), config)
        self.assertEqual(len(ratings), 1)
        self.assertIn(RatingFlags.FLAT_REFERENCES, ratings[0].flags)
        self.assertIsNone(ratings[0].noise_score)

    def test_empty(self):
        with self.assertRaises(EmptyInput):
            rate_portfolio(PairSet.from_arrays([], []), self.config)


if __name__ == '__main__':
    unittest.main()
