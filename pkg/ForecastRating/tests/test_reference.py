# -*- coding: utf-8 -*-

from .. import CountDistributions as cd
from ..ForecastMetrics import MetricKind, PairSet
from ..GradeLadder import (GradeLadder, ReferenceTable, expected_bucket_reference, expected_metric_under_grade,
                           expected_overall_reference, grade_variance, log_grid, reference_curve,
                           reference_curves)
from ..RateBuckets import partition
from ..RatingErrors import ConfigError, EmptyInput

import numpy as np
import scipy.stats

import unittest


class LadderTestSuite(unittest.TestCase):
    """The grade ladder and its variance scaling."""

    def setUp(self):
        self.ladder = GradeLadder.default()

    def test_default_ladder(self):
        self.assertEqual(self.ladder.names,
                         ("perfect", "excellent", "good", "ok", "fair", "insufficient", "unacceptable"))
        np.testing.assert_allclose(self.ladder.anchor_scores,
                                   [100.0, 500.0 / 6, 200.0 / 3, 50.0, 100.0 / 3, 50.0 / 3, 0.0])

    def test_good_at_ten(self):
        self.assertAlmostEqual(grade_variance(self.ladder, "good", 10.0), 26.0, delta=1e-12)
        self.assertAlmostEqual(self.ladder.strength("good"), 16.0 / 10 ** 1.5, delta=1e-12)

    def test_every_grade_reproduces_its_variance(self):
        for grade in self.ladder.grades:
            self.assertAlmostEqual(grade_variance(self.ladder, grade, 10.0), grade.variance_at_10, delta=1e-9)
        self.assertEqual(grade_variance(self.ladder, "perfect", 3.0), 3.0)

    def test_gamma_variants(self):
        linear = GradeLadder.default(gamma=1.0)
        self.assertAlmostEqual(grade_variance(linear, "good", 100.0), 100.0 + 1.6 * 100.0, places=9)
        quadratic = GradeLadder.default(gamma=2.0)
        self.assertAlmostEqual(grade_variance(quadratic, "good", 100.0), 100.0 + 0.16 * 100.0 ** 2, places=9)

    def test_table_round_trip(self):
        table = self.ladder.to_table()
        self.assertEqual(GradeLadder.from_table(table), self.ladder)
        self.assertEqual(table["fair"], {"variance_at_10": 48.0, "bias_factor": 1.2})

    def test_invalid_ladders(self):
        table = self.ladder.to_table()
        table["ok"] = {"variance_at_10": 20.0, "bias_factor": 1.07}
        with self.assertRaises(ConfigError) as ctx:
            GradeLadder.from_table(table)
        self.assertTrue(any("ok" in problem for problem in ctx.exception.problems))
        with self.assertRaises(ConfigError):
            GradeLadder.from_table({"perfect": {"variance_at_10": 11.0, "bias_factor": 1.0},
                                    "bad": {"variance_at_10": 20.0, "bias_factor": 2.0}})


class ExpectedMetricTestSuite(unittest.TestCase):
    """Expected metric values under a grade."""

    def test_perfect_mrps_is_half_spread(self):
        for mu in (0.01, 1.0, 10.0, 300.0):
            self.assertAlmostEqual(expected_metric_under_grade("MRPS", mu, "perfect"),
                                   0.5 * float(cd.poisson_abs_diff_iid(mu)), places=12)

    def test_perfect_mae(self):
        self.assertAlmostEqual(expected_metric_under_grade("MAE", 10.0, "perfect"),
                               float(cd.poisson_abs_dev(10.0, 10)), places=12)

    def test_graded_mrps_matches_summation(self):
        mu, variance = 10.0, 26.0
        n, p = mu * mu / (variance - mu), mu / variance
        k = np.arange(1500)
        poisson = scipy.stats.poisson.pmf(k, mu)
        nb = scipy.stats.nbinom.pmf(k, n, p)
        diff = np.abs(k[:, None] - k[None, :])
        expected = float(np.sum(diff * poisson[:, None] * nb[None, :])
                         - 0.5 * np.sum(diff * poisson[:, None] * poisson[None, :]))
        self.assertAlmostEqual(expected_metric_under_grade("MRPS", mu, "good"), expected, delta=1e-9)

    def test_graded_mae_matches_summation(self):
        mu, variance = 10.0, 73.0
        n, p = mu * mu / (variance - mu), mu / variance
        k = np.arange(3000)
        expected = float(np.sum(np.abs(k - 10) * scipy.stats.nbinom.pmf(k, n, p)))
        self.assertAlmostEqual(expected_metric_under_grade("MAE", mu, "insufficient"), expected, delta=1e-9)

    def test_relative_is_absolute_over_rate(self):
        for mu in (0.5, 7.0, 90.0):
            for grade in ("perfect", "ok"):
                self.assertAlmostEqual(expected_metric_under_grade("RMRPS", mu, grade),
                                       expected_metric_under_grade("MRPS", mu, grade) / mu, places=12)
                self.assertAlmostEqual(expected_metric_under_grade("RMAE", mu, grade),
                                       expected_metric_under_grade("MAE", mu, grade) / mu, places=12)

    def test_bias_factor_reference(self):
        self.assertEqual(expected_metric_under_grade("BIAS_FACTOR", 5.0, "fair"), 1.2)

    def test_grades_ordered(self):
        ladder = GradeLadder.default()
        for mu in (0.01, 0.1, 1.0, 10.0, 100.0, 1000.0):
            for kind in ("MRPS", "RMRPS"):
                values = [expected_metric_under_grade(kind, mu, g, ladder) for g in ladder.names]
                self.assertTrue(np.all(np.diff(values) > 0), (kind, mu, values))
        for mu in (1.0, 10.0, 100.0, 1000.0):
            values = [expected_metric_under_grade("MAE", mu, g, ladder) for g in ladder.names]
            self.assertTrue(np.all(np.diff(values) > 0), ("MAE", mu, values))

    def test_mae_cannot_separate_grades_below_log_two(self):
        values = [expected_metric_under_grade("MAE", 0.3, g) for g in GradeLadder.default().names]
        np.testing.assert_allclose(values, 0.3, rtol=1e-12)

    def test_vectorized(self):
        mu = np.array([0.2, 2.0, 20.0])
        values = expected_metric_under_grade("MRPS", mu, "fair")
        for i in range(3):
            self.assertAlmostEqual(values[i], expected_metric_under_grade("MRPS", mu[i], "fair"), places=12)


class CurveTestSuite(unittest.TestCase):

    def test_curve(self):
        curve = reference_curve("MAE", "good", [1.0, 10.0])
        self.assertEqual(curve.grade, "good")
        self.assertAlmostEqual(curve.variances[1], 26.0, places=9)
        self.assertEqual(len(list(curve.points())), 2)

    def test_bad_grid(self):
        for grid in ([], [1.0, 1.0], [0.0, 1.0], [2.0, 1.0]):
            with self.assertRaises(ValueError):
                reference_curve("MAE", "good", grid)
        with self.assertRaises(ValueError):
            log_grid(0.0, 10.0, 5)

    def test_curves_table(self):
        table = reference_curves(["MAE", "RMRPS"], log_grid(0.1, 100.0, 4))
        self.assertEqual(len(table), 2 * 7 * 4)
        self.assertEqual(list(table.columns), ["metric", "grade", "rate", "variance", "value"])
        single = reference_curves(["MRPS"], log_grid(10.0, 10.0, 1))
        self.assertEqual(len(single), 7)
        good = single[single["grade"] == "good"]
        self.assertAlmostEqual(float(good["variance"].iloc[0]), 26.0, places=9)


class ReferenceTableTestSuite(unittest.TestCase):
    """Per-pair references aggregated over subsets."""

    def test_aggregate(self):
        table = ReferenceTable([1.0, 10.0, 10.0])
        per_rate = [expected_metric_under_grade("MRPS", mu, "ok") for mu in (1.0, 10.0, 10.0)]
        self.assertAlmostEqual(table.aggregate("MRPS", "ok"), float(np.mean(per_rate)), places=12)
        self.assertAlmostEqual(table.aggregate("RMRPS", "ok"), float(np.sum(per_rate)) / 21.0, places=12)
        self.assertAlmostEqual(table.aggregate("MRPS", "ok", np.array([False, True, True])), per_rate[1],
                               places=12)
        self.assertEqual(table.aggregate("BIAS_FACTOR", "ok"), 1.07)

    def test_grade_values_in_ladder_order(self):
        values = ReferenceTable([3.0]).grade_values(MetricKind.RMAE)
        self.assertEqual(list(values), list(GradeLadder.default().names))

    def test_empty(self):
        with self.assertRaises(EmptyInput):
            ReferenceTable([])
        with self.assertRaises(EmptyInput):
            ReferenceTable([1.0]).aggregate("MAE", "good", np.array([False]))

    def test_bucket_and_overall_reference(self):
        pairs = PairSet.from_arrays([8.0, 9.0, 11.0, 12.0], [8, 9, 11, 12])
        bucket = partition(pairs, 4)[0]
        self.assertAlmostEqual(expected_bucket_reference("MRPS", bucket, "good"),
                               expected_overall_reference("MRPS", pairs, "good"), places=12)
        at_center = expected_bucket_reference("MRPS", bucket, "good", center_rate=True)
        self.assertAlmostEqual(at_center, expected_metric_under_grade("MRPS", 10.0, "good"), places=12)


if __name__ == '__main__':
    unittest.main()
