# -*- coding: utf-8 -*-

from .. import CountDistributions as cd
from ..ForecastMetrics import (MetricKind, MetricValue, PairSet, PredictionPair, aggregate, mae_term,
                               metric_sigma, metric_values, poisson_expected_metric, rps)
from ..RatingErrors import (EmptyInput, NegativeValue, NonIntegerActual, SchemaMismatch, UnknownMetric,
                            ZeroActualTotal)

import numpy as np
import pandas as pd

import unittest


def small_pairs():
    return PairSet.from_arrays([0.5, 2.0, 10.0, 10.0, 30.0], [0, 3, 8, 12, 25],
                               groups={"store": ["a", "a", "b", "b", "b"]})


class MetricKindTestSuite(unittest.TestCase):

    def test_parse(self):
        self.assertIs(MetricKind.parse("rmrps"), MetricKind.RMRPS)
        self.assertIs(MetricKind.parse(MetricKind.MAE), MetricKind.MAE)
        with self.assertRaises(UnknownMetric):
            MetricKind.parse("RMSE")

    def test_absolute_counterpart(self):
        self.assertIs(MetricKind.RMAE.absolute, MetricKind.MAE)
        self.assertIs(MetricKind.RMRPS.absolute, MetricKind.MRPS)
        self.assertIs(MetricKind.MRPS.absolute, MetricKind.MRPS)
        self.assertFalse(MetricKind.BIAS_FACTOR.is_error_metric)


class TermTestSuite(unittest.TestCase):
    """Per-pair error terms."""

    def test_mae_term_uses_poisson_median(self):
        self.assertEqual(mae_term(10.0, 10), 0.0)
        self.assertEqual(mae_term(0.5, 2), 2.0)
        self.assertEqual(mae_term(0.7, 2), 1.0)
        np.testing.assert_array_equal(mae_term([0.5, 10.0], [2, 7]), [2.0, 3.0])

    def test_zero_prediction_is_clipped(self):
        self.assertEqual(mae_term(0.0, 1), 1.0)
        self.assertAlmostEqual(rps(0.0, 0), rps(0.01, 0), places=15)

    def test_rps_definition(self):
        for r, s in ((0.3, 0), (4.0, 9), (55.0, 40)):
            expected = cd.poisson_abs_dev(r, s) - 0.5 * cd.poisson_abs_diff_iid(r)
            self.assertAlmostEqual(rps(r, s), float(expected), places=12)

    def test_rps_vectorized(self):
        r = np.array([1.0, 1.0, 3.0, 50.0])
        s = np.array([0, 2, 3, 49])
        values = rps(r, s)
        for i in range(4):
            self.assertAlmostEqual(values[i], rps(r[i], s[i]), places=14)
        self.assertTrue(np.all(values >= 0))

    def test_invalid_actuals(self):
        with self.assertRaises(NonIntegerActual):
            rps(1.0, 1.5)
        with self.assertRaises(NegativeValue):
            mae_term(1.0, -1)


class PairSetTestSuite(unittest.TestCase):

    def test_validation(self):
        with self.assertRaises(NegativeValue):
            PairSet.from_arrays([1.0, -2.0], [1, 1])
        with self.assertRaises(NonIntegerActual):
            PairSet.from_arrays([1.0, 2.0], [1, 0.5])
        with self.assertRaises(SchemaMismatch):
            PairSet(pd.DataFrame({"id": ["a"], "prediction": [1.0]}))

    def test_error_names_lines(self):
        frame = pd.DataFrame({"id": ["a", "b", "c"], "prediction": [1.0, 1.0, 1.0], "actual": [1, 2.5, 3]})
        with self.assertRaises(NonIntegerActual) as ctx:
            PairSet(frame, lines=[2, 3, 4])
        self.assertIn("lines 3", str(ctx.exception))

    def test_records_round_trip(self):
        records = [PredictionPair("x", 1.5, 2, {"dept": "FOODS_3"}), PredictionPair("y", 0.2, 0, {"dept": "HOBBIES_1"})]
        pairs = PairSet.from_records(records)
        self.assertEqual(list(pairs), records)

    def test_prediction_pair_validation(self):
        with self.assertRaises(NegativeValue):
            PredictionPair("x", -1.0, 0)
        with self.assertRaises(NonIntegerActual):
            PredictionPair("x", 1.0, 1.5)

    def test_totals_and_clipping(self):
        pairs = PairSet.from_arrays([0.0, 0.001, 2.0], [0, 1, 3])
        clipped = pairs.clipped(0.01)
        np.testing.assert_allclose(clipped.predictions, [0.01, 0.01, 2.0])
        self.assertEqual(clipped.total_actual, 4)
        self.assertAlmostEqual(clipped.total_prediction, 2.02)

    def test_group_by(self):
        groups = dict(small_pairs().group_by(["store"]))
        self.assertEqual(sorted(groups), [("a",), ("b",)])
        self.assertEqual(len(groups[("b",)]), 3)
        everything = list(small_pairs().group_by([]))
        self.assertEqual(everything[0][0], ("all",))
        with self.assertRaises(SchemaMismatch):
            list(small_pairs().group_by(["region"]))

    def test_group_by_keeps_missing_labels(self):
        pairs = PairSet.from_arrays([1.0, 2.0, 3.0, 4.0], [1, 2, 3, 4], groups={"store": ["a", None, "a", np.nan]})
        groups = dict(pairs.group_by(["store"]))
        self.assertEqual(sorted(groups), [("",), ("a",)])
        self.assertEqual(sum(len(g) for g in groups.values()), len(pairs))
        self.assertEqual(groups[("",)].total_actual, 6)

    def test_concat(self):
        pairs = small_pairs()
        both = pairs.concat(pairs)
        self.assertEqual(len(both), 10)
        self.assertEqual(both.total_actual, 2 * pairs.total_actual)


class AggregateTestSuite(unittest.TestCase):
    """Aggregation into metric values."""

    def test_empty(self):
        with self.assertRaises(EmptyInput) as ctx:
            aggregate(PairSet.from_arrays([], []), MetricKind.MAE)
        self.assertIn("no pairs", str(ctx.exception))

    def test_zero_actual_total(self):
        pairs = PairSet.from_arrays([1.0, 2.0], [0, 0])
        for kind in (MetricKind.RMAE, MetricKind.RMRPS, MetricKind.BIAS_FACTOR):
            with self.assertRaises(ZeroActualTotal):
                aggregate(pairs, kind)
        self.assertEqual(aggregate(pairs, MetricKind.MAE).value, 1.5)

    def test_values(self):
        pairs = small_pairs()
        terms = mae_term(pairs.predictions, pairs.actuals)
        self.assertAlmostEqual(aggregate(pairs, "MAE").value, float(np.mean(terms)))
        self.assertAlmostEqual(aggregate(pairs, "RMAE").value, float(np.sum(terms)) / 48)
        terms = rps(pairs.predictions, pairs.actuals)
        self.assertAlmostEqual(aggregate(pairs, "MRPS").value, float(np.mean(terms)))
        self.assertAlmostEqual(aggregate(pairs, "RMRPS").value, float(np.sum(terms)) / 48)

    def test_bias_factor(self):
        pairs = PairSet.from_arrays([250.9, 250.9, 250.9, 250.9], [250, 250, 250, 250])
        self.assertAlmostEqual(aggregate(pairs, MetricKind.BIAS_FACTOR).value, 1.0036, places=12)

    def test_duplicating_pairs_keeps_values(self):
        pairs = small_pairs()
        doubled = pairs.concat(pairs)
        for kind in MetricKind:
            self.assertAlmostEqual(aggregate(pairs, kind).value, aggregate(doubled, kind).value, places=12)

    def test_combine_equals_union(self):
        pairs = small_pairs()
        first, second = pairs.subset(np.array([0, 1])), pairs.subset(np.array([2, 3, 4]))
        for kind in MetricKind:
            combined = aggregate(first, kind).combine(aggregate(second, kind))
            self.assertAlmostEqual(combined.value, aggregate(pairs, kind).value, places=12)
            self.assertEqual(combined.n, 5)
        with self.assertRaises(ValueError):
            MetricValue(MetricKind.MAE, 1.0, 1, 1, 1.0).combine(MetricValue(MetricKind.RMAE, 1.0, 1, 1, 1.0))

    def test_metric_values_skips_undefined(self):
        pairs = PairSet.from_arrays([1.0, 2.0], [0, 0])
        values = metric_values(pairs, ["MAE", "RMAE", "MRPS", "BIAS_FACTOR"])
        self.assertEqual(sorted(k.name for k in values), ["MAE", "MRPS"])

    def test_poisson_expected_metric(self):
        self.assertAlmostEqual(poisson_expected_metric("MRPS", [10.0]), 0.5 * float(cd.poisson_abs_diff_iid(10.0)))
        self.assertAlmostEqual(poisson_expected_metric("RMAE", [10.0, 10.0]),
                               float(cd.poisson_abs_dev(10.0, 10)) / 10.0)
        self.assertEqual(poisson_expected_metric("BIAS_FACTOR", [3.0]), 1.0)

    def test_metric_sigma(self):
        rng = np.random.default_rng(3)
        rates = rng.uniform(1.0, 20.0, 5000)
        pairs = PairSet.from_arrays(rates, rng.poisson(rates))
        sigma = metric_sigma(pairs, "MRPS")
        self.assertTrue(0 < sigma < 0.1)
        self.assertEqual(metric_sigma(pairs.subset(np.array([0])), "MRPS"), float("inf"))


if __name__ == '__main__':
    unittest.main()
