# -*- coding: utf-8 -*-

from .. import CountDistributions as cd
from ..ForecastMetrics import MetricKind
from ..RatingCLI import evaluate_pairs
from RatingUtils import RatingPlots
from RatingUtils.RunConfig import RunConfig
from RatingUtils.SyntheticData import GenSpec, gen_poisson_pairs

import os
import shutil
import tempfile

import numpy as np

import unittest


class PoissonLineTestSuite(unittest.TestCase):

    def test_values(self):
        rates, values = RatingPlots.poisson_line(MetricKind.MRPS, 0.1, 100.0, points=7)
        self.assertEqual(len(rates), 7)
        self.assertAlmostEqual(rates[0], 0.1)
        self.assertAlmostEqual(rates[-1], 100.0)
        np.testing.assert_allclose(values, 0.5 * cd.poisson_abs_diff_iid(rates), rtol=1e-12)

    def test_relative_line_falls(self):
        _, values = RatingPlots.poisson_line("RMAE", 1.0, 1000.0, points=20)
        self.assertTrue(np.all(np.diff(values) < 0))


class NoisePlotTestSuite(unittest.TestCase):

    def setUp(self):
        self.directory = tempfile.mkdtemp()

    def tearDown(self):
        shutil.rmtree(self.directory)

    def test_writes_svg(self):
        config = RunConfig()
        report = evaluate_pairs(gen_poisson_pairs(GenSpec(seed=3, n_series=400)), config)
        path = RatingPlots.plot_noise(report.groups[0], MetricKind.RMRPS, config.ladder,
                                      os.path.join(self.directory, "noise.svg"))
        with open(path) as stream:
            self.assertIn("<svg", stream.read())


if __name__ == '__main__':
    unittest.main()
