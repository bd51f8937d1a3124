"""
This is a module that exports the default runtime settings of the forecast rating.
Every value here can be overridden by a RunConfig (YAML file or CLI flag).
"""
# -*- coding: utf-8 -*-

CLIP_FLOOR = 0.01 # predictions below this are raised to it before any computation
BIAS_PLOT_CLIP = 10.0 # bucket bias factors are drawn clipped to [1/10, 10]

N_BINS = 4 # buckets per decade of predicted rate
GAMMA = 1.5 # overdispersion exponent in variance = mu + f * mu^gamma
REFERENCE_RATE = 10.0 # the rate at which the ladder variances are defined

TAIL_TOLERANCE = 1e-12 # probability mass allowed beyond the summation bound
MAX_RATE = 1e5 # rates above this are rejected
TRUNCATION_SIGMAS = 12
TRUNCATION_OFFSET = 30

LOW_EVIDENCE_PREDICTION = 5.0 # zero-sales buckets predicting less than this are not rated

NOISE_METRIC = "RMRPS" # metric used for the per-bucket noise rating
REPORT_METRICS = ("MAE", "RMAE", "MRPS", "RMRPS", "BIAS_FACTOR")

SUB_POISSONIAN_POLICY = "flag" # "flag" keeps score 100, a number imposes that score

REPORT_SIGNIFICANT_DIGITS = 6


class GradeTable(): # pylint: disable=too-few-public-methods
    """
    The default quality ladder: variance at rate 10 and bias factor per grade.
    Order runs from best to worst.
    """

    PERFECT = "perfect"
    EXCELLENT = "excellent"
    GOOD = "good"
    OK = "ok"
    FAIR = "fair"
    INSUFFICIENT = "insufficient"
    UNACCEPTABLE = "unacceptable"

    NAMES = (PERFECT, EXCELLENT, GOOD, OK, FAIR, INSUFFICIENT, UNACCEPTABLE)
    VARIANCE_AT_10 = (10.0, 18.0, 26.0, 37.0, 48.0, 73.0, 136.0)
    BIAS_FACTOR = (1.0, 1.015, 1.03, 1.07, 1.2, 2.0, 4.0)

    def __init__(self):
        pass


class SimulationModels(): # pylint: disable=too-few-public-methods
    """
    Names accepted by the simulate subcommand
    """

    POISSON = "poisson"
    GRADED = "graded"
    NAIVE_1_DAY = "naive1d"
    SIMPLE_28_DAY = "simple28"

    MODELS = (POISSON, GRADED, NAIVE_1_DAY, SIMPLE_28_DAY)

    def __init__(self):
        pass
