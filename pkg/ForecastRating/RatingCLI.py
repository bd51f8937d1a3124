"""
Command line front end of the forecast rating.

    evaluate   rate a CSV of prediction/observation pairs and write the report files
    simulate   write a CSV of pairs from a synthetic portfolio or a reference model
    curves     write the reference value of every metric and grade along a rate grid

Exit codes: 0 success, 2 invalid input data, 3 invalid configuration or model setup.
"""
# -*- coding: utf-8 -*-

import argparse
import logging
import os
import sys

import numpy as np
import pandas as pd

from RatingUtils import M5Loader, RatingPlots, ReportWriter, SyntheticData
from RatingUtils.GlobalSettings import SimulationModels
from RatingUtils.RunConfig import RunConfig
from .BucketRating import format_score, rate_portfolio
from .ForecastMetrics import ACTUAL_COLUMN, ID_COLUMN, PREDICTION_COLUMN, REQUIRED_COLUMNS, MetricKind, PairSet
from .GradeLadder import log_grid, reference_curves
from .RatingErrors import (ConfigError, EmptyInput, InsufficientHistory, InputValidationError,
                           MissingFile, NoRatableBuckets, RatingError, SchemaMismatch)

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_INPUT = 2
EXIT_CONFIG = 3

PAIRS_FILE = "pairs.csv"
NOISE_SVG = "noise.svg"
BIAS_SVG = "bias.svg"
CURVES_SVG = "curves.svg"


def read_pairs(path, group_by=()):
    """
    Reads a headered CSV with columns id, prediction, actual and optional label columns.
    Errors name the offending file lines (the header is line 1).
    """
    if not os.path.isfile(path):
        raise MissingFile("input file not found: " + str(path))
    try:
        frame = pd.read_csv(path, dtype=str)
    except pd.errors.EmptyDataError:
        raise EmptyInput("no pairs")
    missing = [c for c in list(REQUIRED_COLUMNS) + list(group_by) if c not in frame.columns]
    if missing:
        raise SchemaMismatch(os.path.basename(path) + " does not have the required columns", missing=missing)
    if frame.empty:
        raise EmptyInput("no pairs")

    lines = np.arange(len(frame)) + 2
    bad = np.zeros(len(frame), dtype=bool)
    for column in (PREDICTION_COLUMN, ACTUAL_COLUMN):
        values = pd.to_numeric(frame[column], errors="coerce")
        bad |= values.isna().to_numpy()
        frame[column] = values
    bad |= frame[ID_COLUMN].isna().to_numpy()
    for column in group_by:
        frame[column] = frame[column].fillna("")
    if np.any(bad):
        raise SchemaMismatch(os.path.basename(path) + " has missing or non-numeric values",
                             lines=lines[bad].tolist())
    pairs = PairSet(frame, tuple(group_by), lines=lines)
    logger.info("read %d pairs from %s", len(pairs), path)
    return pairs


def evaluate_pairs(pairs, config, source=None):
    """
    Rates every group of the pairs and collects the results into a RatingReport.
    A group without a ratable bucket is reported with null scores; the run fails only
    when no group gets any score.
    """
    report = ReportWriter.RatingReport(config, source=source)
    for key, group in pairs.group_by(config.group_by):
        labels = dict(zip(config.group_by, key))
        if labels:
            logger.info("rating group %s (%d pairs)", "/".join(key), len(group))
        clipped = group.clipped(config.clip_floor)
        rating = rate_portfolio(group, config, allow_unrated=True)
        report.groups.append(ReportWriter.GroupResult(labels, rating, len(group),
                                                      clipped.total_prediction, clipped.total_actual))
    if all(g.rating.overall.noise_score is None and g.rating.overall.bias_score is None for g in report.groups):
        raise NoRatableBuckets("no bucket could be rated")
    return report


def _svg_name(base, group, n_groups):
    if n_groups == 1:
        return base
    stem, ext = os.path.splitext(base)
    return stem + "_" + "_".join(str(v) for v in group.labels.values()).replace(os.sep, "-") + ext


def cmd_evaluate(input_path, config):
    """Reads, rates and writes report.json, buckets.csv, plot_data.csv, contexts.csv (and SVGs)"""
    pairs = read_pairs(input_path, config.group_by)
    report = evaluate_pairs(pairs, config, source=os.path.abspath(input_path))
    written = ReportWriter.write_report(report, config.output_dir, config.raw)
    if config.svg:
        ladder = config.ladder
        noise_kind = MetricKind.parse(config.noise_metric)
        for group in report.groups:
            written.append(RatingPlots.plot_noise(
                group, noise_kind, ladder,
                os.path.join(config.output_dir, _svg_name(NOISE_SVG, group, len(report.groups)))))
            written.append(RatingPlots.plot_bias(
                group, ladder, config.bias_plot_clip,
                os.path.join(config.output_dir, _svg_name(BIAS_SVG, group, len(report.groups)))))
    for group in report.groups:
        overall = group.rating.overall
        print("%s: noise %s, bias %s, bias factor %.4f" % (
            group.name, format_score(overall.noise_score, overall.noise_label),
            format_score(overall.bias_score, overall.bias_label), overall.bias_factor))
    return written


def simulate_pairs(config, model, n_series=1000, n_days=56, rate_min=0.05, rate_max=50.0, grade=None,
                   bias_multiplier=1.0, weekday_amplitude=0.0, horizon_days=28, m5_dir=None):
    """The PairSet produced by one of the SimulationModels"""
    if model not in SimulationModels.MODELS:
        raise ConfigError(["unknown model '" + str(model) + "', expected one of "
                           + ", ".join(SimulationModels.MODELS)])
    spec = SyntheticData.GenSpec(seed=config.seed, n_series=n_series, rate_min=rate_min, rate_max=rate_max,
                                 grade=grade, bias_multiplier=bias_multiplier, ladder=config.ladder)
    if model == SimulationModels.POISSON:
        return SyntheticData.gen_poisson_pairs(spec)
    if model == SimulationModels.GRADED:
        if grade is None:
            raise ConfigError(["the graded model needs --grade"])
        return SyntheticData.gen_graded_pairs(spec)

    history = 1 if model == SimulationModels.NAIVE_1_DAY else SyntheticData.SIMPLE_WINDOW_DAYS
    if m5_dir is not None:
        panel = M5Loader.load_m5(m5_dir, M5Loader.validation_start_with_history(history),
                                 M5Loader.VALIDATION_END)
    else:
        panel = SyntheticData.gen_poisson_panel(spec, n_days, weekday_amplitude)
    if model == SimulationModels.NAIVE_1_DAY:
        return SyntheticData.naive_one_day_model(panel)
    return SyntheticData.simple_28_day_model(panel, horizon_days)


def write_pairs(pairs, path):
    return ReportWriter.atomic_write_text(path, pairs.frame.to_csv(index=False, float_format="%.17g"))


def cmd_simulate(config, model, output=None, **model_args):
    """Writes the simulated pairs as CSV; returns the path"""
    pairs = simulate_pairs(config, model, **model_args)
    path = output or os.path.join(config.output_dir, PAIRS_FILE)
    write_pairs(pairs, path)
    print("%d pairs written to %s" % (len(pairs), path))
    return path


def cmd_curves(config, grid_min=0.01, grid_max=1000.0, grid_points=25):
    """Writes curves.csv (and curves.svg) for the configured metrics and ladder"""
    try:
        grid = log_grid(grid_min, grid_max, grid_points)
    except ValueError as err:
        raise ConfigError([str(err)])
    kinds = [k for k in (MetricKind.parse(m) for m in config.metrics) if k.is_error_metric]
    curves = reference_curves(kinds, grid, config.ladder)
    written = [ReportWriter.write_frame(curves, os.path.join(config.output_dir, ReportWriter.CURVES_FILE),
                                        config.raw)]
    if config.svg:
        written.append(RatingPlots.plot_curves(curves, os.path.join(config.output_dir, CURVES_SVG)))
    return written


def _add_common(parser):
    parser.add_argument("--config", help="YAML file overriding the defaults")
    parser.add_argument("--output-dir", help="where the output files go")
    parser.add_argument("--n-bins", type=int, help="buckets per decade of predicted rate")
    parser.add_argument("--gamma", type=float, help="overdispersion exponent")
    parser.add_argument("--clip", type=float, help="floor applied to the predictions")
    parser.add_argument("--metrics", help="comma separated metric names")
    parser.add_argument("--seed", type=int, help="random seed")
    parser.add_argument("--svg", action="store_true", default=None, help="also draw SVG figures")
    parser.add_argument("--raw", action="store_true", default=None, help="full precision numbers")
    parser.add_argument("--verbose", action="store_true", help="debug logging")
    parser.add_argument("--quiet", action="store_true", help="warnings and errors only")


def build_parser():
    parser = argparse.ArgumentParser(prog="rate_forecasts",
                                     description="Scaling-aware rating of count forecasts")
    commands = parser.add_subparsers(dest="command")
    commands.required = True

    evaluate = commands.add_parser("evaluate", help="rate a CSV of pairs")
    _add_common(evaluate)
    evaluate.add_argument("--input", required=True, help="CSV with id, prediction, actual")
    evaluate.add_argument("--group-by", help="comma separated label columns")
    evaluate.add_argument("--noise-metric", help="metric used for the noise score")
    evaluate.add_argument("--center-rate", action="store_true", default=None,
                          help="evaluate the references at the bucket centers")
    evaluate.add_argument("--sub-poissonian", help="'flag' or the score given to sub-Poissonian buckets")

    simulate = commands.add_parser("simulate", help="write synthetic pairs")
    _add_common(simulate)
    simulate.add_argument("--model", required=True, choices=SimulationModels.MODELS)
    simulate.add_argument("--output", help="pairs CSV path (default <output-dir>/pairs.csv)")
    simulate.add_argument("--n-series", type=int, default=1000)
    simulate.add_argument("--n-days", type=int, default=56)
    simulate.add_argument("--rate-min", type=float, default=0.05)
    simulate.add_argument("--rate-max", type=float, default=50.0)
    simulate.add_argument("--grade", help="grade of the observations for the graded model")
    simulate.add_argument("--bias-multiplier", type=float, default=1.0)
    simulate.add_argument("--weekday-amplitude", type=float, default=0.0)
    simulate.add_argument("--horizon", type=int, default=28, help="forecast days of the simple28 model")
    simulate.add_argument("--m5-dir", help="derive the panel from the M5 files in this directory")

    curves = commands.add_parser("curves", help="write reference curves")
    _add_common(curves)
    curves.add_argument("--grid-min", type=float, default=0.01)
    curves.add_argument("--grid-max", type=float, default=1000.0)
    curves.add_argument("--grid-points", type=int, default=25)
    return parser


def _sub_poissonian(value):
    if value is None or value == "flag":
        return value
    try:
        return float(value)
    except ValueError:
        raise ConfigError(["--sub-poissonian must be 'flag' or a number, got " + repr(value)])


def config_from_args(args):
    overrides = {
        "output_dir": args.output_dir,
        "n_bins": args.n_bins,
        "gamma": args.gamma,
        "clip_floor": args.clip,
        "metrics": args.metrics,
        "seed": args.seed,
        "svg": args.svg,
        "raw": args.raw,
    }
    if args.command == "evaluate":
        overrides.update({
            "group_by": args.group_by,
            "noise_metric": args.noise_metric,
            "center_rate": args.center_rate,
            "sub_poissonian_policy": _sub_poissonian(args.sub_poissonian),
        })
    return RunConfig.build(args.config, **overrides)


def _configure_logging(args):
    level = logging.DEBUG if args.verbose else logging.WARNING if args.quiet else logging.INFO
    logging.basicConfig(level=level, format="%(asctime)s %(levelname)s %(name)s: %(message)s")


def run(args):
    config = config_from_args(args)
    if args.command == "evaluate":
        cmd_evaluate(args.input, config)
    elif args.command == "simulate":
        cmd_simulate(config, args.model, args.output, n_series=args.n_series, n_days=args.n_days,
                     rate_min=args.rate_min, rate_max=args.rate_max, grade=args.grade,
                     bias_multiplier=args.bias_multiplier, weekday_amplitude=args.weekday_amplitude,
                     horizon_days=args.horizon, m5_dir=args.m5_dir)
    else:
        cmd_curves(config, args.grid_min, args.grid_max, args.grid_points)
    return EXIT_OK


def main(argv=None):
    args = build_parser().parse_args(argv)
    _configure_logging(args)
    try:
        return run(args)
    except (ConfigError, InsufficientHistory) as err:
        print("error: " + str(err), file=sys.stderr)
        return EXIT_CONFIG
    except (InputValidationError, MissingFile, RatingError) as err:
        print("error: " + str(err), file=sys.stderr)
        return EXIT_INPUT
