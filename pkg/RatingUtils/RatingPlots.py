"""
SVG figures of a rating: bucket scatter of an achieved metric against the grade
references, the bucket bias factors, and the reference curves over the rate.
"""
# -*- coding: utf-8 -*-

import io
import logging

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt # pylint: disable=wrong-import-position
import numpy as np # pylint: disable=wrong-import-position

from ForecastRating.ForecastMetrics import poisson_expected_metric # pylint: disable=wrong-import-position
from .ReportWriter import atomic_write_text # pylint: disable=wrong-import-position

logger = logging.getLogger(__name__)

# fixed ids and no timestamp, so identical runs give identical files
matplotlib.rcParams["svg.hashsalt"] = "forecast-rating"

POISSON_LINE_POINTS = 100


def _grade_colors(names):
    cmap = plt.get_cmap("viridis")
    return {name: cmap(i / max(len(names) - 1, 1)) for i, name in enumerate(names)}


def _save_svg(fig, path):
    buffer = io.StringIO()
    fig.savefig(buffer, format="svg", metadata={"Date": None})
    plt.close(fig)
    return atomic_write_text(path, buffer.getvalue())


def poisson_line(kind, low, high, points=POISSON_LINE_POINTS):
    """(rates, values): what a Poisson forecast expects to achieve at single rates from low to high"""
    rates = np.geomspace(low, high, points)
    return rates, np.array([poisson_expected_metric(kind, [rate]) for rate in rates])


def plot_noise(group, kind, ladder, path):
    """
    Achieved metric per bucket (dots) with the reference value of every grade (lines),
    over the bucket center rate on a log axis
    """
    buckets = [b for b in group.rating.buckets if kind in b.achieved]
    rates = np.array([b.key.center_rate for b in buckets])
    colors = _grade_colors(ladder.names)

    fig, ax = plt.subplots(figsize=(8, 5))
    for grade in ladder.names:
        values = [b.references.get((kind, grade), np.nan) for b in buckets]
        ax.plot(rates, values, color=colors[grade], linewidth=1.0, label=grade)
    if len(buckets):
        line_rates, line_values = poisson_line(kind, rates.min(), rates.max())
        ax.plot(line_rates, line_values, color="black", linewidth=1.5, label="Poisson")
    ax.scatter(rates, [b.achieved[kind] for b in buckets], color="black", zorder=3, label="achieved")
    ax.set_xscale("log")
    if not kind.is_relative:
        ax.set_yscale("log")
    ax.set_xlabel("predicted rate")
    ax.set_ylabel(kind.name)
    ax.set_title(group.name + ": " + kind.name + " per bucket")
    ax.legend(fontsize="small")
    fig.tight_layout()
    return _save_svg(fig, path)


def plot_bias(group, ladder, bias_plot_clip, path):
    """Bucket bias factors, clipped to [1/clip, clip], with the grade bias bands"""
    buckets = group.rating.buckets
    rates = np.array([b.key.center_rate for b in buckets])
    factors = np.clip([b.bias_factor for b in buckets], 1.0 / bias_plot_clip, bias_plot_clip)
    colors = _grade_colors(ladder.names)

    fig, ax = plt.subplots(figsize=(8, 5))
    for grade in ladder.grades[1:]:
        for factor in (grade.bias_factor, 1.0 / grade.bias_factor):
            ax.axhline(factor, color=colors[grade.name], linewidth=0.8)
    ax.axhline(1.0, color="grey", linestyle="--", linewidth=0.8)
    ax.scatter(rates, factors, color="black", zorder=3)
    ax.set_xscale("log")
    ax.set_yscale("log")
    ax.set_ylim(1.0 / bias_plot_clip, bias_plot_clip)
    ax.set_xlabel("predicted rate")
    ax.set_ylabel("bias factor")
    ax.set_title(group.name + ": bias per bucket")
    fig.tight_layout()
    return _save_svg(fig, path)


def plot_curves(curves, path):
    """One panel per metric of a reference_curves table"""
    metrics = list(dict.fromkeys(curves["metric"]))
    grades = list(dict.fromkeys(curves["grade"]))
    colors = _grade_colors(grades)

    fig, axes = plt.subplots(1, len(metrics), figsize=(5 * len(metrics), 4), squeeze=False)
    for ax, metric in zip(axes[0], metrics):
        rows = curves[curves["metric"] == metric]
        for grade in grades:
            line = rows[rows["grade"] == grade]
            ax.plot(line["rate"], line["value"], color=colors[grade], label=grade)
        ax.set_xscale("log")
        if not metric.startswith("R"):
            ax.set_yscale("log")
        ax.set_xlabel("predicted rate")
        ax.set_title(metric)
    axes[0][0].legend(fontsize="small")
    fig.tight_layout()
    return _save_svg(fig, path)
