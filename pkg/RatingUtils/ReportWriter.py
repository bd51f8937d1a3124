"""
Assembles rating results into the report files:
    report.json     run metadata and, per group, the overall rating, the buckets
                    and the overall metrics in the context of every grade
    buckets.csv     one row per group and bucket
    plot_data.csv   one row per group, bucket and metric: achieved vs references
    contexts.csv    one row per group and metric: overall achieved vs references
Numbers are rounded to REPORT_SIGNIFICANT_DIGITS unless raw output is requested.
All files are written atomically.
"""
# -*- coding: utf-8 -*-

import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from . import GlobalSettings

logger = logging.getLogger(__name__)

REPORT_FILE = "report.json"
BUCKETS_FILE = "buckets.csv"
PLOT_DATA_FILE = "plot_data.csv"
CONTEXTS_FILE = "contexts.csv"
CURVES_FILE = "curves.csv"
SCHEMA_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "res", "report_schema.json")
SCHEMA_VERSION = 1


def round_significant(value, digits=GlobalSettings.REPORT_SIGNIFICANT_DIGITS):
    """value rounded to digits significant digits; None for missing or non-finite values"""
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    if digits is None or value == 0:
        return value
    return float("%.*g" % (digits, value))


@dataclass
class GroupResult:
    """The rating of one group of pairs"""

    labels: dict # group column -> value, empty for the whole portfolio
    rating: object # PortfolioRating
    n_pairs: int
    total_prediction: float
    total_actual: int

    @property
    def name(self):
        return "/".join(str(v) for v in self.labels.values()) or "all"


@dataclass
class RatingReport:
    """
    Everything an evaluate run reports, independent of the file format
    """

    config: object # RunConfig
    groups: list = field(default_factory=list)
    source: str = None

    def _digits(self, raw):
        return None if raw else GlobalSettings.REPORT_SIGNIFICANT_DIGITS

    def to_dict(self, raw=False):
        digits = self._digits(raw)
        return {
            "schema_version": SCHEMA_VERSION,
            "meta": {
                "source": self.source,
                "config": self.config.to_dict(),
                "n_pairs": int(sum(g.n_pairs for g in self.groups)),
                "total_prediction": round_significant(sum(g.total_prediction for g in self.groups), digits),
                "total_actual": int(sum(g.total_actual for g in self.groups)),
                "n_groups": len(self.groups),
            },
            "groups": [self._group_dict(g, digits) for g in self.groups],
        }

    def _group_dict(self, group, digits):
        overall = group.rating.overall
        return {
            "group": {k: str(v) for k, v in group.labels.items()},
            "n_pairs": group.n_pairs,
            "total_prediction": round_significant(group.total_prediction, digits),
            "total_actual": group.total_actual,
            "overall": {
                "noise_metric": overall.noise_metric.name,
                "noise_score": round_significant(overall.noise_score, digits),
                "noise_label": overall.noise_label,
                "bias_score": round_significant(overall.bias_score, digits),
                "bias_label": overall.bias_label,
                "bias_factor": round_significant(overall.bias_factor, digits),
                "achieved": {k.name: round_significant(v, digits) for k, v in overall.achieved.items()},
            },
            "contexts": {k.name: {grade: round_significant(v, digits) for grade, v in refs.items()}
                         for k, refs in overall.contexts.items()},
            "buckets": [self._bucket_dict(b, digits) for b in group.rating.buckets],
        }

    def _bucket_dict(self, bucket, digits):
        references = {}
        for (kind, grade), value in bucket.references.items():
            references.setdefault(kind.name, {})[grade] = round_significant(value, digits)
        return {
            "R": round_significant(bucket.key.R, digits),
            "center_rate": round_significant(bucket.key.center_rate, digits),
            "n": bucket.n,
            "total_prediction": round_significant(bucket.total_prediction, digits),
            "total_actual": int(bucket.total_actual),
            "bias_factor": round_significant(bucket.bias_factor, digits),
            "bias_factor_plot": round_significant(self.plot_bias_factor(bucket), digits),
            "achieved": {k.name: round_significant(v, digits) for k, v in bucket.achieved.items()},
            "references": references,
            "noise_score": round_significant(bucket.noise_score, digits),
            "bias_score": round_significant(bucket.bias_score, digits),
            "weight": round_significant(bucket.weight, digits),
            "flags": sorted(bucket.flags),
        }

    def plot_bias_factor(self, bucket):
        """The bucket bias factor clipped to [1/clip, clip] for drawing"""
        clip = self.config.bias_plot_clip
        return float(np.clip(bucket.bias_factor, 1.0 / clip, clip))

    def bucket_frame(self, raw=False):
        digits = self._digits(raw)
        rows = []
        for group in self.groups:
            for bucket in group.rating.buckets:
                row = dict(group.labels)
                row.update({
                    "R": bucket.key.R,
                    "center_rate": round_significant(bucket.key.center_rate, digits),
                    "n": bucket.n,
                    "total_prediction": round_significant(bucket.total_prediction, digits),
                    "total_actual": int(bucket.total_actual),
                    "bias_factor": round_significant(bucket.bias_factor, digits),
                    "noise_score": round_significant(bucket.noise_score, digits),
                    "bias_score": round_significant(bucket.bias_score, digits),
                    "flags": ";".join(sorted(bucket.flags)),
                })
                for kind, value in bucket.achieved.items():
                    row[kind.name] = round_significant(value, digits)
                rows.append(row)
        return pd.DataFrame(rows)

    def plot_frame(self, raw=False):
        """Per bucket and metric: the achieved value next to the value of every grade"""
        digits = self._digits(raw)
        ladder = self.config.ladder
        rows = []
        for group in self.groups:
            for bucket in group.rating.buckets:
                for kind, value in bucket.achieved.items():
                    row = dict(group.labels)
                    row.update({"R": bucket.key.R, "center_rate": bucket.key.center_rate,
                                "metric": kind.name})
                    if kind.is_error_metric:
                        row["achieved"] = round_significant(value, digits)
                        for (ref_kind, grade), ref in bucket.references.items():
                            if ref_kind is kind:
                                row[grade] = round_significant(ref, digits)
                    else:
                        row["achieved"] = round_significant(self.plot_bias_factor(bucket), digits)
                        row.update({g.name: g.bias_factor for g in ladder.grades})
                    rows.append(row)
        return pd.DataFrame(rows)

    def context_frame(self, raw=False):
        digits = self._digits(raw)
        rows = []
        for group in self.groups:
            overall = group.rating.overall
            for kind, value in overall.achieved.items():
                row = dict(group.labels)
                row.update({"metric": kind.name, "achieved": round_significant(value, digits)})
                row.update({grade: round_significant(v, digits) for grade, v in overall.contexts[kind].items()})
                rows.append(row)
        return pd.DataFrame(rows)


def atomic_write_text(path, text):
    """Writes text to a temporary file next to path, then renames it over path"""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    handle, tmp_path = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=os.path.basename(path))
    try:
        with os.fdopen(handle, "w", encoding="utf-8", newline="") as stream:
            stream.write(text)
        os.replace(tmp_path, path)
    except BaseException:
        if os.path.exists(tmp_path):
            os.remove(tmp_path)
        raise
    logger.info("wrote %s", path)
    return path


def write_frame(frame, path, raw=False):
    float_format = None if raw else "%.6g"
    return atomic_write_text(path, frame.to_csv(index=False, float_format=float_format))


def write_report(report, output_dir, raw=False):
    """Writes report.json and the three CSV tables; returns the written paths"""
    text = json.dumps(report.to_dict(raw), indent=2, sort_keys=False, allow_nan=False)
    return [
        atomic_write_text(os.path.join(output_dir, REPORT_FILE), text + "\n"),
        write_frame(report.bucket_frame(raw), os.path.join(output_dir, BUCKETS_FILE), raw),
        write_frame(report.plot_frame(raw), os.path.join(output_dir, PLOT_DATA_FILE), raw),
        write_frame(report.context_frame(raw), os.path.join(output_dir, CONTEXTS_FILE), raw),
    ]


def load_schema():
    with open(SCHEMA_PATH, "r", encoding="utf-8") as stream:
        return json.load(stream)
