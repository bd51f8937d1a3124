"""
Run configuration of the rating tools.

Defaults come from GlobalSettings, a YAML file may override any field and command
line flags override the file. Every problem found is reported at once through
ConfigError.
"""
# -*- coding: utf-8 -*-

import logging
import os
from dataclasses import asdict, dataclass, field, fields, replace

import yaml

from ForecastRating.ForecastMetrics import MetricKind
from ForecastRating.GradeLadder import GradeLadder
from ForecastRating.RatingErrors import ConfigError, UnknownMetric, MissingFile
from . import GlobalSettings

logger = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = os.path.join(os.path.dirname(os.path.abspath(__file__)), "res", "default_config.yaml")


@dataclass(frozen=True)
class RunConfig: # pylint: disable=too-many-instance-attributes
    """
    Everything a rating run depends on. Build with RunConfig.build(), which validates.
    """

    n_bins: int = GlobalSettings.N_BINS
    gamma: float = GlobalSettings.GAMMA
    clip_floor: float = GlobalSettings.CLIP_FLOOR
    bias_plot_clip: float = GlobalSettings.BIAS_PLOT_CLIP
    ladder_table: dict = field(default_factory=lambda: GradeLadder.default().to_table())
    sub_poissonian_policy: object = GlobalSettings.SUB_POISSONIAN_POLICY
    group_by: tuple = ()
    metrics: tuple = GlobalSettings.REPORT_METRICS
    noise_metric: str = GlobalSettings.NOISE_METRIC
    low_evidence_prediction: float = GlobalSettings.LOW_EVIDENCE_PREDICTION
    center_rate: bool = False
    output_dir: str = "."
    seed: int = 0
    svg: bool = False
    raw: bool = False

    @property
    def ladder(self):
        return GradeLadder.from_table(self.ladder_table, self.gamma)

    @classmethod
    def build(cls, path=None, **overrides):
        """
        Defaults, then the YAML file at path (if any), then overrides whose value is not None
        """
        values = {}
        if path is not None:
            values.update(load_yaml(path))
        values.update({k: v for k, v in overrides.items() if v is not None})
        return cls.from_mapping(values)

    @classmethod
    def from_mapping(cls, values):
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(values) - known)
        if unknown:
            raise ConfigError(["unknown key '" + k + "'" for k in unknown])
        values = dict(values)
        for key in ("group_by", "metrics"):
            if key in values and isinstance(values[key], str):
                values[key] = tuple(v.strip() for v in values[key].split(",") if v.strip())
            elif key in values:
                values[key] = tuple(values[key])
        config = cls(**values)
        config.validate()
        return config

    def with_overrides(self, **overrides):
        config = replace(self, **{k: v for k, v in overrides.items() if v is not None})
        config.validate()
        return config

    def validate(self): # pylint: disable=too-many-branches
        problems = []
        if not _is_int(self.n_bins) or not 1 <= self.n_bins <= 100:
            problems.append("n_bins must be an integer in [1, 100], got " + repr(self.n_bins))
        if not _is_number(self.gamma) or not 0.5 <= self.gamma <= 3:
            problems.append("gamma must be in [0.5, 3], got " + repr(self.gamma))
        if not _is_number(self.clip_floor) or not 0 < self.clip_floor <= 1:
            problems.append("clip_floor must be in (0, 1], got " + repr(self.clip_floor))
        if not _is_number(self.bias_plot_clip) or not self.bias_plot_clip > 1:
            problems.append("bias_plot_clip must be > 1, got " + repr(self.bias_plot_clip))
        if not _is_number(self.low_evidence_prediction) or self.low_evidence_prediction < 0:
            problems.append("low_evidence_prediction must be >= 0, got " + repr(self.low_evidence_prediction))
        if not _is_int(self.seed) or self.seed < 0:
            problems.append("seed must be an integer >= 0, got " + repr(self.seed))

        policy = self.sub_poissonian_policy
        if policy != "flag" and not (_is_number(policy) and 0 <= policy <= 100):
            problems.append("sub_poissonian_policy must be 'flag' or a score in [0, 100], got "
                            + repr(policy))

        for name in tuple(self.metrics) + (self.noise_metric,):
            try:
                MetricKind.parse(name)
            except UnknownMetric as err:
                problems.append(str(err))
        try:
            if not MetricKind.parse(self.noise_metric).is_error_metric:
                problems.append("noise_metric must be one of MAE, RMAE, MRPS, RMRPS")
        except UnknownMetric:
            pass

        problems += _ladder_problems(self.ladder_table, self.gamma)
        if problems:
            raise ConfigError(problems)

    def to_dict(self):
        out = asdict(self)
        out["group_by"] = list(self.group_by)
        out["metrics"] = list(self.metrics)
        return out


def _is_number(value):
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _is_int(value):
    return isinstance(value, int) and not isinstance(value, bool)


def _ladder_problems(table, gamma):
    if not isinstance(table, dict):
        return ["ladder_table must map grade names to variance_at_10 and bias_factor"]
    problems = []
    for name, row in table.items():
        if not isinstance(row, dict) or set(row) != {"variance_at_10", "bias_factor"}:
            problems.append("grade '" + str(name) + "' needs exactly variance_at_10 and bias_factor")
    if problems:
        return problems
    try:
        GradeLadder.from_table(table, gamma if _is_number(gamma) and gamma > 0 else GlobalSettings.GAMMA)
    except ConfigError as err:
        return list(err.problems)
    except (TypeError, ValueError) as err:
        return ["ladder_table: " + str(err)]
    return []


def load_yaml(path):
    """The mapping stored in a YAML config file"""
    if not os.path.isfile(path):
        raise MissingFile("config file not found: " + str(path))
    with open(path, "r") as stream:
        try:
            values = yaml.safe_load(stream)
        except yaml.YAMLError as err:
            raise ConfigError(["cannot parse " + str(path) + ": " + str(err)])
    if values is None:
        return {}
    if not isinstance(values, dict):
        raise ConfigError([str(path) + " must hold a mapping of config keys"])
    logger.info("loaded config overrides %s from %s", sorted(values), path)
    return values
