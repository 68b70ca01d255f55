"""Flat `section.key = value` pipeline configuration.

Defaults cover every tunable; a config file and CLI `--set` overrides
layer on top. Unknown keys and out-of-range values are rejected up front.
The config file path can also come from the NEWSBAND_CONFIG environment
variable.
"""

import os
from dataclasses import dataclass

from .band_detection import HoughConfig, default_hough_config
from .reasoning import ReasoningConfig
from .text_detection import TextDetectorConfig

CONFIG_ENV_VAR = "NEWSBAND_CONFIG"

DEFAULTS = {
    "pipeline.seed": 0,
    "edges.binarize_threshold": 0.1,
    "hough.vote_threshold": 30,
    "hough.min_line_length": 0,  # 0 = derive as 0.2 * min(frame dims)
    "hough.max_gap": 5,
    "hough.angle_tolerance_deg": 2.0,
    "hough.cluster_tolerance": 5,
    "text.alpha": 2.0,
    "text.hp_threshold_fraction": 0.25,
    "text.vp_threshold_fraction": 0.25,
    "text.min_band_height": 8,
    "features.saturation_threshold": 64,
    "features.farthest_neighbor_threshold": 100,
    "features.ranked_bins": 512,
    "classifier.hidden_count": 1000,
    "classifier.activation": "sigmoid",
    "change.diff_threshold": 20,
    "change.dist_threshold": 0.3,
    "change.cell_size": 50,
    "change.histogram_bins": 4096,
    "change.static_override_pairs": 5,
    "reasoning.tier1_threshold": 0.2,
    "reasoning.tier2_edge_threshold": 0.08,
    "reasoning.tier3_overlap_threshold": 0.5,
    "reasoning.histogram_bins": 64,
}

_RANGE_CHECKS = {
    "edges.binarize_threshold": lambda v: v > 0,
    "hough.vote_threshold": lambda v: v >= 1,
    "hough.min_line_length": lambda v: v >= 0,
    "hough.max_gap": lambda v: v >= 1,
    "hough.angle_tolerance_deg": lambda v: 0 < v < 45,
    "hough.cluster_tolerance": lambda v: v >= 1,
    "text.alpha": lambda v: v > 0,
    "text.hp_threshold_fraction": lambda v: 0 < v <= 1,
    "text.vp_threshold_fraction": lambda v: 0 < v <= 1,
    "text.min_band_height": lambda v: v >= 1,
    "features.saturation_threshold": lambda v: 0 <= v <= 765,
    "features.farthest_neighbor_threshold": lambda v: 0 <= v <= 765,
    "features.ranked_bins": lambda v: 1 <= v <= 32768,
    "classifier.hidden_count": lambda v: v >= 1,
    "classifier.activation": lambda v: v in ("sigmoid", "rbf"),
    "change.diff_threshold": lambda v: 0 <= v <= 255,
    "change.dist_threshold": lambda v: 0 < v < 1,
    "change.cell_size": lambda v: v >= 1,
    "change.histogram_bins": lambda v: 1 <= v <= 32768,
    "change.static_override_pairs": lambda v: v >= 1,
    "reasoning.tier1_threshold": lambda v: 0 < v <= 1,
    "reasoning.tier2_edge_threshold": lambda v: v > 0,
    "reasoning.tier3_overlap_threshold": lambda v: 0 < v <= 1,
    "reasoning.histogram_bins": lambda v: 1 <= v <= 32768,
}


def _coerce(key: str, raw: str):
    default = DEFAULTS[key]
    try:
        if isinstance(default, int):
            return int(raw)
        if isinstance(default, float):
            return float(raw)
    except ValueError:
        raise ValueError(f"config key {key!r}: cannot parse {raw!r}")
    return raw


@dataclass(frozen=True)
class PipelineConfig:
    values: dict

    def __getitem__(self, key):
        return self.values[key]

    @property
    def seed(self) -> int:
        return self.values["pipeline.seed"]

    def hough_config(self, width: int, height: int) -> HoughConfig:
        min_len = self.values["hough.min_line_length"]
        params = dict(
            vote_threshold=self.values["hough.vote_threshold"],
            max_gap=self.values["hough.max_gap"],
            angle_tolerance_deg=self.values["hough.angle_tolerance_deg"],
            cluster_tolerance=self.values["hough.cluster_tolerance"])
        if min_len > 0:
            return HoughConfig(min_line_length=min_len, **params)
        return default_hough_config(width, height, **params)

    def text_config(self) -> TextDetectorConfig:
        return TextDetectorConfig(
            alpha=self.values["text.alpha"],
            hp_threshold_fraction=self.values["text.hp_threshold_fraction"],
            vp_threshold_fraction=self.values["text.vp_threshold_fraction"],
            min_band_height=self.values["text.min_band_height"])

    def reasoning_config(self) -> ReasoningConfig:
        return ReasoningConfig(
            tier1_threshold=self.values["reasoning.tier1_threshold"],
            tier2_edge_threshold=self.values["reasoning.tier2_edge_threshold"],
            tier3_overlap_threshold=self.values["reasoning.tier3_overlap_threshold"],
            histogram_bins=self.values["reasoning.histogram_bins"])


def parse_config_text(text: str) -> dict:
    """`key = value` lines into typed overrides; `#` comments ignored."""
    overrides = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if "=" not in line:
            raise ValueError(f"line {lineno}: expected `key = value`, got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in DEFAULTS:
            raise ValueError(f"line {lineno}: unknown config key {key!r}")
        overrides[key] = _coerce(key, value)
    return overrides


def load_config(path=None, overrides=None) -> PipelineConfig:
    """Defaults, then the config file, then explicit overrides."""
    values = dict(DEFAULTS)
    if path is None:
        path = os.environ.get(CONFIG_ENV_VAR) or None
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            values.update(parse_config_text(fh.read()))
    for key, value in (overrides or {}).items():
        if key not in DEFAULTS:
            raise ValueError(f"unknown config key {key!r}")
        values[key] = _coerce(key, value) if isinstance(value, str) else value
    for key, check in _RANGE_CHECKS.items():
        if not check(values[key]):
            raise ValueError(f"config key {key!r} out of range: {values[key]!r}")
    return PipelineConfig(values)
