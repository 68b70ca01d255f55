"""Text band localization from contrast-enhanced gradient projection profiles.

Pipeline: normalized gradient magnitude -> linear contrast enhancement
(suppressing weak gradients) -> histogram equalization -> row projection
profile for horizontal bands -> per-band column profile for the final
rectangles.
"""

from dataclasses import dataclass

import numpy as np

from .band_detection import Band
from .imaging import histogram_equalize, scharr_magnitude, to_gray


@dataclass(frozen=True)
class TextDetectorConfig:
    alpha: float = 2.0
    hp_threshold_fraction: float = 0.25
    vp_threshold_fraction: float = 0.25
    min_band_height: int = 8

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError("alpha must be positive")
        for name in ("hp_threshold_fraction", "vp_threshold_fraction"):
            v = getattr(self, name)
            if not 0 < v <= 1:
                raise ValueError(f"{name} must lie in (0, 1]")
        if self.min_band_height <= 0:
            raise ValueError("min_band_height must be positive")


def contrast_enhance(im: np.ndarray, cfg: TextDetectorConfig) -> np.ndarray:
    """Suppress weak gradient magnitudes and stretch the rest to [0, 1].

    beta = alpha * (v - 0.5) + 0.5 per pixel; non-positive beta is zeroed
    and the survivors are divided by the largest beta so the output peaks
    at 1. An image with no positive beta comes back all zero.
    """
    im = np.asarray(im, dtype=np.float64)
    beta = cfg.alpha * (im - 0.5) + 0.5
    positive = beta > 0
    if not positive.any():
        return np.zeros_like(im)
    lam = beta[positive].max()
    return np.where(positive, beta / lam, 0.0)


def _runs_at_least(member: np.ndarray, min_len: int):
    """Maximal runs of True as inclusive (start, end) pairs, min length filter."""
    runs = []
    start = None
    for i, flag in enumerate(member):
        if flag and start is None:
            start = i
        elif not flag and start is not None:
            if i - start >= min_len:
                runs.append((start, i - 1))
            start = None
    if start is not None and len(member) - start >= min_len:
        runs.append((start, len(member) - 1))
    return runs


def horizontal_bands(omega: np.ndarray, cfg: TextDetectorConfig):
    """Inclusive (y1, y2) row intervals where the row profile is strong.

    Rows whose projection reaches hp_threshold_fraction of the profile
    maximum form runs; runs shorter than min_band_height are dropped.
    """
    omega = np.asarray(omega, dtype=np.float64)
    profile = omega.sum(axis=1)
    peak = profile.max()
    if peak <= 0:
        return []
    member = profile >= cfg.hp_threshold_fraction * peak
    return _runs_at_least(member, cfg.min_band_height)


def vertical_bands(omega: np.ndarray, hband, cfg: TextDetectorConfig):
    """Inclusive (x1, x2) column intervals strong within one horizontal band."""
    omega = np.asarray(omega, dtype=np.float64)
    y1, y2 = hband
    if not (0 <= y1 < y2 < omega.shape[0]):
        raise ValueError(f"invalid horizontal band ({y1}, {y2})")
    profile = omega[y1:y2 + 1, :].sum(axis=0)
    peak = profile.max()
    if peak <= 0:
        return []
    member = profile >= cfg.vp_threshold_fraction * peak
    return _runs_at_least(member, 1)


def detect_text(frame: np.ndarray, cfg: TextDetectorConfig = TextDetectorConfig()):
    """Locate text regions in a frame; returns disjoint text-labeled Bands."""
    mag = scharr_magnitude(to_gray(frame))
    enhanced = contrast_enhance(mag, cfg)
    if not enhanced.any():
        return []
    omega = histogram_equalize(np.rint(enhanced * 255).astype(np.uint8))
    regions = []
    for y1, y2 in horizontal_bands(omega, cfg):
        for x1, x2 in vertical_bands(omega, (y1, y2), cfg):
            regions.append(Band(x1, y1, x2 - x1 + 1, y2 - y1 + 1,
                                label="text", provenance="text"))
    return regions
