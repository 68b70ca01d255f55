"""Pixel-level primitives and histogram math shared by all downstream stages.

Images are plain numpy arrays throughout: RGB frames are ``(h, w, 3)``
uint8, gray images are ``(h, w)`` uint8 (or float64 in [0, 1] where a
normalized gradient image is meant). PNG/JPEG decoding happens only here,
at the module boundary.
"""

import math

import numpy as np
from PIL import Image

# Largest sqrt(Gx^2 + Gy^2) any 3x3 neighborhood of [0,1] values can produce
# with the 3/10/3 kernels; the maximum of a convex function over the unit
# hypercube sits at a binary vertex, so sqrt(356) is exact.
SCHARR_MAX_MAGNITUDE = math.sqrt(356.0)


def load_image(path) -> np.ndarray:
    """Decode a PNG/JPEG file into an (h, w, 3) uint8 RGB frame."""
    with Image.open(path) as im:
        return np.asarray(im.convert("RGB"), dtype=np.uint8)


def save_image(path, img: np.ndarray) -> None:
    """Encode an RGB frame or uint8 gray image to disk (format from suffix)."""
    Image.fromarray(img).save(path)


def validate_frame(frame: np.ndarray) -> np.ndarray:
    """Check that `frame` is a non-empty (h, w, 3) uint8 raster."""
    frame = np.asarray(frame)
    if frame.ndim != 3 or frame.shape[2] != 3:
        raise ValueError(f"expected (h, w, 3) RGB frame, got shape {frame.shape}")
    if frame.shape[0] == 0 or frame.shape[1] == 0:
        raise ValueError("empty frame")
    if frame.dtype != np.uint8:
        raise ValueError(f"expected uint8 channels, got {frame.dtype}")
    return frame


def to_gray(frame: np.ndarray) -> np.ndarray:
    """Convert RGB to gray as the rounded unweighted channel mean.

    The channel sum is an integer, so sum/3 never lands on .5 and the
    rounding is unambiguous.
    """
    frame = validate_frame(frame)
    sums = frame.astype(np.int32).sum(axis=2)
    return np.rint(sums / 3.0).astype(np.uint8)


def to_monochrome32(frame: np.ndarray) -> np.ndarray:
    """Pack each pixel into a single code in [0, 32767].

    Channels are quantized to 32 levels (c // 8, giving 0..31) and packed
    as 1024*r + 32*g + b, which is injective on the quantized triples.
    """
    frame = validate_frame(frame)
    q = (frame >> 3).astype(np.int32)
    return q[..., 0] * 1024 + q[..., 1] * 32 + q[..., 2]


def normalized_histogram(values: np.ndarray, bin_count: int,
                         value_range: tuple) -> np.ndarray:
    """Equal-width histogram over `value_range`, normalized to sum 1.

    `values` may be any shape; it is flattened. Raises on empty input or a
    non-positive bin count.
    """
    values = np.asarray(values)
    if values.size == 0:
        raise ValueError("cannot build a histogram of an empty image")
    if bin_count < 1:
        raise ValueError("bin_count must be >= 1")
    counts, _ = np.histogram(values, bins=bin_count, range=value_range)
    total = counts.sum()
    if total == 0:
        raise ValueError("no values fall inside value_range")
    return counts.astype(np.float64) / total


def bhattacharyya_distance(h1: np.ndarray, h2: np.ndarray) -> float:
    """Histogram dissimilarity in [0, 1]; 0 for identical normalized inputs.

    d = sqrt(1 - sum_i sqrt(h1[i]*h2[i]) / sqrt(m1*m2*N^2)) with m_k the
    mean bin value of h_k. Computed in the equivalent sum-normalized form
    d^2 = 0.5 * sum_i (sqrt(p_i) - sqrt(q_i))^2 so that identical inputs
    give exactly 0 and symmetry is exact; clamped against rounding drift.
    """
    h1 = np.asarray(h1, dtype=np.float64)
    h2 = np.asarray(h2, dtype=np.float64)
    if h1.shape != h2.shape:
        raise ValueError(f"bin counts differ: {h1.shape} vs {h2.shape}")
    if (h1 < 0).any() or (h2 < 0).any():
        raise ValueError("histogram bins must be non-negative")
    s1, s2 = h1.sum(), h2.sum()
    if s1 <= 0 or s2 <= 0:
        raise ValueError("degenerate (all-zero) histogram")
    diff = np.sqrt(h1 / s1) - np.sqrt(h2 / s2)
    return min(1.0, math.sqrt(0.5 * np.square(diff).sum()))


def histogram_equalize(img: np.ndarray) -> np.ndarray:
    """Standard cumulative-distribution remap of a uint8 gray image.

    The lowest occupied level maps to 0 and the highest to 255; a constant
    image maps to all-255. The intensity transform is monotone
    non-decreasing.
    """
    img = np.asarray(img)
    if img.dtype != np.uint8:
        raise ValueError("histogram_equalize expects a uint8 gray image")
    if img.size == 0:
        raise ValueError("empty image")
    counts = np.bincount(img.ravel(), minlength=256)
    cdf = counts.cumsum()
    cdf_min = cdf[img.min()]
    denom = cdf[-1] - cdf_min
    if denom == 0:
        return np.full_like(img, 255)
    lut = np.rint((cdf - cdf_min) * 255.0 / denom).astype(np.uint8)
    return lut[img]


def _as_unit_gray(img: np.ndarray) -> np.ndarray:
    img = np.asarray(img)
    if img.ndim != 2:
        raise ValueError(f"expected a gray image, got shape {img.shape}")
    if np.issubdtype(img.dtype, np.integer):
        return img.astype(np.float64) / 255.0
    return img.astype(np.float64)


def scharr_magnitude(img: np.ndarray) -> np.ndarray:
    """Normalized gradient magnitude with the 3/10/3 kernel pair.

    Accepts uint8 [0,255] or float [0,1] gray input; returns float64 in
    [0, 1] (division by SCHARR_MAX_MAGNITUDE). Border pixels are 0.
    """
    g = _as_unit_gray(img)
    h, w = g.shape
    if h < 3 or w < 3:
        raise ValueError("image smaller than the 3x3 kernel")
    tl, t, tr = g[:-2, :-2], g[:-2, 1:-1], g[:-2, 2:]
    ml, mr = g[1:-1, :-2], g[1:-1, 2:]
    bl, b, br = g[2:, :-2], g[2:, 1:-1], g[2:, 2:]
    gx = 3.0 * (tr - tl) + 10.0 * (mr - ml) + 3.0 * (br - bl)
    gy = 3.0 * (bl - tl) + 10.0 * (b - t) + 3.0 * (br - tr)
    out = np.zeros((h, w), dtype=np.float64)
    out[1:-1, 1:-1] = np.hypot(gx, gy) / SCHARR_MAX_MAGNITUDE
    return out
