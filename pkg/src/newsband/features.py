"""Band descriptors separating camera content from computer graphics.

Eleven features over an RGB crop: five color statistics, a ranked color
histogram, a full HSV histogram, and four spatial statistics built on the
largest color jump between a pixel and its eight neighbors plus gradient
and gray-histogram shape. Concatenated they form a fixed 1320-dimensional
vector: 8 scalars, 512 ranked-histogram entries, 768 HSV entries and 32
edge-magnitude entries.
"""

import csv
import os
from dataclasses import dataclass

import numpy as np

from .imaging import (
    load_image,
    normalized_histogram,
    scharr_magnitude,
    to_gray,
    to_monochrome32,
    validate_frame,
)

FEATURE_DIMENSION = 1320
RANKED_BINS = 512
COLOR_HIST_BINS = 32768
FNH_BINS = 766
HSV_BINS = 768
EDGE_BINS = 32

CONTEXT_FORMAT_VERSION = 1


@dataclass(frozen=True)
class FeatureContext:
    """Class-average histograms and thresholds shared by all extractions."""
    avg_color_graphics: np.ndarray
    avg_color_natural: np.ndarray
    avg_fnh_graphics: np.ndarray
    avg_fnh_natural: np.ndarray
    saturation_threshold: int = 64
    farthest_neighbor_threshold: int = 100
    ranked_bins: int = RANKED_BINS

    def __post_init__(self):
        for name in ("avg_color_graphics", "avg_color_natural"):
            if getattr(self, name).shape != (COLOR_HIST_BINS,):
                raise ValueError(f"{name} must have {COLOR_HIST_BINS} bins")
        for name in ("avg_fnh_graphics", "avg_fnh_natural"):
            if getattr(self, name).shape != (FNH_BINS,):
                raise ValueError(f"{name} must have {FNH_BINS} bins")
        if not 0 <= self.saturation_threshold <= 765:
            raise ValueError("saturation_threshold out of range")
        if not 0 <= self.farthest_neighbor_threshold <= 765:
            raise ValueError("farthest_neighbor_threshold out of range")


def _packed_colors(img: np.ndarray) -> np.ndarray:
    img = validate_frame(img)
    flat = img.reshape(-1, 3).astype(np.uint32)
    return flat[:, 0] * 65536 + flat[:, 1] * 256 + flat[:, 2]


def _color_multiplicities(img: np.ndarray) -> np.ndarray:
    _, counts = np.unique(_packed_colors(img), return_counts=True)
    return counts


def distinct_color_score(img: np.ndarray) -> float:
    """Ratio of distinct colors to pixel count."""
    counts = _color_multiplicities(img)
    return counts.size / int(counts.sum())


def prevalent_color_score(img: np.ndarray) -> float:
    """Share of the single most frequent color."""
    counts = _color_multiplicities(img)
    return int(counts.max()) / int(counts.sum())


def saturation_levels(img: np.ndarray) -> np.ndarray:
    """Per-pixel greatest absolute channel difference, 0..255."""
    return np.ptp(validate_frame(img), axis=2)


def saturation_average(img: np.ndarray) -> float:
    return float(saturation_levels(img).mean())


def saturation_score(img: np.ndarray, ctx: FeatureContext) -> float:
    return float((saturation_levels(img) >= ctx.saturation_threshold).mean())


def color_histogram(img: np.ndarray) -> np.ndarray:
    """32768-bin histogram over 32-level quantized channels, L1 normalized."""
    codes = to_monochrome32(img).ravel()
    counts = np.bincount(codes, minlength=COLOR_HIST_BINS)
    return counts / codes.size


def _correlation(x: np.ndarray, y: np.ndarray) -> float:
    return float(np.dot(x, y))


def color_hist_metric(img: np.ndarray, ctx: FeatureContext) -> float:
    """graphics correlation / (graphics + natural correlation); ties and
    all-zero correlations fall back to 0.5."""
    h = color_histogram(img)
    graph = _correlation(h, ctx.avg_color_graphics)
    nat = _correlation(h, ctx.avg_color_natural)
    if graph + nat == 0:
        return 0.5
    return graph / (graph + nat)


def ranked_histogram(img: np.ndarray, ctx: FeatureContext) -> np.ndarray:
    """The largest `ctx.ranked_bins` values of the color histogram, descending."""
    h = color_histogram(img)
    top = np.sort(h)[::-1][:ctx.ranked_bins]
    if top.size < ctx.ranked_bins:
        top = np.pad(top, (0, ctx.ranked_bins - top.size))
    return top


def rgb_to_hsv_unit(img: np.ndarray) -> np.ndarray:
    """Vectorized hexcone RGB->HSV, all channels in [0, 1]."""
    rgb = validate_frame(img).astype(np.float64) / 255.0
    r, g, b = rgb[..., 0], rgb[..., 1], rgb[..., 2]
    mx = rgb.max(axis=2)
    mn = rgb.min(axis=2)
    delta = mx - mn
    safe_delta = np.where(delta > 0, delta, 1.0)
    h = np.zeros_like(mx)
    rmax = (delta > 0) & (mx == r)
    gmax = (delta > 0) & (mx == g) & ~rmax
    bmax = (delta > 0) & ~rmax & ~gmax
    h = np.where(rmax, ((g - b) / safe_delta) % 6.0, h)
    h = np.where(gmax, (b - r) / safe_delta + 2.0, h)
    h = np.where(bmax, (r - g) / safe_delta + 4.0, h)
    s = np.where(mx > 0, delta / np.where(mx > 0, mx, 1.0), 0.0)
    return np.stack([h / 6.0, s, mx], axis=-1)


def _hsv_byte_bins(img: np.ndarray):
    """256-level bin indices per HSV channel, in exact integer arithmetic.

    With hue expressed as q/delta (q integer in [0, 6*delta)), the bin
    floor(hue/6 * 256) is exactly q*128 // (3*delta). The saturation bin
    floor(delta/mx * 256) is delta*256 // mx, and the value bin equals
    max(r, g, b) itself: floor(mx/255 * 256) is mx below the clip at 255.
    """
    img = validate_frame(img)
    chans = img.astype(np.int32)
    r, g, b = chans[..., 0], chans[..., 1], chans[..., 2]
    mx = np.maximum(np.maximum(r, g), b)
    mn = np.minimum(np.minimum(r, g), b)
    delta = mx - mn
    nz = delta > 0
    safe_delta = np.where(nz, delta, 1)
    rmax = mx == r
    gmax = (mx == g) & ~rmax
    six_delta = 6 * safe_delta
    q = np.where(rmax, (g - b) % six_delta,
                 np.where(gmax, b - r + 2 * safe_delta,
                          r - g + 4 * safe_delta))
    q = np.where(nz, q, 0)
    h_bin = np.minimum(q * 128 // (3 * safe_delta), 255)
    s_bin = np.where(mx > 0,
                     np.minimum(delta * 256 // np.where(mx > 0, mx, 1), 255), 0)
    return h_bin, s_bin, mx


def hsv_histogram(img: np.ndarray) -> np.ndarray:
    """Three 256-bin channel histograms (H|S|V), each L1 normalized."""
    h_bin, s_bin, v_bin = _hsv_byte_bins(img)
    n = h_bin.size
    return np.concatenate([
        np.bincount(h_bin.ravel(), minlength=256) / n,
        np.bincount(s_bin.ravel(), minlength=256) / n,
        np.bincount(v_bin.ravel(), minlength=256) / n,
    ])


def farthest_neighbor_distances(img: np.ndarray) -> np.ndarray:
    """Largest L1 color distance from each pixel to its 8-neighborhood.

    Border pixels use their in-frame neighbors. The distance is symmetric,
    so each of the four forward offsets is computed once and feeds the
    running maximum of both pixels of the pair.
    """
    img = validate_frame(img)
    h, w = img.shape[:2]
    if h < 2 or w < 2:
        raise ValueError("farthest-neighbor features need at least 2x2 pixels")
    pix = img.astype(np.int16)
    best = np.zeros((h, w), dtype=np.int16)
    for dy, dx in ((0, 1), (1, 0), (1, 1), (1, -1)):
        ay = slice(0, h - dy)
        by = slice(dy, h)
        ax = slice(0, w - dx) if dx >= 0 else slice(-dx, w)
        bx = slice(dx, w) if dx >= 0 else slice(0, w + dx)
        d = np.abs(pix[by, bx] - pix[ay, ax]).sum(axis=2, dtype=np.int16)
        np.maximum(best[ay, ax], d, out=best[ay, ax])
        np.maximum(best[by, bx], d, out=best[by, bx])
    return best


def farthest_neighbor_score(img: np.ndarray, ctx: FeatureContext) -> float:
    d = farthest_neighbor_distances(img)
    return float((d >= ctx.farthest_neighbor_threshold).mean())


def farthest_neighbor_histogram(img: np.ndarray) -> np.ndarray:
    """766-bin histogram: bin i holds the pixel fraction with distance i."""
    d = farthest_neighbor_distances(img).ravel()
    return np.bincount(d, minlength=FNH_BINS) / d.size


def farthest_neighbor_hist_metric(img: np.ndarray, ctx: FeatureContext) -> float:
    """natural correlation / (natural + graphics correlation) of the FNH."""
    h = farthest_neighbor_histogram(img)
    nat = _correlation(h, ctx.avg_fnh_natural)
    graph = _correlation(h, ctx.avg_fnh_graphics)
    if nat + graph == 0:
        return 0.5
    return nat / (nat + graph)


def gray_smoothness(img: np.ndarray) -> float:
    """Total variation of the normalized 256-bin gray histogram.

    Spiky histograms (dominant flat colors) score high, spread-out natural
    histograms score low; the value lives in [0, 2].
    """
    gray = to_gray(img).ravel()
    hist = np.bincount(gray, minlength=256) / gray.size
    return float(np.abs(np.diff(hist)).sum())


def edge_magnitude_histogram(img: np.ndarray) -> np.ndarray:
    """32 equal-width bins of the normalized gradient magnitude."""
    mag = scharr_magnitude(to_gray(img))
    return normalized_histogram(mag, EDGE_BINS, (0.0, 1.0))


def assemble_feature_vector(img: np.ndarray, ctx: FeatureContext) -> np.ndarray:
    """Fixed-layout 1320-dim descriptor.

    Layout: [distinct, prevalent, saturation avg, saturation score, color
    hist metric, farthest-neighbor score, FNH metric, gray smoothness]
    then ranked histogram (512), HSV histogram (768), edge magnitudes (32).

    Expensive intermediates (color multiplicities, saturation levels, the
    quantized color histogram, neighbor distances, the gray image) are
    computed once and shared; every entry equals what the standalone
    feature function returns.
    """
    counts = _color_multiplicities(img)
    n_pixels = int(counts.sum())
    levels = saturation_levels(img)
    chist = color_histogram(img)
    graph = _correlation(chist, ctx.avg_color_graphics)
    nat = _correlation(chist, ctx.avg_color_natural)
    chm = 0.5 if graph + nat == 0 else graph / (graph + nat)
    top = np.sort(chist)[::-1][:ctx.ranked_bins]
    distances = farthest_neighbor_distances(img)
    fnh = np.bincount(distances.ravel(), minlength=FNH_BINS) / distances.size
    fnh_nat = _correlation(fnh, ctx.avg_fnh_natural)
    fnh_graph = _correlation(fnh, ctx.avg_fnh_graphics)
    fnm = 0.5 if fnh_nat + fnh_graph == 0 else fnh_nat / (fnh_nat + fnh_graph)
    gray = to_gray(img)
    gray_hist = np.bincount(gray.ravel(), minlength=256) / gray.size
    mag = scharr_magnitude(gray)

    scalars = np.array([
        counts.size / n_pixels,
        int(counts.max()) / n_pixels,
        float(levels.mean()),
        float((levels >= ctx.saturation_threshold).mean()),
        chm,
        float((distances >= ctx.farthest_neighbor_threshold).mean()),
        fnm,
        float(np.abs(np.diff(gray_hist)).sum()),
    ])
    vec = np.concatenate([
        scalars,
        top,
        hsv_histogram(img),
        normalized_histogram(mag, EDGE_BINS, (0.0, 1.0)),
    ])
    if vec.size != FEATURE_DIMENSION or not np.isfinite(vec).all():
        raise AssertionError("feature vector assembly violated its contract")
    return vec


def _list_images(directory):
    names = sorted(
        f for f in os.listdir(directory)
        if f.lower().endswith((".png", ".jpg", ".jpeg")))
    if not names:
        raise ValueError(f"no images found in {directory}")
    return [os.path.join(directory, f) for f in names]


def build_feature_context(graphics_dir, natural_dir, **thresholds) -> FeatureContext:
    """Average the per-image color and FNH histograms of each class."""
    averages = {}
    for key, directory in (("graphics", graphics_dir), ("natural", natural_dir)):
        color_sum = np.zeros(COLOR_HIST_BINS)
        fnh_sum = np.zeros(FNH_BINS)
        paths = _list_images(directory)
        for path in paths:
            img = load_image(path)
            color_sum += color_histogram(img)
            fnh_sum += farthest_neighbor_histogram(img)
        averages[key] = (color_sum / len(paths), fnh_sum / len(paths))
    return FeatureContext(
        avg_color_graphics=averages["graphics"][0],
        avg_color_natural=averages["natural"][0],
        avg_fnh_graphics=averages["graphics"][1],
        avg_fnh_natural=averages["natural"][1],
        **thresholds)


def save_context(path, ctx: FeatureContext) -> None:
    np.savez_compressed(
        path,
        format_version=CONTEXT_FORMAT_VERSION,
        avg_color_graphics=ctx.avg_color_graphics,
        avg_color_natural=ctx.avg_color_natural,
        avg_fnh_graphics=ctx.avg_fnh_graphics,
        avg_fnh_natural=ctx.avg_fnh_natural,
        saturation_threshold=ctx.saturation_threshold,
        farthest_neighbor_threshold=ctx.farthest_neighbor_threshold,
        ranked_bins=ctx.ranked_bins)


def load_context(path) -> FeatureContext:
    with np.load(path) as data:
        version = int(data["format_version"])
        if version != CONTEXT_FORMAT_VERSION:
            raise ValueError(f"unsupported context file version {version}")
        return FeatureContext(
            avg_color_graphics=data["avg_color_graphics"],
            avg_color_natural=data["avg_color_natural"],
            avg_fnh_graphics=data["avg_fnh_graphics"],
            avg_fnh_natural=data["avg_fnh_natural"],
            saturation_threshold=int(data["saturation_threshold"]),
            farthest_neighbor_threshold=int(data["farthest_neighbor_threshold"]),
            ranked_bins=int(data["ranked_bins"]))


def write_feature_csv(path, vectors, labels=None) -> None:
    """One vector per row, 1320 columns; optional leading label column."""
    vectors = np.asarray(vectors)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        writer = csv.writer(fh)
        for i, row in enumerate(vectors):
            cells = [format(v, ".17g") for v in row]
            if labels is not None:
                cells = [labels[i]] + cells
            writer.writerow(cells)


def read_feature_csv(path):
    """Returns (vectors, labels); labels is None for unlabeled files."""
    rows, labels = [], []
    with open(path, newline="", encoding="utf-8") as fh:
        for row in csv.reader(fh):
            if not row:
                continue
            try:
                float(row[0])
                has_label = False
            except ValueError:
                has_label = True
            if has_label:
                labels.append(row[0])
                rows.append([float(v) for v in row[1:]])
            else:
                rows.append([float(v) for v in row])
    if not rows:
        raise ValueError(f"no feature rows in {path}")
    return np.array(rows), (labels if labels else None)
