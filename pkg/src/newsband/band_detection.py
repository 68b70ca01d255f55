"""Straight-line detection and partition of a frame into low-level bands.

The detector is a progressive probabilistic Hough transform: pixels vote
one at a time in random order, a sufficiently high accumulator peak
triggers a gap-tolerant corridor walk, and the pixels supporting an
extracted segment are removed from the input (and their votes retracted)
so no two output segments share support. Detected segments are then
snapped to axis-aligned cuts which, extended to the frame borders, slice
the frame into a grid of rectangular bands.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .imaging import scharr_magnitude, to_gray

BAND_LABELS = ("unlabeled", "synthetic", "natural", "text")


@dataclass(frozen=True)
class LineSegment:
    x0: int
    y0: int
    x1: int
    y1: int

    def __post_init__(self):
        if (self.x0, self.y0) == (self.x1, self.y1):
            raise ValueError("degenerate line segment")

    @property
    def length(self) -> float:
        return math.hypot(self.x1 - self.x0, self.y1 - self.y0)


@dataclass(frozen=True)
class HoughConfig:
    vote_threshold: int = 30
    min_line_length: int = 50
    max_gap: int = 5
    angle_tolerance_deg: float = 2.0
    cluster_tolerance: int = 5

    def __post_init__(self):
        for name in ("vote_threshold", "min_line_length", "max_gap",
                     "angle_tolerance_deg", "cluster_tolerance"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be strictly positive")


def default_hough_config(width: int, height: int, **overrides) -> HoughConfig:
    """HoughConfig sized for a frame: min line length 0.2 * min(w, h)."""
    params = {"min_line_length": max(1, round(0.2 * min(width, height)))}
    params.update(overrides)
    return HoughConfig(**params)


@dataclass(frozen=True)
class Band:
    """An axis-aligned rectangle with a label; the unit of layout."""
    x: int
    y: int
    w: int
    h: int
    label: str = "unlabeled"
    provenance: str = field(default="grid", compare=False)

    def __post_init__(self):
        if self.w <= 0 or self.h <= 0:
            raise ValueError(f"band must have positive extent, got {self.w}x{self.h}")
        if self.label not in BAND_LABELS:
            raise ValueError(f"unknown band label {self.label!r}")

    @property
    def x2(self) -> int:
        return self.x + self.w

    @property
    def y2(self) -> int:
        return self.y + self.h

    @property
    def area(self) -> int:
        return self.w * self.h


def intersection_area(a: Band, b: Band) -> int:
    """Area of overlap of two bands (0 when disjoint or merely touching)."""
    dx = min(a.x2, b.x2) - max(a.x, b.x)
    dy = min(a.y2, b.y2) - max(a.y, b.y)
    return dx * dy if dx > 0 and dy > 0 else 0


@dataclass(frozen=True)
class BandGrid:
    x_cuts: tuple
    y_cuts: tuple
    cells: tuple


_N_ANGLES = 180  # 1 degree resolution over the normal angle [0, 180)


def ppht(edges: np.ndarray, cfg: HoughConfig, seed: int = 0) -> list:
    """Progressive probabilistic Hough transform over a binary edge map.

    Returns LineSegments at least `cfg.min_line_length` long. Randomized
    voting order comes from `seed`; a fixed seed makes the run
    reproducible.
    """
    edges = np.asarray(edges)
    if edges.ndim != 2:
        raise ValueError("edge map must be 2-D")
    if not np.isin(edges, (0, 1)).all():
        raise ValueError("edge map must be binary (values in {0, 1})")
    height, width = edges.shape

    ys, xs = np.nonzero(edges)
    if len(xs) == 0:
        return []

    rng = np.random.default_rng(seed)
    thetas = np.deg2rad(np.arange(_N_ANGLES, dtype=np.float64))
    cos_t = np.cos(thetas)
    sin_t = np.sin(thetas)
    max_rho = int(math.ceil(math.hypot(width, height)))
    acc = np.zeros((_N_ANGLES, 2 * max_rho + 1), dtype=np.int32)
    angle_idx = np.arange(_N_ANGLES)

    mask = edges != 0
    voted = np.zeros((height, width), dtype=bool)
    points = np.stack([xs, ys], axis=1)
    remaining = len(points)
    segments = []

    def rho_bins(px, py):
        return np.rint(px * cos_t + py * sin_t).astype(np.int64) + max_rho

    while remaining > 0:
        pick = int(rng.integers(remaining))
        x, y = int(points[pick, 0]), int(points[pick, 1])
        points[pick] = points[remaining - 1]
        remaining -= 1
        if not mask[y, x]:
            continue  # consumed by an earlier segment

        bins = rho_bins(x, y)
        acc[angle_idx, bins] += 1
        voted[y, x] = True
        votes = acc[angle_idx, bins]
        peak = int(votes.argmax())
        if votes[peak] < cfg.vote_threshold:
            continue

        # walk the corridor of the peak line through the current pixel,
        # in both directions, tolerating gaps up to max_gap
        theta = thetas[peak]
        dx, dy = -math.sin(theta), math.cos(theta)
        if abs(dx) >= abs(dy):
            sx, sy = math.copysign(1.0, dx), dy / abs(dx)
        else:
            sx, sy = dx / abs(dy), math.copysign(1.0, dy)

        path = [(x, y)]
        ends = []
        for direction in (1.0, -1.0):
            last_hit = 0
            walked = []
            k = 0
            while True:
                k += 1
                px = int(round(x + direction * k * sx))
                py = int(round(y + direction * k * sy))
                if not (0 <= px < width and 0 <= py < height):
                    break
                walked.append((px, py))
                if mask[py, px]:
                    last_hit = k
                elif k - last_hit > cfg.max_gap:
                    break
            walked = walked[:last_hit]
            path.extend(walked)
            ends.append(walked[-1] if walked else (x, y))

        # remove segment pixels from the input and retract the votes of
        # those that had voted, whether or not the segment is kept
        for px, py in path:
            if mask[py, px]:
                mask[py, px] = False
                if voted[py, px]:
                    acc[angle_idx, rho_bins(px, py)] -= 1
                    voted[py, px] = False

        (ex0, ey0), (ex1, ey1) = ends
        if math.hypot(ex1 - ex0, ey1 - ey0) >= cfg.min_line_length:
            segments.append(LineSegment(ex0, ey0, ex1, ey1))

    return segments


def detect_edges(frame: np.ndarray, binarize_threshold: float = 0.1) -> np.ndarray:
    """Binary edge map: normalized Scharr magnitude above the threshold."""
    mag = scharr_magnitude(to_gray(frame))
    return (mag > binarize_threshold).astype(np.uint8)


def extend_and_quantize(lines, width: int, height: int,
                        cfg: HoughConfig) -> tuple:
    """Snap near-axis-aligned segments to full-frame cuts.

    Horizontal segments contribute their mean y, vertical ones their mean
    x; other orientations are discarded. Cuts closer together than the
    cluster tolerance collapse to their mean, cuts hugging a border are
    dropped, and the frame borders are always present.
    """
    x_raw, y_raw = [], []
    for seg in lines:
        run = abs(seg.x1 - seg.x0)
        rise = abs(seg.y1 - seg.y0)
        if math.degrees(math.atan2(rise, run)) <= cfg.angle_tolerance_deg:
            y_raw.append((seg.y0 + seg.y1) / 2.0)
        elif math.degrees(math.atan2(run, rise)) <= cfg.angle_tolerance_deg:
            x_raw.append((seg.x0 + seg.x1) / 2.0)

    def cluster(raw, limit):
        cuts = []
        for group in _chain_clusters(sorted(raw), cfg.cluster_tolerance):
            c = int(round(sum(group) / len(group)))
            if cfg.cluster_tolerance <= c <= limit - cfg.cluster_tolerance:
                cuts.append(c)
        return tuple([0] + sorted(set(cuts)) + [limit])

    return cluster(x_raw, width), cluster(y_raw, height)


def _chain_clusters(sorted_values, tolerance):
    group = []
    for v in sorted_values:
        if group and v - group[-1] >= tolerance:
            yield group
            group = []
        group.append(v)
    if group:
        yield group


def generate_bands(x_cuts, y_cuts) -> BandGrid:
    """Partition the cut grid into row-major unlabeled cells."""
    x_cuts = tuple(x_cuts)
    y_cuts = tuple(y_cuts)
    for cuts, axis in ((x_cuts, "x"), (y_cuts, "y")):
        if len(cuts) < 2:
            raise ValueError(f"need at least 2 {axis} cuts, got {len(cuts)}")
        if any(b <= a for a, b in zip(cuts, cuts[1:])):
            raise ValueError(f"{axis} cuts must be strictly increasing")
    cells = tuple(
        Band(x0, y0, x1 - x0, y1 - y0)
        for y0, y1 in zip(y_cuts, y_cuts[1:])
        for x0, x1 in zip(x_cuts, x_cuts[1:])
    )
    return BandGrid(x_cuts, y_cuts, cells)
