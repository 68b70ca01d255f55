"""Hierarchical merging of fragmented bands into the final format profile.

The low-level grid cells produced by extending Hough lines across the
whole frame over-segment every element band. Three merge tiers repair
this, each running to a fixpoint over an adjacency matrix that encodes
which bands share a boundary and on which side:

  tier 1  adjacent bands with near-identical monochrome histograms are
          fragments of one parent (solid graphics, tickers),
  tier 2  adjacent natural-labeled bands merge when no edge energy lies
          along their shared boundary (a camera shot split by a line
          extended from elsewhere in the frame),
  tier 3  bands covered by detected text regions become text bands and
          horizontally adjacent text bands merge.

Every merge requires the shared side to be full length on both bands, so
the result is always a rectangle and the profile stays an exact partition
of the frame. Pair scans go in row-major band order and always take the
lowest-index mergeable pair first, which makes runs deterministic.
"""

from dataclasses import dataclass, replace

import numpy as np

from .band_detection import Band, intersection_area
from .imaging import (
    bhattacharyya_distance,
    normalized_histogram,
    scharr_magnitude,
    to_gray,
    to_monochrome32,
)

# adjacency codes: where band j sits relative to band i
ADJ_NONE, ADJ_ABOVE, ADJ_RIGHT, ADJ_BELOW, ADJ_LEFT = 0, 1, 2, 3, 4


@dataclass(frozen=True)
class ReasoningConfig:
    tier1_threshold: float = 0.2
    tier2_edge_threshold: float = 0.08
    tier3_overlap_threshold: float = 0.5
    histogram_bins: int = 64


@dataclass(frozen=True)
class FormatProfile:
    """A labeled set of bands for one frame.

    Pipeline output is always an exact partition (use validate_partition);
    hand-marked ground truth is allowed to be looser.
    """
    width: int
    height: int
    bands: tuple

    def validate_partition(self) -> None:
        paint = np.zeros((self.height, self.width), dtype=np.int32)
        for b in self.bands:
            if b.x < 0 or b.y < 0 or b.x2 > self.width or b.y2 > self.height:
                raise ValueError(f"band {b} outside the frame")
            paint[b.y:b.y2, b.x:b.x2] += 1
        if (paint > 1).any():
            raise ValueError("bands overlap")
        if (paint == 0).any():
            raise ValueError("bands do not cover the frame")


def sort_bands(bands):
    return tuple(sorted(bands, key=lambda b: (b.y, b.x)))


def build_adjacency(bands) -> np.ndarray:
    """N x N matrix of adjacency codes; raises if any two bands overlap."""
    n = len(bands)
    adj = np.zeros((n, n), dtype=np.int8)
    for i in range(n):
        bi = bands[i]
        for j in range(i + 1, n):
            bj = bands[j]
            if intersection_area(bi, bj) > 0:
                raise ValueError(f"bands {i} and {j} overlap")
            ox = min(bi.x2, bj.x2) - max(bi.x, bj.x)
            oy = min(bi.y2, bj.y2) - max(bi.y, bj.y)
            if bj.y2 == bi.y and ox > 0:
                adj[i, j], adj[j, i] = ADJ_ABOVE, ADJ_BELOW
            elif bj.y == bi.y2 and ox > 0:
                adj[i, j], adj[j, i] = ADJ_BELOW, ADJ_ABOVE
            elif bj.x == bi.x2 and oy > 0:
                adj[i, j], adj[j, i] = ADJ_RIGHT, ADJ_LEFT
            elif bj.x2 == bi.x and oy > 0:
                adj[i, j], adj[j, i] = ADJ_LEFT, ADJ_RIGHT
    return adj


def full_side_aligned(bi: Band, bj: Band, code: int) -> bool:
    """True when the shared side spans the full extent of both bands."""
    if code in (ADJ_ABOVE, ADJ_BELOW):
        return bi.x == bj.x and bi.w == bj.w
    if code in (ADJ_RIGHT, ADJ_LEFT):
        return bi.y == bj.y and bi.h == bj.h
    return False


def merge_bands(bi: Band, bj: Band, code: int, provenance: str = "merged") -> Band:
    """Merge two full-side adjacent bands into their bounding rectangle.

    The merged label is the label of the larger constituent (ties keep
    band i's). Raises on partial-side adjacency, which cannot produce a
    rectangle.
    """
    if code not in (ADJ_ABOVE, ADJ_RIGHT, ADJ_BELOW, ADJ_LEFT):
        raise ValueError(f"not an adjacency code: {code}")
    if not full_side_aligned(bi, bj, code):
        raise ValueError("bands are only partially adjacent, cannot merge")
    expected_edge = {
        ADJ_ABOVE: bj.y2 == bi.y, ADJ_BELOW: bj.y == bi.y2,
        ADJ_RIGHT: bj.x == bi.x2, ADJ_LEFT: bj.x2 == bi.x,
    }[code]
    if not expected_edge:
        raise ValueError("bands do not share the boundary the code claims")
    label = bj.label if bj.area > bi.area else bi.label
    if code == ADJ_ABOVE:
        merged = Band(bj.x, bj.y, bj.w, bi.h + bj.h, label, provenance)
    elif code == ADJ_RIGHT:
        merged = Band(bi.x, bi.y, bi.w + bj.w, bi.h, label, provenance)
    elif code == ADJ_BELOW:
        merged = Band(bi.x, bi.y, bi.w, bi.h + bj.h, label, provenance)
    else:
        merged = Band(bj.x, bj.y, bi.w + bj.w, bj.h, label, provenance)
    return merged


def _fixpoint_merge(profile: FormatProfile, mergeable, provenance: str) -> FormatProfile:
    """Repeatedly merge the first acceptable pair in row-major order.

    `mergeable(bi, bj, code)` decides whether a full-side adjacent pair
    merges. Restarts the scan after every merge until no pair qualifies.
    """
    bands = list(sort_bands(profile.bands))
    changed = True
    while changed:
        changed = False
        adj = build_adjacency(bands)
        n = len(bands)
        for i in range(n):
            for j in range(i + 1, n):
                code = int(adj[i, j])
                if code == ADJ_NONE:
                    continue
                if not full_side_aligned(bands[i], bands[j], code):
                    continue
                if not mergeable(bands[i], bands[j], code):
                    continue
                merged = merge_bands(bands[i], bands[j], code, provenance)
                del bands[j]
                del bands[i]
                bands.append(merged)
                bands.sort(key=lambda b: (b.y, b.x))
                changed = True
                break
            if changed:
                break
    return replace(profile, bands=tuple(bands))


def tier1_histogram_merge(profile: FormatProfile, frame: np.ndarray,
                          threshold: float, bins: int = 64) -> FormatProfile:
    """Merge adjacent bands whose monochrome histograms nearly coincide."""
    mono = to_monochrome32(frame)
    cache = {}

    def band_hist(b: Band):
        key = (b.x, b.y, b.w, b.h)
        if key not in cache:
            cache[key] = normalized_histogram(
                mono[b.y:b.y2, b.x:b.x2], bins, (0, 32768))
        return cache[key]

    def similar(bi, bj, code):
        return bhattacharyya_distance(band_hist(bi), band_hist(bj)) < threshold

    return _fixpoint_merge(profile, similar, "tier1")


def tier2_natural_merge(profile: FormatProfile, frame: np.ndarray,
                        edge_threshold: float) -> FormatProfile:
    """Merge natural-natural neighbors split by a line with no real edge.

    The decision statistic is the mean normalized gradient magnitude over
    the one-pixel strip on each side of the shared boundary.
    """
    mag = scharr_magnitude(to_gray(frame))

    def boundary_energy(bi, bj, code):
        # per-line mean along the shared span, maximized over the lines
        # within 2 px of the boundary: a cut quantized 1 px off the real
        # edge must still see the edge at full strength
        if code in (ADJ_ABOVE, ADJ_BELOW):
            y = bi.y if code == ADJ_ABOVE else bi.y2
            strip = mag[max(0, y - 2):y + 2, bi.x:bi.x2]
        else:
            x = bi.x if code == ADJ_LEFT else bi.x2
            strip = mag[bi.y:bi.y2, max(0, x - 2):x + 2].T
        return float(strip.mean(axis=1).max())

    def quiet_natural_pair(bi, bj, code):
        if bi.label != "natural" or bj.label != "natural":
            return False
        return boundary_energy(bi, bj, code) < edge_threshold

    return _fixpoint_merge(profile, quiet_natural_pair, "tier2")


def text_overlap(band: Band, region: Band) -> float:
    """Fraction of the band covered by the text region: A(R & T) / A(R)."""
    return intersection_area(band, region) / band.area


def tier3_text_merge(profile: FormatProfile, text_regions,
                     overlap_threshold: float) -> FormatProfile:
    """Label text bands by region overlap, then merge them horizontally.

    A band becomes a text band when some detected region covers at least
    `overlap_threshold` of it. Only horizontally adjacent equal-height
    text pairs merge; stacked text lines stay separate bands.
    """
    labeled = []
    for b in profile.bands:
        if text_regions and max(text_overlap(b, t) for t in text_regions) >= overlap_threshold:
            b = replace(b, label="text")
        labeled.append(b)
    profile = replace(profile, bands=tuple(labeled))

    def horizontal_text_pair(bi, bj, code):
        return (bi.label == "text" and bj.label == "text"
                and code in (ADJ_RIGHT, ADJ_LEFT))

    return _fixpoint_merge(profile, horizontal_text_pair, "tier3")


def run_three_tier(frame: np.ndarray, grid, labels, text_regions,
                   cfg: ReasoningConfig = ReasoningConfig()) -> FormatProfile:
    """Apply the three merge tiers to classifier-labeled grid cells.

    `labels` pairs with `grid.cells`. Bands still unlabeled after all
    tiers are emitted as synthetic, graphics being the complement class.
    The result is validated as an exact partition of the frame.
    """
    if len(labels) != len(grid.cells):
        raise ValueError("one label per grid cell required")
    height, width = frame.shape[:2]
    bands = tuple(replace(c, label=l) for c, l in zip(grid.cells, labels))
    profile = FormatProfile(width, height, sort_bands(bands))
    profile = tier1_histogram_merge(profile, frame, cfg.tier1_threshold,
                                    cfg.histogram_bins)
    profile = tier2_natural_merge(profile, frame, cfg.tier2_edge_threshold)
    profile = tier3_text_merge(profile, text_regions, cfg.tier3_overlap_threshold)
    final = tuple(
        replace(b, label="synthetic") if b.label == "unlabeled" else b
        for b in profile.bands)
    profile = replace(profile, bands=sort_bands(final))
    profile.validate_partition()
    return profile
