"""Static/dynamic cell labeling from consecutive frames.

Natural content changes from frame to frame while rendered graphics hold
still, so a cell grid over the frame difference separates the two. Two
detectors: absolute gray difference with per-cell majority vote, and
per-cell monochrome-histogram distance.
"""

import math
from dataclasses import dataclass

import numpy as np

from .imaging import bhattacharyya_distance, normalized_histogram, to_gray, to_monochrome32


@dataclass(frozen=True)
class ChangeGrid:
    cell_size: int
    dynamic: np.ndarray  # bool, rows x cols

    @property
    def rows(self) -> int:
        return self.dynamic.shape[0]

    @property
    def cols(self) -> int:
        return self.dynamic.shape[1]

    def dynamic_fraction(self) -> float:
        return float(self.dynamic.mean())


def _check_pair(curr, prev):
    curr = np.asarray(curr)
    prev = np.asarray(prev)
    if curr.shape != prev.shape:
        raise ValueError(f"frame shapes differ: {curr.shape} vs {prev.shape}")
    return curr, prev


def _cells(width, height, cell_size):
    for row in range(math.ceil(height / cell_size)):
        for col in range(math.ceil(width / cell_size)):
            ys = slice(row * cell_size, min((row + 1) * cell_size, height))
            xs = slice(col * cell_size, min((col + 1) * cell_size, width))
            yield row, col, ys, xs


def pixel_change_detect(curr, prev, diff_threshold: int = 20,
                        cell_size: int = 50) -> ChangeGrid:
    """Cells where gray pixels changed by more than the threshold, by
    strict majority. Ties label the cell static."""
    curr, prev = _check_pair(curr, prev)
    diff = np.abs(to_gray(curr).astype(np.int16) - to_gray(prev).astype(np.int16))
    flagged = diff > diff_threshold
    height, width = flagged.shape
    rows = math.ceil(height / cell_size)
    cols = math.ceil(width / cell_size)
    dynamic = np.zeros((rows, cols), dtype=bool)
    for row, col, ys, xs in _cells(width, height, cell_size):
        cell = flagged[ys, xs]
        dynamic[row, col] = 2 * int(cell.sum()) > cell.size
    return ChangeGrid(cell_size, dynamic)


def histogram_change_detect(curr, prev, dist_threshold: float = 0.3,
                            cell_size: int = 50, bins: int = 4096) -> ChangeGrid:
    """Cells whose monochrome histograms moved further than the threshold.

    Blind to pixel permutations inside a cell by construction: only the
    value distribution matters. The default bin count keeps per-cell
    histograms sparse: independent noise fills disjoint code sets (large
    distance) while a static graphic under light compression noise stays
    concentrated on the same few codes (small distance). Coarse bins would
    let two unrelated noise fields converge to the same flat histogram.
    """
    curr, prev = _check_pair(curr, prev)
    mono_curr = to_monochrome32(curr)
    mono_prev = to_monochrome32(prev)
    height, width = mono_curr.shape
    rows = math.ceil(height / cell_size)
    cols = math.ceil(width / cell_size)
    dynamic = np.zeros((rows, cols), dtype=bool)
    for row, col, ys, xs in _cells(width, height, cell_size):
        h_curr = normalized_histogram(mono_curr[ys, xs], bins, (0, 32768))
        h_prev = normalized_histogram(mono_prev[ys, xs], bins, (0, 32768))
        dynamic[row, col] = bhattacharyya_distance(h_curr, h_prev) > dist_threshold
    return ChangeGrid(cell_size, dynamic)


def grid_mask(grid: ChangeGrid, width: int, height: int) -> np.ndarray:
    """Full-resolution uint8 mask (255 = dynamic) for visual inspection."""
    mask = np.zeros((height, width), dtype=np.uint8)
    for row, col, ys, xs in _cells(width, height, grid.cell_size):
        if grid.dynamic[row, col]:
            mask[ys, xs] = 255
    return mask


def write_pgm(path, gray: np.ndarray) -> None:
    """Binary (P5) PGM writer for mask dumps."""
    gray = np.asarray(gray, dtype=np.uint8)
    height, width = gray.shape
    with open(path, "wb") as fh:
        fh.write(f"P5\n{width} {height}\n255\n".encode("ascii"))
        fh.write(gray.tobytes())
