"""Seeded synthetic news-frame corpus with exact ground truth.

Frames are composed news-style: one to three full-width horizontal strips
(main area, optional headline strip, optional bottom ticker), each strip
cut into one or more columns. Column regions are painted as solid
graphics, noise-textured natural content, or dense-stroke text on a solid
background. The palette keeps every pair of colors far apart both in gray
level (so region boundaries always carry detectable edges) and in the
packed monochrome code (so distinct solid regions never look
histogram-identical).
"""

import os

import numpy as np

from .band_detection import Band
from .groundtruth import format_bands
from .imaging import save_image
from .reasoning import FormatProfile, sort_bands

PALETTE = (
    (16, 28, 16),     # gray 20
    (48, 85, 65),     # gray 66
    (80, 130, 126),   # gray 112
    (112, 180, 182),  # gray 158
    (160, 225, 227),  # gray 204
    (248, 250, 252),  # gray 250
)

NOISE_AMPLITUDE = 20
TEXT_MARGIN = 4


def _ink_for(bg) -> tuple:
    """Stroke color with maximum gray contrast against the background."""
    return PALETTE[-1] if sum(bg) / 3 < 135 else PALETTE[0]


def draw_solid(frame: np.ndarray, band: Band, color) -> None:
    frame[band.y:band.y2, band.x:band.x2] = color


def draw_noise(frame: np.ndarray, band: Band, color, rng,
               amplitude: int = NOISE_AMPLITUDE) -> None:
    base = np.empty((band.h, band.w, 3), dtype=np.int16)
    base[:, :] = color
    noise = rng.integers(-amplitude, amplitude + 1, size=base.shape)
    frame[band.y:band.y2, band.x:band.x2] = np.clip(base + noise, 0, 255)


def draw_text_pattern(frame: np.ndarray, band: Band, rng,
                      bg=None, margin: int = None) -> None:
    """Dense pseudo-glyph strokes over a solid background.

    Stroke tops and bottoms are jittered so no single row of stroke ends
    lines up into a spurious straight line. The default margin grows with
    the band so the stroke block keeps clear of the band boundary: cuts
    quantized from stroke noise must never cluster-merge with the cut of
    the boundary itself.
    """
    if bg is None:
        bg = PALETTE[0]
    if margin is None:
        margin = min(14, max(8, band.h // 5))
    draw_solid(frame, band, bg)
    ink = _ink_for(bg)
    x0, x1 = band.x + margin, band.x2 - margin
    y0, y1 = band.y + margin, band.y2 - margin
    avail = y1 - y0
    if avail < 4 or x1 - x0 < 4:
        return
    # 2-on / 2-off stroke columns put exactly one ink/background transition
    # next to every column, so the column projection profile has no dips.
    # Strokes are dashed vertically with per-stroke phase: a solid block
    # would make every row of the block a gap-tolerant full-width corridor
    # for the line detector. Dash runs also stay far under any plausible
    # minimum line length.
    hi = min(avail, 64)
    lo = max(hi - 8, hi // 2)
    jitter = min(4, max(1, avail // 6))
    x = x0
    while x + 2 <= x1:
        top = y0 + int(rng.integers(0, jitter))
        height = int(rng.integers(lo, hi + 1))
        bottom = min(y1, top + height)
        y = top - int(rng.integers(0, 4))
        while y < bottom:
            dash = int(rng.integers(4, 7))
            frame[max(y, top):min(y + dash, bottom), x:x + 2] = ink
            y += dash + 2
        x += 4


def text_stripe_frame(width: int, height: int, stripes, seed: int = 0,
                      bg=(30, 30, 30)) -> np.ndarray:
    """Fixture frame: uniform background plus dense text stripes.

    `stripes` holds (x, y, w, h) rectangles that get the stroke pattern
    edge to edge (margin 1), so detected regions can be compared against
    the rectangles directly.
    """
    rng = np.random.default_rng(seed)
    frame = np.zeros((height, width, 3), dtype=np.uint8)
    frame[:, :] = bg
    for x, y, w, h in stripes:
        draw_text_pattern(frame, Band(x, y, w, h), rng, bg=bg, margin=1)
    return frame


def generate_layout(rng, width: int, height: int):
    """News-style layout: horizontal strips cut into columns.

    Returns ground-truth bands (an exact partition). Text bands only
    appear as ticker/headline strips, never crossed by another strip
    boundary, and at most 6 regions are produced so each can get its own
    palette color.
    """
    strips = []
    y_top = 0
    remaining = height
    if rng.random() < 0.8:  # bottom ticker strip
        ticker_h = int(rng.integers(50, 91))
        remaining -= ticker_h
    else:
        ticker_h = 0
    if remaining >= 240 and rng.random() < 0.5:  # headline strip above ticker
        headline_h = int(rng.integers(60, 110))
        remaining -= headline_h
    else:
        headline_h = 0
    strips.append(("main", y_top, remaining))
    y = remaining
    if headline_h:
        strips.append(("headline", y, headline_h))
        y += headline_h
    if ticker_h:
        strips.append(("ticker", y, ticker_h))

    budget = 6 - len(strips)
    bands = []
    for kind, sy, sh in strips:
        if kind == "main":
            n_cols = 1 + min(budget, int(rng.integers(0, 3)))
            budget -= n_cols - 1
        else:
            n_cols = 1
        cuts = [0]
        if n_cols > 1:
            inner = sorted(rng.choice(
                np.arange(110, width - 110), size=n_cols - 1, replace=False))
            keep = []
            for c in inner:
                if all(abs(int(c) - k) >= 110 for k in keep):
                    keep.append(int(c))
            cuts += keep
        cuts.append(width)
        for x0, x1 in zip(cuts, cuts[1:]):
            if kind == "ticker":
                label = "text"
            elif kind == "headline":
                label = "text" if rng.random() < 0.5 else "synthetic"
            else:
                label = "natural" if rng.random() < 0.55 else "synthetic"
            bands.append(Band(x0, sy, x1 - x0, sh, label=label))
    return sort_bands(bands)


def render_frame(layout, rng, width: int, height: int) -> np.ndarray:
    frame = np.zeros((height, width, 3), dtype=np.uint8)
    order = rng.permutation(len(PALETTE))
    for idx, band in enumerate(layout):
        color = PALETTE[order[idx % len(PALETTE)]]
        if band.label == "natural":
            draw_noise(frame, band, color, rng)
        elif band.label == "text":
            draw_text_pattern(frame, band, rng, bg=color)
        else:
            draw_solid(frame, band, color)
    return frame


def generate_synthetic_corpus(count: int, seed: int, out_dir,
                              width: int = 640, height: int = 360):
    """Write `count` frames plus ground-truth files; returns path pairs."""
    if count < 1:
        raise ValueError("count must be >= 1")
    os.makedirs(out_dir, exist_ok=True)
    pairs = []
    for i in range(count):
        rng = np.random.default_rng([seed, i])
        layout = generate_layout(rng, width, height)
        frame = render_frame(layout, rng, width, height)
        frame_path = os.path.join(out_dir, f"frame_{i:04d}.png")
        truth_path = os.path.join(out_dir, f"frame_{i:04d}.txt")
        save_image(frame_path, frame)
        with open(truth_path, "w", encoding="utf-8") as fh:
            fh.write(format_bands(layout))
        pairs.append((frame_path, truth_path))
    return pairs


def generate_training_crops(out_dir, per_class: int, seed: int,
                            size: int = 96):
    """Write labeled crop images drawn from the corpus texture model.

    graphics/ holds solid and striped synthetic fills, natural/ holds
    noise textures; returns the two directory paths.
    """
    rng = np.random.default_rng(seed)
    graphics_dir = os.path.join(out_dir, "graphics")
    natural_dir = os.path.join(out_dir, "natural")
    os.makedirs(graphics_dir, exist_ok=True)
    os.makedirs(natural_dir, exist_ok=True)
    band = Band(0, 0, size, size)
    for i in range(per_class):
        color = PALETTE[int(rng.integers(len(PALETTE)))]
        crop = np.zeros((size, size, 3), dtype=np.uint8)
        draw_solid(crop, band, color)
        save_image(os.path.join(graphics_dir, f"g_{i:04d}.png"), crop)

        color = PALETTE[int(rng.integers(len(PALETTE)))]
        crop = np.zeros((size, size, 3), dtype=np.uint8)
        draw_noise(crop, band, color, rng)
        save_image(os.path.join(natural_dir, f"n_{i:04d}.png"), crop)
    return graphics_dir, natural_dir
