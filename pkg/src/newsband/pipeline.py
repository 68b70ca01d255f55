"""End-to-end frame processing: lines -> grid -> labels -> merged profile.

Also home to the batch helpers the CLI drives: corpus scoring, the
change-vote label override for frame sequences, and the dataset-tool band
extraction.
"""

import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .band_detection import Band, detect_edges, extend_and_quantize, generate_bands, ppht
from .change_detection import pixel_change_detect
from .classifier import ElmModel, elm_predict_batch
from .config import PipelineConfig
from .features import FeatureContext, assemble_feature_vector
from .groundtruth import format_bands
from .imaging import load_image, save_image
from .reasoning import FormatProfile, run_three_tier, sort_bands
from .text_detection import detect_text

OVERLAY_COLORS = {
    "natural": (80, 220, 80),
    "synthetic": (230, 120, 60),
    "text": (90, 140, 255),
    "unlabeled": (160, 160, 160),
}


@dataclass(frozen=True)
class PipelineResult:
    profile: FormatProfile
    grid_cells: tuple
    cell_labels: tuple
    text_regions: tuple
    segments: tuple


def crop_band(frame: np.ndarray, band: Band) -> np.ndarray:
    return frame[band.y:band.y2, band.x:band.x2]


def classify_cells(frame, cells, model: ElmModel, ctx: FeatureContext):
    """Natural/graphics label per cell; graphics maps to the synthetic label.

    Cells too small to carry the descriptor (under 3 px a side) default to
    synthetic.
    """
    labels = ["synthetic"] * len(cells)
    vectors = []
    targets = []
    for i, cell in enumerate(cells):
        if cell.w >= 3 and cell.h >= 3:
            vectors.append(assemble_feature_vector(crop_band(frame, cell), ctx))
            targets.append(i)
    if vectors:
        predicted = elm_predict_batch(model, np.array(vectors))
        for i, cls in zip(targets, predicted):
            labels[i] = "natural" if cls == "natural" else "synthetic"
    return labels


def run_pipeline(frame, cfg: PipelineConfig, model: ElmModel,
                 ctx: FeatureContext) -> PipelineResult:
    """Full detection pass over one frame (array or image path)."""
    if isinstance(frame, (str, os.PathLike)):
        frame = load_image(frame)
    height, width = frame.shape[:2]
    edges = detect_edges(frame, cfg["edges.binarize_threshold"])
    hough_cfg = cfg.hough_config(width, height)
    segments = ppht(edges, hough_cfg, seed=cfg.seed)
    x_cuts, y_cuts = extend_and_quantize(segments, width, height, hough_cfg)
    grid = generate_bands(x_cuts, y_cuts)
    text_regions = detect_text(frame, cfg.text_config())
    labels = classify_cells(frame, grid.cells, model, ctx)
    profile = run_three_tier(frame, grid, labels, text_regions,
                             cfg.reasoning_config())
    return PipelineResult(profile, grid.cells, tuple(labels),
                          tuple(text_regions), tuple(segments))


def profile_to_dict(profile: FormatProfile) -> dict:
    return {
        "width": profile.width,
        "height": profile.height,
        "bands": [
            {"label": b.label, "x": b.x, "y": b.y, "w": b.w, "h": b.h,
             "provenance": b.provenance}
            for b in sort_bands(profile.bands)
        ],
    }


def profile_to_json(profile: FormatProfile) -> str:
    return json.dumps(profile_to_dict(profile), indent=2, sort_keys=True) + "\n"


def render_overlay(frame: np.ndarray, profile: FormatProfile,
                   thickness: int = 2) -> np.ndarray:
    """Copy of the frame with colored band outlines for visual checks."""
    out = frame.copy()
    for band in profile.bands:
        color = OVERLAY_COLORS.get(band.label, OVERLAY_COLORS["unlabeled"])
        t = thickness
        out[band.y:band.y2, band.x:min(band.x + t, band.x2)] = color
        out[band.y:band.y2, max(band.x2 - t, band.x):band.x2] = color
        out[band.y:min(band.y + t, band.y2), band.x:band.x2] = color
        out[max(band.y2 - t, band.y):band.y2, band.x:band.x2] = color
    return out


def write_profile_artifacts(result: PipelineResult, out_base: str,
                            frame=None, overlay: bool = False):
    """Write `<base>.txt` and `<base>.json`; optionally `<base>_overlay.png`.

    Output bytes are a pure function of the profile, so a fixed seed and
    config reproduce them exactly.
    """
    paths = {}
    txt_path = out_base + ".txt"
    with open(txt_path, "w", encoding="utf-8") as fh:
        fh.write(format_bands(result.profile.bands))
    paths["profile"] = txt_path
    json_path = out_base + ".json"
    with open(json_path, "w", encoding="utf-8") as fh:
        fh.write(profile_to_json(result.profile))
    paths["json"] = json_path
    if overlay:
        if frame is None:
            raise ValueError("overlay requested without the frame pixels")
        overlay_path = out_base + "_overlay.png"
        save_image(overlay_path, render_overlay(frame, result.profile))
        paths["overlay"] = overlay_path
    return paths


def process_frames(frame_paths, cfg: PipelineConfig, model: ElmModel,
                   ctx: FeatureContext, max_workers: int = 4):
    """Run the pipeline over many frames with a bounded worker pool."""
    def work(path):
        return path, run_pipeline(path, cfg, model, ctx)

    with ThreadPoolExecutor(max_workers=max_workers) as pool:
        return list(pool.map(work, frame_paths))


def bands_fully_inside(band: Band, cell_size: int, rows: int, cols: int):
    """Grid cell indices (row, col) whose cells lie fully inside the band."""
    inside = []
    for row in range(rows):
        for col in range(cols):
            x0, y0 = col * cell_size, row * cell_size
            if (band.x <= x0 and x0 + cell_size <= band.x2
                    and band.y <= y0 and y0 + cell_size <= band.y2):
                inside.append((row, col))
    return inside


def refine_labels_by_change(profile: FormatProfile, frames,
                            cfg: PipelineConfig) -> FormatProfile:
    """Relabel natural bands that never move as synthetic.

    A natural band whose fully-contained cells are static in every one of
    at least `change.static_override_pairs` consecutive frame pairs is
    taken for a still graphic misread by the classifier. Bands without a
    fully-contained cell are left alone.
    """
    need = cfg["change.static_override_pairs"]
    if len(frames) < need + 1:
        return profile
    cell_size = cfg["change.cell_size"]
    grids = [
        pixel_change_detect(frames[i + 1], frames[i],
                            cfg["change.diff_threshold"], cell_size)
        for i in range(len(frames) - 1)
    ]
    rows, cols = grids[0].rows, grids[0].cols
    out = []
    for band in profile.bands:
        if band.label != "natural":
            out.append(band)
            continue
        cells = bands_fully_inside(band, cell_size, rows, cols)
        if cells and all(not g.dynamic[r, c] for g in grids for r, c in cells):
            from dataclasses import replace
            band = replace(band, label="synthetic")
        out.append(band)
    return FormatProfile(profile.width, profile.height, tuple(out))


def hough_bands_for_dataset(frame, cfg: PipelineConfig):
    """Low-level grid cells ordered bottom-left first (dataset tool order)."""
    height, width = frame.shape[:2]
    edges = detect_edges(frame, cfg["edges.binarize_threshold"])
    hough_cfg = cfg.hough_config(width, height)
    segments = ppht(edges, hough_cfg, seed=cfg.seed)
    x_cuts, y_cuts = extend_and_quantize(segments, width, height, hough_cfg)
    grid = generate_bands(x_cuts, y_cuts)
    return sorted(grid.cells, key=lambda b: (-b.y2, b.x))


def dataset_from_frames(frames_dir, out_dir, cfg: PipelineConfig):
    """Precompute dataset-tool bands for every frame in a directory.

    Writes `<out>/bands/<frame>.json` with the band list (bottom-left
    first) and creates the natural/ and artificial/ crop directories the
    labeling service fills.
    """
    names = sorted(f for f in os.listdir(frames_dir)
                   if f.lower().endswith((".png", ".jpg", ".jpeg")))
    bands_dir = os.path.join(out_dir, "bands")
    os.makedirs(bands_dir, exist_ok=True)
    os.makedirs(os.path.join(out_dir, "natural"), exist_ok=True)
    os.makedirs(os.path.join(out_dir, "artificial"), exist_ok=True)
    index = {}
    for name in names:
        frame = load_image(os.path.join(frames_dir, name))
        bands = hough_bands_for_dataset(frame, cfg)
        stem = os.path.splitext(name)[0]
        payload = [{"index": i, "x": b.x, "y": b.y, "w": b.w, "h": b.h}
                   for i, b in enumerate(bands)]
        with open(os.path.join(bands_dir, stem + ".json"), "w",
                  encoding="utf-8") as fh:
            json.dump(payload, fh, indent=2)
        index[stem] = len(bands)
    return index
