"""Command-line interface: one subcommand per pipeline stage.

Exit codes: 0 success, 1 usage error, 2 data/processing error.
"""

import argparse
import glob
import json
import os
import sys

import numpy as np

from . import classifier as clf
from . import features as feats
from .change_detection import grid_mask, histogram_change_detect, pixel_change_detect, write_pgm
from .config import load_config
from .corpus import generate_synthetic_corpus
from .evaluation import build_report, net_jaccard, render_report, report_to_json
from .groundtruth import load_bands
from .imaging import load_image
from .pipeline import (
    dataset_from_frames,
    process_frames,
    refine_labels_by_change,
    run_pipeline,
    write_profile_artifacts,
)
from .reasoning import FormatProfile
from .text_detection import detect_text


def _add_config_args(p):
    p.add_argument("--config", help="config file (or set NEWSBAND_CONFIG)")
    p.add_argument("--set", dest="overrides", action="append", default=[],
                   metavar="KEY=VALUE", help="override a config key")


def _config_from(args):
    overrides = {}
    for item in args.overrides:
        key, sep, value = item.partition("=")
        if not sep:
            raise ValueError(f"--set expects KEY=VALUE, got {item!r}")
        overrides[key.strip()] = value.strip()
    return load_config(args.config, overrides)


def _load_model_and_context(args):
    if not os.path.exists(args.model):
        raise FileNotFoundError(f"model file not found: {args.model}")
    if not os.path.exists(args.context):
        raise FileNotFoundError(f"feature context file not found: {args.context}")
    return clf.load_model(args.model), feats.load_context(args.context)


def cmd_detect(args):
    cfg = _config_from(args)
    model, ctx = _load_model_and_context(args)
    if os.path.isdir(args.frame):
        frame_paths = _collect_images([args.frame])
        out_dir = args.out or args.frame
        os.makedirs(out_dir, exist_ok=True)
        for path, result in process_frames(frame_paths, cfg, model, ctx):
            stem = os.path.splitext(os.path.basename(path))[0]
            base = os.path.join(out_dir, stem + "_profile")
            write_profile_artifacts(result, base, frame=load_image(path),
                                    overlay=args.overlay)
            print(f"profile: {base}.txt")
        return 0
    frame = load_image(args.frame)
    result = run_pipeline(frame, cfg, model, ctx)
    out_base = args.out or os.path.splitext(args.frame)[0] + "_profile"
    paths = write_profile_artifacts(result, out_base, frame=frame,
                                    overlay=args.overlay)
    for kind, path in paths.items():
        print(f"{kind}: {path}")
    return 0


def cmd_text(args):
    cfg = _config_from(args)
    frame = load_image(args.frame)
    regions = detect_text(frame, cfg.text_config())
    for r in regions:
        print(f"text {r.x} {r.y} {r.w} {r.h}")
    if args.dump_profiles:
        from .imaging import histogram_equalize, scharr_magnitude, to_gray
        from .text_detection import contrast_enhance
        mag = scharr_magnitude(to_gray(frame))
        enhanced = contrast_enhance(mag, cfg.text_config())
        omega = histogram_equalize(np.rint(enhanced * 255).astype(np.uint8))
        base = args.out or os.path.splitext(args.frame)[0]
        for name, profile in (("hp", omega.sum(axis=1)), ("vp", omega.sum(axis=0))):
            path = f"{base}_{name}_profile.txt"
            with open(path, "w", encoding="utf-8") as fh:
                fh.writelines(f"{v}\n" for v in profile)
            print(f"{name} profile: {path}")
    return 0


def _collect_images(paths):
    files = []
    for p in paths:
        if os.path.isdir(p):
            files.extend(sorted(
                os.path.join(p, f) for f in os.listdir(p)
                if f.lower().endswith((".png", ".jpg", ".jpeg"))))
        else:
            files.append(p)
    if not files:
        raise ValueError("no input images")
    return files


def cmd_features(args):
    if args.build_context:
        if not (args.graphics_dir and args.natural_dir):
            print("--build-context needs --graphics-dir and --natural-dir",
                  file=sys.stderr)
            return 1
        cfg = _config_from(args)
        ctx = feats.build_feature_context(
            args.graphics_dir, args.natural_dir,
            saturation_threshold=cfg["features.saturation_threshold"],
            farthest_neighbor_threshold=cfg["features.farthest_neighbor_threshold"],
            ranked_bins=cfg["features.ranked_bins"])
        feats.save_context(args.out, ctx)
        print(f"context: {args.out}")
        return 0
    ctx = feats.load_context(args.context)
    files = _collect_images(args.images)
    vectors = [feats.assemble_feature_vector(load_image(f), ctx) for f in files]
    labels = [args.label] * len(files) if args.label else None
    feats.write_feature_csv(args.out, np.array(vectors), labels)
    print(f"{len(vectors)} vectors: {args.out}")
    return 0


def cmd_train(args):
    cfg = _config_from(args)
    X_parts, y_parts = [], []
    for path in args.csv:
        X, labels = feats.read_feature_csv(path)
        if labels is None:
            raise ValueError(f"{path} has no label column")
        X_parts.append(X)
        y_parts.extend(labels)
    X = np.vstack(X_parts)
    model = clf.elm_train(X, y_parts, cfg["classifier.hidden_count"],
                          cfg["classifier.activation"], seed=cfg.seed)
    clf.save_model(args.out, model)
    print(f"model: {args.out} (classes {', '.join(model.classes)})")
    if args.kfold:
        folds, aggregate = clf.k_fold_evaluate(
            X, y_parts, args.kfold, cfg["classifier.hidden_count"],
            cfg["classifier.activation"], seed=cfg.seed)
        for cls, m in aggregate.items():
            print(f"{cls}: precision={m.precision} recall={m.recall} "
                  f"f={m.f_measure} balanced_accuracy={m.balanced_accuracy}")
    return 0


def cmd_classify(args):
    model = clf.load_model(args.model)
    X, _ = feats.read_feature_csv(args.csv)
    for label in clf.elm_predict_batch(model, X):
        print(label)
    return 0


def cmd_change(args):
    cfg = _config_from(args)
    curr = load_image(args.current)
    prev = load_image(args.previous)
    pixel_grid = pixel_change_detect(curr, prev, cfg["change.diff_threshold"],
                                     cfg["change.cell_size"])
    hist_grid = histogram_change_detect(curr, prev, cfg["change.dist_threshold"],
                                        cfg["change.cell_size"],
                                        cfg["change.histogram_bins"])
    h, w = curr.shape[:2]
    base = args.out or os.path.splitext(args.current)[0]
    for name, grid in (("pixel", pixel_grid), ("hist", hist_grid)):
        path = f"{base}_change_{name}.pgm"
        write_pgm(path, grid_mask(grid, w, h))
        print(f"{name}: {path} ({grid.dynamic_fraction():.1%} dynamic)")
    return 0


def cmd_evaluate(args):
    results = sorted(glob.glob(os.path.join(args.results, "*.txt")))
    if not results:
        raise ValueError(f"no result profiles under {args.results}")
    per_frame = {}
    for path in results:
        stem = os.path.splitext(os.path.basename(path))[0]
        truth_path = os.path.join(args.truth, stem + ".txt")
        if not os.path.exists(truth_path):
            raise FileNotFoundError(f"no ground truth for {stem}")
        per_frame[stem] = net_jaccard(load_bands(path), load_bands(truth_path))
    report = build_report(per_frame)
    if args.json:
        with open(args.json, "w", encoding="utf-8") as fh:
            fh.write(report_to_json(report))
    print(render_report(report), end="")
    return 0


def cmd_gen_corpus(args):
    pairs = generate_synthetic_corpus(args.count, args.seed, args.out)
    print(f"{len(pairs)} frames under {args.out}")
    return 0


def cmd_make_dataset(args):
    cfg = _config_from(args)
    index = dataset_from_frames(args.frames, args.out, cfg)
    total = sum(index.values())
    print(f"{len(index)} frames, {total} bands; label them via `newsband serve`")
    return 0


def cmd_serve(args):
    import uvicorn

    from .service import create_app
    cfg = _config_from(args)
    app = create_app(args.frames, args.truth, args.dataset, cfg,
                     frontend_dir=args.frontend)
    uvicorn.run(app, host=args.host, port=args.port)
    return 0


def cmd_refine(args):
    cfg = _config_from(args)
    frames = [load_image(p) for p in args.frames]
    bands = load_bands(args.profile)
    h, w = frames[0].shape[:2]
    profile = FormatProfile(w, h, bands)
    refined = refine_labels_by_change(profile, frames, cfg)
    from .groundtruth import format_bands
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(format_bands(refined.bands))
    print(f"refined: {args.out}")
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="newsband",
        description="news frame layout analysis: detect, classify, merge, score")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("detect", help="full pipeline over a frame or directory")
    p.add_argument("frame")
    p.add_argument("--model", required=True)
    p.add_argument("--context", required=True)
    p.add_argument("--out", help="output base path (default <frame>_profile)")
    p.add_argument("--overlay", action="store_true", help="write overlay png")
    _add_config_args(p)
    p.set_defaults(func=cmd_detect)

    p = sub.add_parser("text", help="text regions of one frame")
    p.add_argument("frame")
    p.add_argument("--out")
    p.add_argument("--dump-profiles", action="store_true",
                   help="write projection profiles, one value per line")
    _add_config_args(p)
    p.set_defaults(func=cmd_text)

    p = sub.add_parser("features", help="extract vectors or build a context")
    p.add_argument("images", nargs="*")
    p.add_argument("--context", help="context file for extraction")
    p.add_argument("--out", required=True)
    p.add_argument("--label", help="label column value for all rows")
    p.add_argument("--build-context", action="store_true")
    p.add_argument("--graphics-dir")
    p.add_argument("--natural-dir")
    _add_config_args(p)
    p.set_defaults(func=cmd_features)

    p = sub.add_parser("train", help="train the classifier from feature CSVs")
    p.add_argument("csv", nargs="+")
    p.add_argument("--out", required=True)
    p.add_argument("--kfold", type=int, help="also report k-fold measures")
    _add_config_args(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("classify", help="label feature vectors with a model")
    p.add_argument("csv")
    p.add_argument("--model", required=True)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("change", help="change grids for a frame pair")
    p.add_argument("current")
    p.add_argument("previous")
    p.add_argument("--out")
    _add_config_args(p)
    p.set_defaults(func=cmd_change)

    p = sub.add_parser("refine", help="change-vote label override over a sequence")
    p.add_argument("profile", help="profile text file to refine")
    p.add_argument("frames", nargs="+", help="consecutive frame images")
    p.add_argument("--out", required=True)
    _add_config_args(p)
    p.set_defaults(func=cmd_refine)

    p = sub.add_parser("evaluate", help="score result profiles against truth")
    p.add_argument("--results", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--json", help="also write the report as JSON")
    p.set_defaults(func=cmd_evaluate)

    p = sub.add_parser("gen-corpus", help="synthetic corpus with ground truth")
    p.add_argument("--count", type=int, default=20)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_gen_corpus)

    p = sub.add_parser("make-dataset", help="precompute dataset-tool bands")
    p.add_argument("--frames", required=True)
    p.add_argument("--out", required=True)
    _add_config_args(p)
    p.set_defaults(func=cmd_make_dataset)

    p = sub.add_parser("serve", help="annotation HTTP service")
    p.add_argument("--frames", required=True)
    p.add_argument("--truth", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--frontend", help="directory of UI static files to serve")
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8650)
    _add_config_args(p)
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return 0 if exc.code == 0 else 1
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
