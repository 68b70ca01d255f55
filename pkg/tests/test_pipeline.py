import json
import os

import numpy as np
import pytest

from newsband.band_detection import Band
from newsband.cli import main
from newsband.config import DEFAULTS, load_config, parse_config_text
from newsband.corpus import generate_synthetic_corpus
from newsband.evaluation import net_jaccard
from newsband.groundtruth import format_bands, load_bands, parse_bands
from newsband.imaging import load_image, save_image
from newsband.pipeline import (
    dataset_from_frames,
    profile_to_json,
    refine_labels_by_change,
    run_pipeline,
    write_profile_artifacts,
)
from newsband.reasoning import FormatProfile


class TestConfig:
    def test_defaults(self):
        cfg = load_config()
        assert cfg["hough.vote_threshold"] == 30
        assert cfg.seed == 0

    def test_file_and_overrides(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("# comment\nhough.vote_threshold = 44\ntext.alpha = 3.5\n")
        cfg = load_config(path, {"change.cell_size": "25"})
        assert cfg["hough.vote_threshold"] == 44
        assert cfg["text.alpha"] == 3.5
        assert cfg["change.cell_size"] == 25

    def test_unknown_key_rejected(self):
        with pytest.raises(ValueError):
            parse_config_text("no.such.key = 1")

    def test_out_of_range_rejected(self, tmp_path):
        path = tmp_path / "cfg.txt"
        path.write_text("text.hp_threshold_fraction = 1.5\n")
        with pytest.raises(ValueError):
            load_config(path)

    def test_env_var_path(self, tmp_path, monkeypatch):
        path = tmp_path / "cfg.txt"
        path.write_text("pipeline.seed = 9\n")
        monkeypatch.setenv("NEWSBAND_CONFIG", str(path))
        assert load_config().seed == 9

    def test_every_default_passes_validation(self):
        cfg = load_config()
        assert set(cfg.values) == set(DEFAULTS)

    def test_auto_min_line_length(self):
        cfg = load_config()
        assert cfg.hough_config(1280, 720).min_line_length == 144
        cfg2 = load_config(None, {"hough.min_line_length": "99"})
        assert cfg2.hough_config(1280, 720).min_line_length == 99


class TestGroundTruthFormat:
    def test_canonical_round_trip_bytes(self):
        bands = (Band(0, 40, 100, 60, label="natural"),
                 Band(0, 0, 50, 40, label="text"),
                 Band(50, 0, 50, 40, label="synthetic"))
        text = format_bands(bands)
        assert format_bands(parse_bands(text)) == text
        assert text == ("text 0 0 50 40\n"
                        "synthetic 50 0 50 40\n"
                        "natural 0 40 100 60\n")

    def test_parse_ignores_comments_and_blanks(self):
        text = "# header\n\nnatural 0 0 10 10\n"
        bands = parse_bands(text)
        assert bands == (Band(0, 0, 10, 10, label="natural"),)

    def test_parse_rejects_bad_label(self):
        with pytest.raises(ValueError):
            parse_bands("wat 0 0 10 10\n")

    def test_parse_rejects_bad_fields(self):
        with pytest.raises(ValueError):
            parse_bands("natural 0 0 10\n")
        with pytest.raises(ValueError):
            parse_bands("natural a b 10 10\n")


class TestCorpusGenerator:
    def test_single_frame(self, tmp_path):
        pairs = generate_synthetic_corpus(1, seed=3, out_dir=tmp_path)
        assert len(pairs) == 1
        frame = load_image(pairs[0][0])
        assert frame.shape == (360, 640, 3)
        bands = load_bands(pairs[0][1])
        assert bands

    def test_same_seed_identical(self, tmp_path):
        a = generate_synthetic_corpus(2, seed=5, out_dir=tmp_path / "a")
        b = generate_synthetic_corpus(2, seed=5, out_dir=tmp_path / "b")
        for (fa, ta), (fb, tb) in zip(a, b):
            assert open(fa, "rb").read() == open(fb, "rb").read()
            assert open(ta).read() == open(tb).read()

    def test_truth_is_exact_partition_scoring_one(self, tmp_path):
        pairs = generate_synthetic_corpus(3, seed=7, out_dir=tmp_path)
        for _, truth_path in pairs:
            bands = load_bands(truth_path)
            profile = FormatProfile(640, 360, bands)
            profile.validate_partition()
            assert net_jaccard(profile, profile) == 1.0


class TestRunPipeline:
    def test_solid_frame_single_synthetic_band(self, trained):
        model, ctx = trained
        frame = np.zeros((120, 160, 3), dtype=np.uint8)
        frame[:, :] = (80, 130, 126)
        cfg = load_config()
        result = run_pipeline(frame, cfg, model, ctx)
        assert len(result.profile.bands) == 1
        band = result.profile.bands[0]
        assert (band.x, band.y, band.w, band.h) == (0, 0, 160, 120)
        assert band.label == "synthetic"

    def test_artifacts_deterministic(self, tmp_path, trained):
        model, ctx = trained
        pairs = generate_synthetic_corpus(1, seed=21, out_dir=tmp_path / "c")
        frame = load_image(pairs[0][0])
        cfg = load_config()
        outputs = []
        for run in ("one", "two"):
            result = run_pipeline(frame, cfg, model, ctx)
            base = str(tmp_path / run)
            write_profile_artifacts(result, base, frame=frame, overlay=True)
            outputs.append({
                "txt": open(base + ".txt", "rb").read(),
                "json": open(base + ".json", "rb").read(),
                "png": open(base + "_overlay.png", "rb").read(),
            })
        assert outputs[0] == outputs[1]

    def test_profile_json_shape(self, trained):
        model, ctx = trained
        frame = np.zeros((60, 80, 3), dtype=np.uint8)
        frame[:, :] = (48, 85, 65)
        cfg = load_config()
        result = run_pipeline(frame, cfg, model, ctx)
        data = json.loads(profile_to_json(result.profile))
        assert data["width"] == 80 and data["height"] == 60
        assert data["bands"][0]["provenance"] in ("grid", "tier1", "tier2", "tier3")


class TestChangeRefinement:
    def _sequence(self, dynamic):
        rng = np.random.default_rng(3)
        frames = []
        base = np.zeros((100, 100, 3), dtype=np.uint8)
        base[:, :] = (80, 130, 126)
        for _ in range(7):
            frame = base.copy()
            if dynamic:
                frame[:50, :] = rng.integers(0, 256, (50, 100, 3))
            frames.append(frame)
        return frames

    def test_static_natural_band_relabeled(self):
        cfg = load_config()
        profile = FormatProfile(100, 100, (
            Band(0, 0, 100, 50, label="natural"),
            Band(0, 50, 100, 50, label="synthetic")))
        refined = refine_labels_by_change(profile, self._sequence(False), cfg)
        assert refined.bands[0].label == "synthetic"

    def test_dynamic_natural_band_kept(self):
        cfg = load_config()
        profile = FormatProfile(100, 100, (
            Band(0, 0, 100, 50, label="natural"),
            Band(0, 50, 100, 50, label="synthetic")))
        refined = refine_labels_by_change(profile, self._sequence(True), cfg)
        assert refined.bands[0].label == "natural"

    def test_short_sequence_untouched(self):
        cfg = load_config()
        profile = FormatProfile(100, 100, (Band(0, 0, 100, 100, label="natural"),))
        frames = self._sequence(False)[:3]
        refined = refine_labels_by_change(profile, frames, cfg)
        assert refined.bands[0].label == "natural"


class TestDatasetTool:
    def test_bands_precomputed(self, tmp_path):
        frames_dir = tmp_path / "frames"
        frames_dir.mkdir()
        frame = np.zeros((120, 160, 3), dtype=np.uint8)
        frame[:, :60] = (16, 28, 16)
        frame[:, 60:] = (248, 250, 252)
        save_image(frames_dir / "f0.png", frame)
        out = tmp_path / "out"
        index = dataset_from_frames(frames_dir, out, load_config())
        assert index == {"f0": 2}
        payload = json.loads((out / "bands" / "f0.json").read_text())
        assert len(payload) == 2
        # bottom-left-first ordering: both cells share y2, left one first
        assert payload[0]["x"] <= payload[1]["x"]
        assert (out / "natural").is_dir() and (out / "artificial").is_dir()


class TestCli:
    def test_gen_corpus_and_evaluate(self, tmp_path, capsys):
        corpus = tmp_path / "corpus"
        assert main(["gen-corpus", "--count", "2", "--seed", "4",
                     "--out", str(corpus)]) == 0
        # score truth against itself
        assert main(["evaluate", "--results", str(corpus),
                     "--truth", str(corpus),
                     "--json", str(tmp_path / "report.json")]) == 0
        out = capsys.readouterr().out
        assert "mean" in out and "1.0000" in out
        report = json.loads((tmp_path / "report.json").read_text())
        assert report["corpus_mean_net_jaccard"] == 1.0

    def test_usage_error_exit_code(self):
        assert main(["detect"]) == 1

    def test_data_error_exit_code(self, tmp_path):
        missing = str(tmp_path / "nope.png")
        assert main(["detect", missing, "--model", missing,
                     "--context", missing]) == 2

    def test_text_command(self, tmp_path, capsys):
        from newsband.corpus import text_stripe_frame
        frame = text_stripe_frame(300, 200, [(20, 80, 260, 28)], seed=3)
        path = tmp_path / "frame.png"
        save_image(path, frame)
        assert main(["text", str(path), "--dump-profiles",
                     "--out", str(tmp_path / "frame")]) == 0
        out = capsys.readouterr().out
        assert out.startswith("text ")
        assert (tmp_path / "frame_hp_profile.txt").exists()
        assert (tmp_path / "frame_vp_profile.txt").exists()

    def test_change_command(self, tmp_path, capsys):
        rng = np.random.default_rng(0)
        a = rng.integers(0, 256, (100, 100, 3), dtype=np.uint8)
        b = rng.integers(0, 256, (100, 100, 3), dtype=np.uint8)
        pa, pb = tmp_path / "a.png", tmp_path / "b.png"
        save_image(pa, a)
        save_image(pb, b)
        assert main(["change", str(pa), str(pb),
                     "--out", str(tmp_path / "pair")]) == 0
        assert (tmp_path / "pair_change_pixel.pgm").exists()
        assert (tmp_path / "pair_change_hist.pgm").exists()

    def test_full_train_detect_cycle(self, tmp_path, capsys):
        from newsband.corpus import generate_training_crops
        gdir, ndir = generate_training_crops(tmp_path / "crops", per_class=6, seed=2)
        ctx_path = tmp_path / "ctx.npz"
        assert main(["features", "--build-context", "--graphics-dir", gdir,
                     "--natural-dir", ndir, "--out", str(ctx_path)]) == 0
        gcsv = tmp_path / "g.csv"
        ncsv = tmp_path / "n.csv"
        assert main(["features", gdir, "--context", str(ctx_path),
                     "--label", "graphics", "--out", str(gcsv)]) == 0
        assert main(["features", ndir, "--context", str(ctx_path),
                     "--label", "natural", "--out", str(ncsv)]) == 0
        model_path = tmp_path / "model.npz"
        assert main(["train", str(gcsv), str(ncsv), "--out", str(model_path),
                     "--set", "classifier.hidden_count=24"]) == 0
        assert main(["classify", str(gcsv), "--model", str(model_path)]) == 0
        lines = [l for l in capsys.readouterr().out.splitlines()
                 if l in ("graphics", "natural")]
        assert lines.count("graphics") >= 5

        corpus = tmp_path / "corpus"
        main(["gen-corpus", "--count", "1", "--seed", "3", "--out", str(corpus)])
        frame_path = corpus / "frame_0000.png"
        assert main(["detect", str(frame_path), "--model", str(model_path),
                     "--context", str(ctx_path),
                     "--out", str(tmp_path / "result"), "--overlay"]) == 0
        assert (tmp_path / "result.txt").exists()
        assert (tmp_path / "result.json").exists()
        assert (tmp_path / "result_overlay.png").exists()

    def test_detect_batch_over_directory(self, tmp_path, trained):
        from newsband.classifier import save_model
        from newsband.features import save_context
        model, ctx = trained
        model_path = tmp_path / "model.npz"
        ctx_path = tmp_path / "ctx.npz"
        save_model(model_path, model)
        save_context(ctx_path, ctx)
        corpus = tmp_path / "corpus"
        main(["gen-corpus", "--count", "2", "--seed", "6", "--out", str(corpus)])
        out_dir = tmp_path / "profiles"
        assert main(["detect", str(corpus), "--model", str(model_path),
                     "--context", str(ctx_path), "--out", str(out_dir)]) == 0
        assert (out_dir / "frame_0000_profile.txt").exists()
        assert (out_dir / "frame_0001_profile.txt").exists()
