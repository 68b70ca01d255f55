import os

import numpy as np
import pytest


def plant_lines(width, height, lines):
    """Rasterize (x0, y0, x1, y1) lines into a binary edge map."""
    img = np.zeros((height, width), dtype=np.uint8)
    for x0, y0, x1, y1 in lines:
        n = int(max(abs(x1 - x0), abs(y1 - y0))) + 1
        xs = np.rint(np.linspace(x0, x1, n)).astype(int)
        ys = np.rint(np.linspace(y0, y1, n)).astype(int)
        img[ys, xs] = 1
    return img


def random_axis_lines(rng, width, height, count):
    """Plant well-separated axis-aligned lines; returns (x0, y0, x1, y1) tuples."""
    lines = []
    used_y, used_x = [], []
    while len(lines) < count:
        if rng.random() < 0.5:
            y = int(rng.integers(10, height - 10))
            if any(abs(y - u) < 12 for u in used_y):
                continue
            span = int(rng.integers(int(0.5 * width), width))
            x0 = int(rng.integers(0, width - span))
            lines.append((x0, y, x0 + span - 1, y))
            used_y.append(y)
        else:
            x = int(rng.integers(10, width - 10))
            if any(abs(x - u) < 12 for u in used_x):
                continue
            span = int(rng.integers(int(0.5 * height), height))
            y0 = int(rng.integers(0, height - span))
            lines.append((x, y0, x, y0 + span - 1))
            used_x.append(x)
    return lines


def standard_hough_accumulator(edges, n_angles=180):
    """Exhaustive (rho, theta) voting oracle: every set pixel votes once
    for every angle."""
    height, width = edges.shape
    ys, xs = np.nonzero(edges)
    thetas = np.deg2rad(np.arange(n_angles, dtype=np.float64))
    cos_t, sin_t = np.cos(thetas), np.sin(thetas)
    max_rho = int(np.ceil(np.hypot(width, height)))
    acc = np.zeros((n_angles, 2 * max_rho + 1), dtype=np.int32)
    idx = np.arange(n_angles)
    for x, y in zip(xs, ys):
        rho = np.rint(x * cos_t + y * sin_t).astype(np.int64) + max_rho
        acc[idx, rho] += 1
    return acc, max_rho


def segment_support(edges, seg):
    """Count set pixels of `edges` on the rasterized segment path."""
    n = int(max(abs(seg.x1 - seg.x0), abs(seg.y1 - seg.y0))) + 1
    xs = np.rint(np.linspace(seg.x0, seg.x1, n)).astype(int)
    ys = np.rint(np.linspace(seg.y0, seg.y1, n)).astype(int)
    return int(edges[ys, xs].sum())


def endpoint_error(seg, line):
    """Smallest max-endpoint distance between a segment and a ground line,
    trying both endpoint orderings."""
    x0, y0, x1, y1 = line
    d_a = max(np.hypot(seg.x0 - x0, seg.y0 - y0), np.hypot(seg.x1 - x1, seg.y1 - y1))
    d_b = max(np.hypot(seg.x0 - x1, seg.y0 - y1), np.hypot(seg.x1 - x0, seg.y1 - y0))
    return min(d_a, d_b)


@pytest.fixture
def rng():
    return np.random.default_rng(20240917)


@pytest.fixture(scope="session")
def trained(tmp_path_factory):
    """Feature context + ELM model trained on corpus-texture crops."""
    import glob

    from newsband.classifier import elm_train
    from newsband.corpus import generate_training_crops
    from newsband.features import assemble_feature_vector, build_feature_context
    from newsband.imaging import load_image

    root = tmp_path_factory.mktemp("train")
    gdir, ndir = generate_training_crops(root, per_class=16, seed=11)
    ctx = build_feature_context(gdir, ndir)
    X, labels = [], []
    for path in sorted(glob.glob(os.path.join(gdir, "*.png"))):
        X.append(assemble_feature_vector(load_image(path), ctx))
        labels.append("graphics")
    for path in sorted(glob.glob(os.path.join(ndir, "*.png"))):
        X.append(assemble_feature_vector(load_image(path), ctx))
        labels.append("natural")
    model = elm_train(np.array(X), labels, hidden_count=60, seed=5)
    return model, ctx
