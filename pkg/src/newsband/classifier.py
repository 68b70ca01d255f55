"""Extreme learning machine: random hidden layer, least-squares output.

Training draws the hidden weights and biases uniformly from [-3, 3], maps
the (standardized) inputs through the hidden layer once, and solves for
the output weights with a single SVD pseudoinverse. No iteration, no
learning rate, no local minima.
"""

from dataclasses import dataclass

import numpy as np

from .evaluation import ConfusionCounts, classifier_measures

ACTIVATIONS = ("sigmoid", "rbf")
WEIGHT_RANGE = 3.0
MODEL_FORMAT_VERSION = 1


@dataclass(frozen=True)
class ElmModel:
    input_weights: np.ndarray   # L x d
    biases: np.ndarray          # L
    output_weights: np.ndarray  # L x m
    activation: str
    feat_mean: np.ndarray       # d
    feat_std: np.ndarray        # d
    classes: tuple

    def __post_init__(self):
        L, d = self.input_weights.shape
        if self.biases.shape != (L,):
            raise ValueError("bias vector does not match hidden count")
        if self.output_weights.shape[0] != L:
            raise ValueError("output weights do not match hidden count")
        if self.output_weights.shape[1] != len(self.classes):
            raise ValueError("output weights do not match class count")
        if self.feat_mean.shape != (d,) or self.feat_std.shape != (d,):
            raise ValueError("standardization vectors do not match input size")
        if self.activation not in ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        for arr in (self.input_weights, self.biases, self.output_weights,
                    self.feat_mean, self.feat_std):
            if not np.isfinite(arr).all():
                raise ValueError("model parameters must be finite")

    @property
    def hidden_count(self) -> int:
        return self.input_weights.shape[0]

    @property
    def input_dim(self) -> int:
        return self.input_weights.shape[1]


def _sigmoid(z: np.ndarray) -> np.ndarray:
    return 1.0 / (1.0 + np.exp(-np.clip(z, -500, 500)))


def _hidden_matrix(X, input_weights, biases, activation):
    if activation == "sigmoid":
        return _sigmoid(X @ input_weights.T + biases)
    # rbf: g(b * ||x - a||), distances via the expanded quadratic form
    sq = (np.sum(X ** 2, axis=1)[:, None]
          + np.sum(input_weights ** 2, axis=1)[None, :]
          - 2.0 * (X @ input_weights.T))
    dist = np.sqrt(np.maximum(sq, 0.0))
    return _sigmoid(dist * biases)


def _standardize(X, mean, std):
    return (X - mean) / std


def elm_train(X, labels, hidden_count: int, activation: str = "sigmoid",
              seed: int = 0) -> ElmModel:
    """Train on row vectors X with string labels; deterministic per seed.

    Features are standardized with training statistics (stored in the
    model). Targets are +/-1 one-hot per class; the output weights solve
    the least-squares system through an SVD pseudoinverse with cutoff
    eps * max(N, L) * sigma_max.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError("training data must be a non-empty 2-D array")
    if hidden_count < 1:
        raise ValueError("hidden_count must be >= 1")
    labels = list(labels)
    if len(labels) != X.shape[0]:
        raise ValueError("one label per sample required")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        raise ValueError("need samples from at least two classes")
    if activation not in ACTIVATIONS:
        raise ValueError(f"unknown activation {activation!r}")

    mean = X.mean(axis=0)
    std = X.std(axis=0)
    std[std == 0] = 1.0
    Xs = _standardize(X, mean, std)

    rng = np.random.default_rng(seed)
    n, d = X.shape
    input_weights = rng.uniform(-WEIGHT_RANGE, WEIGHT_RANGE, size=(hidden_count, d))
    biases = rng.uniform(-WEIGHT_RANGE, WEIGHT_RANGE, size=hidden_count)

    H = _hidden_matrix(Xs, input_weights, biases, activation)
    index = {c: k for k, c in enumerate(classes)}
    T = -np.ones((n, len(classes)))
    for row, lab in enumerate(labels):
        T[row, index[lab]] = 1.0
    rcond = np.finfo(np.float64).eps * max(n, hidden_count)
    output_weights = np.linalg.pinv(H, rcond=rcond) @ T
    return ElmModel(input_weights, biases, output_weights, activation,
                    mean, std, classes)


def elm_scores(model: ElmModel, X) -> np.ndarray:
    """Raw output activations, one row per sample."""
    X = np.atleast_2d(np.asarray(X, dtype=np.float64))
    if X.shape[1] != model.input_dim:
        raise ValueError(
            f"expected {model.input_dim}-dimensional input, got {X.shape[1]}")
    Xs = _standardize(X, model.feat_mean, model.feat_std)
    H = _hidden_matrix(Xs, model.input_weights, model.biases, model.activation)
    return H @ model.output_weights


def elm_predict(model: ElmModel, x) -> str:
    """Class label of one feature vector (argmax output, first class wins ties)."""
    return model.classes[int(np.argmax(elm_scores(model, x)[0]))]


def elm_predict_batch(model: ElmModel, X):
    return [model.classes[int(k)] for k in np.argmax(elm_scores(model, X), axis=1)]


def training_residual(model: ElmModel, X, labels) -> float:
    """Relative residual ||H beta - T|| / ||T|| on the given set."""
    X = np.asarray(X, dtype=np.float64)
    Xs = _standardize(X, model.feat_mean, model.feat_std)
    H = _hidden_matrix(Xs, model.input_weights, model.biases, model.activation)
    index = {c: k for k, c in enumerate(model.classes)}
    T = -np.ones((X.shape[0], len(model.classes)))
    for row, lab in enumerate(labels):
        T[row, index[lab]] = 1.0
    return float(np.linalg.norm(H @ model.output_weights - T)
                 / np.linalg.norm(T))


def save_model(path, model: ElmModel) -> None:
    """Single self-describing file: matrices, standardization, activation."""
    np.savez_compressed(
        path,
        format_version=MODEL_FORMAT_VERSION,
        activation=model.activation,
        classes=np.array(model.classes),
        input_weights=model.input_weights,
        biases=model.biases,
        output_weights=model.output_weights,
        feat_mean=model.feat_mean,
        feat_std=model.feat_std)


def load_model(path) -> ElmModel:
    with np.load(path) as data:
        version = int(data["format_version"])
        if version != MODEL_FORMAT_VERSION:
            raise ValueError(f"unsupported model file version {version}")
        return ElmModel(
            input_weights=data["input_weights"],
            biases=data["biases"],
            output_weights=data["output_weights"],
            activation=str(data["activation"]),
            feat_mean=data["feat_mean"],
            feat_std=data["feat_std"],
            classes=tuple(str(c) for c in data["classes"]))


def stratified_folds(labels, k: int, seed: int):
    """Index folds with per-class round-robin dealing after a shuffle."""
    labels = list(labels)
    n = len(labels)
    if k < 2:
        raise ValueError("k must be >= 2")
    if k > n:
        raise ValueError(f"cannot make {k} folds from {n} samples")
    rng = np.random.default_rng(seed)
    folds = [[] for _ in range(k)]
    cursor = 0
    for cls in sorted(set(labels)):
        idx = [i for i, lab in enumerate(labels) if lab == cls]
        rng.shuffle(idx)
        for i in idx:
            folds[cursor % k].append(i)
            cursor += 1
    if any(not f for f in folds):
        raise ValueError("a fold came out empty; lower k")
    return [np.array(sorted(f)) for f in folds]


def confusion_for_class(true_labels, predicted, positive: str) -> ConfusionCounts:
    tp = fp = tn = fn = 0
    for t, p in zip(true_labels, predicted):
        if p == positive:
            if t == positive:
                tp += 1
            else:
                fp += 1
        else:
            if t == positive:
                fn += 1
            else:
                tn += 1
    return ConfusionCounts(tp, fp, tn, fn)


def k_fold_evaluate(X, labels, k: int, hidden_count: int,
                    activation: str = "sigmoid", seed: int = 0):
    """Stratified k-fold cross validation.

    Returns (fold_counts, aggregate): fold_counts is a list of per-class
    ConfusionCounts dicts, aggregate maps each class to Measures computed
    from the summed counts.
    """
    X = np.asarray(X, dtype=np.float64)
    labels = list(labels)
    folds = stratified_folds(labels, k, seed)
    classes = sorted(set(labels))
    fold_counts = []
    for f, test_idx in enumerate(folds):
        test_mask = np.zeros(len(labels), dtype=bool)
        test_mask[test_idx] = True
        train_idx = np.nonzero(~test_mask)[0]
        model = elm_train(X[train_idx], [labels[i] for i in train_idx],
                          hidden_count, activation, seed=seed + f)
        predicted = elm_predict_batch(model, X[test_idx])
        truth = [labels[i] for i in test_idx]
        fold_counts.append({
            cls: confusion_for_class(truth, predicted, cls) for cls in classes})
    aggregate = {}
    for cls in classes:
        total = ConfusionCounts(0, 0, 0, 0)
        for counts in fold_counts:
            total = total + counts[cls]
        aggregate[cls] = classifier_measures(total)
    return fold_counts, aggregate
