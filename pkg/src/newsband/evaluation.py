"""Scoring: rectangle overlap for layouts, confusion measures for classifiers."""

import json
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .band_detection import Band, intersection_area


@dataclass(frozen=True)
class ConfusionCounts:
    tp: int
    fp: int
    tn: int
    fn: int

    def __post_init__(self):
        if min(self.tp, self.fp, self.tn, self.fn) < 0:
            raise ValueError("confusion counts must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.tn + self.fn

    def __add__(self, other):
        return ConfusionCounts(self.tp + other.tp, self.fp + other.fp,
                               self.tn + other.tn, self.fn + other.fn)


@dataclass(frozen=True)
class Measures:
    """Per-class classifier measures; a None marks an undefined denominator."""
    precision: float
    recall: float
    f_measure: float
    balanced_accuracy: float


def jaccard(r1: Band, r2: Band) -> float:
    """Intersection over union of two rectangles, by closed-form arithmetic."""
    if r1.area == 0 or r2.area == 0:
        raise ValueError("zero-area rectangle")
    inter = intersection_area(r1, r2)
    return inter / (r1.area + r2.area - inter)


def net_jaccard(result, truth) -> float:
    """Frame-level overlap score of a detected layout against ground truth.

    Each result band contributes its best overlap with any truth band; the
    sum is divided by the truth band count. The division by the truth
    count (not the result count) is deliberate, so heavy over-segmentation
    with good coverage is not rewarded twice.
    """
    result_bands = getattr(result, "bands", result)
    truth_bands = getattr(truth, "bands", truth)
    if not truth_bands:
        raise ValueError("empty ground truth")
    if not result_bands:
        raise ValueError("empty result profile")
    total = sum(max(jaccard(r, t) for t in truth_bands) for r in result_bands)
    return total / len(truth_bands)


def matched_jaccard(result, truth) -> float:
    """Symmetric companion score: optimal one-to-one band assignment.

    Maximum-weight matching of result bands to truth bands on pairwise
    IoU, summed and divided by max(n1, n2); always in [0, 1] and
    symmetric in its arguments.
    """
    result_bands = getattr(result, "bands", result)
    truth_bands = getattr(truth, "bands", truth)
    if not truth_bands or not result_bands:
        raise ValueError("empty band set")
    iou = np.array([[jaccard(r, t) for t in truth_bands] for r in result_bands])
    rows, cols = linear_sum_assignment(-iou)
    return float(iou[rows, cols].sum()) / max(len(result_bands), len(truth_bands))


def classifier_measures(c: ConfusionCounts) -> Measures:
    """Precision, recall, F-measure and balanced accuracy from counts.

    Undefined ratios (empty denominators) come back as None rather than a
    silent zero.
    """
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp > 0 else None
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn > 0 else None
    if precision is not None and recall is not None and precision + recall > 0:
        f_measure = 2 * precision * recall / (precision + recall)
    else:
        f_measure = None
    specificity = c.tn / (c.tn + c.fp) if c.tn + c.fp > 0 else None
    if recall is not None and specificity is not None:
        balanced_accuracy = (recall + specificity) / 2
    else:
        balanced_accuracy = None
    return Measures(precision, recall, f_measure, balanced_accuracy)


def build_report(per_frame: dict, classifier: dict = None) -> dict:
    """Evaluation report as a JSON-serializable dict."""
    report = {
        "per_frame_net_jaccard": dict(sorted(per_frame.items())),
        "corpus_mean_net_jaccard": (
            sum(per_frame.values()) / len(per_frame) if per_frame else None),
    }
    if classifier is not None:
        report["classifier"] = {
            cls: {
                "precision": m.precision,
                "recall": m.recall,
                "f_measure": m.f_measure,
                "balanced_accuracy": m.balanced_accuracy,
            }
            for cls, m in classifier.items()
        }
    return report


def render_report(report: dict) -> str:
    """Plain-text table rendering of build_report output."""
    lines = ["frame                          net Jaccard"]
    for frame, value in report["per_frame_net_jaccard"].items():
        lines.append(f"{frame:<30} {value:.4f}")
    mean = report["corpus_mean_net_jaccard"]
    if mean is not None:
        lines.append(f"{'mean':<30} {mean:.4f}")
    if "classifier" in report:
        lines.append("")
        lines.append("class        precision  recall  f-measure  balanced-acc")
        for cls, m in report["classifier"].items():
            cells = [m["precision"], m["recall"], m["f_measure"],
                     m["balanced_accuracy"]]
            text = "  ".join("   n/a " if v is None else f"{v:7.4f}" for v in cells)
            lines.append(f"{cls:<12} {text}")
    return "\n".join(lines) + "\n"


def report_to_json(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True) + "\n"
