"""
Clustering and prediction metrics
"""
from dataclasses import dataclass
from typing import Dict

import numpy as np
from sklearn.metrics import adjusted_rand_score, v_measure_score

from causalgroups.errors import EmptyInput, LengthMismatch, ZeroDenominator


@dataclass
class ConfusionCounts:
    tp: int
    tn: int
    fp: int
    fn: int

    def __post_init__(self):
        for name in ("tp", "tn", "fp", "fn"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")

    @property
    def total(self) -> int:
        return self.tp + self.tn + self.fp + self.fn


def _paired(a, b, min_length: int):
    a = np.asarray(a).ravel()
    b = np.asarray(b).ravel()
    if a.size != b.size:
        raise LengthMismatch(f"lengths differ: {a.size} vs {b.size}")
    if a.size < min_length:
        raise EmptyInput(f"need at least {min_length} elements, got {a.size}")
    return a, b


def v_measure(true_labels, pred_labels) -> float:
    """Harmonic mean of homogeneity and completeness"""
    true_labels, pred_labels = _paired(true_labels, pred_labels, 1)
    return float(v_measure_score(true_labels, pred_labels))


def adjusted_rand_index(true_labels, pred_labels) -> float:
    true_labels, pred_labels = _paired(true_labels, pred_labels, 2)
    return float(adjusted_rand_score(true_labels, pred_labels))


def confusion_metrics(c: ConfusionCounts) -> Dict[str, float]:
    """Accuracy, recall and the standard F1 = 2TP / (2TP + FP + FN)"""
    if c.total == 0:
        raise ZeroDenominator("accuracy")
    if c.tp + c.fn == 0:
        raise ZeroDenominator("recall")
    if 2 * c.tp + c.fp + c.fn == 0:
        raise ZeroDenominator("f1")
    return {
        "accuracy": (c.tp + c.tn) / c.total,
        "recall": c.tp / (c.tp + c.fn),
        "f1": 2 * c.tp / (2 * c.tp + c.fp + c.fn),
    }


def rmse(y, yhat) -> float:
    y, yhat = _paired(y, yhat, 1)
    residual = y.astype(np.float64) - yhat.astype(np.float64)
    return float(np.sqrt(np.mean(residual * residual)))
