from collections import Counter
from itertools import combinations
from math import comb, log

import numpy as np
import pytest

from causalgroups.errors import EmptyInput, LengthMismatch, ZeroDenominator
from causalgroups.eval_metrics import (
    ConfusionCounts,
    adjusted_rand_index,
    confusion_metrics,
    rmse,
    v_measure,
)


def _entropy(labels):
    n = len(labels)
    return -sum(c / n * log(c / n) for c in Counter(labels).values())


def _conditional_entropy(a, b):
    """H(a | b)"""
    n = len(a)
    joint = Counter(zip(a, b))
    marginal = Counter(b)
    return -sum(c / n * log(c / marginal[kb]) for (_, kb), c in joint.items())


def _v_measure_oracle(truth, pred):
    h_truth, h_pred = _entropy(truth), _entropy(pred)
    homogeneity = 1.0 if h_truth == 0 else 1.0 - _conditional_entropy(truth, pred) / h_truth
    completeness = 1.0 if h_pred == 0 else 1.0 - _conditional_entropy(pred, truth) / h_pred
    if homogeneity + completeness == 0:
        return 0.0
    return 2 * homogeneity * completeness / (homogeneity + completeness)


def _ari_oracle(truth, pred):
    pairs = list(combinations(range(len(truth)), 2))
    same_both = sum(1 for i, j in pairs if truth[i] == truth[j] and pred[i] == pred[j])
    same_truth = sum(1 for i, j in pairs if truth[i] == truth[j])
    same_pred = sum(1 for i, j in pairs if pred[i] == pred[j])
    total = comb(len(truth), 2)
    expected = same_truth * same_pred / total
    maximum = (same_truth + same_pred) / 2
    if maximum == expected:
        return 1.0
    return (same_both - expected) / (maximum - expected)


def test_identical_labelings():
    labels = [0, 0, 1, 2, 2]
    assert v_measure(labels, labels) == pytest.approx(1.0)
    assert adjusted_rand_index(labels, labels) == pytest.approx(1.0)


def test_single_predicted_cluster():
    assert v_measure([0, 0, 1, 1], [0, 0, 0, 0]) == pytest.approx(0.0, abs=1e-12)
    assert adjusted_rand_index([0, 0, 1, 1], [0, 0, 0, 0]) == pytest.approx(0.0, abs=1e-12)


def test_metrics_match_oracles():
    rng = np.random.default_rng(0)
    for _ in range(100):
        n = int(rng.integers(2, 11))
        truth = rng.integers(0, 3, size=n).tolist()
        pred = rng.integers(0, 4, size=n).tolist()
        assert v_measure(truth, pred) == pytest.approx(_v_measure_oracle(truth, pred), abs=1e-10)
        assert adjusted_rand_index(truth, pred) == pytest.approx(_ari_oracle(truth, pred), abs=1e-10)


def test_label_length_checks():
    with pytest.raises(LengthMismatch):
        v_measure([0, 1], [0, 1, 1])
    with pytest.raises(EmptyInput):
        adjusted_rand_index([0], [0])


@pytest.mark.parametrize(
    "counts,expected",
    [
        ((4, 16, 11, 5), (0.556, 0.444, 0.333)),
        ((6, 18, 6, 4), (0.706, 0.600, 0.545)),
        ((11, 16, 4, 6), (0.730, 0.647, 0.688)),
        ((13, 22, 2, 2), (0.897, 0.867, 0.867)),
    ],
)
def test_confusion_metrics_table_rows(counts, expected):
    tp, tn, fp, fn = counts
    result = confusion_metrics(ConfusionCounts(tp=tp, tn=tn, fp=fp, fn=fn))
    assert result["accuracy"] == pytest.approx(expected[0], abs=0.005)
    assert result["recall"] == pytest.approx(expected[1], abs=0.005)
    assert result["f1"] == pytest.approx(expected[2], abs=0.005)


def test_confusion_metrics_undefined_recall():
    with pytest.raises(ZeroDenominator) as info:
        confusion_metrics(ConfusionCounts(tp=0, tn=7, fp=0, fn=0))
    assert info.value.metric == "recall"
    with pytest.raises(ZeroDenominator):
        confusion_metrics(ConfusionCounts(tp=0, tn=0, fp=0, fn=0))
    with pytest.raises(ValueError):
        ConfusionCounts(tp=-1, tn=0, fp=0, fn=0)


def test_rmse():
    assert rmse([1.0, 2.0], [1.0, 2.0]) == 0.0
    assert rmse([0.0, 0.0], [3.0, 4.0]) == pytest.approx(3.5355, abs=1e-4)
    y, yhat = np.array([1.0, -2.0, 0.5]), np.array([0.0, 1.0, 2.0])
    assert rmse(-3.0 * y, -3.0 * yhat) == pytest.approx(3.0 * rmse(y, yhat))
    with pytest.raises(LengthMismatch):
        rmse([1.0], [1.0, 2.0])


def test_metrics_ignore_label_names():
    rng = np.random.default_rng(3)
    truth = rng.integers(0, 3, size=40)
    pred = rng.integers(0, 4, size=40)
    renamed_truth = np.array([10, 20, 30])[truth]
    renamed_pred = np.array([7, 1, 9, 4])[pred]
    assert adjusted_rand_index(renamed_truth, renamed_pred) == pytest.approx(adjusted_rand_index(truth, pred), abs=1e-12)
    assert v_measure(renamed_truth, renamed_pred) == pytest.approx(v_measure(truth, pred), abs=1e-12)


def test_random_labelings_average_zero_ari():
    rng = np.random.default_rng(5)
    truth = np.repeat(np.arange(3), 30)
    scores = [adjusted_rand_index(truth, rng.integers(0, 3, size=90)) for _ in range(400)]
    assert abs(np.mean(scores)) < 0.01
