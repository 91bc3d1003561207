"""Evaluation metrics, implemented directly from their definitions.

roc_auc uses the rank formulation of the Mann-Whitney statistic (ties
count one half), average_precision follows the precision-at-hit sum, and
precision_recall_f1 reports per-class scores with macro and
support-weighted averages. All take plain numpy arrays.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateLabels


def _check_binary(labels: np.ndarray) -> tuple[int, int]:
    pos = int(np.sum(labels == 1))
    neg = int(np.sum(labels == 0))
    if pos + neg != labels.size:
        raise DegenerateLabels("binary labels must be exactly 0 or 1")
    if pos == 0 or neg == 0:
        raise DegenerateLabels(f"need both classes, got {pos} positives / {neg} negatives")
    return pos, neg


def roc_auc(scores: np.ndarray, labels: np.ndarray) -> float:
    """P(score_pos > score_neg) + 0.5 * P(score_pos == score_neg) over all
    positive/negative pairs, computed via average ranks in O(n log n)."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos, neg = _check_binary(labels)
    order = np.argsort(scores, kind="stable")
    ranks = np.empty(scores.size, dtype=np.float64)
    sorted_scores = scores[order]
    i = 0
    while i < scores.size:
        j = i
        while j + 1 < scores.size and sorted_scores[j + 1] == sorted_scores[i]:
            j += 1
        # 1-based average rank across the tied block
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    rank_sum = float(ranks[labels == 1].sum())
    u = rank_sum - pos * (pos + 1) / 2.0
    return u / (pos * neg)


def average_precision(scores: np.ndarray, labels: np.ndarray) -> float:
    """Mean of precision@k over the ranks k where a positive sits, scanning
    by descending score with ties broken by original position."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    pos = int(np.sum(labels == 1))
    if int(np.sum(labels == 0)) + pos != labels.size:
        raise DegenerateLabels("binary labels must be exactly 0 or 1")
    if pos == 0:
        raise DegenerateLabels("average precision needs at least one positive")
    order = np.argsort(-scores, kind="stable")
    hits = 0
    total = 0.0
    for k, idx in enumerate(order, start=1):
        if labels[idx] == 1:
            hits += 1
            total += hits / k
    return total / pos


@dataclass(frozen=True)
class Prf:
    precision: float
    recall: float
    f1: float


@dataclass(frozen=True)
class ClassificationScores:
    per_class: tuple[Prf, ...]
    macro: Prf
    weighted: Prf


def precision_recall_f1(
    y_true: np.ndarray, y_pred: np.ndarray, num_classes: int
) -> ClassificationScores:
    """Per-class precision/recall/F1 with the 0/0 -> 0 convention. Macro
    averages all ``num_classes`` classes equally; weighted averages by true
    support."""
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)
    if y_true.shape != y_pred.shape:
        raise DegenerateLabels(f"shape mismatch {y_true.shape} vs {y_pred.shape}")
    if y_true.size == 0:
        raise DegenerateLabels("no samples to score")
    for arr in (y_true, y_pred):
        if arr.min() < 0 or arr.max() >= num_classes:
            raise DegenerateLabels(f"class index outside [0, {num_classes})")

    per_class = []
    supports = []
    for c in range(num_classes):
        tp = int(np.sum((y_pred == c) & (y_true == c)))
        fp = int(np.sum((y_pred == c) & (y_true != c)))
        fn = int(np.sum((y_pred != c) & (y_true == c)))
        p = tp / (tp + fp) if tp + fp > 0 else 0.0
        r = tp / (tp + fn) if tp + fn > 0 else 0.0
        f1 = 2 * p * r / (p + r) if p + r > 0 else 0.0
        per_class.append(Prf(p, r, f1))
        supports.append(tp + fn)

    macro = Prf(
        sum(s.precision for s in per_class) / num_classes,
        sum(s.recall for s in per_class) / num_classes,
        sum(s.f1 for s in per_class) / num_classes,
    )
    n = y_true.size
    weighted = Prf(
        sum(s.precision * w for s, w in zip(per_class, supports)) / n,
        sum(s.recall * w for s, w in zip(per_class, supports)) / n,
        sum(s.f1 * w for s, w in zip(per_class, supports)) / n,
    )
    return ClassificationScores(tuple(per_class), macro, weighted)
