"""Accuracy, ROC-based metrics and the two significance tests."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import stats

__all__ = [
    "ScoredPredictions",
    "accuracy",
    "roc_curve",
    "auc",
    "auc_trapezoid",
    "recall_at_fpr",
    "paired_t_test",
    "two_proportion_z",
]


@dataclass
class ScoredPredictions:
    scores: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        self.scores = np.asarray(self.scores, dtype=float)
        self.labels = np.asarray(self.labels).astype(np.int64)
        if self.scores.shape != self.labels.shape or self.scores.ndim != 1:
            raise ValueError("scores and labels must be 1-D and equally long")
        if not np.isin(self.labels, (0, 1)).all():
            raise ValueError("labels must be binary")

    def check_both_classes(self):
        n_pos = int(self.labels.sum())
        if n_pos == 0 or n_pos == self.labels.size:
            raise ValueError("ROC metrics need at least one positive and one negative")


def accuracy(predicted, true) -> float:
    predicted, true = np.asarray(predicted), np.asarray(true)
    if predicted.shape != true.shape or predicted.size < 1:
        raise ValueError("need equally long, nonempty class sequences")
    return float(np.mean(predicted == true))


def roc_curve(sp: ScoredPredictions) -> tuple[np.ndarray, np.ndarray]:
    """Empirical ROC operating points, from (0, 0) to (1, 1).

    Tied scores enter as a single step, so the curve has one point per
    distinct threshold.
    """
    sp.check_both_classes()
    order = np.argsort(-sp.scores, kind="mergesort")
    s = sp.scores[order]
    y = sp.labels[order]
    # last index of each run of equal scores
    ends = np.r_[np.flatnonzero(np.diff(s) != 0), s.size - 1]
    tp = np.cumsum(y)[ends]
    fp = (ends + 1) - tp
    fpr = np.r_[0.0, fp / (y.size - y.sum())]
    tpr = np.r_[0.0, tp / y.sum()]
    return fpr, tpr


def auc(sp: ScoredPredictions) -> float:
    """Probability that a random positive outscores a random negative, ties ½.

    Computed from mid-ranks (Mann-Whitney U).
    """
    sp.check_both_classes()
    ranks = stats.rankdata(sp.scores)
    n_pos = int(sp.labels.sum())
    n_neg = sp.labels.size - n_pos
    u = ranks[sp.labels == 1].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def auc_trapezoid(sp: ScoredPredictions) -> float:
    fpr, tpr = roc_curve(sp)
    return float(np.sum(np.diff(fpr) * (tpr[1:] + tpr[:-1]) / 2.0))


def recall_at_fpr(sp: ScoredPredictions, fpr_target: float = 0.10) -> float:
    """True-positive rate where the ROC reaches ``fpr_target``, linear
    between adjacent operating points (upper end of a vertical segment)."""
    if not 0.0 < fpr_target < 1.0:
        raise ValueError("fpr_target must lie in (0, 1)")
    fpr, tpr = roc_curve(sp)
    hi = int(np.searchsorted(fpr, fpr_target, side="right"))
    lo = hi - 1
    if fpr[lo] == fpr_target or hi == fpr.size:
        return float(tpr[lo])
    frac = (fpr_target - fpr[lo]) / (fpr[hi] - fpr[lo])
    return float(tpr[lo] + frac * (tpr[hi] - tpr[lo]))


def paired_t_test(a, b) -> tuple[float, float]:
    """Paired t statistic of ``a - b`` with a two-sided p value (n-1 dof)."""
    d = np.asarray(a, dtype=float) - np.asarray(b, dtype=float)
    if d.ndim != 1 or d.size < 2:
        raise ValueError("need at least two paired items")
    sd = d.std(ddof=1)
    if sd == 0.0:
        raise ValueError("paired differences have zero variance")
    t = d.mean() / (sd / np.sqrt(d.size))
    p = 2.0 * stats.t.sf(abs(t), d.size - 1)
    return float(t), float(p)


def two_proportion_z(acc1: float, acc2: float, n1: int, n2: int) -> tuple[float, float]:
    """Pooled two-proportion z statistic and two-sided normal p value."""
    if not (0.0 <= acc1 <= 1.0 and 0.0 <= acc2 <= 1.0) or n1 < 1 or n2 < 1:
        raise ValueError("accuracies must lie in [0, 1] and sample sizes be >= 1")
    pooled = (acc1 * n1 + acc2 * n2) / (n1 + n2)
    if pooled <= 0.0 or pooled >= 1.0:
        raise ValueError("pooled proportion is 0 or 1; z is undefined")
    se = np.sqrt(pooled * (1.0 - pooled) * (1.0 / n1 + 1.0 / n2))
    z = (acc1 - acc2) / se
    return float(z), float(2.0 * stats.norm.sf(abs(z)))
