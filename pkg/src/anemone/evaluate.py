"""Ranking evaluation: AUC-ROC, ROC curves, and few-shot label splits.

AUC is computed by the midrank (Mann-Whitney) formulation, which handles
tied scores exactly and runs in O(N log N); :func:`roc_points` produces
the matching curve, whose trapezoidal area equals the midrank AUC up to
float rounding.
"""

import numpy as np

from . import rng
from .errors import CapacityError, ShapeError, UndefinedMetricError


def _validate_pairs(scores, labels):
    scores = np.asarray(scores, dtype=np.float64).reshape(-1)
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if scores.shape != labels.shape:
        raise ShapeError("scores and labels must have equal length")
    if scores.size == 0:
        raise ShapeError("scores must not be empty")
    if not np.isfinite(scores).all():
        raise ShapeError("scores must be finite")
    if labels.size and not np.isin(labels, (0, 1)).all():
        raise ShapeError("labels must be binary (0 or 1)")
    return scores, labels


def auc_roc(scores, labels):
    """Area under the ROC curve via midranks.

    Equals the probability that a uniformly drawn anomaly outranks a
    uniformly drawn normal node, counting ties as half. Raises
    UndefinedMetricError unless both classes are present.
    """
    scores, labels = _validate_pairs(scores, labels)
    n = scores.size
    n_pos = int(labels.sum())
    n_neg = n - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(
            "AUC needs at least one positive and one negative label"
        )
    order = np.argsort(scores, kind="stable")
    s = scores[order]
    new_group = np.r_[True, s[1:] != s[:-1]]
    group = np.cumsum(new_group) - 1
    counts = np.bincount(group)
    ends = np.cumsum(counts)  # 1-based rank of each group's last member
    begins = ends - counts + 1
    midranks = (begins + ends) / 2.0
    ranks = np.empty(n, dtype=np.float64)
    ranks[order] = midranks[group]
    rank_sum = ranks[labels == 1].sum()
    return float((rank_sum - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def roc_points(scores, labels):
    """ROC curve points (fpr, tpr), one per distinct threshold.

    Starts at (0, 0) and ends at (1, 1); tied scores collapse into a
    single point, so the trapezoidal area under the returned polyline
    equals :func:`auc_roc` exactly (up to float rounding).
    """
    scores, labels = _validate_pairs(scores, labels)
    n_pos = int(labels.sum())
    n_neg = scores.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError(
            "ROC needs at least one positive and one negative label"
        )
    order = np.argsort(-scores, kind="stable")
    s = scores[order]
    lab = labels[order]
    # Last index of each tie group marks one threshold.
    last = np.r_[s[1:] != s[:-1], True]
    tp = np.cumsum(lab)[last]
    fp = np.cumsum(1 - lab)[last]
    fpr = np.concatenate([[0.0], fp / n_neg])
    tpr = np.concatenate([[0.0], tp / n_pos])
    return fpr, tpr


def kshot_split(labels, k, seed):
    """Pick k anomalies to reveal to few-shot training.

    Returns (labeled_ids, eval_mask): labeled_ids are k anomaly ids drawn
    uniformly without replacement from the anomaly set (sorted), and
    eval_mask flags the nodes evaluation should keep, i.e. everything
    except the revealed anomalies. At least one anomaly must remain
    hidden, otherwise the evaluation set loses its positive class.
    """
    labels = np.asarray(labels, dtype=np.int64).reshape(-1)
    if labels.size and not np.isin(labels, (0, 1)).all():
        raise ShapeError("labels must be binary (0 or 1)")
    k = int(k)
    if k < 1:
        raise ValueError("k must be at least 1")
    anomalies = np.flatnonzero(labels == 1)
    if k >= anomalies.size:
        raise CapacityError(
            f"k={k} would reveal all {anomalies.size} anomalies, leaving "
            "none to evaluate on"
        )
    gen = rng.generator(rng.derive_seed(seed, rng.STREAM_KSHOT))
    labeled = np.sort(gen.choice(anomalies, size=k, replace=False))
    eval_mask = np.ones(labels.size, dtype=bool)
    eval_mask[labeled] = False
    return labeled.astype(np.int64), eval_mask
