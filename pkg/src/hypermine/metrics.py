"""Evaluation metrics: AUC, NDCG, and Kendall rank correlation.

AUC and NDCG operate on scored positive/negative samples; ranking ties are
resolved by average rank. Kendall's correlation uses the tau-a style
normalization 2(n+ - n-)/(N(N-1)) with tied pairs counting as neither
concordant nor discordant; the merge-count implementation returns exact
integer pair counts.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.stats import rankdata


@dataclass(frozen=True)
class ScoredSample:
    score: float
    positive: bool


def _scores_labels(samples):
    scores = np.asarray([s.score for s in samples], dtype=np.float64)
    labels = np.asarray([bool(s.positive) for s in samples])
    if not np.all(np.isfinite(scores)):
        raise ValueError("scores must be finite")
    return scores, labels


def auc(samples) -> float:
    """Probability a random positive outscores a random negative, ties 0.5.

    Computed exactly over all positive-negative pairs via the rank-sum
    identity, not by sampling.
    """
    scores, labels = _scores_labels(samples)
    n_pos = int(labels.sum())
    n_neg = int(len(labels) - n_pos)
    if n_pos == 0 or n_neg == 0:
        raise ValueError("auc needs at least one positive and one negative")
    ranks = rankdata(scores, method="average")
    u = ranks[labels].sum() - n_pos * (n_pos + 1) / 2.0
    return float(u / (n_pos * n_neg))


def ndcg(samples) -> float:
    """Discounted cumulative gain of the positives' ranks over the ideal.

    Samples are ranked descending by score with average-rank ties; each
    positive at rank r contributes 1/log2(1+r).
    """
    scores, labels = _scores_labels(samples)
    n_pos = int(labels.sum())
    if n_pos == 0:
        raise ValueError("ndcg needs at least one positive")
    n = len(scores)
    desc_ranks = n + 1 - rankdata(scores, method="average")
    gain = float(np.sum(1.0 / np.log2(1.0 + desc_ranks[labels])))
    ideal = float(np.sum(1.0 / np.log2(1.0 + np.arange(1, n_pos + 1))))
    return gain / ideal


def _merge_count_inversions(a: np.ndarray):
    """Sorted copy of ``a`` and the number of strict inversions."""
    n = len(a)
    if n <= 1:
        return a, 0
    mid = n // 2
    left, c_left = _merge_count_inversions(a[:mid])
    right, c_right = _merge_count_inversions(a[mid:])
    # pairs (l in left, r in right) with l > r
    below = np.searchsorted(left, right, side="right")
    cross = int(len(left)) * int(len(right)) - int(below.sum())
    merged = np.concatenate([left, right])
    merged.sort(kind="stable")
    return merged, c_left + c_right + cross


def _tie_pairs(values: np.ndarray) -> int:
    _, counts = np.unique(values, return_counts=True)
    return int((counts * (counts - 1) // 2).sum())


def concordance_counts(x, y) -> tuple[int, int]:
    """Exact (concordant, discordant) pair counts in O(N log^2 N)."""
    x = np.asarray(x, dtype=np.float64) + 0.0  # normalize -0.0
    y = np.asarray(y, dtype=np.float64) + 0.0
    if x.shape != y.shape or x.ndim != 1:
        raise ValueError("x and y must be equal-length vectors")
    n = len(x)
    if n < 2:
        raise ValueError("need at least two observations")
    order = np.lexsort((y, x))
    y_sorted = y[order]
    _, discordant = _merge_count_inversions(y_sorted)
    n0 = n * (n - 1) // 2
    ties_x = _tie_pairs(x)
    ties_y = _tie_pairs(y)
    ties_both = _tie_pairs(x + 1j * y)
    untied = n0 - ties_x - ties_y + ties_both
    concordant = untied - discordant
    return concordant, discordant


def kendall_tau(x, y) -> float:
    """Rank correlation 2(n+ - n-)/(N(N-1)); tied pairs count as neither."""
    n_plus, n_minus = concordance_counts(x, y)
    n = len(x)
    return 2.0 * (n_plus - n_minus) / (n * (n - 1))


def precision(pred, truth) -> float:
    """Pairwise clustering precision (defined with the partition methods)."""
    from .community import precision as _precision

    return _precision(pred, truth)
