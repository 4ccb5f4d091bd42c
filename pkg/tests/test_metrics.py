"""AUC / NDCG / Kendall correlation against brute-force evaluators."""

import numpy as np
import pytest

from hypermine.metrics import ScoredSample, auc, concordance_counts, kendall_tau, ndcg


def brute_force_auc(samples):
    pos = [s.score for s in samples if s.positive]
    neg = [s.score for s in samples if not s.positive]
    n1 = sum(1 for p in pos for q in neg if p > q)
    n2 = sum(1 for p in pos for q in neg if p == q)
    return (n1 + 0.5 * n2) / (len(pos) * len(neg))


def brute_force_ndcg(samples):
    scores = np.asarray([s.score for s in samples])
    labels = np.asarray([s.positive for s in samples])
    n = len(scores)
    # descending average ranks by direct pair counting
    ranks = np.empty(n)
    for i in range(n):
        higher = np.sum(scores > scores[i])
        equal = np.sum(scores == scores[i])
        ranks[i] = higher + (equal + 1) / 2.0
    dcg = np.sum(1.0 / np.log2(1.0 + ranks[labels]))
    ideal = np.sum(1.0 / np.log2(1.0 + np.arange(1, labels.sum() + 1)))
    return dcg / ideal


def brute_force_concordance(x, y):
    n_plus = n_minus = 0
    for i in range(len(x)):
        for j in range(i + 1, len(x)):
            if x[i] == x[j] or y[i] == y[j]:
                continue
            if (x[i] - x[j]) * (y[i] - y[j]) > 0:
                n_plus += 1
            else:
                n_minus += 1
    return n_plus, n_minus


def make_samples(pos_scores, neg_scores):
    return [ScoredSample(s, True) for s in pos_scores] + [
        ScoredSample(s, False) for s in neg_scores
    ]


class TestAuc:
    def test_perfect(self):
        assert auc(make_samples([2, 3], [0, 1])) == 1.0

    def test_all_ties(self):
        assert auc(make_samples([1, 1], [1, 1, 1])) == 0.5

    def test_enumerated(self):
        assert auc(make_samples([3, 1], [2, 0])) == 0.75

    def test_requires_both_classes(self):
        with pytest.raises(ValueError):
            auc(make_samples([1], []))

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(0)
        for _ in range(20):
            pos = rng.random(8)
            neg = rng.random(9)
            base = auc(make_samples(pos, neg))
            warped = auc(make_samples(np.exp(3 * pos), np.exp(3 * neg)))
            assert base == pytest.approx(warped, abs=1e-12)

    def test_matches_brute_force_with_ties(self):
        rng = np.random.default_rng(1)
        for _ in range(30):
            pos = rng.integers(0, 5, size=7).astype(float)
            neg = rng.integers(0, 5, size=6).astype(float)
            samples = make_samples(pos, neg)
            assert auc(samples) == pytest.approx(brute_force_auc(samples), abs=1e-12)


class TestNdcg:
    def test_all_positives_first(self):
        assert ndcg(make_samples([5, 4], [1, 0])) == pytest.approx(1.0)

    def test_single_positive_third(self):
        assert ndcg(make_samples([0.0], [2.0, 1.0])) == pytest.approx(0.5)

    def test_matches_brute_force(self):
        rng = np.random.default_rng(2)
        for _ in range(50):
            pos = rng.integers(0, 6, size=rng.integers(1, 8)).astype(float)
            neg = rng.integers(0, 6, size=rng.integers(1, 8)).astype(float)
            samples = make_samples(pos, neg)
            assert ndcg(samples) == pytest.approx(
                brute_force_ndcg(samples), abs=1e-12
            )

    def test_bounds(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            samples = make_samples(rng.random(10), rng.random(10))
            assert 0.0 < ndcg(samples) <= 1.0


class TestKendall:
    def test_identity(self):
        x = np.array([3.0, 1.0, 2.0, 5.0])
        assert kendall_tau(x, x) == 1.0

    def test_reversal(self):
        x = np.array([3.0, 1.0, 2.0, 5.0])
        assert kendall_tau(x, -x) == -1.0

    def test_enumerated_with_tie(self):
        assert kendall_tau([1, 2, 3], [1, 1, 2]) == pytest.approx(2 / 3)

    def test_symmetry(self):
        rng = np.random.default_rng(4)
        x, y = rng.integers(0, 10, 50).astype(float), rng.integers(0, 10, 50).astype(float)
        assert kendall_tau(x, y) == kendall_tau(y, x)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            kendall_tau([1, 2], [1, 2, 3])

    def test_matches_brute_force_exact_counts(self):
        rng = np.random.default_rng(5)
        for _ in range(200):
            n = int(rng.integers(2, 40))
            # integer-valued vectors force plenty of ties
            x = rng.integers(0, 6, n).astype(float)
            y = rng.integers(0, 6, n).astype(float)
            assert concordance_counts(x, y) == brute_force_concordance(x, y)

    def test_null_distribution_centered(self):
        rng = np.random.default_rng(6)
        taus = []
        for _ in range(300):
            x, y = rng.random(60), rng.random(60)
            taus.append(kendall_tau(x, y))
        assert abs(np.mean(taus)) < 0.02
