import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from walk2vec import RandomForest, auc


def brute_force_auc(scores, labels):
    scores = np.asarray(scores, dtype=float)
    labels = np.asarray(labels)
    pos = scores[labels == 1]
    neg = scores[labels == 0]
    wins = sum((p > q) + 0.5 * (p == q) for p in pos for q in neg)
    return wins / (len(pos) * len(neg))


class TestAuc:
    def test_perfect_separation(self):
        assert auc([0.1, 0.2, 0.8, 0.9], [0, 0, 1, 1]) == 1.0

    def test_all_ties(self):
        assert auc([0.5, 0.5, 0.5, 0.5], [0, 1, 0, 1]) == 0.5

    def test_worked_example(self):
        # pairs: (0.35>0.1)=1, (0.35<0.4)=0, (0.8>0.1)=1, (0.8>0.4)=1 -> 3/4
        assert auc([0.1, 0.4, 0.35, 0.8], [0, 0, 1, 1]) == 0.75

    def test_matches_pair_counting(self, rng):
        for _ in range(100):
            n = int(rng.integers(4, 200))
            labels = rng.integers(0, 2, n)
            if labels.min() == labels.max():
                labels[0] = 1 - labels[0]
            # quantized scores force plenty of ties
            scores = np.round(rng.random(n), 2)
            assert auc(scores, labels) == pytest.approx(
                brute_force_auc(scores, labels), abs=1e-12
            )

    def test_flip_complement(self, rng):
        scores = rng.random(50)  # continuous, ties almost surely absent
        labels = rng.integers(0, 2, 50)
        labels[:2] = [0, 1]
        assert auc(scores, labels) + auc(scores, 1 - labels) == pytest.approx(1.0)

    @settings(max_examples=25, deadline=None)
    @given(seed=st.integers(0, 2**16))
    def test_invariant_under_monotone_transform(self, seed):
        r = np.random.default_rng(seed)
        scores = r.random(30)
        labels = r.integers(0, 2, 30)
        labels[:2] = [0, 1]
        assert auc(scores, labels) == pytest.approx(
            auc(np.exp(3 * scores) + 1, labels), abs=1e-12
        )

    def test_single_class_rejected(self):
        with pytest.raises(ValueError):
            auc([0.1, 0.2], [1, 1])


class TestRandomForest:
    def test_separable_data_perfect_training_accuracy(self, rng):
        x = rng.random((80, 1))
        y = (x[:, 0] > 0.5).astype(int)
        f = RandomForest(n_trees=100, random_state=0).fit(x, y)
        assert (f.predict(x) == y).all()
        assert auc(f.predict_score(x), y) == 1.0

    def test_null_labels_give_chance_auc(self, rng):
        # labels from a fair coin, independent of features
        x_train = rng.random((300, 5))
        y_train = rng.integers(0, 2, 300)
        x_test = rng.random((500, 5))
        y_test = rng.integers(0, 2, 500)
        f = RandomForest(n_trees=50, random_state=1).fit(x_train, y_train)
        a = auc(f.predict_score(x_test), y_test)
        assert 0.4 <= a <= 0.6

    def test_deterministic(self, rng):
        x = rng.random((60, 4))
        y = rng.integers(0, 2, 60)
        y[:2] = [0, 1]
        s1 = RandomForest(n_trees=20, random_state=9).fit(x, y).predict_score(x)
        s2 = RandomForest(n_trees=20, random_state=9).fit(x, y).predict_score(x)
        assert np.array_equal(s1, s2)

    def test_vote_fraction_arithmetic(self):
        f = RandomForest(n_trees=100, random_state=0)
        x = np.array([[0.0], [1.0]] * 30)
        y = np.array([0, 1] * 30)
        f.fit(x, y)
        scores = f.predict_score(np.array([[0.0], [1.0]]))
        # perfectly separable single feature: unanimous votes
        assert scores[0] == 0.0 and scores[1] == 1.0

    def test_score_invariant_to_tree_order(self, rng):
        x = rng.random((50, 3))
        y = rng.integers(0, 2, 50)
        y[:2] = [0, 1]
        f = RandomForest(n_trees=15, random_state=2).fit(x, y)
        before = f.predict_score(x)
        f.trees_ = list(reversed(f.trees_))
        assert np.allclose(f.predict_score(x), before, atol=1e-15)

    def test_single_class_rejected(self, rng):
        x = rng.random((10, 2))
        with pytest.raises(ValueError):
            RandomForest().fit(x, np.ones(10, dtype=int))

    def test_dimension_mismatch_rejected(self, rng):
        x = rng.random((20, 3))
        y = rng.integers(0, 2, 20)
        y[:2] = [0, 1]
        f = RandomForest(n_trees=5).fit(x, y)
        with pytest.raises(ValueError):
            f.predict_score(rng.random((4, 2)))

    def test_predict_proba_columns(self, rng):
        x = rng.random((30, 2))
        y = (x[:, 0] > 0.5).astype(int)
        f = RandomForest(n_trees=10).fit(x, y)
        proba = f.predict_proba(x)
        assert np.allclose(proba.sum(axis=1), 1.0)
        assert np.allclose(proba[:, 1], f.predict_score(x))


class TestSerialization:
    def test_json_round_trip(self, tmp_path, rng):
        x = rng.random((40, 6))
        y = rng.integers(0, 2, 40)
        y[:2] = [0, 1]
        f = RandomForest(n_trees=12, random_state=4).fit(x, y)
        path = tmp_path / "model.json"
        f.save(path)
        g = RandomForest.load(path)
        assert np.array_equal(f.predict_score(x), g.predict_score(x))
        assert g.n_trees == 12 and g.n_features_in_ == 6

    def test_format_tag_checked(self, tmp_path):
        with pytest.raises(ValueError, match="format"):
            RandomForest.from_json_dict({"format": "something-else"})

    def test_unfitted_save_rejected(self, tmp_path):
        from sklearn.exceptions import NotFittedError

        with pytest.raises(NotFittedError):
            RandomForest().save(tmp_path / "x.json")
