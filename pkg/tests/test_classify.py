import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from pwfp.classify import (
    CentroidModel,
    LinearModel,
    accuracy,
    fit_linear_svm,
    fit_nearest_centroid,
    load_model,
    predict,
    save_model,
    svm_objective,
)
from pwfp.errors import ValidationError


def blobs(seed, n_per_class=10, shift=1.0, dim=2):
    rng = np.random.default_rng(seed)
    a = rng.normal(-shift, 1.0, size=(dim, n_per_class))
    b = rng.normal(shift, 1.0, size=(dim, n_per_class))
    return np.hstack([a, b]), np.repeat([1, 2], n_per_class)


def batch_subgradient(X, y, lam, iters):
    """Full-batch subgradient descent on the same one-vs-rest objective, averaged iterate."""
    classes = np.unique(y)
    Y = np.where(y[:, None] == classes[None, :], 1.0, -1.0)
    XA = np.hstack([X.T, np.ones((X.shape[1], 1))])
    W = np.zeros((classes.size, XA.shape[1]))
    avg = np.zeros_like(W)
    for t in range(1, iters + 1):
        viol = (Y * (XA @ W.T)) < 1
        grad = lam * W - ((viol * Y).T @ XA) / XA.shape[0]
        W = W - grad / (lam * t)
        avg += (W - avg) / t
    return LinearModel(classes, avg[:, :-1], avg[:, -1])


class TestLinearSvm:
    def test_separable_training_accuracy(self):
        rng = np.random.default_rng(0)
        left = np.vstack([rng.uniform(-2.5, -1.5, 8), rng.uniform(-1, 1, 8)])
        right = np.vstack([rng.uniform(1.5, 2.5, 8), rng.uniform(-1, 1, 8)])
        X, y = np.hstack([left, right]), np.repeat([1, 2], 8)
        model = fit_linear_svm(X, y)
        assert accuracy(predict(model, X), y) == 1.0

    def test_deterministic(self):
        X, y = blobs(1)
        a = fit_linear_svm(X, y, seed=7)
        b = fit_linear_svm(X, y, seed=7)
        assert np.array_equal(a.weights, b.weights) and np.array_equal(a.biases, b.biases)

    def test_close_to_converged_batch_solver(self):
        X, y = blobs(2, n_per_class=10)
        Xte, yte = blobs(102, n_per_class=50)
        sgd = fit_linear_svm(X, y, lam=0.01, epochs=100, seed=0)
        exact = batch_subgradient(X, y, lam=0.01, iters=100 * 100)
        gap = abs(accuracy(predict(sgd, Xte), yte) - accuracy(predict(exact, Xte), yte))
        assert gap <= 0.05

    def test_objective_non_increasing_on_epoch_averages(self):
        X, y = blobs(3)
        model = fit_linear_svm(X, y, lam=0.01, epochs=100, seed=0, track=True)
        h = np.array(model.history)
        assert np.all(np.diff(h, axis=0) <= 1e-12)

    def test_objective_helper(self):
        W = np.zeros((2, 3))
        XA = np.ones((4, 3))
        Y = np.ones((4, 2))
        assert svm_objective(W, XA, Y, 0.1).tolist() == [1.0, 1.0]

    def test_multiclass(self):
        rng = np.random.default_rng(4)
        centers = np.array([[0, 0], [6, 0], [0, 6]], dtype=float)
        X = np.hstack([c[:, None] + 0.5 * rng.normal(size=(2, 10)) for c in centers])
        y = np.repeat([1, 2, 3], 10)
        assert accuracy(predict(fit_linear_svm(X, y), X), y) == 1.0

    def test_single_class(self):
        with pytest.raises(ValidationError):
            fit_linear_svm(np.ones((2, 3)), [1, 1, 1])

    def test_duplicated_samples(self):
        X, y = blobs(5)
        base = fit_linear_svm(X, y, epochs=50, seed=1)
        dup = fit_linear_svm(np.hstack([X, X]), np.concatenate([y, y]), epochs=100, seed=1)
        Xd, yd = np.hstack([X, X]), np.concatenate([y, y])
        assert abs(accuracy(predict(base, X), y) - accuracy(predict(dup, Xd), yd)) <= 0.02

    def test_zero_input_picks_largest_bias(self):
        model = LinearModel(np.array([1, 2, 3]), np.ones((3, 2)), np.array([0.1, 0.7, -0.2]))
        assert predict(model, np.zeros((2, 1))).tolist() == [2]

    @settings(max_examples=50, deadline=None)
    @given(st.integers(0, 10_000), st.floats(0.01, 100))
    def test_scaling_keeps_predictions(self, seed, scale):
        rng = np.random.default_rng(seed)
        model = LinearModel(np.array([1, 2, 3]), rng.normal(size=(3, 4)), rng.normal(size=3))
        scaled = LinearModel(model.classes, model.weights * scale, model.biases * scale)
        X = rng.normal(size=(4, 15))
        assert np.array_equal(predict(model, X), predict(scaled, X))

    def test_dimension_mismatch(self):
        model = LinearModel(np.array([1, 2]), np.ones((2, 3)), np.zeros(2))
        with pytest.raises(ValueError):
            predict(model, np.ones((2, 4)))

    def test_model_file(self, tmp_path):
        X, y = blobs(6)
        model = fit_linear_svm(X, y, epochs=5)
        save_model(tmp_path / "model.csv", model)
        back = load_model(tmp_path / "model.csv")
        assert np.array_equal(back.weights, model.weights) and np.array_equal(back.biases, model.biases)
        assert np.array_equal(predict(back, X), predict(model, X))


class TestCentroid:
    def test_nearest(self):
        model = CentroidModel(np.array([1, 2]), np.array([[0.0, 0.0], [10.0, 10.0]]))
        assert predict(model, np.array([[1.0], [1.0]])).tolist() == [1]

    def test_tie_goes_to_lower_class(self):
        model = CentroidModel(np.array([1, 2]), np.array([[0.0, 0.0], [2.0, 0.0]]))
        assert predict(model, np.array([[1.0], [0.0]])).tolist() == [1]

    def test_fit(self):
        X, y = blobs(7, shift=4.0)
        model = fit_nearest_centroid(X, y)
        np.testing.assert_allclose(model.centroids[0], X[:, y == 1].mean(axis=1))
        assert accuracy(predict(model, X), y) == 1.0


class TestAccuracy:
    def test_values(self):
        assert accuracy([1, 2, 3], [1, 2, 3]) == 1.0
        assert accuracy([1, 1], [2, 2]) == 0.0
        assert accuracy([1, 2, 1, 2], [1, 2, 2, 2]) == 0.75

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            accuracy([1, 2], [1])

    @settings(max_examples=50, deadline=None)
    @given(st.lists(st.tuples(st.integers(1, 3), st.integers(1, 3)), min_size=1, max_size=30), st.randoms())
    def test_permutation_invariant(self, pairs, rnd):
        shuffled = pairs[:]
        rnd.shuffle(shuffled)
        a = accuracy([p for p, _ in pairs], [t for _, t in pairs])
        b = accuracy([p for p, _ in shuffled], [t for _, t in shuffled])
        assert a == b
