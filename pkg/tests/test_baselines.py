import numpy as np
import pytest

from oracles import euclid_naive, fisher_naive, knn_adjacency_naive, laplacian_naive
from pwfp.baselines import (
    build_similarity_graph,
    euclidean_distance_matrix,
    fisher_score,
    laplacian_score,
)
from pwfp.errors import ValidationError


class TestFisher:
    def test_perfect_separator_ranks_first(self):
        X = np.array([[0.3, 0.1, 0.9, 0.4], [0.0, 0.0, 1.0, 1.0]])
        r = fisher_score(X, [1, 1, 2, 2])
        assert np.isposinf(r.scores[1])
        assert r.order[0] == 1

    def test_numerator_of_perfect_separator(self):
        # n_k (mu_k - mu)^2 summed: 2 * 0.25 + 2 * 0.25 = 1.0 here, denominator 0
        num, den = fisher_naive([[0, 0, 1, 1]], [1, 1, 2, 2])[0]
        assert num == pytest.approx(1.0) and den == 0.0

    def test_constant_feature_ranks_last(self):
        X = np.array([[2.0, 2.0, 2.0, 2.0], [0.1, 0.5, 0.3, 0.9]])
        r = fisher_score(X, [1, 1, 2, 2])
        assert np.isnan(r.scores[0])
        assert r.order.tolist() == [1, 0]

    def test_matches_naive(self):
        rng = np.random.default_rng(0)
        X = rng.normal(size=(5, 6))
        y = [1, 1, 1, 2, 2, 2]
        expected = [num / den for num, den in fisher_naive(X.tolist(), y)]
        np.testing.assert_allclose(fisher_score(X, y).scores, expected, rtol=0, atol=1e-9)

    def test_affine_invariance(self):
        rng = np.random.default_rng(1)
        X = rng.normal(size=(8, 12))
        y = np.arange(12) % 3 + 1
        a = rng.uniform(0.5, 4.0, size=(8, 1)) * rng.choice([-1, 1], size=(8, 1))
        b = rng.normal(size=(8, 1)) * 20
        np.testing.assert_allclose(fisher_score(a * X + b, y).scores, fisher_score(X, y).scores, rtol=0, atol=1e-9)

    def test_one_class(self):
        with pytest.raises(ValidationError):
            fisher_score(np.ones((2, 3)), [1, 1, 1])


class TestDistances:
    def test_three_four_five(self):
        D = euclidean_distance_matrix(np.array([[0.0, 3.0], [0.0, 4.0]]))
        assert D[0, 1] == 5.0

    def test_identical_columns(self):
        D = euclidean_distance_matrix(np.array([[1.5, 1.5], [-2.0, -2.0]]))
        assert D[0, 1] == 0.0

    def test_matches_naive_and_symmetric(self):
        rng = np.random.default_rng(2)
        X = rng.normal(size=(4, 4))
        D = euclidean_distance_matrix(X)
        np.testing.assert_allclose(D, euclid_naive(X.tolist()), atol=1e-12)
        np.testing.assert_allclose(D, D.T, atol=1e-12)
        assert np.all(np.diag(D) == 0)

    def test_triangle_inequality(self):
        rng = np.random.default_rng(3)
        D = euclidean_distance_matrix(rng.normal(size=(10, 15)))
        assert np.all(D[:, :, None] <= D[:, None, :] + D.T[None, :, :] + 1e-9)


class TestGraph:
    def test_coincident_points(self):
        g = build_similarity_graph(np.array([[1.0, 1.0], [2.0, 2.0]]), k_nn=1)
        assert g.weights[0, 1] == 1.0 and g.weights[1, 0] == 1.0

    def test_symmetric_zero_diagonal(self):
        rng = np.random.default_rng(4)
        g = build_similarity_graph(rng.normal(size=(6, 9)), k_nn=3)
        assert np.array_equal(g.weights, g.weights.T)
        assert np.all(np.diag(g.weights) == 0)
        nz = g.weights[g.weights > 0]
        assert np.all((nz > 0) & (nz <= 1))

    def test_pattern_matches_naive_knn(self):
        rng = np.random.default_rng(5)
        X = rng.normal(size=(3, 5))
        g = build_similarity_graph(X, k_nn=2)
        assert ((g.weights > 0) == np.array(knn_adjacency_naive(X.tolist(), 2))).all()

    def test_auto_bandwidth(self):
        rng = np.random.default_rng(6)
        X = rng.normal(size=(3, 5))
        D = np.array(euclid_naive(X.tolist()))
        g = build_similarity_graph(X, k_nn=4)
        assert g.bandwidth == pytest.approx((D[np.triu_indices(5, 1)] ** 2).mean())
        np.testing.assert_allclose(g.weights, np.exp(-(D**2) / g.bandwidth) * (1 - np.eye(5)))

    def test_knn_too_large(self):
        with pytest.raises(ValueError):
            build_similarity_graph(np.ones((2, 3)), k_nn=3)


class TestLaplacian:
    def test_constant_feature_worst(self):
        rng = np.random.default_rng(7)
        X = np.vstack([np.full(6, 4.0), rng.normal(size=6)])
        r = laplacian_score(X, build_similarity_graph(X, k_nn=2))
        assert np.isnan(r.scores[0]) and r.order[-1] == 0

    def test_graph_consistent_feature_scores_zero(self):
        # two components {0,1,2} and {3,4,5}, feature constant within each
        W = np.zeros((6, 6))
        W[:3, :3] = 0.5
        W[3:, 3:] = 0.8
        np.fill_diagonal(W, 0.0)
        X = np.array([[1.0, 1.0, 1.0, 4.0, 4.0, 4.0], [0.0, 1.0, 2.0, 0.0, 1.0, 2.0]])
        r = laplacian_score(X, W)
        assert r.scores[0] <= 1e-12
        assert r.order[0] == 0

    def test_matches_double_loop(self):
        rng = np.random.default_rng(8)
        X = rng.normal(size=(6, 6))
        g = build_similarity_graph(X, k_nn=2)
        expected = [num / var for num, var in laplacian_naive(X.tolist(), g.weights.tolist())]
        np.testing.assert_allclose(laplacian_score(X, g).scores, expected, rtol=0, atol=1e-9)

    def test_numerator_is_quadratic_form(self):
        rng = np.random.default_rng(9)
        X = rng.normal(size=(4, 7))
        g = build_similarity_graph(X, k_nn=3)
        L = g.laplacian
        for i, (num, _) in enumerate(laplacian_naive(X.tolist(), g.weights.tolist())):
            assert abs(num - 2 * X[i] @ L @ X[i]) <= 1e-9

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            laplacian_score(np.ones((2, 4)), np.zeros((3, 3)))
