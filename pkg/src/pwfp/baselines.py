"""Fisher score and Laplacian score, the classic filter baselines.

Both operate on the same ``(d, n)`` layout as :mod:`pwfp.core` and return a
:class:`~pwfp.core.FeatureRanking`, so callers can swap selectors freely.
Degenerate features get explicit best/worst placements instead of NaN
leaking into comparisons.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import pdist, squareform

from .core import FeatureRanking
from .errors import ValidationError

DEFAULT_KNN = 5
ZERO_TOL = 1e-12


@dataclass(frozen=True)
class ClassStatistics:
    classes: np.ndarray
    sizes: np.ndarray
    means: np.ndarray  # (c, d)
    variances: np.ndarray  # (c, d), population convention
    global_mean: np.ndarray  # (d,)


def class_statistics(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValidationError("Fisher score needs at least 2 classes")
    sizes = np.array([(y == k).sum() for k in classes])
    means = np.stack([X[:, y == k].mean(axis=1) for k in classes])
    variances = np.stack([X[:, y == k].var(axis=1) for k in classes])
    return ClassStatistics(classes, sizes, means, variances, X.mean(axis=1))


def fisher_score(X, y):
    """Between-class over within-class scatter per feature (higher is better).

    Features with zero within-class scatter score ``+inf`` when they separate
    the classes at all and NaN (ranked last) when they are constant.
    """
    st = class_statistics(X, y)
    w = st.sizes[:, None]
    between = (w * (st.means - st.global_mean) ** 2).sum(axis=0)
    within = (w * st.variances).sum(axis=0)
    scores = np.empty_like(between)
    ok = within > ZERO_TOL
    scores[ok] = between[ok] / within[ok]
    flat = ~ok
    scores[flat] = np.where(between[flat] > ZERO_TOL, np.inf, np.nan)
    return FeatureRanking.from_scores(scores, method="fisher", ascending=False)


def euclidean_distance_matrix(X):
    """``(n, n)`` Euclidean distances between the sample columns of ``X``."""
    X = np.asarray(X, dtype=np.float64)
    if X.shape[1] < 2:
        return np.zeros((X.shape[1], X.shape[1]))
    return squareform(pdist(X.T, metric="euclidean"))


@dataclass(frozen=True)
class SimilarityGraph:
    weights: np.ndarray
    k_nn: int
    bandwidth: float

    @property
    def laplacian(self):
        return np.diag(self.weights.sum(axis=1)) - self.weights


def build_similarity_graph(X, k_nn=DEFAULT_KNN, bandwidth="auto"):
    """Heat-kernel weights on the OR-symmetrized k-nearest-neighbour graph.

    ``bandwidth="auto"`` uses the mean squared distance over distinct pairs
    (1.0 if every sample coincides). Neighbour ties go to the lower index.
    """
    dist = euclidean_distance_matrix(X)
    n = dist.shape[0]
    if not 1 <= k_nn < n:
        raise ValueError(f"k_nn must lie in [1, {n - 1}], got {k_nn}")
    sq = dist**2
    if bandwidth is None or bandwidth == "auto":
        iu = np.triu_indices(n, k=1)
        bandwidth = float(sq[iu].mean())
        if bandwidth <= 0:
            bandwidth = 1.0
    bandwidth = float(bandwidth)
    if not bandwidth > 0:
        raise ValueError(f"bandwidth must be positive, got {bandwidth}")

    # self gets +inf so it never counts as its own neighbour
    ranked = np.argsort(np.where(np.eye(n, dtype=bool), np.inf, dist), axis=1, kind="stable")
    adj = np.zeros((n, n), dtype=bool)
    rows = np.repeat(np.arange(n), k_nn)
    adj[rows, ranked[:, :k_nn].ravel()] = True
    adj |= adj.T
    W = np.where(adj, np.exp(-sq / bandwidth), 0.0)
    np.fill_diagonal(W, 0.0)
    return SimilarityGraph(W, int(k_nn), bandwidth)


def laplacian_score(X, graph):
    """Graph smoothness over variance per feature (lower is better).

    Numerator is the full double sum ``sum_jk (f_j - f_k)^2 S_jk``. Constant
    features score NaN and rank last.
    """
    X = np.asarray(X, dtype=np.float64)
    W = graph.weights if isinstance(graph, SimilarityGraph) else np.asarray(graph, dtype=np.float64)
    if W.shape != (X.shape[1], X.shape[1]):
        raise ValueError(f"graph is {W.shape[0]}x{W.shape[1]} but data has {X.shape[1]} samples")
    L = np.diag(W.sum(axis=1)) - W
    smooth = 2.0 * ((X @ L) * X).sum(axis=1)
    var = X.var(axis=1)
    scores = np.full(X.shape[0], np.nan)
    ok = var > ZERO_TOL
    # clamp the quadratic form's round-off below zero
    scores[ok] = np.maximum(smooth[ok], 0.0) / var[ok]
    return FeatureRanking.from_scores(scores, method="laplacian", ascending=True)


def laplacian_select(X, m, k_nn=DEFAULT_KNN, bandwidth="auto"):
    ranking = laplacian_score(X, build_similarity_graph(X, k_nn, bandwidth))
    return ranking.order[:m].copy(), ranking


def fisher_select(X, y, m):
    ranking = fisher_score(X, y)
    return ranking.order[:m].copy(), ranking
