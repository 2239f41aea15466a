"""Small deterministic classifiers used by the experiment harness.

The linear SVM is one-vs-rest hinge loss with L2 regularization, trained by
stochastic subgradient steps of size ``1 / (lambda * t)`` and returning the
averaged iterate. A constant 1 is appended to every sample so the bias is
learned (and regularized) as an ordinary weight.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from ._util import atomic_open
from .errors import ValidationError

DEFAULT_LAMBDA = 0.01
DEFAULT_EPOCHS = 200


@dataclass(frozen=True)
class LinearModel:
    classes: np.ndarray
    weights: np.ndarray  # (c, m)
    biases: np.ndarray  # (c,)
    lam: float = DEFAULT_LAMBDA
    epochs: int = DEFAULT_EPOCHS
    seed: int = 0
    history: tuple = field(default=(), compare=False, repr=False)

    @property
    def n_features(self):
        return self.weights.shape[1]

    def decision_function(self, X):
        X = _check_features(X, self.n_features)
        return self.weights @ X + self.biases[:, None]


@dataclass(frozen=True)
class CentroidModel:
    classes: np.ndarray
    centroids: np.ndarray  # (c, m)

    @property
    def n_features(self):
        return self.centroids.shape[1]


def _check_features(X, m):
    X = np.asarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X[:, None]
    if X.shape[0] != m:
        raise ValueError(f"model expects {m} features, got {X.shape[0]}")
    return X


def _one_vs_rest_targets(y):
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValidationError("classifier needs at least 2 classes")
    return classes, np.where(y[:, None] == classes[None, :], 1.0, -1.0)


def svm_objective(W, XA, Y, lam):
    """Mean hinge loss plus ``lam / 2 * ||w||^2``, one value per class model."""
    margins = Y * (XA @ W.T)
    return np.maximum(0.0, 1.0 - margins).mean(axis=0) + 0.5 * lam * (W**2).sum(axis=1)


def fit_linear_svm(X, y, lam=DEFAULT_LAMBDA, epochs=DEFAULT_EPOCHS, seed=0, track=False):
    """Train one-vs-rest linear SVMs on the ``(m, n)`` matrix ``X``.

    All class models see the same sample order, drawn from a generator seeded
    with ``seed``. With ``track=True`` the per-class objective of the averaged
    iterate is recorded at the end of each epoch in ``model.history``.
    """
    X = np.asarray(X, dtype=np.float64)
    if lam <= 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if epochs < 1:
        raise ValueError(f"epochs must be positive, got {epochs}")
    classes, Y = _one_vs_rest_targets(y)
    m, n = X.shape
    if Y.shape[0] != n:
        raise ValueError(f"label vector has length {Y.shape[0]}, expected {n}")
    XA = np.hstack([X.T, np.ones((n, 1))])
    rng = np.random.default_rng(seed)

    W = np.zeros((classes.size, m + 1))
    avg = np.zeros_like(W)
    history = []
    t = 0
    for _ in range(epochs):
        for i in rng.permutation(n):
            t += 1
            eta = 1.0 / (lam * t)
            x, yi = XA[i], Y[i]
            violated = yi * (W @ x) < 1.0
            W *= 1.0 - eta * lam
            W[violated] += eta * yi[violated, None] * x
            avg += (W - avg) / t
        if track:
            history.append(svm_objective(avg, XA, Y, lam))
    return LinearModel(classes, avg[:, :m].copy(), avg[:, m].copy(), lam, epochs, seed, tuple(history))


def fit_nearest_centroid(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    classes = np.unique(y)
    if classes.size < 2:
        raise ValidationError("classifier needs at least 2 classes")
    return CentroidModel(classes, np.stack([X[:, y == k].mean(axis=1) for k in classes]))


def predict(model, X):
    """Predicted class ids for the columns of ``X``; ties go to the lower class id."""
    X = _check_features(X, model.n_features)
    if isinstance(model, LinearModel):
        scores = model.decision_function(X)
        return model.classes[np.argmax(scores, axis=0)]
    sq = ((X.T[:, None, :] - model.centroids[None, :, :]) ** 2).sum(axis=2)
    return model.classes[np.argmin(sq, axis=1)]


def accuracy(predicted, truth):
    predicted = np.asarray(predicted)
    truth = np.asarray(truth)
    if predicted.shape != truth.shape:
        raise ValueError(f"length mismatch: {predicted.size} predictions, {truth.size} labels")
    if predicted.size == 0:
        raise ValueError("cannot score an empty prediction")
    return float(np.mean(predicted == truth))


def save_model(path, model):
    """Rows of ``class,bias,w_1,...,w_m``."""
    with atomic_open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        for k, b, row in zip(model.classes, model.biases, model.weights):
            w.writerow([int(k), repr(float(b))] + [repr(float(v)) for v in row])


def load_model(path):
    with open(path, newline="") as fh:
        rows = [r for r in csv.reader(fh) if r]
    classes = np.array([int(r[0]) for r in rows])
    biases = np.array([float(r[1]) for r in rows])
    weights = np.array([[float(v) for v in r[2:]] for r in rows])
    return LinearModel(classes, weights, biases)
