"""Synthetic HDLSS data with a known set of informative features."""

import numpy as np


def make_planted(d=1000, n=20, n_informative=10, gap=3.0, n_classes=2, seed=0):
    """Gaussian noise features plus ``n_informative`` class-shifted ones.

    Every entry is N(0, 1). On the informative rows, consecutive classes are
    ``gap`` standard deviations apart (class means centered on zero). Classes
    are balanced and the informative rows sit at random positions.

    Returns ``(X, y, informative)`` with ``X`` of shape ``(d, n)``, labels in
    ``1..n_classes`` and the sorted informative row indices.
    """
    if n_informative > d:
        raise ValueError("more informative features than features")
    rng = np.random.default_rng(seed)
    y = np.arange(n) % n_classes + 1
    X = rng.standard_normal((d, n))
    informative = np.sort(rng.choice(d, size=n_informative, replace=False))
    offsets = gap * (np.arange(n_classes) - (n_classes - 1) / 2.0)
    X[informative] += offsets[y - 1][None, :]
    return X, y, informative
