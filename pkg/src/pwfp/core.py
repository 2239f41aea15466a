"""Pair-wise feature proximity (PWFP) feature selection.

For every pair of training samples the ``beta`` features along which the two
samples are closest (same class) or farthest apart (different classes) are
marked. The marks are counted over all pairs into two normalized histograms,
``P`` (within-class closeness) and ``Q`` (between-class separation), and each
feature is scored by ``|P - Q| / (P + Q)``. Lower scores are better.
"""

from __future__ import annotations

import csv
import os
from decimal import Decimal, InvalidOperation
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ._util import atomic_open, format_float, round_half_up
from .errors import ValidationError

DEFAULT_BETA_FRACTION = 0.10

# pairs per block; bounds the (block, d) scratch arrays
PAIR_BLOCK = 256


def default_threads():
    try:
        return max(1, int(os.environ.get("PWFP_THREADS", "1")))
    except ValueError:
        return 1


def resolve_beta(beta, d):
    """Turn ``beta`` into a feature count for dimension ``d``.

    ``None`` means 10% of ``d``. Ints (and digit-only strings) are absolute
    counts; floats and strings like ``"0.1"`` are fractions of ``d`` in (0, 1];
    strings like ``"10%"`` are percentages. Fractions round half up and are
    clamped to ``[1, d]``.
    """
    if beta is None:
        beta = DEFAULT_BETA_FRACTION
    if isinstance(beta, (bool, np.bool_)):
        raise ValueError(f"invalid beta {beta!r}")
    if isinstance(beta, str):
        text = beta.strip()
        try:
            if text.endswith("%"):
                fraction = Decimal(text[:-1]) / 100
            elif text.isdigit():
                fraction, beta = None, int(text)
            else:
                fraction = Decimal(text)
        except InvalidOperation:
            raise ValueError(f"invalid beta {beta!r}") from None
    elif isinstance(beta, (float, np.floating)):
        fraction = Decimal(str(float(beta)))
    else:
        fraction, beta = None, int(beta)

    if fraction is not None:
        if not 0 < fraction <= 1:
            raise ValueError(f"beta fraction must lie in (0, 1], got {fraction}")
        return min(max(round_half_up(fraction * d), 1), d)
    _check_beta(beta, d)
    return beta


def _check_beta(beta, d):
    if not 1 <= beta <= d:
        raise ValueError(f"beta must lie in [1, {d}], got {beta}")


def _smallest_mask(D, beta):
    """Row-wise mask of the ``beta`` smallest entries, ties to the lower column."""
    kth = np.partition(D, beta - 1, axis=1)[:, beta - 1 : beta]
    below = D < kth
    need = beta - below.sum(axis=1, keepdims=True)
    tied = D == kth
    return below | (tied & (np.cumsum(tied, axis=1) <= need))


def _largest_mask(D, beta):
    """Row-wise mask of the ``beta`` largest entries, ties to the lower column."""
    d = D.shape[1]
    kth = np.partition(D, d - beta, axis=1)[:, d - beta : d - beta + 1]
    above = D > kth
    need = beta - above.sum(axis=1, keepdims=True)
    tied = D == kth
    return above | (tied & (np.cumsum(tied, axis=1) <= need))


def _pair_diff(xj, xk, beta):
    xj = np.asarray(xj, dtype=np.float64).ravel()
    xk = np.asarray(xk, dtype=np.float64).ravel()
    if xj.shape != xk.shape:
        raise ValueError(f"sample columns differ in length: {xj.size} vs {xk.size}")
    _check_beta(beta, xj.size)
    return np.abs(xj - xk)[None, :]


def within_pair_mask(xj, xk, beta):
    """Boolean mask of the ``beta`` features where ``xj`` and ``xk`` are closest."""
    return _smallest_mask(_pair_diff(xj, xk, beta), beta)[0]


def between_pair_mask(xj, xk, beta):
    """Boolean mask of the ``beta`` features where ``xj`` and ``xk`` are farthest apart."""
    return _largest_mask(_pair_diff(xj, xk, beta), beta)[0]


@dataclass(frozen=True)
class FeatureHistogram:
    """Per-feature mask counts over ``pair_count`` pairs; ``weights`` is the normalized form."""

    counts: np.ndarray
    pair_count: int

    @property
    def weights(self):
        return self.counts / self.pair_count

    def __len__(self):
        return self.counts.size


def _count_masks(XT, first, second, beta, select, threads):
    """Sum the per-pair masks of ``select`` over the pairs ``(first[i], second[i])``."""
    d = XT.shape[1]
    blocks = [(s, min(s + PAIR_BLOCK, first.size)) for s in range(0, first.size, PAIR_BLOCK)]

    def work(chunk):
        acc = np.zeros(d, dtype=np.int64)
        for lo, hi in chunk:
            D = np.abs(XT[first[lo:hi]] - XT[second[lo:hi]])
            acc += select(D, beta).sum(axis=0)
        return acc

    if threads <= 1 or len(blocks) <= 1:
        return work(blocks)
    # contiguous slices per worker, merged in worker order
    workers = min(threads, len(blocks))
    bounds = np.linspace(0, len(blocks), workers + 1).astype(int)
    chunks = [blocks[bounds[w] : bounds[w + 1]] for w in range(workers)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        partials = list(pool.map(work, chunks))
    total = np.zeros(d, dtype=np.int64)
    for part in partials:
        total += part
    return total


def aggregate_histograms(X, y, beta, threads=None):
    """Build the within-class histogram ``P`` and between-class histogram ``Q``.

    Every unordered sample pair is visited once. Same-class pairs contribute
    their closest-``beta`` mask to ``P``, different-class pairs their
    farthest-``beta`` mask to ``Q``. Counts are integers, so the result does
    not depend on pair order or on ``threads``.
    """
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    d, n = X.shape
    if y.shape != (n,):
        raise ValueError(f"label vector has length {y.size}, expected {n}")
    if n < 2:
        raise ValidationError("need at least 2 samples")
    _check_beta(beta, d)
    threads = default_threads() if threads is None else max(1, int(threads))

    j, k = np.triu_indices(n, k=1)
    same = y[j] == y[k]
    if not same.any():
        raise ValidationError("no same-class pair: every class has a single sample")
    if same.all():
        raise ValidationError("no different-class pair: only one class present")

    XT = np.ascontiguousarray(X.T)
    p = _count_masks(XT, j[same], k[same], beta, _smallest_mask, threads)
    q = _count_masks(XT, j[~same], k[~same], beta, _largest_mask, threads)
    return FeatureHistogram(p, int(same.sum())), FeatureHistogram(q, int((~same).sum()))


@dataclass(frozen=True)
class FeatureRanking:
    """Per-feature scores with an ordering from best to worst.

    Undefined scores are NaN and always rank last. ``ascending`` records
    whether low scores are good (PWFP, Laplacian) or high scores are (Fisher).
    """

    scores: np.ndarray
    order: np.ndarray
    method: str = "pwfp"
    ascending: bool = True

    @classmethod
    def from_scores(cls, scores, method="pwfp", ascending=True):
        scores = np.asarray(scores, dtype=np.float64)
        key = scores if ascending else -scores
        # stable sort keeps lower indices first among ties; NaN sorts last
        order = np.argsort(key, kind="stable")
        return cls(scores, order, method, ascending)

    @property
    def ranks(self):
        """1-based rank of each feature."""
        r = np.empty_like(self.order)
        r[self.order] = np.arange(1, self.order.size + 1)
        return r

    def __len__(self):
        return self.scores.size


def score_features(P, Q):
    """Score each feature by ``|p - q| / (p + q)``; NaN where both are zero."""
    p = P.weights if isinstance(P, FeatureHistogram) else np.asarray(P, dtype=np.float64)
    q = Q.weights if isinstance(Q, FeatureHistogram) else np.asarray(Q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"histogram lengths differ: {p.size} vs {q.size}")
    total = p + q
    with np.errstate(invalid="ignore", divide="ignore"):
        scores = np.where(total > 0, np.abs(p - q) / total, np.nan)
    return FeatureRanking.from_scores(scores, method="pwfp", ascending=True)


def rank_and_select(ranking, m):
    """First ``m`` feature indices (0-based) of the ranking's best-first order."""
    d = len(ranking)
    if not 1 <= m <= d:
        raise ValueError(f"m must lie in [1, {d}], got {m}")
    return ranking.order[:m].copy()


def pwfp_select(X, y, m, beta=None, threads=None):
    """Run the full PWFP pipeline and return ``(selected, ranking)``.

    ``beta`` defaults to 10% of the feature count (see :func:`resolve_beta`).
    """
    X = np.asarray(X, dtype=np.float64)
    beta = resolve_beta(beta, X.shape[0])
    P, Q = aggregate_histograms(X, y, beta, threads=threads)
    ranking = score_features(P, Q)
    return rank_and_select(ranking, m), ranking


def write_ranking(path, ranking):
    """CSV ``feature_index,score,rank`` (1-based indices; empty score when undefined).

    Rankings from methods other than PWFP carry an extra ``method`` column.
    """
    ranks = ranking.ranks
    extra = ranking.method != "pwfp"
    with atomic_open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["feature_index", "score", "rank"] + (["method"] if extra else []))
        for i in range(len(ranking)):
            row = [i + 1, format_float(ranking.scores[i]), int(ranks[i])]
            w.writerow(row + ([ranking.method] if extra else []))


def read_ranking(path):
    with open(path, newline="") as fh:
        rows = list(csv.DictReader(fh))
    scores = np.array([float(r["score"]) if r["score"] else np.nan for r in rows])
    ranks = np.array([int(r["rank"]) for r in rows])
    order = np.empty(len(rows), dtype=np.int64)
    order[ranks - 1] = [int(r["feature_index"]) - 1 for r in rows]
    method = (rows[0].get("method") if rows else None) or "pwfp"
    return FeatureRanking(scores, order, method, method != "fisher")


def write_selected(path, selected):
    """One 1-based feature index per line."""
    with atomic_open(path) as fh:
        for i in selected:
            fh.write(f"{int(i) + 1}\n")


def read_selected(path):
    with open(path) as fh:
        return np.array([int(ln) - 1 for ln in fh if ln.strip()], dtype=np.int64)
