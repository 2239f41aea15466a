"""Loading, normalization and train/test splitting of labeled tabular data.

Matrices follow the feature-major layout used throughout the package: an
array of shape ``(d, n)`` with one row per feature and one column per sample.
Labels are integer arrays of length ``n`` holding canonical class ids
``1..c``.
"""

from __future__ import annotations

import csv
import os
from dataclasses import dataclass

import numpy as np

from ._util import atomic_open, format_float, scaled_count
from .errors import ParseError, ValidationError

CONSTANT_VAR_TOL = 1e-12


def canonicalize_labels(tokens):
    """Map raw class tokens to ids ``1..c``.

    Numeric tokens are ordered by value, anything else by first appearance.
    Returns ``(labels, classes)`` where ``classes[k - 1]`` is the raw token of
    class ``k``.
    """
    tokens = [str(t).strip() for t in tokens]
    try:
        numeric = {t: float(t) for t in tokens}
    except ValueError:
        numeric = None
    if numeric is not None:
        classes = sorted(set(tokens), key=lambda t: (numeric[t], t))
        # "1" and "1.0" denote the same class
        merged, ids = [], {}
        for t in classes:
            if merged and numeric[merged[-1]] == numeric[t]:
                ids[t] = ids[merged[-1]]
                continue
            merged.append(t)
            ids[t] = len(merged)
        classes = merged
    else:
        classes, ids = [], {}
        for t in tokens:
            if t not in ids:
                classes.append(t)
                ids[t] = len(classes)
    labels = np.array([ids[t] for t in tokens], dtype=np.int64)
    return labels, classes


def validate(X, y):
    X = np.asarray(X, dtype=np.float64)
    y = np.asarray(y)
    if X.ndim != 2:
        raise ValidationError(f"data matrix must be 2-D, got shape {X.shape}")
    d, n = X.shape
    if d < 1:
        raise ValidationError("data matrix has no features")
    if n < 2:
        raise ValidationError(f"need at least 2 samples, got n={n}")
    if y.shape != (n,):
        raise ValidationError(f"label vector has length {y.size}, expected {n}")
    if not np.all(np.isfinite(X)):
        raise ValidationError("data matrix contains NaN or Inf")
    if np.unique(y).size < 2:
        raise ValidationError("need at least 2 classes")
    return X, y


def _resolve_label_column(label_column, header, width, path):
    if isinstance(label_column, str):
        if label_column == "last":
            return width - 1
        if label_column.lstrip("-").isdigit():
            label_column = int(label_column)
        else:
            if header is None or label_column not in header:
                raise ParseError(f"{path}: no column named {label_column!r}")
            return header.index(label_column)
    idx = int(label_column)
    if idx < 0:
        idx += width
    if not 0 <= idx < width:
        raise ParseError(f"{path}: label column {label_column} out of range for {width} columns")
    return idx


def load_csv(path, label_column="last", has_header=False):
    """Read a comma-separated file with one sample per row.

    ``label_column`` is a 0-based index (negative counts from the end), a
    header name, or ``"last"``. Returns ``(X, y)`` with ``X`` of shape
    ``(d, n)``.
    """
    header = None
    rows = []
    width = None
    with open(path, newline="") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            fields = [f.strip() for f in line.split(",")]
            if has_header and header is None:
                header = fields
                width = len(fields)
                continue
            if width is None:
                width = len(fields)
            elif len(fields) != width:
                raise ParseError(
                    f"{path}: row {lineno} has {len(fields)} fields, expected {width}"
                )
            rows.append((lineno, fields))

    if not rows:
        raise ValidationError(f"{path}: no samples (n=0)")
    if width < 2:
        raise ParseError(f"{path}: need at least one feature column and a label column")
    li = _resolve_label_column(label_column, header, width, path)

    n, d = len(rows), width - 1
    XT = np.empty((n, d), dtype=np.float64)
    tokens = []
    for s, (lineno, fields) in enumerate(rows):
        tokens.append(fields[li])
        col = 0
        for c, field in enumerate(fields):
            if c == li:
                continue
            try:
                XT[s, col] = float(field)
            except ValueError:
                raise ParseError(
                    f"{path}: non-numeric value {field!r} at row {lineno}, column {c + 1}"
                ) from None
            col += 1
    y, _ = canonicalize_labels(tokens)
    return validate(XT.T.copy(), y)


def load_libsvm(path):
    """Read sparse ``label idx:val ...`` lines into a dense ``(d, n)`` matrix.

    Indices are 1-based and must be strictly ascending within a line; features
    never mentioned on a line are zero.
    """
    tokens, entries = [], []
    d = 0
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.split("#", 1)[0].strip()
            if not line:
                continue
            parts = line.split()
            tokens.append(parts[0])
            row, last = [], 0
            for item in parts[1:]:
                try:
                    idx, val = item.split(":", 1)
                    idx, val = int(idx), float(val)
                except ValueError:
                    raise ParseError(f"{path}: bad entry {item!r} on line {lineno}") from None
                if idx < 1:
                    raise ParseError(f"{path}: feature index {idx} on line {lineno} (indices are 1-based)")
                if idx <= last:
                    raise ParseError(
                        f"{path}: non-ascending feature index {idx} after {last} on line {lineno}"
                    )
                row.append((idx - 1, val))
                last = idx
            d = max(d, last)
            entries.append(row)

    if not entries:
        raise ValidationError(f"{path}: no samples (n=0)")
    X = np.zeros((max(d, 1), len(entries)), dtype=np.float64)
    for s, row in enumerate(entries):
        for i, v in row:
            X[i, s] = v
    y, _ = canonicalize_labels(tokens)
    return validate(X, y)


def load_dataset(path, fmt=None, label_column="last", has_header=False):
    """Dispatch on ``fmt`` (``"csv"`` or ``"libsvm"``), guessing from the suffix if unset."""
    if fmt is None:
        ext = os.path.splitext(os.fspath(path))[1].lower()
        fmt = "libsvm" if ext in (".libsvm", ".svm", ".svmlight") else "csv"
    if fmt == "csv":
        return load_csv(path, label_column=label_column, has_header=has_header)
    if fmt == "libsvm":
        return load_libsvm(path)
    raise ValueError(f"unknown dataset format {fmt!r}")


def write_csv(path, X, y):
    """Write ``(X, y)`` as headerless CSV, one sample per row, label last."""
    X = np.asarray(X, dtype=np.float64)
    with atomic_open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        for s in range(X.shape[1]):
            w.writerow([repr(float(v)) for v in X[:, s]] + [int(y[s])])


def zscore_normalize(X):
    """Center each feature and scale it to unit population variance.

    Returns ``(Z, mean, std)``. Constant features (variance at most 1e-12)
    become all-zero rows and are flagged by ``std == 0``.
    """
    X = np.asarray(X, dtype=np.float64)
    if X.ndim != 2 or X.shape[1] < 2:
        raise ValidationError("zscore_normalize needs a (d, n) matrix with n >= 2")
    mean = X.mean(axis=1)
    var = X.var(axis=1)
    std = np.where(var > CONSTANT_VAR_TOL, np.sqrt(var), 0.0)
    return apply_zscore(X, mean, std), mean, std


def apply_zscore(X, mean, std):
    """Apply a previously fitted normalization to new samples."""
    X = np.asarray(X, dtype=np.float64)
    mean = np.asarray(mean, dtype=np.float64)
    std = np.asarray(std, dtype=np.float64)
    if X.shape[0] != mean.shape[0]:
        raise ValueError(f"matrix has {X.shape[0]} features, normalization has {mean.shape[0]}")
    centered = X - mean[:, None]
    scale = np.where(std > 0, std, 1.0)
    return np.where(std[:, None] > 0, centered / scale[:, None], 0.0)


def save_normalization(path, mean, std):
    with atomic_open(path) as fh:
        fh.write(",".join(format_float(v) for v in mean) + "\n")
        fh.write(",".join(format_float(v) for v in std) + "\n")


def load_normalization(path):
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if len(lines) != 2:
        raise ParseError(f"{path}: expected 2 rows (means, stds), got {len(lines)}")
    mean, std = (np.array([float(v) for v in ln.split(",")]) for ln in lines)
    if mean.shape != std.shape:
        raise ParseError(f"{path}: mean and std rows differ in length")
    return mean, std


@dataclass(frozen=True)
class SplitSpec:
    """How training samples are drawn: ``count`` per class or a ``fraction`` of each class."""

    mode: str
    value: float
    seed: int = 0
    trials: int = 10

    def __post_init__(self):
        if self.mode not in ("per-class", "fraction"):
            raise ValueError(f"split mode must be 'per-class' or 'fraction', got {self.mode!r}")
        if self.mode == "per-class":
            if int(self.value) != self.value or self.value < 1:
                raise ValueError(f"per-class count must be a positive integer, got {self.value}")
        elif not 0 < self.value < 1:
            raise ValueError(f"split fraction must lie in (0, 1), got {self.value}")
        if not 0 <= int(self.seed) < 2**64:
            raise ValueError("seed must be an unsigned 64-bit integer")
        if self.trials < 1:
            raise ValueError("trials must be positive")

    def train_count(self, class_size):
        if self.mode == "per-class":
            return int(self.value)
        return max(1, scaled_count(self.value, class_size))


def trial_rng(seed, trial_index, *stream):
    """Generator keyed by ``(seed, trial_index, *stream)``, independent of other trials."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(trial_index), *stream])))


def stratified_split(y, spec, trial_index):
    """Draw training indices per class; the remainder is the test set.

    Both returned index arrays are 0-based and sorted. The split depends only
    on ``(spec.seed, trial_index)``.
    """
    y = np.asarray(y)
    rng = trial_rng(spec.seed, trial_index)
    train = []
    for k in np.unique(y):
        members = np.flatnonzero(y == k)
        count = spec.train_count(members.size)
        if count > members.size - 1:
            raise ValidationError(
                f"class {k} has {members.size} samples; cannot draw {count} for training "
                "and keep one for testing"
            )
        train.append(rng.permutation(members)[:count])
    train = np.sort(np.concatenate(train))
    test = np.setdiff1d(np.arange(y.size), train)
    return train, test
