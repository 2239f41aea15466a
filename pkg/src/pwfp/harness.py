"""Repeated split / select / classify experiments.

Each trial draws a stratified split, fits the z-score normalization and every
selector on the training part only, then for each feature count ``m``
trains a classifier on the top ``m`` features and scores it on the test part.
Everything random is keyed by ``(seed, trial)``, so a trial can be rerun on
its own and results do not depend on thread scheduling.
"""

from __future__ import annotations

import csv
import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple

import numpy as np

from . import baselines, classify
from ._util import atomic_open, scaled_count
from .core import aggregate_histograms, default_threads, resolve_beta, score_features
from .dataset import SplitSpec, apply_zscore, load_dataset, stratified_split, trial_rng, zscore_normalize
from .errors import ConfigError, PwfpError

log = logging.getLogger(__name__)

SELECTORS = ("pwfp", "fisher", "laplacian", "random")
CLASSIFIERS = ("svm", "centroid")


class TrialError(PwfpError):
    def __init__(self, trial, cause):
        super().__init__(f"trial {trial}: {cause}")
        self.trial = trial
        self.cause = cause


@dataclass(frozen=True)
class ExperimentConfig:
    data: str | None = None
    format: str | None = None
    label_col: str = "last"
    header: bool = False
    split: str = "per-class"
    train: str = "10"
    trials: int | None = None
    seed: int = 0
    selectors: tuple = ("pwfp",)
    m_values: tuple = ("50%",)
    beta: str | None = None
    betas: tuple = ()
    classifier: str = "svm"
    svm_lambda: float = classify.DEFAULT_LAMBDA
    svm_epochs: int = classify.DEFAULT_EPOCHS
    knn: int = baselines.DEFAULT_KNN
    bandwidth: str = "auto"
    normalize: bool = True
    threads: int | None = None
    output: str | None = None

    def __post_init__(self):
        for s in self.selectors:
            if s not in SELECTORS:
                raise ConfigError("selectors", f"unknown selector {s!r} (known: {', '.join(SELECTORS)})")
        if not self.selectors:
            raise ConfigError("selectors", "no selector given")
        if self.classifier not in CLASSIFIERS:
            raise ConfigError("classifier", f"unknown classifier {self.classifier!r}")
        if self.split not in ("per-class", "fraction"):
            raise ConfigError("split", f"expected 'per-class' or 'fraction', got {self.split!r}")
        if not self.m_values:
            raise ConfigError("m", "no feature counts given")

    def split_spec(self):
        value = str(self.train).strip()
        try:
            if self.split == "fraction":
                amount = float(value[:-1]) / 100 if value.endswith("%") else float(value)
            else:
                amount = int(value)
            trials = self.trials if self.trials is not None else (10 if self.split == "per-class" else 5)
            return SplitSpec(self.split, amount, self.seed, trials)
        except ValueError as exc:
            raise ConfigError("train", str(exc)) from None

    def resolve_m(self, d):
        out = []
        for raw in self.m_values:
            text = str(raw).strip()
            try:
                m = scaled_count(float(text[:-1]) / 100, d) if text.endswith("%") else int(text)
            except ValueError:
                raise ConfigError("m", f"bad feature count {raw!r}") from None
            if not 1 <= m <= d:
                raise ConfigError("m", f"feature count {m} outside [1, {d}]")
            out.append(m)
        return sorted(set(out))

    def resolve_betas(self, d):
        raw = self.betas or (self.beta,)
        try:
            return [resolve_beta(b, d) for b in raw]
        except ValueError as exc:
            raise ConfigError("betas" if self.betas else "beta", str(exc)) from None


_LIST_KEYS = {"selectors", "m_values", "betas"}
_ALIASES = {"m": "m_values", "label_column": "label_col", "lambda": "svm_lambda", "epochs": "svm_epochs"}


def _coerce(key, text):
    ftype = ExperimentConfig.__dataclass_fields__[key].type
    if key in _LIST_KEYS:
        return tuple(t.strip() for t in text.split(",") if t.strip())
    if ftype.startswith("bool"):
        low = text.lower()
        if low not in ("1", "0", "true", "false", "yes", "no"):
            raise ConfigError(key, f"expected a boolean, got {text!r}")
        return low in ("1", "true", "yes")
    try:
        if ftype.startswith("int"):
            return int(text)
        if ftype.startswith("float"):
            return float(text)
    except ValueError:
        raise ConfigError(key, f"expected a number, got {text!r}") from None
    return text


def parse_config(text, base_dir=None, **overrides):
    """Parse flat ``key = value`` lines (``#`` starts a comment)."""
    values = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}", f"expected 'key = value', got {line!r}")
        key, val = (s.strip() for s in line.split("=", 1))
        key = _ALIASES.get(key, key)
        if key not in ExperimentConfig.__dataclass_fields__:
            raise ConfigError(key, "unknown key")
        values[key] = _coerce(key, val)
    if base_dir and values.get("data") and not os.path.isabs(values["data"]):
        values["data"] = os.path.join(base_dir, values["data"])
    values.update({k: v for k, v in overrides.items() if v is not None})
    return ExperimentConfig(**values)


def load_config(path, **overrides):
    with open(path) as fh:
        return parse_config(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)), **overrides)


class Row(NamedTuple):
    selector: str
    m: int
    beta: int | None
    trial: int
    accuracy: float


@dataclass
class ResultTable:
    rows: list
    d: int
    selectors: tuple
    # (selector, beta, trial) -> full best-first feature order on that trial's training set
    selections: dict = field(default_factory=dict, repr=False)

    def sorted_rows(self):
        rank = {s: i for i, s in enumerate(self.selectors)}
        return sorted(self.rows, key=lambda r: (rank[r.selector], r.beta or 0, r.m, r.trial))

    def to_csv(self, path):
        with atomic_open(path) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["selector", "m", "beta", "trial", "accuracy"])
            for r in self.sorted_rows():
                w.writerow([r.selector, r.m, "" if r.beta is None else r.beta, r.trial, repr(r.accuracy)])


def _rank_features(selector, Xtr, ytr, beta, config, seed, trial):
    d = Xtr.shape[0]
    if selector == "pwfp":
        P, Q = aggregate_histograms(Xtr, ytr, beta, threads=1)
        return score_features(P, Q).order
    if selector == "fisher":
        return baselines.fisher_score(Xtr, ytr).order
    if selector == "laplacian":
        k = min(config.knn, Xtr.shape[1] - 1)
        bw = config.bandwidth if config.bandwidth == "auto" else float(config.bandwidth)
        graph = baselines.build_similarity_graph(Xtr, k, bw)
        return baselines.laplacian_score(Xtr, graph).order
    return trial_rng(seed, trial, 2).permutation(d)


def _classifier_seed(seed, trial, m):
    return int(np.random.SeedSequence([int(seed), int(trial), 1, int(m)]).generate_state(1)[0])


def _fit_score(config, Xtr, ytr, Xte, yte, seed):
    if config.classifier == "centroid":
        model = classify.fit_nearest_centroid(Xtr, ytr)
    else:
        model = classify.fit_linear_svm(Xtr, ytr, config.svm_lambda, config.svm_epochs, seed)
    return classify.accuracy(classify.predict(model, Xte), yte)


def run_trial(config, X, y, trial, m_values, betas):
    """Rows and selections for one trial; see :func:`run_experiment`."""
    spec = config.split_spec()
    train, test = stratified_split(y, spec, trial)
    Xtr, Xte = X[:, train], X[:, test]
    ytr, yte = y[train], y[test]
    if config.normalize:
        Xtr, mean, std = zscore_normalize(Xtr)
        Xte = apply_zscore(Xte, mean, std)

    rows, selections = [], {}
    for selector in config.selectors:
        for beta in betas if selector == "pwfp" else [None]:
            order = _rank_features(selector, Xtr, ytr, beta, config, spec.seed, trial)
            selections[(selector, beta, trial)] = order
            for m in m_values:
                feats = order[:m]
                acc = _fit_score(config, Xtr[feats], ytr, Xte[feats], yte, _classifier_seed(spec.seed, trial, m))
                rows.append(Row(selector, m, beta, trial, acc))
    log.info("trial %d done (%d train, %d test)", trial, train.size, test.size)
    return rows, selections


def _load(config, data):
    if data is not None:
        X, y = data
        return np.asarray(X, dtype=np.float64), np.asarray(y)
    if not config.data:
        raise ConfigError("data", "no dataset path given")
    try:
        return load_dataset(config.data, config.format, config.label_col, config.header)
    except OSError as exc:
        raise ConfigError("data", f"cannot read {config.data}: {exc.strerror or exc}") from None


def run_experiment(config, data=None, trials=None):
    """Run every configured trial and collect a :class:`ResultTable`.

    ``data`` optionally supplies an in-memory ``(X, y)`` instead of
    ``config.data``; ``trials`` restricts the run to the given trial indices.
    """
    X, y = _load(config, data)
    d = X.shape[0]
    m_values = config.resolve_m(d)
    betas = config.resolve_betas(d) if "pwfp" in config.selectors else [None]
    spec = config.split_spec()
    trial_ids = list(range(spec.trials)) if trials is None else list(trials)
    threads = config.threads if config.threads is not None else default_threads()

    def one(t):
        try:
            return run_trial(config, X, y, t, m_values, betas)
        except (PwfpError, ValueError) as exc:
            raise TrialError(t, exc) from exc

    if threads > 1 and len(trial_ids) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(one, trial_ids))
    else:
        results = [one(t) for t in trial_ids]

    table = ResultTable([], d, tuple(config.selectors))
    for rows, sel in results:
        table.rows.extend(rows)
        table.selections.update(sel)
    table.rows = table.sorted_rows()
    return table


def beta_sweep(config, data=None, trials=None):
    """PWFP over every value in ``config.betas`` with shared splits."""
    if not config.betas:
        raise ConfigError("betas", "beta sweep needs at least one value")
    return run_experiment(replace(config, selectors=("pwfp",)), data=data, trials=trials)


@dataclass
class Summary:
    cells: list  # dicts: selector, beta, m, mean, std, trials

    def series(self, selector, beta=None):
        """``(m, mean, std)`` triples for one selector, ascending in ``m``."""
        pick = [c for c in self.cells if c["selector"] == selector and (beta is None or c["beta"] == beta)]
        return [(c["m"], c["mean"], c["std"]) for c in sorted(pick, key=lambda c: c["m"])]

    def to_csv(self, path):
        with atomic_open(path) as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["selector", "beta", "m", "mean", "std", "trials"])
            for c in self.cells:
                w.writerow([c["selector"], "" if c["beta"] is None else c["beta"], c["m"],
                            repr(c["mean"]), repr(c["std"]), c["trials"]])

    def to_json(self, path):
        with atomic_open(path) as fh:
            json.dump({"cells": self.cells}, fh, indent=2)
            fh.write("\n")

    def format_table(self):
        lines = [f"{'selector':<10} {'beta':>6} {'m':>6} {'mean':>8} {'std':>8} {'n':>4}"]
        for c in self.cells:
            beta = "-" if c["beta"] is None else str(c["beta"])
            lines.append(f"{c['selector']:<10} {beta:>6} {c['m']:>6} {c['mean']:>8.4f} {c['std']:>8.4f} {c['trials']:>4}")
        return "\n".join(lines)


def summarize(table):
    """Mean and population std of accuracy per ``(selector, beta, m)``."""
    if not table.rows:
        raise ValueError("empty result table")
    groups = {}
    for r in table.sorted_rows():
        groups.setdefault((r.selector, r.beta, r.m), []).append(r.accuracy)
    cells = []
    for (selector, beta, m), accs in groups.items():
        a = np.asarray(accs)
        cells.append({"selector": selector, "beta": beta, "m": m,
                      "mean": float(a.mean()), "std": float(a.std()), "trials": int(a.size)})
    return Summary(cells)


def write_series(path, series):
    with atomic_open(path) as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["m", "mean", "std"])
        for m, mean, std in series:
            w.writerow([m, repr(mean), repr(std)])


def write_results(table, outdir, prefix=""):
    """Write raw rows, the aggregate (CSV + JSON) and one series file per selector.

    Returns the summary and the list of paths written.
    """
    summary = summarize(table)
    paths = [os.path.join(outdir, f"{prefix}results.csv"),
             os.path.join(outdir, f"{prefix}summary.csv"),
             os.path.join(outdir, f"{prefix}summary.json")]
    table.to_csv(paths[0])
    summary.to_csv(paths[1])
    summary.to_json(paths[2])
    betas = sorted({c["beta"] for c in summary.cells if c["beta"] is not None})
    for selector in table.selectors:
        if selector == "pwfp" and len(betas) > 1:
            for b in betas:
                p = os.path.join(outdir, f"{prefix}series_pwfp_beta{b}.csv")
                write_series(p, summary.series("pwfp", b))
                paths.append(p)
        else:
            p = os.path.join(outdir, f"{prefix}series_{selector}.csv")
            write_series(p, summary.series(selector))
            paths.append(p)
    return summary, paths
