"""Command-line entry point: ``pwfp select | eval | bench``."""

from __future__ import annotations

import argparse
import logging
import os
import sys
from dataclasses import replace

from . import baselines
from .core import pwfp_select, resolve_beta, write_ranking, write_selected
from .dataset import load_dataset, save_normalization, zscore_normalize
from .errors import ConfigError, PwfpError
from .harness import SELECTORS, ExperimentConfig, beta_sweep, load_config, run_experiment, write_results

PROG = "pwfp"
log = logging.getLogger(PROG)


def positive_int(text):
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {value}")
    return value


def beta_arg(text):
    """Syntactic check only; the value is resolved against ``d`` after loading."""
    text = text.strip()
    body = text[:-1] if text.endswith("%") else text
    try:
        value = float(body)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected an integer or percentage, got {text!r}") from None
    if value <= 0:
        raise argparse.ArgumentTypeError(f"beta must be positive, got {text!r}")
    return text


def csv_list(text):
    items = [t.strip() for t in text.split(",") if t.strip()]
    if not items:
        raise argparse.ArgumentTypeError("empty list")
    return items


def _data_flags(p, required):
    p.add_argument("--data", required=required, help="dataset file")
    p.add_argument("--format", choices=("csv", "libsvm"), help="dataset format (default: from suffix)")
    p.add_argument("--label-col", default=None, help="label column: index, header name or 'last'")
    p.add_argument("--header", action="store_true", default=None, help="CSV has a header row")


def _common_flags(p):
    p.add_argument("--seed", type=int, default=None, help="seed for every random choice")
    p.add_argument("--threads", type=positive_int, default=None,
                   help="worker threads (default: $PWFP_THREADS or 1)")
    p.add_argument("--out", default=None, help="output directory")
    p.add_argument("-v", "--verbose", action="count", default=0)


def _experiment_flags(p):
    p.add_argument("--config", help="experiment config file (key = value lines)")
    _data_flags(p, required=False)
    split = p.add_mutually_exclusive_group()
    split.add_argument("--per-class", type=positive_int, help="training samples per class")
    split.add_argument("--fraction", type=float, help="training fraction of each class")
    p.add_argument("--trials", type=positive_int)
    p.add_argument("--m", type=csv_list, help="feature counts, e.g. 10,20,50%%")
    p.add_argument("--beta", type=beta_arg, help="PWFP beta: count or percentage of d")
    p.add_argument("--classifier", choices=("svm", "centroid"))
    _common_flags(p)


def build_parser():
    parser = argparse.ArgumentParser(prog=PROG, description="Pair-wise feature proximity feature selection.")
    sub = parser.add_subparsers(dest="command", required=True, metavar="{select,eval,bench}")

    p = sub.add_parser("select", help="rank the features of a dataset")
    _data_flags(p, required=True)
    p.add_argument("--method", choices=("pwfp", "fisher", "laplacian"), default="pwfp")
    p.add_argument("--m", type=positive_int, required=True, help="number of features to select")
    p.add_argument("--beta", type=beta_arg, default=None, help="count or percentage of d (default 10%%)")
    p.add_argument("--knn", type=positive_int, default=baselines.DEFAULT_KNN)
    p.add_argument("--bandwidth", default="auto")
    p.add_argument("--no-normalize", dest="normalize", action="store_false",
                   help="skip z-score normalization before ranking")
    _common_flags(p)

    p = sub.add_parser("eval", help="run one experiment")
    _experiment_flags(p)

    p = sub.add_parser("bench", help="compare selectors and sweep beta over shared splits")
    _experiment_flags(p)
    p.add_argument("--selectors", type=csv_list, help=f"comma list from {','.join(SELECTORS)}")
    p.add_argument("--beta-sweep", type=csv_list, help="beta values, e.g. 0.01,0.05,0.1,0.2")
    return parser


def _config_from_args(args, **extra):
    overrides = {
        "data": args.data,
        "format": args.format,
        "label_col": args.label_col,
        "header": args.header,
        "trials": args.trials,
        "seed": args.seed,
        "m_values": tuple(args.m) if args.m else None,
        "beta": args.beta,
        "classifier": args.classifier,
        "threads": args.threads,
        "output": args.out,
    }
    if args.per_class is not None:
        overrides.update(split="per-class", train=str(args.per_class))
    if args.fraction is not None:
        overrides.update(split="fraction", train=str(args.fraction))
    overrides.update(extra)
    if args.config:
        try:
            return load_config(args.config, **overrides)
        except OSError as exc:
            raise ConfigError("config", f"cannot read {args.config}: {exc.strerror or exc}") from None
    return ExperimentConfig(**{k: v for k, v in overrides.items() if v is not None})


def cmd_select(args):
    X, y = load_dataset(args.data, args.format, args.label_col or "last", bool(args.header))
    d = X.shape[0]
    if args.m > d:
        raise ConfigError("m", f"{args.m} exceeds the feature count {d}")
    out = args.out or "."
    if args.normalize:
        X, mean, std = zscore_normalize(X)
        save_normalization(os.path.join(out, "normalization.csv"), mean, std)
    if args.method == "pwfp":
        try:
            beta = resolve_beta(args.beta, d)
        except ValueError as exc:
            raise ConfigError("beta", str(exc)) from None
        log.info("beta resolved to %d for d=%d", beta, d)
        selected, ranking = pwfp_select(X, y, args.m, beta, threads=args.threads)
    elif args.method == "fisher":
        selected, ranking = baselines.fisher_select(X, y, args.m)
    else:
        bw = args.bandwidth if args.bandwidth == "auto" else float(args.bandwidth)
        selected, ranking = baselines.laplacian_select(X, args.m, args.knn, bw)
    write_ranking(os.path.join(out, "ranking.csv"), ranking)
    write_selected(os.path.join(out, "selected.txt"), selected)
    print(" ".join(str(i + 1) for i in selected))
    return 0


def cmd_eval(args):
    config = _config_from_args(args)
    table = run_experiment(config)
    summary, paths = write_results(table, config.output or ".")
    print(summary.format_table())
    for p in paths:
        log.info("wrote %s", p)
    return 0


def cmd_bench(args):
    extra = {}
    if args.selectors:
        extra["selectors"] = tuple(args.selectors)
    if args.beta_sweep:
        extra["betas"] = tuple(args.beta_sweep)
    config = _config_from_args(args, **extra)
    out = config.output or "."
    # the comparison always uses the single beta; the sweep is its own run
    table = run_experiment(replace(config, betas=()))
    summary, paths = write_results(table, out)
    print(summary.format_table())
    if config.betas:
        sweep = beta_sweep(config)
        sweep_summary, more = write_results(sweep, out, prefix="sweep_")
        paths += more
        print()
        print(sweep_summary.format_table())
    for p in paths:
        log.info("wrote %s", p)
    return 0


COMMANDS = {"select": cmd_select, "eval": cmd_eval, "bench": cmd_bench}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    level = logging.DEBUG if args.verbose else logging.INFO
    logging.basicConfig(level=level, format=f"{PROG}: %(message)s", stream=sys.stderr, force=True)
    try:
        return COMMANDS[args.command](args)
    except (PwfpError, ValueError, OSError) as exc:
        message = " ".join(str(exc).split())
        print(f"{PROG}: error: {message}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
