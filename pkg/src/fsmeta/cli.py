"""Command-line interface.

Verbs: synth, rank, meta, evaluate, build-repo, train, recommend, report.
Exit codes: 0 success, 1 contract violation (bad data or arguments),
2 I/O failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from . import __version__
from .core_data import load_csv
from .evaluator import best_method
from .fs_rankers import FSMethod, method_from_name, rank
from .fuzzy_recommender import load_model, recommend, save_model, train_recommender
from .meta_features import META_FEATURE_NAMES, extract_meta
from .pipeline import (
    RunConfig,
    build_meta_dataset,
    evaluate_suite,
    load_meta_csv,
    report_curves,
    write_curves,
)
from .synthesizer import generate_repository

EXIT_OK = 0
EXIT_CONTRACT = 1
EXIT_IO = 2


def _label_column(raw: str) -> int | str:
    try:
        return int(raw)
    except ValueError:
        return raw


def _add_common(parser: argparse.ArgumentParser, *, folds=False, seed=False,
                jobs=False, out=False, label=False) -> None:
    if seed:
        parser.add_argument("--seed", type=int, default=1, help="master random seed")
    if folds:
        parser.add_argument("--folds", type=int, default=10,
                            help="cross-validation fold count")
    if jobs:
        parser.add_argument("--jobs", type=int, default=1,
                            help="parallel worker processes")
    if out:
        parser.add_argument("--out", required=True, help="output directory or file")
    if label:
        parser.add_argument("--label-column", type=_label_column, default=-1,
                            help="label column index or header name (default: last)")


def _add_ranker_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--k", type=int, default=10, help="ReliefF neighbour count")
    parser.add_argument("--beta", type=float, default=0.5, help="MIFS redundancy penalty")
    parser.add_argument("--bins", type=int, default=10, help="histogram bin count")
    parser.add_argument("--alpha", type=float, default=0.5, help="IFS spread/correlation mix")
    parser.add_argument("--r-factor", type=float, default=0.9,
                        help="IFS path decay as a fraction of the spectral radius")


def _ranker_params(args: argparse.Namespace) -> dict[FSMethod, dict]:
    return {
        FSMethod.RELIEFF: {"k_neighbors": args.k},
        FSMethod.MIFS: {"beta": args.beta, "bins": args.bins},
        FSMethod.IFS: {"alpha": args.alpha, "r_factor": args.r_factor},
    }


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fsmeta",
        description="Recommend a filter feature-selection method for binary tabular data",
    )
    parser.add_argument("--version", action="version", version=f"fsmeta {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("synth", help="generate a repository of synthetic datasets")
    p.add_argument("--count", type=int, default=1000, help="datasets to generate")
    p.add_argument("--p6-max", type=int, default=70,
                   help="cap on samples per cluster (speeds up desk-scale runs)")
    _add_common(p, seed=True, out=True)

    p = sub.add_parser("rank", help="rank features of one dataset with one method")
    p.add_argument("--method", required=True, help="gifs | relieff | mifs | ifs")
    p.add_argument("--in", dest="inputs", required=True, help="dataset CSV")
    _add_ranker_args(p)
    _add_common(p, label=True)

    p = sub.add_parser("meta", help="print the six meta features of a dataset")
    p.add_argument("--in", dest="inputs", required=True, help="dataset CSV")
    _add_common(p, label=True)

    p = sub.add_parser("evaluate", help="score all four methods on dataset(s)")
    p.add_argument("--in", dest="inputs", action="append", required=True,
                   help="dataset CSV (repeatable)")
    p.add_argument("--model", help="recommender model JSON; adds recommendations")
    p.add_argument("--out", help="directory for per-method curve CSVs (single dataset)")
    _add_ranker_args(p)
    _add_common(p, seed=True, folds=True, label=True)

    p = sub.add_parser("build-repo", help="synthesize, label and assemble the meta-dataset")
    p.add_argument("--count", type=int, default=1000, help="datasets to build")
    p.add_argument("--p6-max", type=int, default=70,
                   help="cap on samples per cluster (speeds up desk-scale runs)")
    _add_ranker_args(p)
    _add_common(p, seed=True, folds=True, jobs=True, out=True)

    p = sub.add_parser("train", help="train the recommender from a meta-dataset CSV")
    p.add_argument("--meta", required=True, help="meta.csv from build-repo")
    _add_common(p, out=True)

    p = sub.add_parser("recommend", help="recommend a method for one dataset")
    p.add_argument("--model", required=True, help="recommender model JSON")
    p.add_argument("--in", dest="inputs", required=True, help="dataset CSV")
    p.add_argument("--json", action="store_true", help="machine-readable output")
    _add_common(p, label=True)

    p = sub.add_parser("report", help="emit per-method elimination-curve CSVs")
    p.add_argument("--in", dest="inputs", required=True, help="dataset CSV")
    _add_ranker_args(p)
    _add_common(p, seed=True, folds=True, out=True, label=True)

    return parser


def _cmd_synth(args) -> int:
    pairs = generate_repository(args.count, args.seed, args.out, p6_max=args.p6_max)
    print(f"wrote {len(pairs)} dataset/manifest pairs to {args.out}")
    return EXIT_OK


def _cmd_rank(args) -> int:
    data = load_csv(args.inputs, label_column=args.label_column)
    method = method_from_name(args.method)
    params = _ranker_params(args).get(method, {})
    ranking = rank(data, method, **params)
    print(json.dumps(ranking.to_dict()))
    return EXIT_OK


def _cmd_meta(args) -> int:
    data = load_csv(args.inputs, label_column=args.label_column)
    meta = extract_meta(data)
    print(",".join(META_FEATURE_NAMES))
    print(",".join(repr(v) for v in [meta.ns, meta.nf, meta.aaf, meta.acf, meta.acvf, meta.aef]))
    return EXIT_OK


def _cmd_evaluate(args) -> int:
    ranker_params = _ranker_params(args)
    if args.model:
        model = load_model(args.model)
        config = RunConfig(
            count=1, master_seed=args.seed, folds=args.folds,
            ranker_params=ranker_params,
        )
        report = evaluate_suite(model, args.inputs, config,
                                label_column=args.label_column)
        print(json.dumps(report.to_dict(), indent=1))
        return EXIT_OK
    if len(args.inputs) != 1:
        raise ValueError("evaluate without --model takes exactly one --in dataset")
    data = load_csv(args.inputs[0], label_column=args.label_column)
    table = best_method(data, k_folds=args.folds, seed=args.seed,
                        ranker_params=ranker_params)
    if args.out:
        write_curves(table.curves, args.out)
    print(json.dumps(table.to_dict(), indent=1))
    return EXIT_OK


def _cmd_build_repo(args) -> int:
    config = RunConfig(
        count=args.count,
        master_seed=args.seed,
        folds=args.folds,
        jobs=args.jobs,
        out_dir=Path(args.out),
        p6_max=args.p6_max,
        ranker_params=_ranker_params(args),
    )
    meta = build_meta_dataset(config)
    labels = sorted({lbl.value for lbl in meta.labels})
    print(f"built {len(meta.rows)} meta rows in {args.out} (labels seen: {labels})")
    return EXIT_OK


def _cmd_train(args) -> int:
    meta = load_meta_csv(args.meta)
    model = train_recommender(meta)
    save_model(model, args.out)
    print(f"trained on {len(meta.rows)} rows, "
          f"classes {[m.value for m in model.class_order]}, saved to {args.out}")
    return EXIT_OK


def _cmd_recommend(args) -> int:
    model = load_model(args.model)
    data = load_csv(args.inputs, label_column=args.label_column)
    label, sims = recommend(model, extract_meta(data))
    if args.json:
        print(json.dumps({
            "recommended": label.value,
            "similarities": {m.value: sims[m] for m in model.class_order},
        }))
    else:
        print(label.value)
        for m in model.class_order:
            print(f"  {m.value}: {sims[m]:.6f}")
    return EXIT_OK


def _cmd_report(args) -> int:
    data = load_csv(args.inputs, label_column=args.label_column)
    table, _ = report_curves(
        data, args.out, k_folds=args.folds, seed=args.seed,
        ranker_params=_ranker_params(args),
    )
    print(json.dumps(table.to_dict(), indent=1))
    return EXIT_OK


_COMMANDS = {
    "synth": _cmd_synth,
    "rank": _cmd_rank,
    "meta": _cmd_meta,
    "evaluate": _cmd_evaluate,
    "build-repo": _cmd_build_repo,
    "train": _cmd_train,
    "recommend": _cmd_recommend,
    "report": _cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        return _COMMANDS[args.command](args)
    except OSError as exc:
        print(f"fsmeta: I/O error: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"fsmeta: {exc}", file=sys.stderr)
        return EXIT_CONTRACT


if __name__ == "__main__":
    sys.exit(main())
