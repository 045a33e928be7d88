"""Command-line interface.

Exit codes: 0 success, 2 validation error, 3 numerical non-convergence
(results are still written), 4 I/O error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .errors import DriveStyleError
from .experiment import (
    ClassifierConfig,
    ExperimentConfig,
    SelectionConfig,
    comparison_table,
    row_label,
    format_table,
    labels_to_int,
    load_config,
    run_experiment,
    save_json,
)
from .features import FEATURE_NAMES, feature_matrix, read_feature_csv, write_feature_csv, write_feature_json
from .gaussfit import GAUSS_FEATURE_NAMES, fit_two_gaussians
from .learners.evaluate import TRAINERS, SplitPlan
from .rules import G0, DANGEROUS_G, VERY_SAFE_G, WINDOW_S, classify_braking
from .selection import LabeledDataset, load_weights, nca_fit, save_weights, select
from .sensor import Kind, load_segments, save_segments
from .synth import generate_corpus

log = logging.getLogger("drivestyle")

EXIT_OK, EXIT_VALIDATION, EXIT_NONCONVERGENCE, EXIT_IO = 0, 2, 3, 4


def _emit(doc, out: str | None) -> None:
    if out:
        save_json(out, doc)
    else:
        json.dump(doc, sys.stdout, indent=2, sort_keys=True)
        sys.stdout.write("\n")


def _model_params(args) -> dict:
    params = {}
    if args.algorithm == "mlp":
        for name in ("hidden", "epochs"):
            if getattr(args, name, None) is not None:
                params[name] = getattr(args, name)
        if args.learning_rate is not None:
            params["lr"] = args.learning_rate
    elif args.algorithm == "rbf":
        if args.k is not None:
            params["k"] = args.k
    elif args.algorithm == "svm":
        for name in ("kernel", "C", "gamma", "tol"):
            if getattr(args, name, None) is not None:
                params[name] = getattr(args, name)
    return params


def _add_model_flags(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("classifier")
    g.add_argument("--algorithm", choices=sorted(TRAINERS))
    g.add_argument("--hidden", type=int, help="MLP hidden units (2..6)")
    g.add_argument("--epochs", type=int, help="MLP epochs (default 2000)")
    g.add_argument("--learning-rate", type=float, help="MLP learning rate (default 0.5)")
    g.add_argument("--k", type=int, help="RBF hidden units, even (2, 4, 6)")
    g.add_argument("--kernel", choices=("linear", "gaussian"), help="SVM kernel (default gaussian)")
    g.add_argument("--C", type=float, help="SVM box constraint (default 1)")
    g.add_argument("--gamma", type=float, help="SVM Gaussian kernel gamma (default 1/n_features)")
    g.add_argument("--tol", type=float, help="SVM KKT tolerance (default 1e-3)")


# subcommands ------------------------------------------------------------

def cmd_synth(args) -> int:
    segments = generate_corpus(args.kind, args.n, args.seed, noise_std=args.noise)
    save_segments(args.out, segments)
    log.info("wrote %d segments to %s", len(segments), args.out)
    return EXIT_OK


def cmd_extract(args) -> int:
    segments = load_segments(args.input)
    if args.kind:
        segments = [s for s in segments if s.kind.value == args.kind]
    ids = [s.segment_id for s in segments]
    labels = [s.label.value for s in segments]
    status = EXIT_OK
    if args.source == "gaussian6":
        pairs = [fit_two_gaussians(s.t - s.t[0], s.gz) for s in segments]
        x = np.vstack([p.params for p in pairs]) if pairs else np.empty((0, 6))
        names = GAUSS_FEATURE_NAMES
        if not all(p.converged for p in pairs):
            status = EXIT_NONCONVERGENCE
    else:
        x = feature_matrix(segments)
        names = FEATURE_NAMES
    write_feature_csv(args.out, ids, labels, x)
    if args.json:
        write_feature_json(args.json, ids, labels, x, names)
    return status


def cmd_select(args) -> int:
    _, labels, x = read_feature_csv(args.features)
    ds = LabeledDataset.from_raw(x, labels_to_int(labels))
    fw = nca_fit(ds, lam=args.lam, sigma=args.sigma, lr=args.lr, max_iters=args.max_iters, seed=args.seed)
    save_weights(args.out, fw, args.threshold)
    log.info("selected components %s", [i + 1 for i in select(fw, args.threshold)])
    return EXIT_OK if fw.converged else EXIT_NONCONVERGENCE


def cmd_train(args) -> int:
    _, labels, x = read_feature_csv(args.features)
    y = labels_to_int(labels)
    columns = list(range(x.shape[1]))
    if args.weights:
        fw = load_weights(args.weights)
        columns = select(fw, args.threshold) or columns
    model = TRAINERS[args.algorithm](x[:, columns], y, seed=args.seed, **_model_params(args))
    doc = model.to_dict()
    doc["columns"] = [c + 1 for c in columns]
    scores = model.score(x[:, columns])
    doc["training_accuracy"] = float(np.mean((scores > 0.5) == (y == 1)))
    _emit(doc, args.out)
    return EXIT_OK if getattr(model, "converged", True) else EXIT_NONCONVERGENCE


def _parse_sweep(text: str):
    values = []
    for tok in text.split(","):
        tok = tok.strip()
        try:
            values.append(int(tok))
        except ValueError:
            values.append(float(tok))
    return values


def experiment_config(args) -> ExperimentConfig:
    """Config file first, then command-line flags on top."""
    cfg = load_config(args.config) if args.config else ExperimentConfig()
    inputs = {"segments": args.segments, "features": args.features, "synth_n_per_class": args.synth_n}
    if any(v is not None for v in inputs.values()):
        for name, value in inputs.items():
            setattr(cfg, name, value)
    if args.kind:
        cfg.kind = args.kind
    if args.source:
        cfg.feature_source = args.source
    if args.algorithm and args.algorithm != cfg.classifier.algorithm:
        cfg.classifier = ClassifierConfig(algorithm=args.algorithm)
    if args.algorithm:
        cfg.classifier.params.update(_model_params(args))
    if args.sweep:
        cfg.classifier.sweep_param, cfg.classifier.sweep_values = args.sweep_param, _parse_sweep(args.sweep)
        if cfg.classifier.sweep_param is None:
            cfg.classifier.sweep_param = {"mlp": "hidden", "rbf": "k", "svm": "C"}[cfg.classifier.algorithm]
    if args.seed is not None:
        cfg.master_seed = args.seed
        cfg.split = SplitPlan(cfg.split.train_fraction, cfg.split.repeats, args.seed)
    if args.repeats is not None:
        cfg.split = SplitPlan(cfg.split.train_fraction, args.repeats, cfg.split.master_seed)
    if args.no_select:
        cfg.selection = SelectionConfig(**{**cfg.selection.__dict__, "enabled": False})
    if args.threshold is not None:
        cfg.selection.threshold = args.threshold
    if args.out_dir:
        cfg.output_dir = args.out_dir
    return cfg


def cmd_eval(args) -> int:
    cfg = experiment_config(args)
    result = run_experiment(cfg)
    sys.stdout.write(Path(cfg.output_dir, "table.txt").read_text(encoding="utf-8"))
    return EXIT_OK if result.converged else EXIT_NONCONVERGENCE


def cmd_rule(args) -> int:
    segments = [s for s in load_segments(args.input) if s.kind in (Kind.BRAKE, Kind.GAS)]
    doc = []
    for seg in segments:
        v = classify_braking(seg, theta_vs=args.theta_vs, theta_d=args.theta_d, window_s=args.window)
        doc.append({"segment_id": seg.segment_id, "kind": seg.kind.value, **v.to_dict()})
    _emit(doc, args.out)
    return EXIT_OK


def cmd_fit(args) -> int:
    doc = []
    status = EXIT_OK
    for seg in load_segments(args.input):
        pair = fit_two_gaussians(seg.t - seg.t[0], seg.gz, max_iters=args.max_iters)
        if not pair.converged:
            status = EXIT_NONCONVERGENCE
        doc.append({"segment_id": seg.segment_id, **pair.to_dict()})
    _emit(doc, args.out)
    return status


def cmd_report(args) -> int:
    docs = []
    for path in args.metrics:
        with open(path, encoding="utf-8") as fh:
            docs.append(json.load(fh))
    if len(docs) == 1 and not args.compare:
        doc = docs[0]
        first = "Number of hidden neurons" if doc["algorithm"] in ("mlp", "rbf") else "Setting"
        rows = [(row_label(doc["algorithm"], r["value"]), r["tpr"], r["precision"], r["auc"])
                for r in doc["rows"]]
        text = format_table(rows, first)
    else:
        text = comparison_table(docs)
    if args.out:
        Path(args.out).write_text(text, encoding="utf-8")
    sys.stdout.write(text)
    return EXIT_OK


# parser -----------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="drivestyle", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    kinds = [k.value for k in Kind]

    p = sub.add_parser("synth", help="write a synthetic labelled corpus as segment CSV")
    p.add_argument("--kind", choices=kinds, required=True)
    p.add_argument("--n", type=int, required=True, help="segments per class")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--noise", type=float, default=0.05, help="noise std per channel")
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_synth)

    p = sub.add_parser("extract", help="segment CSV -> feature CSV (and optional JSON)")
    p.add_argument("--input", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--json")
    p.add_argument("--kind", choices=kinds)
    p.add_argument("--source", choices=("wavelet22", "gaussian6"), default="wavelet22")
    p.set_defaults(func=cmd_extract)

    p = sub.add_parser("select", help="feature weights by neighbourhood-component selection")
    p.add_argument("--features", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--lambda", dest="lam", type=float, default=None, help="default 1/n")
    p.add_argument("--sigma", type=float, default=1.0)
    p.add_argument("--lr", type=float, default=1.0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(func=cmd_select)

    p = sub.add_parser("train", help="fit one classifier on a feature CSV, write model JSON")
    p.add_argument("--features", required=True)
    p.add_argument("--weights", help="weights JSON from `select`; keeps features above --threshold")
    p.add_argument("--threshold", type=float, default=0.1)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    _add_model_flags(p)
    p.set_defaults(func=cmd_train, algorithm="mlp")

    p = sub.add_parser("eval", help="run an experiment (repeated 70/30 evaluation) and write reports")
    p.add_argument("--config", help="experiment JSON; flags below override it")
    src = p.add_argument_group("input (one of)")
    src.add_argument("--segments")
    src.add_argument("--features")
    src.add_argument("--synth-n", type=int, help="generate this many synthetic segments per class")
    p.add_argument("--kind", choices=kinds)
    p.add_argument("--source", choices=("wavelet22", "gaussian6"))
    p.add_argument("--sweep", help="comma-separated values of the swept hyper-parameter")
    p.add_argument("--sweep-param", help="name of the swept parameter (default hidden/k/C)")
    p.add_argument("--repeats", type=int)
    p.add_argument("--seed", type=int)
    p.add_argument("--no-select", action="store_true")
    p.add_argument("--threshold", type=float)
    p.add_argument("--out-dir")
    _add_model_flags(p)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("rule", help="threshold verdicts for brake/gas segments")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--theta-vs", type=float, default=VERY_SAFE_G * G0, help="m/s^2, default 0.11 g")
    p.add_argument("--theta-d", type=float, default=DANGEROUS_G * G0, help="m/s^2, default 0.45 g")
    p.add_argument("--window", type=float, default=WINDOW_S, help="seconds")
    p.set_defaults(func=cmd_rule)

    p = sub.add_parser("fit", help="two-Gaussian fit of gz per segment")
    p.add_argument("--input", required=True)
    p.add_argument("--out")
    p.add_argument("--max-iters", type=int, default=200)
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("report", help="render metrics JSON as a text table")
    p.add_argument("metrics", nargs="+")
    p.add_argument("--compare", action="store_true", help="algorithm x feature-family layout")
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except OSError as exc:
        log.error("I/O error: %s", exc)
        return EXIT_IO
    except DriveStyleError as exc:
        log.error("%s: %s", exc.code, exc)
        return exc.exit_code
    except (ValueError, KeyError) as exc:
        log.error("invalid input: %s", exc)
        return EXIT_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
