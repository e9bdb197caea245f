"""Command line interface.

Subcommands share a workspace directory given by ``--out``: inject writes
a corrupted graph, train writes a model checkpoint, score writes a score
table for the model in the workspace, eval grades the score table, and
run chains everything for one or more seeds. Flag values resolve as
CLI > config file (``--config``) > built-in default.
"""

import os
import sys

# Thread pinning must happen before numpy first loads anywhere in the
# process, which is why this block precedes every package import below.
_threads = os.environ.get("ANEMONE_THREADS")
if _threads is not None:
    if not _threads.isdigit() or int(_threads) < 1:
        print("error: ANEMONE_THREADS must be a positive integer", file=sys.stderr)
        raise SystemExit(2)
    for _var in (
        "OPENBLAS_NUM_THREADS",
        "MKL_NUM_THREADS",
        "OMP_NUM_THREADS",
        "NUMEXPR_NUM_THREADS",
    ):
        os.environ.setdefault(_var, _threads)

import argparse

from . import __version__, pipeline
from .config import load_config
from .contrast import TrainConfig
from .errors import AnemoneError, ConfigError
from .graph import load_graph

DEFAULTS = {
    "seed": 1,
    "alpha": 0.8,
    "rounds": 256,
    "subgraph_size": 4,
    "dim": 64,
    "epochs": 100,
    "batch_size": 300,
    "lr": 0.001,
    "restart_prob": 0.5,
    "runs": 1,
    "few_shot": 0,
    "cliques": 5,
    "clique_size": 15,
    "contextual": 75,
    "candidates": 50,
}

_KEY_TYPES = {
    "edges": str,
    "features": str,
    "labels": str,
    "out": str,
    "seed": int,
    "alpha": float,
    "rounds": int,
    "subgraph_size": int,
    "dim": int,
    "epochs": int,
    "batch_size": int,
    "lr": float,
    "restart_prob": float,
    "runs": int,
    "few_shot": int,
    "cliques": int,
    "clique_size": int,
    "contextual": int,
    "candidates": int,
}


def _add(parser, *names):
    """Register canon flags on a subparser (defaults stay None so the
    config-file merge can tell 'given' from 'absent')."""
    specs = {
        "edges": ("--edges", str, "edge list file"),
        "features": ("--features", str, "feature matrix file"),
        "labels": ("--labels", str, "binary label file"),
        "out": ("--out", str, "workspace directory"),
        "seed": ("--seed", int, "master seed"),
        "alpha": ("--alpha", float, "context/patch blend in [0, 1]"),
        "rounds": ("--rounds", int, "scoring rounds R"),
        "subgraph_size": ("--subgraph-size", int, "nodes per sampled subgraph"),
        "dim": ("--dim", int, "embedding dimension"),
        "epochs": ("--epochs", int, "training epochs"),
        "batch_size": ("--batch-size", int, "mini-batch size"),
        "lr": ("--lr", float, "Adam learning rate"),
        "restart_prob": ("--restart-prob", float, "walk restart probability"),
        "runs": ("--runs", int, "independent runs to average"),
        "few_shot": ("--few-shot", int, "labeled anomalies to reveal (0 = unsupervised)"),
        "cliques": ("--cliques", int, "structural anomaly groups to inject"),
        "clique_size": ("--clique-size", int, "nodes per structural group"),
        "contextual": ("--contextual", int, "contextual anomalies to inject"),
        "candidates": ("--candidates", int, "candidate pool per contextual swap"),
    }
    for name in names:
        flag, typ, help_text = specs[name]
        default_note = f" (default {DEFAULTS[name]})" if name in DEFAULTS else ""
        parser.add_argument(flag, type=typ, help=help_text + default_note)
    parser.add_argument("--config", type=str, help="config file with defaults")


def _resolve(args, keys, required):
    """Merge CLI values, config file, and defaults; enforce required keys."""
    cfg = {}
    if args.config:
        cfg = load_config(args.config)
        unknown = sorted(set(cfg) - set(_KEY_TYPES))
        if unknown:
            raise ConfigError(args.config, 0, f"unknown keys: {', '.join(unknown)}")
    resolved = {}
    for key in keys:
        value = getattr(args, key)
        if value is None and key in cfg:
            value = _coerce(cfg[key], key, args.config)
        if value is None:
            value = DEFAULTS.get(key)
        resolved[key] = value
    missing = [k for k in required if resolved.get(k) is None]
    if missing:
        flags = ", ".join("--" + k.replace("_", "-") for k in missing)
        raise ConfigError(args.config or "<cli>", 0, f"missing required: {flags}")
    return resolved


def _coerce(value, key, path):
    want = _KEY_TYPES[key]
    if isinstance(value, bool):
        raise ConfigError(path, 0, f"key {key!r} must be {want.__name__}")
    if want is float and isinstance(value, int):
        return float(value)
    if not isinstance(value, want):
        raise ConfigError(path, 0, f"key {key!r} must be {want.__name__}")
    return value


def _log(msg):
    print(msg, file=sys.stderr)


def _train_config(r):
    return TrainConfig(
        dim=r["dim"],
        subgraph_size=r["subgraph_size"],
        restart_prob=r["restart_prob"],
        alpha=r["alpha"],
        lr=r["lr"],
        epochs=r["epochs"],
        batch_size=r["batch_size"],
    )


def build_parser():
    parser = argparse.ArgumentParser(
        prog="anemone",
        description="Multi-scale contrastive anomaly detection on attributed graphs.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("inject", help="inject synthetic anomalies into a clean graph")
    _add(p, "edges", "features", "out", "seed", "cliques", "clique_size",
         "contextual", "candidates")

    p = sub.add_parser("train", help="train the contrastive model")
    _add(p, "edges", "features", "labels", "out", "seed", "alpha", "dim",
         "epochs", "batch_size", "lr", "subgraph_size", "restart_prob",
         "few_shot")

    p = sub.add_parser("score", help="score nodes with a trained model")
    _add(p, "edges", "features", "out", "seed", "alpha", "rounds",
         "subgraph_size", "restart_prob")

    p = sub.add_parser("eval", help="grade a score table against labels")
    _add(p, "labels", "out")

    p = sub.add_parser("run", help="full pipeline: [inject,] train, score, eval")
    _add(p, "edges", "features", "labels", "out", "seed", "runs", "alpha",
         "rounds", "dim", "epochs", "batch_size", "lr", "subgraph_size",
         "restart_prob", "few_shot", "cliques", "clique_size", "contextual",
         "candidates")
    return parser


def _cmd_inject(args):
    r = _resolve(
        args,
        ("edges", "features", "out", "seed", "cliques", "clique_size",
         "contextual", "candidates"),
        required=("edges", "features", "out"),
    )
    pipeline.inject_cmd(
        r["edges"], r["features"], r["out"], r["seed"],
        cliques=r["cliques"], clique_size=r["clique_size"],
        contextual=r["contextual"], candidates=r["candidates"], log=_log,
    )
    return 0


def _cmd_train(args):
    r = _resolve(
        args,
        ("edges", "features", "labels", "out", "seed", "alpha", "dim",
         "epochs", "batch_size", "lr", "subgraph_size", "restart_prob",
         "few_shot"),
        required=("edges", "features", "out"),
    )
    if r["few_shot"] and not r["labels"]:
        raise ConfigError(args.config or "<cli>", 0, "--few-shot needs --labels")
    graph = load_graph(r["edges"], r["features"], r["labels"])
    pipeline.train_cmd(
        graph, r["out"], _train_config(r), r["seed"],
        few_shot=r["few_shot"], log=_log,
    )
    return 0


def _cmd_score(args):
    r = _resolve(
        args,
        ("edges", "features", "out", "seed", "alpha", "rounds",
         "subgraph_size", "restart_prob"),
        required=("edges", "features", "out"),
    )
    graph = load_graph(r["edges"], r["features"])
    pipeline.score_cmd(
        graph, r["out"], rounds=r["rounds"], alpha=r["alpha"], seed=r["seed"],
        subgraph_size=r["subgraph_size"], restart_prob=r["restart_prob"],
        log=_log,
    )
    return 0


def _cmd_eval(args):
    r = _resolve(args, ("labels", "out"), required=("labels", "out"))
    auc = pipeline.eval_cmd(r["out"], r["labels"], log=_log)
    print(f"{auc:.6f}")
    return 0


def _cmd_run(args):
    r = _resolve(
        args,
        ("edges", "features", "labels", "out", "seed", "runs", "alpha",
         "rounds", "dim", "epochs", "batch_size", "lr", "subgraph_size",
         "restart_prob", "few_shot", "cliques", "clique_size", "contextual",
         "candidates"),
        required=("edges", "features", "out"),
    )
    inject_args = None
    if r["labels"] is None:
        inject_args = {
            "cliques": r["cliques"],
            "clique_size": r["clique_size"],
            "contextual": r["contextual"],
            "candidates": r["candidates"],
        }
    aucs = pipeline.run_cmd(
        r["edges"], r["features"], r["out"], r["seed"], r["runs"],
        _train_config(r), rounds=r["rounds"], few_shot=r["few_shot"],
        labels=r["labels"], inject_args=inject_args, log=_log,
    )
    print(f"{sum(aucs) / len(aucs):.6f}")
    return 0


_COMMANDS = {
    "inject": _cmd_inject,
    "train": _cmd_train,
    "score": _cmd_score,
    "eval": _cmd_eval,
    "run": _cmd_run,
}


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except (AnemoneError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    raise SystemExit(main())
