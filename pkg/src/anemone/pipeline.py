"""Pipeline orchestration and artifact I/O.

The CLI subcommands share one workspace convention: ``--out`` names a
directory, and each stage reads its predecessors' artifacts from it:

* inject  -> edges.txt, features.txt, labels.txt, inject.json
* train   -> model.npz, train_log.csv, few_shot.json (few-shot mode only)
* score   -> scores.csv (needs model.npz)
* eval    -> roc.csv, eval.json (needs scores.csv; honors few_shot.json)
* run     -> data/ plus run0/, run1/, ... each holding the above, and a
             top-level eval.json summarizing the per-run AUCs.

All artifacts are deterministic byte for byte given the same inputs and
seed: floats are written with 17 significant digits, JSON keys are
sorted, and checkpoints carry fixed zip metadata.
"""

import json
import os

import numpy as np

from . import rng
from .contrast import train
from .errors import FileFormatError
from .evaluate import auc_roc, kshot_split, roc_points
from .graph import load_graph, load_labels, save_graph
from .inject import inject_anomalies
from .nn import load_checkpoint, save_checkpoint
from .scorer import score_all

SCORES_HEADER = (
    "node_id,y,y_patch,y_context,mean_b_p,std_b_p,mean_b_c,std_b_c"
)
TRAIN_LOG_HEADER = "epoch,batch,loss_patch,loss_context,loss_total"


def _fmt(x):
    return format(float(x), ".17g")


def write_scores_csv(path, report):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(SCORES_HEADER + "\n")
        for i, node in enumerate(report.node_ids):
            fields = (
                str(int(node)),
                _fmt(report.y[i]),
                _fmt(report.y_patch[i]),
                _fmt(report.y_context[i]),
                _fmt(report.mean_b_patch[i]),
                _fmt(report.std_b_patch[i]),
                _fmt(report.mean_b_context[i]),
                _fmt(report.std_b_context[i]),
            )
            fh.write(",".join(fields) + "\n")


def read_scores_csv(path):
    """Read a scores CSV back; returns (node_ids, columns dict)."""
    with open(path, "r", encoding="utf-8") as fh:
        lines = fh.read().splitlines()
    if not lines or lines[0] != SCORES_HEADER:
        raise FileFormatError(path, 1, "missing or wrong scores header")
    names = SCORES_HEADER.split(",")[1:]
    node_ids = []
    columns = {name: [] for name in names}
    for lineno, line in enumerate(lines[1:], start=2):
        if not line:
            continue
        parts = line.split(",")
        if len(parts) != 8:
            raise FileFormatError(path, lineno, f"expected 8 fields, got {len(parts)}")
        try:
            node_ids.append(int(parts[0]))
            for name, tok in zip(names, parts[1:]):
                columns[name].append(float(tok))
        except ValueError:
            raise FileFormatError(path, lineno, f"malformed row {line!r}")
    ids = np.asarray(node_ids, dtype=np.int64)
    cols = {name: np.asarray(vals, dtype=np.float64) for name, vals in columns.items()}
    for name, vals in cols.items():
        if not np.isfinite(vals).all():
            raise FileFormatError(path, 1, f"column {name} contains non-finite values")
    return ids, cols


def write_train_log(path, trace):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(TRAIN_LOG_HEADER + "\n")
        for epoch, batch, lp, lc, lt in trace:
            fh.write(f"{epoch},{batch},{_fmt(lp)},{_fmt(lc)},{_fmt(lt)}\n")


def write_roc_csv(path, fpr, tpr):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("fpr,tpr\n")
        for f, t in zip(fpr, tpr):
            fh.write(f"{_fmt(f)},{_fmt(t)}\n")


def write_json(path, payload):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def inject_cmd(edges, features, out, seed, cliques, clique_size, contextual,
               candidates, log=None):
    """Inject anomalies and write the corrupted graph into ``out``."""
    graph = load_graph(edges, features)
    result = inject_anomalies(
        graph,
        seed,
        num_cliques=cliques,
        clique_size=clique_size,
        num_contextual=contextual,
        num_candidates=candidates,
    )
    os.makedirs(out, exist_ok=True)
    save_graph(
        result.graph,
        os.path.join(out, "edges.txt"),
        os.path.join(out, "features.txt"),
        os.path.join(out, "labels.txt"),
    )
    write_json(os.path.join(out, "inject.json"), result.manifest)
    if log:
        log(
            f"injected {result.structural_ids.size} structural + "
            f"{result.contextual_ids.size} contextual anomalies"
        )
    return result


def train_cmd(graph, out, cfg, seed, few_shot=0, log=None):
    """Train a model in ``out``; few_shot > 0 reveals that many anomalies."""
    os.makedirs(out, exist_ok=True)
    labeled = None
    if few_shot:
        if graph.labels is None:
            raise ValueError("few-shot training needs a labels file")
        labeled, _ = kshot_split(graph.labels, few_shot, seed)
        write_json(
            os.path.join(out, "few_shot.json"),
            {"k": int(few_shot), "labeled_ids": [int(v) for v in labeled]},
        )
    params, trace = train(
        graph,
        cfg,
        seed,
        labeled_anomalies=labeled,
        on_batch=_epoch_logger(log, cfg) if log else None,
    )
    save_checkpoint(os.path.join(out, "model.npz"), params)
    write_train_log(os.path.join(out, "train_log.csv"), trace)
    return params, trace


def _epoch_logger(log, cfg):
    def on_batch(row):
        epoch, batch, _, _, total = row
        if batch == 0 and epoch % 10 == 0:
            log(f"epoch {epoch}: loss {total:.4f}")

    return on_batch


def score_cmd(graph, out, rounds, alpha, seed, subgraph_size, restart_prob,
              log=None):
    """Score every node with the model stored in ``out``."""
    params = load_checkpoint(os.path.join(out, "model.npz"))
    report = score_all(
        graph,
        params,
        rounds=rounds,
        alpha=alpha,
        seed=seed,
        subgraph_size=subgraph_size,
        restart_prob=restart_prob,
    )
    write_scores_csv(os.path.join(out, "scores.csv"), report)
    if log:
        log(
            f"scored {report.node_ids.size} nodes over {rounds} rounds "
            f"(positive-gap fraction {report.positive_gap_fraction:.4f})"
        )
    return report


def eval_cmd(out, labels_path, log=None):
    """Evaluate ``out``/scores.csv against a labels file; returns the AUC."""
    ids, cols = read_scores_csv(os.path.join(out, "scores.csv"))
    labels = load_labels(labels_path)
    if ids.size and ids.max() >= labels.size:
        raise FileFormatError(
            os.path.join(out, "scores.csv"),
            1,
            f"scores reference node {int(ids.max())} but labels cover "
            f"{labels.size} nodes",
        )
    keep = np.ones(ids.size, dtype=bool)
    few_shot_path = os.path.join(out, "few_shot.json")
    if os.path.exists(few_shot_path):
        with open(few_shot_path, "r", encoding="utf-8") as fh:
            revealed = set(json.load(fh)["labeled_ids"])
        keep = np.asarray([int(i) not in revealed for i in ids], dtype=bool)
    y = cols["y"][keep]
    truth = labels[ids[keep]]
    auc = auc_roc(y, truth)
    fpr, tpr = roc_points(y, truth)
    write_roc_csv(os.path.join(out, "roc.csv"), fpr, tpr)
    payload = {
        "auc": auc,
        "n_pos": int(truth.sum()),
        "n_neg": int(truth.size - truth.sum()),
        "runs": [auc],
    }
    write_json(os.path.join(out, "eval.json"), payload)
    if log:
        log(f"eval: {truth.size} nodes, {payload['n_pos']} anomalies")
    return auc


def run_cmd(edges, features, out, seed, runs, cfg, rounds, few_shot=0,
            labels=None, inject_args=None, log=None):
    """Full pipeline: optional injection, then train/score/eval per run.

    Each run r derives its own master seed from (seed, run index), so runs
    are independent but the whole set reproduces from one seed. Returns
    the list of per-run AUCs.
    """
    os.makedirs(out, exist_ok=True)
    if inject_args is not None:
        data_dir = os.path.join(out, "data")
        inject_cmd(edges, features, data_dir, seed, log=log, **inject_args)
        edges = os.path.join(data_dir, "edges.txt")
        features = os.path.join(data_dir, "features.txt")
        labels = os.path.join(data_dir, "labels.txt")
    if labels is None:
        raise ValueError(
            "run needs labels: pass --labels or injection settings"
        )
    graph = load_graph(edges, features, labels)
    aucs = []
    n_pos = n_neg = None
    for r in range(runs):
        run_seed = rng.derive_seed(seed, rng.STREAM_RUN, r)
        run_dir = os.path.join(out, f"run{r}")
        if log:
            log(f"run {r}: training")
        train_cmd(graph, run_dir, cfg, run_seed, few_shot=few_shot, log=log)
        if log:
            log(f"run {r}: scoring")
        score_cmd(
            graph,
            run_dir,
            rounds=rounds,
            alpha=cfg.alpha,
            seed=run_seed,
            subgraph_size=cfg.subgraph_size,
            restart_prob=cfg.restart_prob,
            log=log,
        )
        auc = eval_cmd(run_dir, labels, log=log)
        with open(os.path.join(run_dir, "eval.json"), "r", encoding="utf-8") as fh:
            run_eval = json.load(fh)
        n_pos, n_neg = run_eval["n_pos"], run_eval["n_neg"]
        aucs.append(auc)
        if log:
            log(f"run {r}: auc {auc:.6f}")
    write_json(
        os.path.join(out, "eval.json"),
        {
            "auc": float(np.mean(aucs)),
            "n_pos": n_pos,
            "n_neg": n_neg,
            "runs": aucs,
        },
    )
    return aucs
