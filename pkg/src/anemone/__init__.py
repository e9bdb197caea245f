"""Multi-scale contrastive anomaly detection on attributed graphs.

The package trains two small contrastive models (a patch-level and a
context-level discriminator) on anonymized random-walk subgraphs, then
scores every node by the statistics of its discrimination gap across many
sampling rounds. It supports a fully unsupervised mode and a few-shot mode
that exploits a handful of labeled anomalies.

Re-exports are lazy so that ``import anemone`` stays cheap and, more
importantly, so the CLI can pin BLAS thread counts via environment
variables before numpy is first imported.
"""

__version__ = "0.1.0"

_EXPORTS = {
    "AttributedGraph": "graph",
    "CsrAdjacency": "graph",
    "load_graph": "graph",
    "save_graph": "graph",
    "normalize_adjacency": "graph",
    "inject_anomalies": "inject",
    "InjectionResult": "inject",
    "Subgraph": "sampling",
    "rwr_sample": "sampling",
    "sample_batch": "sampling",
    "ModelParams": "nn",
    "AdamState": "nn",
    "init_params": "nn",
    "save_checkpoint": "nn",
    "load_checkpoint": "nn",
    "TrainConfig": "contrast",
    "train": "contrast",
    "score_all": "scorer",
    "AnomalyReport": "scorer",
    "auc_roc": "evaluate",
    "roc_points": "evaluate",
    "kshot_split": "evaluate",
    "clustered_graph": "synthetic",
}

__all__ = sorted(_EXPORTS) + ["__version__"]


def __getattr__(name):
    module = _EXPORTS.get(name)
    if module is None:
        raise AttributeError(f"module 'anemone' has no attribute {name!r}")
    import importlib

    return getattr(importlib.import_module(f".{module}", __name__), name)
