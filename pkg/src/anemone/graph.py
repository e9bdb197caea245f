"""Attributed graph container and text-format I/O.

A graph is undirected, unweighted, has no self-loops, and carries one
float64 feature row per node. The on-disk format is three plain text
files (UTF-8, LF line endings, ``#`` starts a comment, blank lines are
skipped):

* features: one node per line, D whitespace-separated reals; line order
  defines node ids 0..N-1 and N itself.
* edges: one edge per line as two whitespace-separated node ids.
  Duplicates (in either orientation) collapse; self-loops are rejected.
* labels (optional): one integer per line, ``0`` normal / ``1`` anomaly,
  exactly N data lines.

Adjacency is stored CSR-style with row-sorted neighbor lists, which keeps
neighbor lookup O(log deg) and makes every derived computation independent
of input file ordering.
"""

from dataclasses import dataclass, field

import numpy as np

from .errors import GraphParseError, RangeError, ShapeError


@dataclass(frozen=True)
class CsrAdjacency:
    """Compressed sparse row adjacency of an undirected simple graph.

    Parameters
    ----------
    indptr : ndarray of int64, shape (N + 1,)
        Row pointer array; neighbors of node v occupy
        ``indices[indptr[v]:indptr[v + 1]]``.
    indices : ndarray of int64
        Concatenated neighbor lists, sorted within each row. Each
        undirected edge appears twice (once per endpoint).
    """

    indptr: np.ndarray
    indices: np.ndarray

    def __post_init__(self):
        indptr = np.ascontiguousarray(self.indptr, dtype=np.int64)
        indices = np.ascontiguousarray(self.indices, dtype=np.int64)
        if indptr.ndim != 1 or indices.ndim != 1:
            raise ShapeError("indptr and indices must be 1-D arrays")
        if indptr.size == 0 or indptr[0] != 0 or indptr[-1] != indices.size:
            raise ShapeError("indptr must start at 0 and end at len(indices)")
        if np.any(np.diff(indptr) < 0):
            raise ShapeError("indptr must be non-decreasing")
        object.__setattr__(self, "indptr", indptr)
        object.__setattr__(self, "indices", indices)

    @classmethod
    def from_edges(cls, num_nodes, edges):
        """Build symmetric CSR from an (m, 2) array of undirected edges.

        Duplicate edges collapse, orientation is ignored, and neighbor
        lists come out sorted. Self-loops and out-of-range endpoints are
        rejected.
        """
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if edges.size and (edges.min() < 0 or edges.max() >= num_nodes):
            raise RangeError(
                f"edge endpoint out of range for graph with {num_nodes} nodes"
            )
        if np.any(edges[:, 0] == edges[:, 1]):
            raise RangeError("self-loops are not allowed")
        # Symmetrize, then dedup via unique on (row, col) pairs.
        both = np.concatenate([edges, edges[:, ::-1]], axis=0)
        if both.size:
            pairs = np.unique(both, axis=0)
        else:
            pairs = both
        counts = np.bincount(pairs[:, 0], minlength=num_nodes) if pairs.size else (
            np.zeros(num_nodes, dtype=np.int64)
        )
        indptr = np.zeros(num_nodes + 1, dtype=np.int64)
        np.cumsum(counts, out=indptr[1:])
        # unique sorts lexicographically, so cols are already row-grouped
        # and sorted within each row.
        return cls(indptr=indptr, indices=pairs[:, 1].copy())

    @property
    def num_nodes(self):
        return self.indptr.size - 1

    @property
    def num_edges(self):
        """Number of undirected edges."""
        return self.indices.size // 2

    def neighbors(self, v):
        """Sorted neighbor ids of node v (a view, do not mutate)."""
        v = int(v)
        if not 0 <= v < self.num_nodes:
            raise RangeError(f"node id {v} out of range [0, {self.num_nodes})")
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def degree(self, v):
        v = int(v)
        if not 0 <= v < self.num_nodes:
            raise RangeError(f"node id {v} out of range [0, {self.num_nodes})")
        return int(self.indptr[v + 1] - self.indptr[v])

    @property
    def degrees(self):
        return np.diff(self.indptr)

    def has_edge(self, u, v):
        row = self.neighbors(u)
        i = np.searchsorted(row, int(v))
        return i < row.size and row[i] == int(v)

    def to_dense(self):
        """Dense float64 adjacency matrix (for small graphs and tests)."""
        n = self.num_nodes
        a = np.zeros((n, n), dtype=np.float64)
        rows = np.repeat(np.arange(n, dtype=np.int64), np.diff(self.indptr))
        a[rows, self.indices] = 1.0
        return a


@dataclass(frozen=True)
class AttributedGraph:
    """Undirected attributed graph, optionally with binary anomaly labels."""

    features: np.ndarray
    adjacency: CsrAdjacency
    labels: np.ndarray | None = field(default=None)

    def __post_init__(self):
        feats = np.ascontiguousarray(self.features, dtype=np.float64)
        if feats.ndim != 2:
            raise ShapeError("features must be a 2-D array of shape (N, D)")
        if feats.shape[0] != self.adjacency.num_nodes:
            raise ShapeError(
                f"feature rows ({feats.shape[0]}) != adjacency nodes "
                f"({self.adjacency.num_nodes})"
            )
        object.__setattr__(self, "features", feats)
        if self.labels is not None:
            labels = np.ascontiguousarray(self.labels, dtype=np.int64)
            if labels.shape != (feats.shape[0],):
                raise ShapeError("labels must have shape (N,)")
            if labels.size and not np.isin(labels, (0, 1)).all():
                raise ShapeError("labels must be binary (0 or 1)")
            object.__setattr__(self, "labels", labels)

    @property
    def num_nodes(self):
        return self.features.shape[0]

    @property
    def num_features(self):
        return self.features.shape[1]

    @property
    def num_edges(self):
        return self.adjacency.num_edges


def _data_lines(path):
    """Yield (lineno, text) for non-empty, non-comment lines of a file."""
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            text = raw.split("#", 1)[0].strip()
            if text:
                yield lineno, text


def load_features(path):
    rows = []
    width = None
    for lineno, text in _data_lines(path):
        tokens = text.split()
        if width is None:
            width = len(tokens)
        elif len(tokens) != width:
            raise GraphParseError(
                path, lineno, f"expected {width} feature values, got {len(tokens)}"
            )
        try:
            rows.append([float(t) for t in tokens])
        except ValueError:
            raise GraphParseError(path, lineno, f"malformed real number in {text!r}")
    if not rows:
        raise GraphParseError(path, 1, "feature file contains no data lines")
    feats = np.asarray(rows, dtype=np.float64)
    if not np.isfinite(feats).all():
        raise GraphParseError(path, 1, "feature file contains non-finite values")
    return feats


def load_edges(path, num_nodes):
    edges = []
    for lineno, text in _data_lines(path):
        tokens = text.split()
        if len(tokens) != 2:
            raise GraphParseError(
                path, lineno, f"expected two node ids, got {len(tokens)} tokens"
            )
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphParseError(path, lineno, f"malformed node id in {text!r}")
        if not (0 <= u < num_nodes and 0 <= v < num_nodes):
            raise GraphParseError(
                path,
                lineno,
                f"edge ({u}, {v}) out of range for graph with {num_nodes} nodes",
            )
        if u == v:
            raise GraphParseError(path, lineno, f"self-loop on node {u}")
        edges.append((u, v))
    return np.asarray(edges, dtype=np.int64).reshape(-1, 2)


def load_labels(path, num_nodes=None):
    """Load binary labels; checks the count when ``num_nodes`` is given."""
    values = []
    for lineno, text in _data_lines(path):
        try:
            val = int(text)
        except ValueError:
            raise GraphParseError(path, lineno, f"malformed label {text!r}")
        if val not in (0, 1):
            raise GraphParseError(path, lineno, f"label must be 0 or 1, got {val}")
        values.append(val)
    if num_nodes is not None and len(values) != num_nodes:
        raise GraphParseError(
            path,
            1,
            f"label file has {len(values)} data lines, expected {num_nodes}",
        )
    return np.asarray(values, dtype=np.int64)


def load_graph(edge_path, feature_path, label_path=None):
    """Load an attributed graph from its edge/feature(/label) text files."""
    feats = load_features(feature_path)
    edges = load_edges(edge_path, feats.shape[0])
    adjacency = CsrAdjacency.from_edges(feats.shape[0], edges)
    labels = load_labels(label_path, feats.shape[0]) if label_path else None
    return AttributedGraph(features=feats, adjacency=adjacency, labels=labels)


def save_graph(graph, edge_path, feature_path, label_path=None):
    """Write a graph in canonical form.

    Edges are emitted once each as ``u v`` with u < v, sorted; features use
    17 significant digits so a load/save round trip is bit-exact.
    """
    adj = graph.adjacency
    with open(edge_path, "w", encoding="utf-8", newline="\n") as fh:
        for u in range(adj.num_nodes):
            for v in adj.neighbors(u):
                if u < v:
                    fh.write(f"{u} {v}\n")
    with open(feature_path, "w", encoding="utf-8", newline="\n") as fh:
        for row in graph.features:
            fh.write(" ".join(format(x, ".17g") for x in row))
            fh.write("\n")
    if label_path is not None:
        if graph.labels is None:
            raise ShapeError("graph has no labels to save")
        with open(label_path, "w", encoding="utf-8", newline="\n") as fh:
            for val in graph.labels:
                fh.write(f"{int(val)}\n")


def neighbors(graph, v):
    """Sorted neighbor ids of node v."""
    return graph.adjacency.neighbors(v)


def normalize_adjacency(adjacency, node_subset=None):
    """Symmetrically normalized adjacency with self-loops, as dense float64.

    Computes D^{-1/2} (A + I) D^{-1/2} where D is the degree matrix of
    A + I. With ``node_subset`` (distinct node ids), the computation runs
    on the induced subgraph, rows ordered as given. Self-loops guarantee
    every degree is at least 1, so the result is always finite, and the
    matrix is symmetric by construction.
    """
    if node_subset is None:
        a = adjacency.to_dense()
    else:
        nodes = np.asarray(node_subset, dtype=np.int64)
        if nodes.ndim != 1:
            raise ShapeError("node_subset must be a 1-D sequence of node ids")
        if np.unique(nodes).size != nodes.size:
            raise RangeError("node_subset must not contain duplicate ids")
        k = nodes.size
        pos = {int(v): i for i, v in enumerate(nodes)}
        a = np.zeros((k, k), dtype=np.float64)
        for i, v in enumerate(nodes):
            for u in adjacency.neighbors(v):
                j = pos.get(int(u))
                if j is not None:
                    a[i, j] = 1.0
    np.fill_diagonal(a, a.diagonal() + 1.0)
    inv_sqrt = 1.0 / np.sqrt(a.sum(axis=1))
    return a * inv_sqrt[:, None] * inv_sqrt[None, :]
