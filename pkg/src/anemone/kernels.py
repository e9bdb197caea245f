"""Kernel lane selection and argument validation.

Two interchangeable implementations of the sampling hot path exist: a
compiled Cython extension (``anemone._kernels``) and a pure-Python twin
(``anemone._kernels_py``). Import picks the compiled lane when the
extension built, unless ``ANEMONE_PURE_PYTHON=1`` forces the fallback.
Both lanes produce bit-identical output, so lane choice only affects
speed; ``python -m anemone.bench`` measures the difference.

All public entry points validate shapes and dtypes here once, so the lane
implementations can assume clean, contiguous inputs.
"""

import importlib
import os

import numpy as np

from .errors import RangeError, ShapeError

if os.environ.get("ANEMONE_PURE_PYTHON", "0") == "1":
    from . import _kernels_py as _impl
else:
    try:
        from . import _kernels as _impl
    except ImportError:
        from . import _kernels_py as _impl

LANE = _impl.LANE


def active_lane():
    """Name of the lane in use: ``"compiled"`` or ``"pure"``."""
    return LANE


def get_impl(lane):
    """Load a specific lane module (used by parity tests and the bench).

    Raises ImportError for ``"compiled"`` when the extension is absent.
    """
    if lane == "pure":
        return importlib.import_module("anemone._kernels_py")
    if lane == "compiled":
        return importlib.import_module("anemone._kernels")
    raise ValueError(f"unknown lane {lane!r}")


def _check_csr(indptr, indices):
    indptr = np.ascontiguousarray(indptr, dtype=np.int64)
    indices = np.ascontiguousarray(indices, dtype=np.int64)
    if indptr.ndim != 1 or indices.ndim != 1:
        raise ShapeError("indptr and indices must be 1-D")
    if indptr.size == 0 or indptr[0] != 0 or indptr[-1] != indices.size:
        raise ShapeError("indptr must start at 0 and end at len(indices)")
    return indptr, indices


def rwr_batch(indptr, indices, targets, k, restart_prob, budget, seeds, impl=None):
    """Batched random walk with restart; one walk per (target, seed) pair.

    See ``_kernels_py.rwr_batch`` for the walk semantics. ``impl`` lets
    callers pin a lane explicitly; the active lane is used otherwise.
    """
    indptr, indices = _check_csr(indptr, indices)
    targets = np.ascontiguousarray(targets, dtype=np.int64)
    seeds = np.ascontiguousarray(seeds, dtype=np.uint64)
    if targets.ndim != 1 or seeds.shape != targets.shape:
        raise ShapeError("targets and seeds must be 1-D arrays of equal length")
    n = indptr.size - 1
    if targets.size and (targets.min() < 0 or targets.max() >= n):
        raise RangeError(f"target id out of range [0, {n})")
    k = int(k)
    if k < 1:
        raise ValueError("subgraph size k must be at least 1")
    restart_prob = float(restart_prob)
    if not 0.0 <= restart_prob <= 1.0:
        raise ValueError("restart_prob must lie in [0, 1]")
    budget = int(budget)
    if budget < 0:
        raise ValueError("step budget must be non-negative")
    mod = _impl if impl is None else impl
    return mod.rwr_batch(indptr, indices, targets, k, restart_prob, budget, seeds)


def induced_norm_adj(indptr, indices, nodes, n_real, impl=None):
    """Batched normalized adjacency of sampled subgraphs, shape (B, k, k)."""
    indptr, indices = _check_csr(indptr, indices)
    nodes = np.ascontiguousarray(nodes, dtype=np.int64)
    n_real = np.ascontiguousarray(n_real, dtype=np.int64)
    if nodes.ndim != 2 or n_real.shape != (nodes.shape[0],):
        raise ShapeError("nodes must be (B, k) with n_real of shape (B,)")
    n = indptr.size - 1
    if nodes.size and (nodes.min() < 0 or nodes.max() >= n):
        raise RangeError(f"node id out of range [0, {n})")
    if n_real.size and (n_real.min() < 1 or n_real.max() > nodes.shape[1]):
        raise RangeError("n_real entries must lie in [1, k]")
    mod = _impl if impl is None else impl
    return mod.induced_norm_adj(indptr, indices, nodes, n_real)
