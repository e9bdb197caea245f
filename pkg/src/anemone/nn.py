"""Model parameters, forward primitives, Adam, and checkpoints.

The model is two independent discriminators that share one architecture:

* an encoder ``H = relu(A_hat @ (X @ theta))`` applied to each sampled
  subgraph, where A_hat is the normalized adjacency from the sampler and
  X the (anonymized) member features,
* a degenerate encoder ``z = relu(x @ theta)`` for the raw target row
  (same theta, no aggregation), and
* a bilinear discriminator ``s = sigmoid(h @ w @ z^T)`` comparing a
  subgraph-derived embedding h against the target embedding z.

The patch discriminator reads h from the target's own slot (row 0 of H);
the context discriminator reads h as the mean of all k rows. Each keeps
its own (theta, w).

Everything here is hand-derived numpy: forwards return the tapes their
backwards need, and gradients flow through explicit closed forms. The
training loop in :mod:`anemone.contrast` composes these pieces.
"""

import io
import zipfile
from dataclasses import dataclass

import numpy as np

from . import rng
from .errors import NumericError, ShapeError, StateError

CHECKPOINT_FORMAT = "anemone-checkpoint-v1"

TENSOR_NAMES = ("patch.theta", "patch.w", "context.theta", "context.w")


def relu(x):
    return np.maximum(x, 0.0)


def sigmoid(x):
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


@dataclass
class ViewParams:
    """Parameters of one discriminator: encoder weight and bilinear form."""

    theta: np.ndarray  # (D, d)
    w: np.ndarray  # (d, d)

    def __post_init__(self):
        self.theta = np.ascontiguousarray(self.theta, dtype=np.float64)
        self.w = np.ascontiguousarray(self.w, dtype=np.float64)
        if self.theta.ndim != 2 or self.w.ndim != 2:
            raise ShapeError("theta and w must be 2-D")
        d = self.theta.shape[1]
        if self.w.shape != (d, d):
            raise ShapeError(
                f"bilinear w must be ({d}, {d}) to match theta, got {self.w.shape}"
            )


@dataclass
class ModelParams:
    """Full model: patch-level and context-level discriminators."""

    patch: ViewParams
    context: ViewParams

    def __post_init__(self):
        if self.patch.theta.shape != self.context.theta.shape:
            raise ShapeError("patch and context encoders must share shapes")

    @property
    def feature_dim(self):
        return self.patch.theta.shape[0]

    @property
    def embed_dim(self):
        return self.patch.theta.shape[1]

    def tensors(self):
        """Flat name -> array mapping (shared storage, not copies)."""
        return {
            "patch.theta": self.patch.theta,
            "patch.w": self.patch.w,
            "context.theta": self.context.theta,
            "context.w": self.context.w,
        }

    def copy(self):
        return ModelParams(
            patch=ViewParams(self.patch.theta.copy(), self.patch.w.copy()),
            context=ViewParams(self.context.theta.copy(), self.context.w.copy()),
        )


def init_params(num_features, dim, seed):
    """Glorot-uniform initialization, one derived stream per tensor."""
    if num_features < 1 or dim < 1:
        raise ValueError("num_features and dim must be positive")
    tensors = []
    shapes = [(num_features, dim), (dim, dim), (num_features, dim), (dim, dim)]
    for i, shape in enumerate(shapes):
        gen = rng.generator(rng.derive_seed(seed, rng.STREAM_INIT, i))
        limit = np.sqrt(6.0 / (shape[0] + shape[1]))
        tensors.append(gen.uniform(-limit, limit, size=shape))
    return ModelParams(
        patch=ViewParams(theta=tensors[0], w=tensors[1]),
        context=ViewParams(theta=tensors[2], w=tensors[3]),
    )


def zero_gradients(params):
    return {name: np.zeros_like(arr) for name, arr in params.tensors().items()}


# ---------------------------------------------------------------------------
# Forward primitives with explicit tapes.


def project(features, theta):
    """Encoder projection X @ theta, shared by both forward paths.

    Row v of the result is both the subgraph input for member v (after
    anonymization zeroes slot 0) and the pre-activation of z for target v,
    so one projection per step serves the whole batch.
    """
    return features @ theta


def gcn_forward(adj, xw):
    """Batched graph convolution ``H = relu(adj @ xw)``.

    Parameters are (B, k, k) and (B, k, d); returns (H, pre) where ``pre``
    is the pre-activation tape the backward pass needs.
    """
    pre = np.matmul(adj, xw)
    return np.maximum(pre, 0.0), pre


def gcn_backward(adj, pre, d_h):
    """Gradient of gcn_forward w.r.t. its xw input."""
    d_pre = d_h * (pre > 0)
    return np.matmul(adj.transpose(0, 2, 1), d_pre), d_pre


def node_forward(zpre):
    """Target embedding ``z = relu(x @ theta)`` given gathered projections."""
    return np.maximum(zpre, 0.0)


def bilinear_forward(h, w, z):
    """Discriminator scores ``s = sigmoid(h @ w @ z^T)`` per row pair.

    Returns (s, logits); h and z are (B, d), w is (d, d). Contractions go
    through unoptimized einsum on purpose: BLAS picks different kernels
    for different batch heights, which perturbs rows by an ulp and would
    break the bit-exact subset-composability of scoring. einsum's
    accumulation order per output element is batch-size independent.
    """
    hw = np.einsum("bi,ij->bj", h, w)
    logits = np.einsum("bj,bj->b", hw, z)
    return sigmoid(logits), logits


def bilinear_backward(h, w, z, d_logit):
    """Gradients of the bilinear form given d(logit)."""
    d_h = d_logit[:, None] * (z @ w.T)
    d_z = d_logit[:, None] * (h @ w)
    d_w = (h * d_logit[:, None]).T @ z
    return d_h, d_z, d_w


def readout_patch(h_full):
    """Target-slot embedding: row 0 of each subgraph's H."""
    return h_full[:, 0, :]


def readout_context(h_full):
    """Mean over all k slots of each subgraph's H."""
    return h_full.mean(axis=1)


# ---------------------------------------------------------------------------
# Optimizer.


@dataclass
class AdamState:
    """First/second moment state for one ModelParams instance."""

    lr: float
    beta1: float
    beta2: float
    eps: float
    t: int
    m: dict
    v: dict


def adam_init(params, lr=0.001, beta1=0.9, beta2=0.999, eps=1e-8):
    if lr <= 0:
        raise ValueError("learning rate must be positive")
    return AdamState(
        lr=lr,
        beta1=beta1,
        beta2=beta2,
        eps=eps,
        t=0,
        m={name: np.zeros_like(a) for name, a in params.tensors().items()},
        v={name: np.zeros_like(a) for name, a in params.tensors().items()},
    )


def adam_step(params, grads, state):
    """One Adam update, in place, with bias-corrected moments."""
    tensors = params.tensors()
    if set(grads) != set(tensors):
        raise StateError("gradient keys do not match parameter tensors")
    state.t += 1
    c1 = 1.0 - state.beta1**state.t
    c2 = 1.0 - state.beta2**state.t
    for name, p in tensors.items():
        g = grads[name]
        if g.shape != p.shape:
            raise ShapeError(f"gradient for {name} has shape {g.shape}")
        m = state.m[name]
        v = state.v[name]
        m *= state.beta1
        m += (1.0 - state.beta1) * g
        v *= state.beta2
        v += (1.0 - state.beta2) * np.square(g)
        p -= state.lr * (m / c1) / (np.sqrt(v / c2) + state.eps)


# ---------------------------------------------------------------------------
# Checkpoints. Standard npz layout written with fixed zip metadata so the
# same model always produces the same bytes.


def save_checkpoint(path, params):
    arrays = {"format": np.asarray(CHECKPOINT_FORMAT)}
    arrays.update(params.tensors())
    with zipfile.ZipFile(path, "w", zipfile.ZIP_STORED) as zf:
        for name, arr in arrays.items():
            buf = io.BytesIO()
            np.lib.format.write_array(buf, np.asarray(arr), allow_pickle=False)
            info = zipfile.ZipInfo(name + ".npy", date_time=(1980, 1, 1, 0, 0, 0))
            zf.writestr(info, buf.getvalue())


def load_checkpoint(path):
    with np.load(path, allow_pickle=False) as data:
        fmt = ""
        if "format" in data and data["format"].size:
            fmt = str(data["format"].ravel()[0])
        if fmt != CHECKPOINT_FORMAT:
            raise StateError(f"{path}: not a recognized checkpoint file")
        missing = [n for n in TENSOR_NAMES if n not in data]
        if missing:
            raise StateError(f"{path}: checkpoint missing tensors {missing}")
        tensors = {n: np.asarray(data[n], dtype=np.float64) for n in TENSOR_NAMES}
    for name, arr in tensors.items():
        if not np.isfinite(arr).all():
            raise NumericError(f"{path}: tensor {name} contains non-finite values")
    return ModelParams(
        patch=ViewParams(theta=tensors["patch.theta"], w=tensors["patch.w"]),
        context=ViewParams(
            theta=tensors["context.theta"], w=tensors["context.w"]
        ),
    )
