"""Deterministic randomness plumbing.

One master seed drives the whole pipeline. Every consumer of randomness
derives its own stream seed with :func:`derive_seed` from the master seed
plus a named stream tag and any identifying indices (epoch, node id, round,
view). Two properties follow:

* runs with the same master seed are bit-identical, and
* streams are insensitive to execution order, so scoring node 7 in round 3
  draws the same numbers whether the run covers all nodes or only node 7.

The mixer is the SplitMix64 finalizer. The walk kernels re-implement the
same sequence over C ``uint64`` arithmetic; :mod:`anemone.rng` keeps the
reference semantics on masked Python integers and a vectorized numpy
variant for deriving many per-node seeds at once. All three must agree
bit-for-bit (covered by tests).
"""

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
_MIX1 = 0xBF58476D1CE4E5B9
_MIX2 = 0x94D049BB133111EB

# Stream tags. Values are part of the on-disk determinism contract: changing
# one changes every seed derived through it.
STREAM_INJECT = 1
STREAM_INIT = 2
STREAM_SHUFFLE = 3
STREAM_TRAIN_VIEW = 4
STREAM_SCORE_VIEW = 5
STREAM_SCORE_PARTNER = 6
STREAM_KSHOT = 7
STREAM_SYNTH = 8
STREAM_RUN = 9

# View indices used as derivation parts.
VIEW_PATCH = 0
VIEW_CONTEXT = 1


def mix64(z):
    """SplitMix64 finalizer on a 64-bit integer."""
    z &= MASK64
    z = ((z ^ (z >> 30)) * _MIX1) & MASK64
    z = ((z ^ (z >> 27)) * _MIX2) & MASK64
    return z ^ (z >> 31)


def derive_seed(master, *parts):
    """Derive a 64-bit stream seed from a master seed and integer parts.

    The derivation folds each part in sequence, so ``derive_seed(m, a, b)``
    and ``derive_seed(m, b, a)`` differ. Parts must be non-negative ints
    (stream tags, epoch/node/round indices).
    """
    s = mix64((int(master) & MASK64) ^ GOLDEN)
    for p in parts:
        s = mix64((s + GOLDEN) ^ (int(p) & MASK64))
    return s


def derive_seed_array(master, *parts):
    """Vectorized :func:`derive_seed`.

    Each part is a scalar int or an integer ndarray; array parts broadcast
    against each other. Returns a uint64 ndarray of the broadcast shape,
    elementwise identical to the scalar derivation.
    """
    with np.errstate(over="ignore"):
        s = np.uint64(mix64((int(master) & MASK64) ^ GOLDEN))
        golden = np.uint64(GOLDEN)
        for p in parts:
            p = np.asarray(p).astype(np.uint64)
            s = _mix64_np((s + golden) ^ p)
        return s


def _mix64_np(z):
    z = (z ^ (z >> np.uint64(30))) * np.uint64(_MIX1)
    z = (z ^ (z >> np.uint64(27))) * np.uint64(_MIX2)
    return z ^ (z >> np.uint64(31))


class SplitMix64:
    """Reference SplitMix64 sequence on masked Python integers.

    The compiled walk kernel runs the identical recurrence on C uint64;
    this class is the ground truth the kernels are tested against, and the
    generator the pure-Python sampling lane uses directly.
    """

    __slots__ = ("state",)

    def __init__(self, seed):
        self.state = int(seed) & MASK64

    def next_u64(self):
        self.state = (self.state + GOLDEN) & MASK64
        return mix64(self.state)

    def uniform01(self):
        """Uniform double in [0, 1) with 53 random bits."""
        return (self.next_u64() >> 11) * 2.0**-53

    def randint(self, n):
        """Uniform integer in [0, n) via 128-bit multiply-shift."""
        if n <= 0:
            raise ValueError("randint bound must be positive")
        return (self.next_u64() * n) >> 64


def generator(seed):
    """numpy Generator seeded from a derived 64-bit seed."""
    return np.random.Generator(np.random.PCG64(int(seed) & MASK64))
