"""Benchmark the compiled kernel lane against the pure-Python fallback.

``python -m anemone.bench`` generates a synthetic graph, runs the same
batch of random walks and adjacency builds through both lanes, verifies
the outputs are identical, and reports timings. Useful for checking that
the extension built and what it buys on this machine.
"""

import argparse
import time

import numpy as np

from . import kernels, rng, sampling
from .synthetic import clustered_graph


def _best_of(fn, repeat):
    best = float("inf")
    result = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        result = fn()
        best = min(best, time.perf_counter() - t0)
    return best, result


def main(argv=None):
    ap = argparse.ArgumentParser(
        prog="python -m anemone.bench",
        description="Time the sampling kernels in both lanes.",
    )
    ap.add_argument("--nodes", type=int, default=4000)
    ap.add_argument("--communities", type=int, default=40)
    ap.add_argument("--walks", type=int, default=20000)
    ap.add_argument("--k", type=int, default=4)
    ap.add_argument("--restart-prob", type=float, default=0.5)
    ap.add_argument("--seed", type=int, default=1)
    ap.add_argument("--repeat", type=int, default=3)
    args = ap.parse_args(argv)

    graph = clustered_graph(args.nodes, args.communities, 4, args.seed)
    adj = graph.adjacency
    gen = rng.generator(rng.derive_seed(args.seed, rng.STREAM_SCORE_VIEW))
    targets = gen.integers(0, args.nodes, size=args.walks).astype(np.int64)
    seeds = sampling.view_seeds(
        args.seed, rng.STREAM_SCORE_VIEW, 0, rng.VIEW_PATCH, targets
    )
    budget = sampling.default_budget(args.k)

    lanes = ["pure"]
    try:
        kernels.get_impl("compiled")
        lanes.insert(0, "compiled")
    except ImportError:
        print("compiled lane unavailable (extension not built); pure lane only")

    print(
        f"graph: {args.nodes} nodes, {adj.num_edges} edges; "
        f"{args.walks} walks, k={args.k}, best of {args.repeat}"
    )
    results = {}
    times = {}
    for lane in lanes:
        impl = kernels.get_impl(lane)
        t_walk, (nodes, n_real) = _best_of(
            lambda: kernels.rwr_batch(
                adj.indptr, adj.indices, targets, args.k,
                args.restart_prob, budget, seeds, impl=impl,
            ),
            args.repeat,
        )
        t_adj, norm = _best_of(
            lambda: kernels.induced_norm_adj(
                adj.indptr, adj.indices, nodes, n_real, impl=impl
            ),
            args.repeat,
        )
        results[lane] = (nodes, n_real, norm)
        times[lane] = (t_walk, t_adj)
        print(
            f"{lane:>9s}: walks {t_walk * 1e3:9.2f} ms "
            f"({args.walks / t_walk:12.0f}/s)   "
            f"adjacency {t_adj * 1e3:9.2f} ms"
        )

    if len(lanes) == 2:
        a, b = results["compiled"], results["pure"]
        identical = all(np.array_equal(x, y) for x, y in zip(a, b))
        print(f"outputs identical across lanes: {identical}")
        tw_c, ta_c = times["compiled"]
        tw_p, ta_p = times["pure"]
        print(
            f"speedup: walks {tw_p / tw_c:.1f}x, adjacency {ta_p / ta_c:.1f}x"
        )
        if not identical:
            return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
