#!/usr/bin/env python3
"""Tour of the path seminorms and the embedding inequalities.

A Brownian-like path (Gaussian increments on a depth-10 grid) is pushed
through all four seminorms, then the embedding report checks the GRR
Holder bound and the Holder-into-Sobolev bound on it. A tiny path at
the end has its p-variation verified against brute-force enumeration of
every dissection, the same oracle the tests use.
"""

import itertools

import numpy as np

from pathlift import (
    DyadicPath,
    NormSpec,
    besov_seminorm,
    embedding_report,
    frac_sobolev_seminorm,
    grr_constant,
    holder_seminorm,
    p_variation,
)


def brownian_like(seed, depth):
    g = np.random.default_rng(seed)
    k = 2 ** depth
    steps = g.standard_normal(k) * np.sqrt(1.0 / k)
    return DyadicPath(depth, np.concatenate([[0.0], np.cumsum(steps)]))


def main():
    path = brownian_like(3, 10)

    print("seminorms of one Gaussian-increment path (depth 10):")
    print(f"  holder gamma=0.4         {holder_seminorm(path, 0.4):.6f}")
    print(f"  2-variation              {p_variation(path, 2.0):.6f}")
    print(f"  besov alpha=0.3, p=4     {besov_seminorm(path, 0.3, 4.0):.6f}")
    print(f"  sobolev alpha=0.3, p=4   {frac_sobolev_seminorm(path, 0.3, 4.0):.6f}")

    for alpha, p in ((0.3, 4.0), (0.6, 2.0)):
        rep = embedding_report(path, alpha=alpha, p=p)
        print()
        print(f"embeddings at alpha={alpha}, p={p} "
              f"(cbar = {grr_constant(alpha, p):.4f}):")
        print(f"  {rep.holder_lhs:10.6f} <= {rep.cbar_rhs:10.6f}   "
              f"(alpha - 1/p)-holder vs GRR")
        print(f"  {rep.pvar_lhs:10.6f} <= {rep.pvar_rhs:10.6f}   "
              f"(1/alpha)-variation vs GRR")
        print(f"  {rep.w_energy:10.6f} <= {rep.holder_to_ws_bound:10.6f}   "
              f"W-energy vs holder bound")
        print(f"  violations: {rep.violations or 'none'}")

    # spec.seminorm dispatches by kind; same numbers, one entry point
    spec = NormSpec(kind="pvar", p=3.0)
    tiny = DyadicPath(2, np.array([0.0, 1.0, -0.5, 0.75, 0.25]))
    by_hand = max(
        sum(
            abs(tiny.values[b, 0] - tiny.values[a, 0]) ** 3
            for a, b in zip(chain, chain[1:])
        )
        for r in range(2, 6)
        for chain in itertools.combinations(range(5), r)
        if chain[0] == 0 and chain[-1] == 4
    ) ** (1.0 / 3.0)
    print()
    print(f"3-variation of a 5-point path: {spec.seminorm(tiny):.12f} "
          f"(enumeration: {by_hand:.12f})")


if __name__ == "__main__":
    main()
