"""Check by exhaustive enumeration whether the intended partition of small
generated instances is the unique k-means optimum.

Besides the equal-size setting the gap bound assumes, ``--unequal`` draws a
different size per cluster to probe whether the conclusion still holds.

    python scripts/theorem_probe.py --instances 50 --gap-scale 1.0 [--unequal]
"""
import argparse

import numpy as np

from wellsep.datagen import NOISE, LabeledDataset, sample_cluster_point
from wellsep.separation import min_gap_threshold, partition_costs


def instance(rng, sizes, radius, gap):
    k = len(sizes)
    spacing = 2 * radius + gap
    centers = np.column_stack((np.arange(k) * spacing, np.zeros(k)))
    pts = np.vstack([sample_cluster_point(c, radius, rng, size=n) for c, n in zip(centers, sizes)])
    labels = np.repeat(np.arange(k), sizes)
    return LabeledDataset(pts, labels, centers)


def canonical(a):
    seen = {}
    return tuple(seen.setdefault(x, len(seen)) for x in a)


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--instances", type=int, default=50)
    p.add_argument("--k", type=int, default=3)
    p.add_argument("--n", type=int, default=4)
    p.add_argument("--gap-scale", type=float, default=1.0,
                   help="multiple of the sufficient gap to place clusters at")
    p.add_argument("--unequal", action="store_true")
    p.add_argument("--seed", type=int, default=0)
    args = p.parse_args()

    rng = np.random.default_rng(args.seed)
    gap = args.gap_scale * min_gap_threshold(args.k, 1.0, 2)
    hits = 0
    for _ in range(args.instances):
        if args.unequal:
            # same total point count, random split
            sizes = rng.multinomial(args.k * (args.n - 1), np.full(args.k, 1 / args.k)) + 1
        else:
            sizes = np.full(args.k, args.n)
        ld = instance(rng, sizes, 1.0, gap)
        rgs, costs = partition_costs(ld.points, args.k)
        best = rgs[int(np.argmin(costs))]
        hits += canonical(best.tolist()) == canonical(ld.labels[ld.labels != NOISE].tolist())
    print(f"gap {gap:.3f} (x{args.gap_scale}), sizes {'unequal' if args.unequal else 'equal'}: "
          f"intended partition optimal in {hits}/{args.instances} instances")


if __name__ == "__main__":
    main()
