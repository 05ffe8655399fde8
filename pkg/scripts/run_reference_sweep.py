"""Run every default configuration (30 datasets each) and print the tables.

    python scripts/run_reference_sweep.py --out-dir results/ [--runs 30] [--seed 0]
"""
import argparse
import logging

from wellsep.harness import format_table, reference_sweep, run_sweep


def main():
    p = argparse.ArgumentParser()
    p.add_argument("--out-dir", default="results")
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--workers", type=int, default=1)
    args = p.parse_args()
    logging.basicConfig(level=logging.INFO, format="%(message)s")

    specs = reference_sweep(runs=args.runs, master_seed=args.seed, radius=args.radius)
    reports = run_sweep(specs, args.out_dir, workers=args.workers)
    for rep in reports.values():
        print(format_table(rep.to_dict()))


if __name__ == "__main__":
    main()
