"""Command line entry point: ``wellsep generate|run|bench|report``."""
from __future__ import annotations

import argparse
import json
import logging
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import datagen, harness
from .core import UsageError
from .datagen import GenConfig
from .evaluation import tot_within_ss, wrong_clusters_pct
from .lloyd import InvariantError, LloydConfig, run
from .seeding import DEFAULT_BOOST, SeedingMethod, seed

EXIT_OK, EXIT_USAGE, EXIT_IO, EXIT_INVARIANT = 0, 2, 3, 4
ALGO_CHOICES = [m.value for m in SeedingMethod]


def _add_gen_args(p, required: bool = True):
    p.add_argument("--rows", type=int, required=required, default=None if required else 8)
    p.add_argument("--cols", type=int, required=required, default=None if required else 8)
    p.add_argument("--size", type=int, default=40, help="points per cluster")
    p.add_argument("--radius", type=float, default=1.0)
    p.add_argument("--noise-pct", type=float, default=0.0)
    p.add_argument("--displacement", type=float, default=0.0, help="max shift in radii")
    p.add_argument("--seed", type=int, default=0)


def _gen_config(a) -> GenConfig:
    return GenConfig(a.rows, a.cols, a.size, a.radius, a.noise_pct, a.displacement, a.seed)


def cmd_generate(a) -> int:
    ld = datagen.generate(_gen_config(a))
    datagen.write_csv(ld, a.out)
    print(f"wrote {len(ld)} points ({int(ld.is_noise.sum())} noise) to {a.out}")
    return EXIT_OK


def cmd_run(a) -> int:
    ld = datagen.read_csv(a.data)
    method = SeedingMethod(a.algo)
    k = a.k if a.k is not None else ld.k
    if method is SeedingMethod.TRUE_CENTER and k != ld.k:
        raise UsageError(f"tc seeding yields {ld.k} seeds, --k {k} requested")
    s = seed(method, points=ld.points, k=k, rng=np.random.default_rng(a.seed), b=a.b, labeled=ld)
    res = run(ld.points, s, LloydConfig(max_iters=a.max_iters))
    out = {
        "algorithm": method.value,
        "k": k,
        "seed": a.seed,
        "b": a.b,
        "seeds": s.to_dict(),
        "result": res.to_dict(),
        "tot_within_ss": tot_within_ss(ld.points, res.clustering),
    }
    if k == ld.k and ld.k > 0:
        out["wrong_clusters_pct"] = wrong_clusters_pct(ld, res.clustering)
    Path(a.out).parent.mkdir(parents=True, exist_ok=True)
    Path(a.out).write_text(json.dumps(out, sort_keys=True, separators=(",", ":")) + "\n", encoding="utf-8")
    print(f"{method.label}: cost {out['tot_within_ss']:.4f}, {res.iterations} iterations"
          + (f", wrongClustersPerc {out['wrong_clusters_pct']:.2f}" if "wrong_clusters_pct" in out else ""))
    return EXIT_OK


def cmd_bench(a) -> int:
    if a.spec:
        raw = json.loads(Path(a.spec).read_text(encoding="utf-8"))
        if "configs" in raw:
            specs = [harness.ExperimentSpec.from_dict({**raw, "gen": g}) for g in raw["configs"]]
        else:
            specs = [harness.ExperimentSpec.from_dict(raw)]
    elif a.reference_sweep:
        specs = harness.reference_sweep(runs=a.runs, master_seed=a.seed, radius=a.radius)
    else:
        if a.rows is None or a.cols is None:
            raise UsageError("bench needs --spec, --reference-sweep, or --rows/--cols")
        gen = GenConfig(a.rows, a.cols, a.size, a.radius, a.noise_pct, a.displacement)
        specs = [harness.ExperimentSpec(gen=gen, runs=a.runs, master_seed=a.seed,
                                        lloyd=LloydConfig(max_iters=a.max_iters), b=a.b,
                                        algorithms=tuple(a.algos or ALGO_CHOICES))]
    if len(specs) == 1 and not a.reference_sweep:
        spec = replace(specs[0], output_dir=a.out_dir)
        report = harness.run_experiment(spec, workers=a.workers, save_datasets=a.save_datasets)
        print(harness.format_table(report.to_dict()), end="")
    else:
        reports = harness.run_sweep(specs, a.out_dir, workers=a.workers, save_datasets=a.save_datasets)
        for r in reports.values():
            print(harness.format_table(r.to_dict()))
    return EXIT_OK


def cmd_report(a) -> int:
    for path in harness.rerender(a.in_dir):
        print(harness.format_table(json.loads(path.read_text(encoding="utf-8"))))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="wellsep", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("generate", help="write a synthetic dataset CSV")
    _add_gen_args(p)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="cluster one dataset with one algorithm")
    p.add_argument("--data", required=True)
    p.add_argument("--algo", required=True, choices=ALGO_CHOICES)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--b", type=int, default=DEFAULT_BOOST)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("bench", help="repeated-run experiment")
    p.add_argument("--spec", help="JSON experiment spec")
    p.add_argument("--reference-sweep", action="store_true", help="run every default configuration")
    _add_gen_args(p, required=False)
    p.set_defaults(rows=None, cols=None)
    p.add_argument("--runs", type=int, default=30)
    p.add_argument("--algos", nargs="+", choices=ALGO_CHOICES)
    p.add_argument("--b", type=int, default=DEFAULT_BOOST)
    p.add_argument("--max-iters", type=int, default=100)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--save-datasets", action="store_true")
    p.add_argument("--out-dir", required=True)
    p.set_defaults(func=cmd_bench)

    p = sub.add_parser("report", help="re-render tables and figures from saved results")
    p.add_argument("--in", dest="in_dir", required=True)
    p.set_defaults(func=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    a = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if a.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return a.func(a)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InvariantError as exc:
        print(f"internal invariant violated: {exc}", file=sys.stderr)
        return EXIT_INVARIANT
    except OSError as exc:
        print(f"I/O error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
