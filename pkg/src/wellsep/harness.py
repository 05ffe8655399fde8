"""Repeated-run experiments: generate datasets, run every seeding strategy on
each one, summarise, and keep the worst cases."""
from __future__ import annotations

import csv
import hashlib
import json
import logging
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path

import numpy as np

from . import datagen
from .core import Clustering, UsageError
from .datagen import GenConfig, LabeledDataset
from .evaluation import rel_tot_within_ss, summarize, tot_within_ss, wrong_clusters_pct
from .figures import render_worst_case
from .lloyd import InvariantError, LloydConfig, run
from .seeding import ALL_METHODS, DEFAULT_BOOST, SeedingMethod, seed
from .separation import verify

log = logging.getLogger(__name__)

METRICS = ("tot_within_ss", "wrong_clusters_pct", "rel_tot_within_ss")
TABLE_HEADER = ["algorithm", "twss_mean", "twss_sd", "wcp_mean", "wcp_sd", "rel_mean", "rel_sd"]
REPORT_VERSION = 1


def derive(master_seed: int, run_index: int, tag: str = "data") -> int:
    """64-bit seed from BLAKE2b over ``"<master_seed>:<run_index>:<tag>"``."""
    msg = f"{int(master_seed)}:{int(run_index)}:{tag}".encode()
    return int.from_bytes(hashlib.blake2b(msg, digest_size=8).digest(), "little")


@dataclass(frozen=True)
class ExperimentSpec:
    gen: GenConfig = field(default_factory=GenConfig)
    algorithms: tuple = tuple(ALL_METHODS)
    runs: int = 30
    master_seed: int = 0
    lloyd: LloydConfig = field(default_factory=LloydConfig)
    b: int = DEFAULT_BOOST
    output_dir: str | None = None

    def __post_init__(self):
        if self.runs < 1:
            raise UsageError("runs must be >= 1")
        if not self.algorithms:
            raise UsageError("algorithm list is empty")
        object.__setattr__(self, "algorithms", tuple(SeedingMethod(a) for a in self.algorithms))

    def name(self) -> str:
        g = self.gen
        return (f"g{g.grid_rows}x{g.grid_cols}-n{g.cluster_size}-noise{g.noise_pct:g}"
                f"-disp{g.displacement_max:g}-r{g.radius:g}")

    def to_dict(self) -> dict:
        gen = self.gen.to_dict()
        gen.pop("rng_seed")
        return {
            "gen": gen,
            "algorithms": [a.value for a in self.algorithms],
            "runs": self.runs,
            "master_seed": self.master_seed,
            "lloyd": asdict(self.lloyd),
            "b": self.b,
        }

    @classmethod
    def from_dict(cls, d: dict, output_dir=None) -> "ExperimentSpec":
        gen = dict(d.get("gen", {}))
        gen.setdefault("rng_seed", 0)
        return cls(
            gen=GenConfig(**gen),
            algorithms=tuple(d.get("algorithms", [a.value for a in ALL_METHODS])),
            runs=int(d.get("runs", 30)),
            master_seed=int(d.get("master_seed", 0)),
            lloyd=LloydConfig(**d.get("lloyd", {})),
            b=int(d.get("b", DEFAULT_BOOST)),
            output_dir=output_dir if output_dir is not None else d.get("output_dir"),
        )


def reference_sweep(runs: int = 30, master_seed: int = 0, radius: float = 1.0) -> list:
    """The one-factor-at-a-time configurations of the original experiments."""
    base = GenConfig(8, 8, 40, radius, 30.0, 0.0)
    gens = [replace(base, grid_rows=s, grid_cols=s, noise_pct=0.0) for s in range(5, 11)]
    gens += [replace(base, noise_pct=float(p)) for p in (10, 20, 30, 40, 50)]
    gens += [replace(base, displacement_max=d) for d in (0.5, 1.0, 2.0, 4.0)]
    gens += [replace(base, displacement_max=1.0, cluster_size=n) for n in (12, 24, 48, 96)]
    return [ExperimentSpec(gen=g, runs=runs, master_seed=master_seed) for g in gens]


# --- a single run -------------------------------------------------------------

def _run_one(spec: ExperimentSpec, i: int) -> tuple[dict, dict]:
    """All algorithms on dataset ``i``.  Returns (record, worst-case payload)."""
    gen = replace(spec.gen, rng_seed=derive(spec.master_seed, i, "data"))
    ld = datagen.generate(gen)
    sep = verify(ld)
    if not sep.nominal_satisfied:
        raise InvariantError(f"run {i}: generated dataset violates the gap condition: {sep.to_dict()}")
    results, assignments, timings = {}, {}, {}
    for algo in spec.algorithms:
        rng_seed = derive(spec.master_seed, i, algo.value)
        t0 = time.perf_counter()
        s = seed(algo, labeled=ld, rng=np.random.default_rng(rng_seed), b=spec.b)
        res = run(ld.points, s, spec.lloyd)
        timings[algo.value] = time.perf_counter() - t0
        if not res.monotone():
            raise InvariantError(f"run {i}, {algo.value}: cost increased: {res.cost_trace}")
        if np.any(res.clustering.sizes() == 0) or res.clustering.k != ld.k:
            raise InvariantError(f"run {i}, {algo.value}: result lacks {ld.k} non-empty clusters")
        if not res.converged:
            log.warning("run %d, %s: no convergence within %d iterations", i, algo.value,
                        spec.lloyd.max_iters)
        results[algo.value] = {
            "tot_within_ss": tot_within_ss(ld.points, res.clustering),
            "wrong_clusters_pct": wrong_clusters_pct(ld, res.clustering),
            "iterations": res.iterations,
            "converged": res.converged,
            "reseeds": res.reseeds,
            "cost_trace": res.cost_trace,
            "seed_rng": rng_seed if algo.uses_rng else None,
            "seed_indices": [None if j is None else int(j) for j in s.indices],
            "seed_centroids": s.centroids.tolist(),
        }
        assignments[algo.value] = res.clustering.assignment
    rel = rel_tot_within_ss({a: r["tot_within_ss"] for a, r in results.items()})
    for a, r in results.items():
        r["rel_tot_within_ss"] = rel[a]
    record = {
        "run": i,
        "dataset_seed": gen.rng_seed,
        "n_points": len(ld),
        "separation": sep.to_dict(),
        "results": results,
    }
    return record, {"assignments": assignments, "timings": timings}


def _run_task(args):
    return _run_one(*args)


# --- experiment ---------------------------------------------------------------

@dataclass
class ExperimentReport:
    spec: ExperimentSpec
    runs: list
    summary: dict
    worst_case: dict
    timings: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "version": REPORT_VERSION,
            "name": self.spec.name(),
            "spec": self.spec.to_dict(),
            "summary": self.summary,
            "worst_case": self.worst_case,
            "runs": self.runs,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":")) + "\n"


def run_experiment(spec: ExperimentSpec, workers: int = 1, save_datasets: bool = False,
                   figures: bool = True) -> ExperimentReport:
    """Run ``spec.runs`` datasets through every algorithm.

    Seeds are derived up front from ``master_seed``, so the report does not
    depend on scheduling.  Artifacts go to ``spec.output_dir`` when set.
    """
    tasks = [(spec, i) for i in range(spec.runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            outputs = list(pool.map(_run_task, tasks))
    else:
        outputs = [_run_task(t) for t in tasks]

    records = [o[0] for o in outputs]
    algos = [a.value for a in spec.algorithms]
    summary = {}
    for a in algos:
        summary[a] = {}
        for m in METRICS:
            row = summarize(r["results"][a][m] for r in records)
            summary[a][m] = {"mean": row.mean, "sd": row.sd}

    worst = {}
    for a in algos:
        scores = [r["results"][a]["wrong_clusters_pct"] for r in records]
        i = int(np.argmax(scores))
        worst[a] = {
            "run": i,
            "wrong_clusters_pct": scores[i],
            "dataset_seed": records[i]["dataset_seed"],
            "assignment": outputs[i][1]["assignments"][a].tolist(),
        }
    timings = {a: [o[1]["timings"][a] for o in outputs] for a in algos}
    report = ExperimentReport(spec, records, summary, worst, timings)

    if spec.output_dir is not None:
        write_artifacts(report, Path(spec.output_dir), save_datasets=save_datasets, figures=figures)
    return report


def dataset_for_run(spec: ExperimentSpec, i: int) -> LabeledDataset:
    return datagen.generate(replace(spec.gen, rng_seed=derive(spec.master_seed, i, "data")))


def write_artifacts(report: ExperimentReport, out: Path, save_datasets: bool = False,
                    figures: bool = True) -> None:
    try:
        out.mkdir(parents=True, exist_ok=True)
        (out / "report.json").write_text(report.to_json(), encoding="utf-8")
        # wall-clock times vary between executions, so they stay out of report.json
        (out / "timings.json").write_text(json.dumps(report.timings, indent=1), encoding="utf-8")
        emit_table(report.to_dict(), out)
        wanted = set(range(report.spec.runs)) if save_datasets else {
            w["run"] for w in report.worst_case.values()}
        for i in sorted(wanted):
            datagen.write_csv(dataset_for_run(report.spec, i), out / "datasets" / f"run_{i:03d}.csv")
        if figures:
            render_figures(report.to_dict(), out)
    except PermissionError as exc:
        raise OSError(f"cannot write results to {out}: {exc}") from exc


# --- tables and figures -------------------------------------------------------

def table_rows(report: dict) -> list:
    rows = []
    for a, s in report["summary"].items():
        rows.append([a,
                     s["tot_within_ss"]["mean"], s["tot_within_ss"]["sd"],
                     s["wrong_clusters_pct"]["mean"], s["wrong_clusters_pct"]["sd"],
                     s["rel_tot_within_ss"]["mean"], s["rel_tot_within_ss"]["sd"]])
    return rows


def emit_table(report: dict, out_dir) -> tuple[Path, Path]:
    """Write ``table.csv`` (full precision) and ``table.txt`` (for reading)."""
    out_dir = Path(out_dir)
    rows = table_rows(report)
    csv_path = out_dir / "table.csv"
    with csv_path.open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh)
        w.writerow(TABLE_HEADER)
        for r in rows:
            w.writerow([r[0]] + [repr(float(v)) for v in r[1:]])
    txt_path = out_dir / "table.txt"
    txt_path.write_text(format_table(report), encoding="utf-8")
    return csv_path, txt_path


def format_table(report: dict) -> str:
    head = f"{'algorithm':<14}{'totWithinSS':>14}{'SD':>12}{'wrongClustersPerc':>19}{'SD':>8}" \
           f"{'RelTotWithinSS':>16}{'SD':>8}"
    lines = [report.get("name", ""), head, "-" * len(head)]
    for r in table_rows(report):
        label = SeedingMethod(r[0]).label
        lines.append(f"{label:<14}{r[1]:>14.2f}{r[2]:>12.2f}{r[3]:>19.2f}{r[4]:>8.2f}"
                     f"{r[5]:>16.2f}{r[6]:>8.2f}")
    return "\n".join(lines) + "\n"


def read_table(path) -> dict:
    out = {}
    with Path(path).open(newline="", encoding="utf-8") as fh:
        for row in csv.DictReader(fh):
            out[row["algorithm"]] = {k: float(v) for k, v in row.items() if k != "algorithm"}
    return out


def render_figures(report: dict, out_dir) -> list:
    """One ``worst_<algo>.svg`` per algorithm from the persisted worst cases."""
    out_dir = Path(out_dir)
    paths = []
    for a, w in report["worst_case"].items():
        ld = datagen.read_csv(out_dir / "datasets" / f"run_{w['run']:03d}.csv")
        title = (f"{SeedingMethod(a).label}  {report.get('name', '')}  run {w['run']}  "
                 f"wrongClustersPerc={w['wrong_clusters_pct']:.2f}")
        paths.append(render_worst_case(ld, np.asarray(w["assignment"]), out_dir / f"worst_{a}.svg",
                                       title=title))
    return paths


def rerender(in_dir) -> list:
    """Rebuild tables and figures for every report.json under ``in_dir``."""
    in_dir = Path(in_dir)
    found = sorted(in_dir.rglob("report.json"))
    if not found:
        raise OSError(f"no report.json under {in_dir}")
    for path in found:
        report = json.loads(path.read_text(encoding="utf-8"))
        emit_table(report, path.parent)
        render_figures(report, path.parent)
    return found


def run_sweep(specs, out_dir, workers: int = 1, save_datasets: bool = False,
              figures: bool = True) -> dict:
    """Run several configurations, one subdirectory each."""
    out_dir = Path(out_dir)
    reports = {}
    for spec in specs:
        spec = replace(spec, output_dir=str(out_dir / spec.name()))
        log.info("running %s", spec.name())
        reports[spec.name()] = run_experiment(spec, workers=workers, save_datasets=save_datasets,
                                              figures=figures)
    return reports


def clustering_of(report: dict, algo: str, ld: LabeledDataset) -> Clustering:
    """Worst-case clustering of ``algo`` rebuilt against its dataset."""
    assignment = np.asarray(report["worst_case"][algo]["assignment"])
    return Clustering.from_assignment(ld.points, assignment, ld.k)
