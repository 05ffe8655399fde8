import json
import math
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from wellsep import harness
from wellsep.datagen import GenConfig, generate
from wellsep.figures import error_circles, render_worst_case
from wellsep.harness import ExperimentSpec, derive, run_experiment
from wellsep.lloyd import run
from wellsep.seeding import SeedingMethod

SVG = "{http://www.w3.org/2000/svg}"


def test_derive_is_stable_and_spread():
    assert derive(7, 3, "kmpp") == derive(7, 3, "kmpp")
    assert derive(7, 3, "kmpp") != derive(7, 3, "md")
    assert derive(7, 3, "data") != derive(8, 3, "data")
    assert 0 <= derive(2**63, 10**9, "x") < 2**64


def test_derive_no_collisions_over_a_million_runs():
    seeds = {derive(12345, i, "data") for i in range(1_000_000)}
    assert len(seeds) == 1_000_000


def test_true_center_single_run(tmp_path):
    spec = ExperimentSpec(gen=GenConfig(3, 3, 40), algorithms=("tc",), runs=1,
                          output_dir=str(tmp_path))
    rep = run_experiment(spec)
    assert rep.summary["tc"]["wrong_clusters_pct"] == {"mean": 0.0, "sd": 0.0}
    assert rep.summary["tc"]["rel_tot_within_ss"]["mean"] == 1.0
    assert (tmp_path / "worst_tc.svg").exists()


def test_reports_are_byte_identical(tmp_path):
    gen = GenConfig(4, 4, 12, 1.0, 20, 1.0)
    a = ExperimentSpec(gen=gen, runs=2, master_seed=5, output_dir=str(tmp_path / "a"))
    b = ExperimentSpec(gen=gen, runs=2, master_seed=5, output_dir=str(tmp_path / "b"))
    run_experiment(a)
    run_experiment(b)
    assert (tmp_path / "a/report.json").read_bytes() == (tmp_path / "b/report.json").read_bytes()
    assert (tmp_path / "a/table.csv").read_bytes() == (tmp_path / "b/table.csv").read_bytes()


def test_run_order_does_not_matter():
    spec = ExperimentSpec(gen=GenConfig(3, 3, 10, 1.0, 10), runs=3, master_seed=1)
    forward = [harness._run_one(spec, i)[0] for i in range(3)]
    backward = [harness._run_one(spec, i)[0] for i in reversed(range(3))][::-1]
    assert json.dumps(forward, sort_keys=True) == json.dumps(backward, sort_keys=True)


def test_all_six_algorithms_shape(tmp_path):
    spec = ExperimentSpec(gen=GenConfig(8, 8, 40, 1.0, 30), runs=1, output_dir=str(tmp_path))
    rep = run_experiment(spec).to_dict()
    assert len(rep["summary"]) == 6
    assert all(set(v) == set(harness.METRICS) for v in rep["summary"].values())
    assert len(rep["worst_case"]) == 6
    run0 = rep["runs"][0]
    assert run0["n_points"] == 2560 + 768
    assert min(r["rel_tot_within_ss"] for r in run0["results"].values()) == 1.0
    rows = (tmp_path / "table.csv").read_text().splitlines()
    assert rows[0] == "algorithm,twss_mean,twss_sd,wcp_mean,wcp_sd,rel_mean,rel_sd"
    assert len(rows) == 7
    assert len(list(tmp_path.glob("worst_*.svg"))) == 6


def test_table_roundtrip_and_zero_rendering(tmp_path):
    spec = ExperimentSpec(gen=GenConfig(3, 3, 15, 1.0, 20), runs=3, output_dir=str(tmp_path),
                          algorithms=("tc", "kmpp", "random"))
    rep = run_experiment(spec).to_dict()
    parsed = harness.read_table(tmp_path / "table.csv")
    for a, s in rep["summary"].items():
        assert parsed[a]["twss_mean"] == pytest.approx(s["tot_within_ss"]["mean"], abs=1e-9)
        assert parsed[a]["wcp_sd"] == pytest.approx(s["wrong_clusters_pct"]["sd"], abs=1e-9)
        assert parsed[a]["rel_mean"] == pytest.approx(s["rel_tot_within_ss"]["mean"], abs=1e-9)
    txt = (tmp_path / "table.txt").read_text()
    tc_line = [line for line in txt.splitlines() if line.startswith("tc-k-means")][0]
    assert "nan" not in txt.lower()
    assert tc_line.split()[3:5] == ["0.00", "0.00"]


def test_worst_case_is_the_maximum(tmp_path):
    spec = ExperimentSpec(gen=GenConfig(5, 5, 12), runs=5, algorithms=("random", "tc"),
                          master_seed=3, output_dir=str(tmp_path))
    rep = run_experiment(spec).to_dict()
    scores = [r["results"]["random"]["wrong_clusters_pct"] for r in rep["runs"]]
    assert rep["worst_case"]["random"]["wrong_clusters_pct"] == max(scores)
    assert rep["worst_case"]["random"]["run"] == scores.index(max(scores))


def test_rerender_rebuilds_artifacts(tmp_path):
    spec = ExperimentSpec(gen=GenConfig(3, 3, 10), runs=2, algorithms=("kmpp",),
                          output_dir=str(tmp_path / "cfg"))
    run_experiment(spec)
    (tmp_path / "cfg/table.csv").unlink()
    (tmp_path / "cfg/worst_kmpp.svg").unlink()
    harness.rerender(tmp_path)
    assert (tmp_path / "cfg/table.csv").exists()
    assert (tmp_path / "cfg/worst_kmpp.svg").exists()


def test_spec_dict_roundtrip():
    spec = ExperimentSpec(gen=GenConfig(6, 6, 24, 2.0, 10, 0.5), runs=4, master_seed=9, b=7,
                          algorithms=("kmppb", "md"))
    back = ExperimentSpec.from_dict(json.loads(json.dumps(spec.to_dict())))
    assert back.to_dict() == spec.to_dict()


def test_reference_sweep_configs():
    specs = harness.reference_sweep()
    assert len(specs) == 19
    assert len({s.name() for s in specs}) == 19


# --- figures ------------------------------------------------------------------

def circles_in(path):
    root = ET.parse(path).getroot()
    return [c for c in root.iter(SVG + "circle") if c.get("class") == "error-circle"]


def test_perfect_clustering_has_no_circles(tmp_path):
    ld = generate(GenConfig(2, 2, 20, 1.0, 20, rng_seed=1))
    render_worst_case(ld, np.where(ld.labels < 0, 0, ld.labels), tmp_path / "ok.svg")
    assert circles_in(tmp_path / "ok.svg") == []


def test_split_and_merge_circles(tmp_path):
    ld = generate(GenConfig(1, 3, 40, 1.0, rng_seed=4))
    a, b, c = ld.centers
    res = run(ld.points, [a - [0.3, 0], a + [0.3, 0], (b + c) / 2])
    circles = error_circles(ld, res.clustering.assignment)
    assert len(circles) == 3
    split = [(g, r) for _, g, r in circles if math.dist(g, a) < 1.0]
    merged = [(g, r) for _, g, r in circles if math.dist(g, a) >= 1.0]
    assert len(split) == 2 and len(merged) == 1
    (g1, r1), (g2, r2) = split
    assert math.dist(g1, g2) < r1 + r2  # overlapping circles mark the split
    g, r = merged[0]
    for centre in (b, c):  # the merged circle reaches into both intended balls
        assert math.dist(g, centre) - 1.0 <= r
    render_worst_case(ld, res.clustering, tmp_path / "bad.svg", title="split & merge")
    assert len(circles_in(tmp_path / "bad.svg")) == 3


def test_parallel_workers_match_sequential():
    spec = ExperimentSpec(gen=GenConfig(3, 3, 10, 1.0, 20), runs=3, master_seed=2)
    seq = run_experiment(spec).to_json()
    par = run_experiment(spec, workers=2).to_json()
    assert seq == par
