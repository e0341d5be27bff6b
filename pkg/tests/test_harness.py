"""Run specs, truth resolution, JSONL/CSV reporting, and the CLI."""

import csv
import json
import subprocess
import sys

import pytest

from butterfly import (
    RunSpec,
    compare,
    complete_bipartite,
    erdos_renyi,
    hub_adversary,
    run,
)
from butterfly.cli import main
from butterfly.harness import (
    dataset_name,
    load_compare_config,
    parse_graph_source,
    resolve_truth,
)

from helpers import two_butterfly_graph, two_butterfly_konect_text

RECORD_FIELDS = {
    "algorithm", "dataset", "seed", "estimate", "truth", "rel_error",
    "q_degree", "q_neighbor", "q_pair", "q_edge_sample", "q_total",
    "wall_millis", "rounds_used", "flags",
}


def konect_file(tmp_path):
    path = tmp_path / "sample.txt"
    path.write_text(two_butterfly_konect_text())
    return path


def strip_wall(record):
    return {k: v for k, v in record.items() if k != "wall_millis"}


def test_parse_generator_specs():
    assert parse_graph_source("kab:4,5") == complete_bipartite(4, 5)
    assert parse_graph_source("er:10,12,0.3,7") == erdos_renyi(10, 12, 0.3, 7)
    assert parse_graph_source("hub:3,4") == hub_adversary(3, 4)
    for bad in ("kab:4", "kab:a,b", "er:5,5,0.1", "er:5,5,x,1", "hub:1,2,3"):
        with pytest.raises(ValueError):
            parse_graph_source(bad)


def test_parse_file_sources(tmp_path):
    from butterfly import load_konect, save_cache

    konect = konect_file(tmp_path)
    assert parse_graph_source(str(konect)) == load_konect(konect)
    g = two_butterfly_graph()
    cache = tmp_path / "sample.bfg"
    save_cache(g, cache)
    assert parse_graph_source(str(cache)) == g


def test_dataset_names(tmp_path):
    assert dataset_name("er:5,5,0.1,0") == "er:5,5,0.1,0"
    assert dataset_name(str(tmp_path / "wiki.edges.txt")) == "wiki.edges"


def test_resolve_truth_paths(tmp_path, monkeypatch):
    g = two_butterfly_graph()
    assert resolve_truth(g, "sample") == 2
    assert resolve_truth(g, "sample", cutoff=0) is None
    (tmp_path / "sample.truth").write_text("11\n")
    assert resolve_truth(g, "sample", truth_dir=str(tmp_path)) == 11
    monkeypatch.setenv("BUTTERFLY_TRUTH_DIR", str(tmp_path))
    assert resolve_truth(g, "sample") == 11
    # generator names are sanitized before the sidecar lookup
    (tmp_path / "er_4_4_0.5_1.truth").write_text("3")
    assert resolve_truth(g, "er:4,4,0.5,1", truth_dir=str(tmp_path)) == 3


def test_run_spec_validation():
    with pytest.raises(ValueError):
        RunSpec(algorithm="magic", source="kab:2,2")
    with pytest.raises(ValueError):
        RunSpec(algorithm="tls", source="kab:2,2", reps=0)
    with pytest.raises(ValueError):
        RunSpec(algorithm="tls", source="kab:2,2", workers=0)


def test_run_exact_counts_without_queries():
    summary = run(RunSpec(algorithm="exact", source="kab:4,5"))
    assert summary.truth == 60
    assert summary.mean_estimate == 60.0
    assert len(summary.records) == 1
    rec = summary.records[0]
    assert rec["q_total"] == 0
    assert rec["rel_error"] == 0.0


def test_run_tls_repetitions(tmp_path):
    spec = RunSpec(
        algorithm="tls", source=str(konect_file(tmp_path)), reps=50, base_seed=100
    )
    summary = run(spec)
    assert summary.truth == 2
    assert len(summary.records) == 50
    assert [r["seed"] for r in summary.records] == list(range(100, 150))
    assert all(r["rel_error"] is not None for r in summary.records)
    assert summary.error_quantiles is not None
    assert all(r["q_total"] > 0 for r in summary.records)


def test_run_wps_starved_budget():
    spec = RunSpec(
        algorithm="wps", source="kab:20,20", reps=3, budget_queries=10
    )
    summary = run(spec)
    for rec in summary.records:
        assert rec["estimate"] is None
        assert rec["rel_error"] is None
        assert rec["q_total"] <= 10
        assert rec["flags"] == ["budget_exhausted", "estimate_unavailable"]
    assert summary.mean_estimate is None
    assert summary.error_quantiles is None


def test_jsonl_and_csv_outputs(tmp_path):
    prefix = tmp_path / "out" / "sample-tls"
    spec = RunSpec(
        algorithm="tls",
        source=str(konect_file(tmp_path)),
        reps=4,
        out_prefix=str(prefix),
    )
    summary = run(spec)
    lines = (
        (tmp_path / "out" / "sample-tls.jsonl").read_text().strip().splitlines()
    )
    assert len(lines) == 4
    for line, rec in zip(lines, summary.records):
        parsed = json.loads(line)
        assert set(parsed) == RECORD_FIELDS
        assert parsed["flags"] == sorted(parsed["flags"])
        assert strip_wall(parsed) == strip_wall(rec)
    with (tmp_path / "out" / "sample-tls.summary.csv").open() as fh:
        rows = list(csv.DictReader(fh))
    assert len(rows) == 1
    assert rows[0]["algorithm"] == "tls"
    assert rows[0]["truth"] == "2"


def test_rel_error_absent_without_truth():
    spec = RunSpec(algorithm="tls", source="er:15,15,0.3,2", truth_cutoff=0)
    summary = run(spec)
    assert summary.truth is None
    assert summary.records[0]["rel_error"] is None
    assert summary.error_quantiles is None


def test_run_deterministic_records():
    spec = RunSpec(algorithm="tls", source="er:20,20,0.2,3", reps=5, base_seed=9)
    a = run(spec)
    b = run(spec)
    assert [strip_wall(r) for r in a.records] == [strip_wall(r) for r in b.records]


def test_workers_do_not_change_records():
    base = dict(algorithm="tls", source="er:20,20,0.2,3", reps=4, base_seed=1)
    serial = run(RunSpec(**base))
    parallel = run(RunSpec(**base, workers=2))
    assert [strip_wall(r) for r in serial.records] == [
        strip_wall(r) for r in parallel.records
    ]


def test_compare_rows(tmp_path):
    out = tmp_path / "cmp.csv"
    specs = [
        RunSpec(algorithm="exact", source="kab:3,3"),
        RunSpec(algorithm="espar", source="kab:3,3", reps=3, p=1.0),
    ]
    summaries = compare(specs, out)
    assert len(summaries) == 2
    with out.open() as fh:
        rows = list(csv.DictReader(fh))
    assert [r["algorithm"] for r in rows] == ["exact", "espar"]
    assert rows[1]["mean_estimate"] == "9.0"

    compare([], out)
    with out.open() as fh:
        reader = csv.reader(fh)
        header = next(reader)
        assert list(reader) == []
    assert header[0] == "algorithm"

    twice = compare([specs[1], specs[1]], out)
    row_a, row_b = (
        {k: v for k, v in r.items() if k != "mean_wall_millis"}
        for r in (csv.DictReader(out.open()))
    )
    assert row_a == row_b
    assert len(twice) == 2


def test_compare_config_round_trip(tmp_path):
    cfg = tmp_path / "specs.json"
    cfg.write_text(
        json.dumps(
            {
                "specs": [
                    {"algorithm": "exact", "source": "kab:2,2"},
                    {"algorithm": "wps", "source": "kab:3,3", "rounds": 50},
                ]
            }
        )
    )
    specs = load_compare_config(cfg)
    assert [s.algorithm for s in specs] == ["exact", "wps"]
    assert specs[1].rounds == 50

    cfg.write_text(json.dumps({"specs": [{"algorithm": "exact", "source": "kab:2,2", "mystery": 1}]}))
    with pytest.raises(ValueError, match="mystery"):
        load_compare_config(cfg)
    cfg.write_text(json.dumps([1, 2]))
    with pytest.raises(ValueError):
        load_compare_config(cfg)


def test_cli_count_and_estimate(tmp_path, capsys):
    konect = konect_file(tmp_path)
    assert main(["count", "exact", "--graph", str(konect)]) == 0
    assert capsys.readouterr().out.strip() == "2"

    prefix = tmp_path / "run1"
    code = main(
        [
            "estimate", "tls", "--gen", "kab:4,4",
            "--reps", "3", "--out", str(prefix),
        ]
    )
    assert code == 0
    out = capsys.readouterr().out
    assert "mean_estimate" in out and "truth: 36" in out
    assert (tmp_path / "run1.jsonl").is_file()
    assert (tmp_path / "run1.summary.csv").is_file()


def test_cli_compare(tmp_path, capsys):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(
        json.dumps({"specs": [{"algorithm": "exact", "source": "kab:2,2"}]})
    )
    out = tmp_path / "cmp.csv"
    assert main(["compare", "--config", str(cfg), "--out", str(out)]) == 0
    assert out.is_file()
    assert "exact" in capsys.readouterr().out


def test_cli_error_paths(tmp_path, capsys):
    assert main(["count", "exact", "--graph", str(tmp_path / "missing.txt")]) == 2
    assert "error:" in capsys.readouterr().err
    assert main(["estimate", "tls", "--gen", "kab:one,2"]) == 2
    capsys.readouterr()


def test_cli_module_invocation(tmp_path):
    konect = konect_file(tmp_path)
    proc = subprocess.run(
        [sys.executable, "-m", "butterfly.cli", "count", "exact", "--graph", str(konect)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert proc.stdout.strip() == "2"
