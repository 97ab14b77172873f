from __future__ import annotations

import csv
import io
import json
import subprocess
import sys
from pathlib import Path

import jsonschema
import pytest
from referencing import Registry, Resource

from bidisearch.cli import main
from bidisearch.graph import read_edge_list, read_provenance, write_edge_list
from bidisearch.instances import directed_star
from bidisearch.oracle import load_trace

SCHEMAS = Path(__file__).resolve().parents[1] / "docs" / "schemas"


def _registry() -> Registry:
    resources = []
    for path in SCHEMAS.glob("*.json"):
        schema = json.loads(path.read_text())
        resources.append((schema["$id"], Resource.from_contents(schema)))
    return Registry().with_resources(resources)


def validate(obj, name: str) -> None:
    schema = json.loads((SCHEMAS / name).read_text())
    jsonschema.Draft202012Validator(schema, registry=_registry()).validate(obj)


def run_cli(capsys, *argv) -> tuple[int, str, str]:
    code = main([str(a) for a in argv])
    out, err = capsys.readouterr()
    return code, out, err


@pytest.fixture
def path_file(tmp_path, path_graph):
    p = tmp_path / "path.txt"
    p.write_text(write_edge_list(path_graph))
    return p


def test_gen_g1_file(tmp_path, capsys):
    out = tmp_path / "g1.txt"
    code, stdout, _ = run_cli(capsys, "gen", "g1", "--delta", 3, "--depth", 3, "--i", 5, "--nu", 1, "-o", out)
    assert code == 0 and "k=4" in stdout
    text = out.read_text()
    G = read_edge_list(text)
    assert G.max_degree() == 4
    prov = read_provenance(text)
    validate(prov, "instance_spec.schema.json")
    assert prov["k"] == 4 and prov["family"] == "g1"


def test_gen_er_complete(tmp_path, capsys):
    out = tmp_path / "er.txt"
    code, stdout, _ = run_cli(capsys, "gen", "er", "--n", 10, "--p", 1.0, "-o", out)
    assert code == 0 and "m=45" in stdout
    assert read_edge_list(out.read_text()).m == 45


def test_gen_to_stdout_and_invalid_params(capsys):
    code, stdout, err = run_cli(capsys, "gen", "grid", "--rows", 2, "--cols", 2)
    assert code == 0 and read_edge_list(stdout).m == 4 and "n=4" in err
    code, _, err = run_cli(capsys, "gen", "g1", "--delta", 1)
    assert code == 1 and "SpecInvalid" in err


def test_run_check_and_trace(tmp_path, path_file, capsys):
    trace = tmp_path / "t.jsonl"
    code, stdout, _ = run_cli(capsys, "run", path_file, 1, 4, "--strategy", "bidi-equal-pohl",
                              "--check", "--trace", trace)
    rep = json.loads(stdout)
    validate(rep, "run_report.schema.json")
    assert code == 0 and rep["distance"] == 4.0 and rep["correct"] is True
    assert "wall_time" not in rep
    lines = trace.read_text().splitlines()
    for line in lines:
        validate(json.loads(line), "trace_entry.schema.json")
    assert len(load_trace(trace.read_text())) == rep["counts"]["Degree"] + rep["counts"]["Neighbor"]


def test_run_is_reproducible(path_file, capsys):
    args = ("run", path_file, 1, 4, "--ordering", "shuffle", "--seed", 3)
    assert run_cli(capsys, *args)[1] == run_cli(capsys, *args)[1]


def test_run_timing_flag(path_file, capsys):
    _, stdout, _ = run_cli(capsys, "run", path_file, 1, 4, "--timing")
    validate(json.loads(stdout), "run_report.schema.json")
    assert "wall_time" in json.loads(stdout)


def test_run_mode_mismatch_exits_1(path_file, capsys):
    code, _, err = run_cli(capsys, "run", path_file, 1, 4, "--strategy", "bfs-pohl")
    assert code == 1 and "ModeMismatch" in err
    code, _, err = run_cli(capsys, "run", path_file, 2, 2)
    assert code == 1 and "InvalidPair" in err


def test_run_parse_error_exits_1(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("undirected 2 1 weighted\n1 2 zero\n")
    code, _, err = run_cli(capsys, "run", bad, 1, 2)
    assert code == 1 and "ParseError" in err
    code, _, err = run_cli(capsys, "run", tmp_path / "missing.txt", 1, 2)
    assert code == 1


def test_run_first_meet_on_witness_exits_2(tmp_path, capsys):
    from bidisearch.instances import find_incorrect_instance
    w = find_incorrect_instance("first-meet", 10_000, 0)
    path = tmp_path / "witness.txt"
    path.write_text(write_edge_list(w.graph, {**w.instance.as_dict(), "s": w.pair[0], "t": w.pair[1]}))
    code, stdout, _ = run_cli(capsys, "run", path, *w.pair, "--strategy", "first-meet", "--check")
    rep = json.loads(stdout)
    assert code == 2 and rep["correct"] is False and rep["unsound"] is True
    assert rep["distance"] == w.wrong and rep["true_distance"] == w.right
    code, stdout, _ = run_cli(capsys, "run", path, *w.pair, "--strategy", "bidi-equal-pohl", "--check")
    assert code == 0 and json.loads(stdout)["correct"] is True


def test_run_tailored_reads_k_from_provenance(tmp_path, capsys):
    out = tmp_path / "g1.txt"
    run_cli(capsys, "gen", "g1", "--delta", 3, "--depth", 3, "--i", 5, "-o", out)
    code, stdout, _ = run_cli(capsys, "run", out, 1, 31, "--strategy", "tailored-g1", "--check")
    rep = json.loads(stdout)
    assert code == 0 and rep["strategy"] == "tailored-g1" and rep["distance"] == 5.0


def test_compare_on_directed_star(tmp_path, capsys):
    G, (s, t) = directed_star(100)
    p = tmp_path / "star.txt"
    p.write_text(write_edge_list(G))
    code, stdout, _ = run_cli(capsys, "compare", p, s, t, "--strategies",
                              "bidi-equal-pohl,classical-exhaustive,early-abort")
    rows = list(csv.DictReader(io.StringIO(stdout)))
    assert code == 0 and [r["strategy"] for r in rows] == ["bidi-equal-pohl", "classical-exhaustive", "early-abort"]
    counts = {r["strategy"]: int(r["neighbor_queries"]) for r in rows}
    assert counts["early-abort"] < counts["classical-exhaustive"]
    assert all(r["correct"] == "True" for r in rows)


def test_compare_single_edge(tmp_path, single_edge, capsys):
    p = tmp_path / "e.txt"
    p.write_text(write_edge_list(single_edge))
    code, stdout, _ = run_cli(capsys, "compare", p, 1, 2, "--strategies", "bidi-equal-pohl,classical,first-meet")
    rows = list(csv.DictReader(io.StringIO(stdout)))
    assert code == 0 and {r["distance"] for r in rows} == {"5.0"}


def test_compare_needs_two_strategies(path_file, capsys):
    with pytest.raises(SystemExit) as exc:
        main(["compare", str(path_file), "1", "4", "--strategies", "classical"])
    assert exc.value.code == 1


def test_certify_outputs_valid_report(capsys):
    code, stdout, _ = run_cli(capsys, "certify", "perturb-weighted", "--trials", 30, "--seed", 1)
    rep = json.loads(stdout)
    validate(rep, "cert_report.schema.json")
    assert code == 0 and rep["passed"] and rep["trials"] == 30
    code, stdout, _ = run_cli(capsys, "certify", "delta-gap", "--depth", 3, "--deltas", "2..4", "--samples", 4)
    rep = json.loads(stdout)
    validate(rep, "cert_report.schema.json")
    assert [row["delta"] for row in rep["table"]] == [2, 3, 4]


def test_certify_unknown_suite(capsys):
    with pytest.raises(SystemExit) as exc:
        main(["certify", "nope"])
    assert exc.value.code == 1


def test_module_entry_point(path_file):
    proc = subprocess.run([sys.executable, "-m", "bidisearch", "run", str(path_file), "1", "4"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0 and json.loads(proc.stdout)["distance"] == 4.0
