"""Command-line surface: subcommands, formats, determinism, exit codes.

Claims covered:
    - analyze prints the exponent, Q, Perron data, and the ratio verdict
      with 12 significant digits
    - count/prob/walk emit the documented CSV schemas and their ratio
      columns approach 1
    - kakutani and subst cover the partitions, discrepancy table and rule
      verification; laplace covers values and the residue scan
    - outputs are byte-for-byte deterministic given the same invocation
    - exit codes: 1 validation, 2 numerical failure, 3 budget overflow
    - a parsed-then-serialized graph reparses identically
"""

import json
import math

import pytest

from orbitcount import build_graph, graph_to_dict
from orbitcount.cli import run

from conftest import two_vertex_spec


@pytest.fixture
def two_vertex_path(tmp_path):
    path = tmp_path / "two_vertex.json"
    path.write_text(json.dumps(two_vertex_spec()))
    return str(path)


@pytest.fixture
def stochastic_path(tmp_path):
    path = tmp_path / "stoch.json"
    path.write_text(json.dumps(two_vertex_spec(probability=0.5)))
    return str(path)


@pytest.fixture
def rule_path(tmp_path):
    rule = {
        "dimension": 1,
        "prototiles": [
            {
                "children": [
                    {"type": 1, "scale": {"ratio_of": [1, 3]}},
                    {"type": 1, "scale": {"ratio_of": [2, 3]}},
                ]
            }
        ],
    }
    path = tmp_path / "rule.json"
    path.write_text(json.dumps(rule))
    return str(path)


def test_analyze_reports_exponent_and_verdict(two_vertex_path, capsys):
    assert run(["analyze", two_vertex_path]) == 0
    out = capsys.readouterr().out
    assert "lambda" in out and "incommensurable_witness" in out
    assert "0.988724326063" in out  # Q_11 at 12 significant digits


def test_analyze_csv_and_jsonl(two_vertex_path, capsys):
    assert run(["analyze", two_vertex_path, "--format", "csv"]) == 0
    csv_out = capsys.readouterr().out
    assert csv_out.startswith("key,value")
    assert run(["analyze", two_vertex_path, "--format", "jsonl"]) == 0
    line = capsys.readouterr().out.splitlines()[0]
    assert json.loads(line)["key"] == "vertices"


def test_count_family_b_table(two_vertex_path, capsys):
    assert run(
        ["count", two_vertex_path, "--family", "B", "--from", "1", "--edge", "gamma2",
         "--x", "6,8,10"]
    ) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "x,exact,asymptotic,ratio"
    ratios = [float(line.split(",")[3]) for line in lines[1:]]
    assert all(0.9 <= r <= 1.1 for r in ratios)


def test_count_family_a_requires_target(two_vertex_path, capsys):
    assert run(["count", two_vertex_path, "--family", "A", "--from", "1", "--x", "4"]) == 1


def test_prob_survival_stochastic(stochastic_path, capsys):
    assert run(
        ["prob", stochastic_path, "--family", "survival", "--from", "1",
         "--T", "3.3,7.7"]
    ) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "T,exact,asymptotic,ratio,window"
    for line in lines[1:]:
        t, exact, asym, ratio, window = line.split(",")
        assert float(exact) == pytest.approx(1.0, abs=1e-12)
        assert float(asym) == 1.0


def test_prob_family_c_window(stochastic_path, capsys):
    assert run(
        ["prob", stochastic_path, "--family", "C", "--from", "1", "--to", "1",
         "--T", str(2 * math.log(2)), "--window", "0.01"]
    ) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[1].endswith(",0.01")


def test_walk_deterministic_output(stochastic_path, capsys):
    argv = ["walk", stochastic_path, "--from", "1", "--survival", "--T", "2.5,5.0",
            "-n", "20000", "--seed", "77"]
    assert run(argv) == 0
    first = capsys.readouterr().out
    assert run(argv) == 0
    assert capsys.readouterr().out == first
    assert first.splitlines()[0] == "T,estimate,stderr,n,seed"


def test_walk_edge_estimate(stochastic_path, capsys):
    assert run(
        ["walk", stochastic_path, "--from", "1", "--edge", "gamma2", "--T", "6.4",
         "-n", "20000", "--seed", "5"]
    ) == 0
    line = capsys.readouterr().out.splitlines()[1]
    estimate = float(line.split(",")[1])
    assert 0.2 < estimate < 0.35


def test_kakutani_discrepancy_table(capsys):
    assert run(["kakutani", "--alpha", "1/3", "--n", "20,200"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "n,intervals,discrepancy"
    rows = [line.split(",") for line in lines[1:]]
    assert [int(r[0]) for r in rows] == [20, 200]
    assert [int(r[1]) for r in rows] == [21, 201]
    assert float(rows[1][2]) < float(rows[0][2])


def test_kakutani_partition_dump(capsys):
    assert run(["kakutani", "--alpha", "1/3", "--partition", "2"]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "left,length,type"
    assert len(lines) == 4
    total = sum(float(line.split(",")[1]) for line in lines[1:])
    assert total == pytest.approx(1.0, abs=1e-12)


def test_kakutani_threshold_dump(capsys):
    assert run(["kakutani", "--alpha", "1/3", "--threshold", str(math.log(2))]) == 0
    lines = capsys.readouterr().out.splitlines()
    assert len(lines) == 4  # three intervals


def test_kakutani_needs_rule(capsys):
    assert run(["kakutani"]) == 1


def test_walk_needs_estimand(stochastic_path, capsys):
    assert run(["walk", stochastic_path, "--from", "1", "--T", "2.5"]) == 1


def test_subst_verifies_rule(rule_path, capsys):
    assert run(["subst", rule_path]) == 0
    out = capsys.readouterr().out
    assert "verdict" in out and "ok" in out


def test_subst_emit_graph_round_trips(rule_path, capsys):
    assert run(["subst", rule_path, "--emit-graph"]) == 0
    spec = json.loads(capsys.readouterr().out)
    g = build_graph(spec)
    assert g.vertex_count == 1 and g.edge_count == 2


def test_laplace_value_and_scan(two_vertex_path, capsys):
    assert run(
        ["laplace", two_vertex_path, "--family", "A", "--from", "1", "--to", "1", "--s", "2"]
    ) == 0
    line = capsys.readouterr().out.splitlines()[1]
    assert float(line.split(",")[1]) == pytest.approx(9 / 11, abs=1e-10)
    assert run(
        ["laplace", two_vertex_path, "--family", "A", "--from", "1", "--to", "1", "--scan"]
    ) == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "epsilon,residue_estimate,residue_imag"
    last = float(lines[-1].split(",")[1])
    assert last == pytest.approx(6 / math.log(432), rel=1e-4)


def test_laplace_below_critical_line_is_validation_error(two_vertex_path, capsys):
    assert run(
        ["laplace", two_vertex_path, "--family", "A", "--from", "1", "--to", "1", "--s", "0.5"]
    ) == 1


def test_exit_code_validation(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({"vertices": 2, "edges": [
        {"from": 1, "to": 2, "length": 1.0}]}))
    assert run(["analyze", str(bad)]) == 1
    assert run(["analyze", str(tmp_path / "missing.json")]) == 1
    assert run(["count", str(bad), "--family", "A"]) == 1  # missing required args


def test_exit_code_volume_violation(rule_path, tmp_path, capsys):
    broken = tmp_path / "broken.json"
    rule = json.loads(open(rule_path).read())
    rule["prototiles"][0]["children"][0]["scale"] = 0.3
    rule["prototiles"][0]["children"][1]["scale"] = 0.6
    broken.write_text(json.dumps(rule))
    assert run(["subst", str(broken)]) == 1


def test_exit_code_numerical(two_vertex_path, capsys, monkeypatch):
    # Volume validation precedes every honest PropertyViolated, so inject a
    # solver failure to pin the numerical exit code.
    from orbitcount import cli
    from orbitcount.errors import DidNotConverge

    def explode(f):
        raise DidNotConverge(200, "injected")

    monkeypatch.setattr(cli, "solve_lambda", explode)
    assert run(["analyze", two_vertex_path]) == 2


def test_exit_code_budget_overflow(two_vertex_path, capsys, monkeypatch):
    monkeypatch.setenv("ORBITCOUNT_MAX_PATHS", "5")
    assert run(
        ["count", two_vertex_path, "--family", "A", "--from", "1", "--to", "1", "--x", "8"]
    ) == 3


def test_max_paths_flag_beats_env(two_vertex_path, capsys, monkeypatch):
    monkeypatch.setenv("ORBITCOUNT_MAX_PATHS", "5")
    assert run(
        ["count", two_vertex_path, "--family", "A", "--from", "1", "--to", "1", "--x", "8",
         "--max-paths", "100000"]
    ) == 0


def test_output_file(two_vertex_path, tmp_path, capsys):
    target = tmp_path / "out.csv"
    assert run(
        ["count", two_vertex_path, "--family", "A", "--from", "1", "--to", "1",
         "--x", "4", "-o", str(target), "--format", "csv"]
    ) == 0
    assert target.read_text().startswith("x,exact")


def test_round_trip_serialization(two_vertex_stochastic):
    assert build_graph(graph_to_dict(two_vertex_stochastic)) == two_vertex_stochastic
