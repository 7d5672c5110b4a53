"""Scenario handling, the deterministic RNG contract, and the CLI surface."""

import json

import pytest

from elliptau.checks import CHECKS, SUITES, resolve_check_names, run_checks
from elliptau.cli import main
from elliptau.errors import ScenarioError
from elliptau.scenario import (
    GOLDEN,
    SplitMix64,
    check_stream,
    fnv1a64,
    golden_dict,
    load_scenario,
    scenario_from_dict,
)


def test_splitmix_reference_sequence():
    # frozen first outputs of the generator at seed 42; the documented
    # contract for reproducible reports
    rng = SplitMix64(42)
    assert [rng.next_u64() for _ in range(3)] == [
        13679457532755275413,
        2949826092126892291,
        5139283748462763858,
    ]


def test_uniform_range_and_determinism():
    a = SplitMix64(7)
    b = SplitMix64(7)
    xs = [a.uniform() for _ in range(100)]
    assert xs == [b.uniform() for _ in range(100)]
    assert all(0.0 <= x < 1.0 for x in xs)


def test_check_streams_isolated_by_name():
    s1 = check_stream(1, "legendre")
    s2 = check_stream(1, "wp_ode")
    assert s1.next_u64() != s2.next_u64()
    assert fnv1a64("legendre") != fnv1a64("wp_ode")


def test_scenario_roundtrip(tmp_path):
    path = tmp_path / "s.json"
    path.write_text(json.dumps(golden_dict()))
    s = load_scenario(path)
    assert s.e == GOLDEN.e
    assert s.a == GOLDEN.a
    assert s.p == GOLDEN.p


def test_scenario_validation_errors():
    base = golden_dict()
    bad = dict(base)
    bad["e"] = [[1.0, 0.0], [1.0, 0.0], [-1.0, 0.0]]
    with pytest.raises(ScenarioError):
        scenario_from_dict(bad)
    bad = dict(base)
    del bad["a"]
    with pytest.raises(ScenarioError):
        scenario_from_dict(bad)
    bad = dict(base)
    bad["p"] = "x"
    with pytest.raises(ScenarioError):
        scenario_from_dict(bad)
    bad = dict(base)
    bad["tolerances"] = {"legendre": -1.0}
    with pytest.raises(ScenarioError):
        scenario_from_dict(bad)


def test_unknown_check_rejected():
    with pytest.raises(ScenarioError):
        resolve_check_names(["not_a_check"])


def test_suite_names_expand():
    names = resolve_check_names(["elliptic"])
    assert names == SUITES["elliptic"]
    assert resolve_check_names([]) == list(CHECKS)


def test_single_check_report():
    rep = run_checks(GOLDEN, checks=["legendre"])
    assert len(rep.results) == 1
    assert rep.results[0].name == "legendre"
    assert rep.results[0].status == "pass"
    assert rep.overall == "pass"


def test_report_serialization_digits():
    rep = run_checks(GOLDEN, checks=["legendre"])
    d = rep.to_json_dict()
    assert d["overall"] == "pass"
    assert d["environment"]["precision"] == "float64/complex128"
    rec = d["checks"][0]
    assert isinstance(rec["residual"], str)
    float(rec["residual"])  # parses back
    assert rec["status"] == "pass"


def test_cli_verify_subset(tmp_path):
    scenario = tmp_path / "golden.json"
    scenario.write_text(json.dumps(golden_dict()))
    out = tmp_path / "report.json"
    code = main(["verify", "--scenario", str(scenario),
                 "--checks", "legendre,wp_ode", "--out", str(out)])
    assert code == 0
    data = json.loads(out.read_text())
    assert [c["name"] for c in data["checks"]] == ["legendre", "wp_ode"]
    assert data["overall"] == "pass"


def test_cli_tol_scale_can_force_failure(tmp_path):
    scenario = tmp_path / "golden.json"
    scenario.write_text(json.dumps(golden_dict()))
    out = tmp_path / "report.json"
    code = main(["verify", "--scenario", str(scenario),
                 "--checks", "legendre", "--tol-scale", "1e-18",
                 "--out", str(out)])
    assert code == 1
    assert json.loads(out.read_text())["overall"] == "fail"


def test_cli_invalid_scenario_exits_2(tmp_path):
    bad = golden_dict()
    bad["e"][1] = bad["e"][0]
    scenario = tmp_path / "bad.json"
    scenario.write_text(json.dumps(bad))
    code = main(["verify", "--scenario", str(scenario),
                 "--out", str(tmp_path / "r.json")])
    assert code == 2


def test_cli_unknown_check_exits_2(tmp_path):
    scenario = tmp_path / "golden.json"
    scenario.write_text(json.dumps(golden_dict()))
    code = main(["verify", "--scenario", str(scenario),
                 "--checks", "bogus", "--out", str(tmp_path / "r.json")])
    assert code == 2


def test_cli_tau_grid(tmp_path, capsys):
    scenario = tmp_path / "golden.json"
    scenario.write_text(json.dumps(golden_dict()))
    code = main(["tau", "--scenario", str(scenario), "--grid", "t=0:0.2:0.1"])
    assert code == 0
    lines = capsys.readouterr().out.strip().splitlines()
    assert lines[0] == "t,re_log_tau,im_log_tau,re_H_t,im_H_t"
    assert len(lines) == 4  # header + t = 0, 0.1, 0.2
    row = lines[2].split(",")
    assert len(row) == 5
    assert abs(float(row[0]) - 0.1) < 1e-12
    float(row[1]), float(row[3])


def test_cli_tau_bad_grid_exits_2(tmp_path):
    scenario = tmp_path / "golden.json"
    scenario.write_text(json.dumps(golden_dict()))
    assert main(["tau", "--scenario", str(scenario), "--grid", "x=0:1:0.1"]) == 2
    assert main(["tau", "--scenario", str(scenario), "--grid", "t=0:1:-0.1"]) == 2


def test_cli_monodromy_prints_matrix(tmp_path, capsys):
    scenario = tmp_path / "golden.json"
    scenario.write_text(json.dumps(golden_dict()))
    code = main(["monodromy", "--scenario", str(scenario), "--loop", "3"])
    assert code == 0
    out = capsys.readouterr().out.strip().splitlines()
    assert out[0].startswith("# loop 3")
    assert len(out) == 3  # header + two matrix rows
    assert len(out[1].split()) == 2
