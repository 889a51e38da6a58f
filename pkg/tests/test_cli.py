import json

import pytest

from fockbench.cli import main
from fockbench.scenario import parse_scenario, ScenarioError
from fockbench.runner import run_scenario, report_bytes, replay_report


def minimal_doc(**over):
    doc = {
        "schema": 1,
        "name": "t",
        "monoid": {"family": "numerical", "generators": [1]},
        "representations": [{"name": "lr", "kind": "fock"}],
        "bounds": {"L": 4, "L_big": 5, "W": 2},
        "checks": ["fock-axioms"],
    }
    doc.update(over)
    return doc


def test_parse_minimal():
    sc = parse_scenario(minimal_doc())
    assert sc.checks == ["fock-axioms"]
    assert not sc.warnings


def test_parse_errors_collected():
    with pytest.raises(ScenarioError) as exc:
        parse_scenario({"schema": 2, "monoid": {"family": "nope"},
                        "checks": ["bogus", "nica"]})
    paths = [p for p, _ in exc.value.errors]
    assert "schema" in paths
    assert "monoid.family" in paths
    assert "checks[0]" in paths   # unknown check
    assert "checks[1]" in paths   # nica without rep suffix


def test_parse_ragged_matrix():
    doc = minimal_doc(representations=[
        {"name": "m", "kind": "explicit",
         "matrices": [[1, [[1, 0], [0, 1, 2]]]]}],
        checks=["rep-axioms:m"])
    with pytest.raises(ScenarioError) as exc:
        parse_scenario(doc)
    assert any("ragged" in m for _, m in exc.value.errors)


def test_non_lcm_prerequisite_warns_and_errors():
    doc = minimal_doc(monoid={"family": "numerical", "generators": [2, 3]},
                      checks=["nica:lr"])
    sc = parse_scenario(doc)
    assert sc.warnings
    report = run_scenario(sc)
    assert report["checks"][0]["status"] == "error"
    assert report["exit_code"] == 3


def test_run_report_byte_stable(tmp_path):
    sc = parse_scenario(minimal_doc(checks=["fock-axioms",
                                            "rep-axioms:lr"]))
    r1 = report_bytes(run_scenario(sc))
    r2 = report_bytes(run_scenario(sc, cache_dir=str(tmp_path)))
    r3 = report_bytes(run_scenario(sc, cache_dir=str(tmp_path)))
    assert r1 == r2 == r3  # cold cache, warm cache, no cache


def test_exit_codes_and_replay():
    doc = minimal_doc(
        monoid={"family": "lattice_cone", "k": 2},
        representations=[{"name": "collapsed", "kind": "shift-power",
                          "powers": [[[1, 0], 1], [[0, 1], 1]],
                          "size": 12}],
        bounds={"L": 5, "L_big": 6, "W": 2},
        checks=["nica:collapsed"])
    sc = parse_scenario(doc)
    report = run_scenario(sc)
    assert report["exit_code"] == 1
    ok, results = replay_report(report)
    assert ok and results and all(r["match"] for r in results)


def test_cli_run_bundled(tmp_path, capsys):
    out = tmp_path / "rep.json"
    code = main(["run", "--scenario", "n-basic", "--truncation", "5",
                 "--report", str(out)])
    assert code == 0
    report = json.loads(out.read_text())
    assert report["environment"]["bounds"]["L"] == 5
    statuses = {c["check"]: c["status"] for c in report["checks"]}
    assert statuses["right-lcm"] == "pass"


def test_cli_validate_and_list(capsys):
    assert main(["list-scenarios"]) == 0
    names = capsys.readouterr().out
    assert "n2-nica" in names and "s23-shift-T4" in names
    assert main(["validate", "--scenario", "n2-nica"]) == 0


def test_cli_unknown_scenario():
    assert main(["run", "--scenario", "does-not-exist"]) == 3


def test_inconclusive_exit_code():
    doc = minimal_doc(monoid={"family": "lattice_cone", "k": 2},
                      representations=[],
                      bounds={"L": 1, "L_big": 2, "W": 4},
                      checks=["wick"])
    report = run_scenario(parse_scenario(doc))
    assert report["checks"][0]["status"] == "inconclusive"
    assert report["exit_code"] == 2
