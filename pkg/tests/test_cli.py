import json
from pathlib import Path

import pytest
import yaml

from los_planner.cli import EXIT_INFEASIBLE, EXIT_OK, EXIT_USAGE, main

MINIMAL = Path(__file__).resolve().parent.parent / "scenarios" / "minimal.yaml"

# One node inside a closed courtyard of 250 m walls; no UAV at 100 m can see it.
COURTYARD = {
    "seed": 1,
    "area": {"dx": 100.0, "dy": 100.0},
    "grid": {"nx": 20, "ny": 20, "nux": 7, "nuy": 7},
    "scene": {
        "blocks": [
            {"center": [46.0, 50.0], "size": [2.0, 12.0], "height": 250.0, "name": "west"},
            {"center": [54.0, 50.0], "size": [2.0, 12.0], "height": 250.0, "name": "east"},
            {"center": [50.0, 46.0], "size": [12.0, 2.0], "height": 250.0, "name": "south"},
            {"center": [50.0, 54.0], "size": [12.0, 2.0], "height": 250.0, "name": "north"},
        ]
    },
    "nodes": {"positions": [[50.0, 50.0]]},
    "uav": {"count": 1, "altitude": 100.0},
    "algorithm": {"name": "greedy", "starts": 1},
    "require_all_los": True,
}


def _write_scenario(tmp_path, data):
    path = tmp_path / "scenario.yaml"
    path.write_text(yaml.safe_dump(data), encoding="utf-8")
    return path


def _artifacts(out):
    return {p.relative_to(out).as_posix(): p.read_bytes() for p in out.rglob("*") if p.is_file()}


def test_coverage_of_open_area(tmp_path, capsys):
    out = tmp_path / "out"
    assert main(["coverage", "--scenario", str(MINIMAL), "--out", str(out)]) == EXIT_OK
    assert "coverage 100.0000% nlos 0.0000%" in capsys.readouterr().out
    files = _artifacts(out)
    assert set(files) == {"coverage.csv", "coverage.pgm", "coverage.yaml", "scenario.yaml", "manifest.json"}
    assert yaml.safe_load(files["coverage.yaml"])["los_cells"] == 400


def test_coverage_with_explicit_uavs(tmp_path):
    out = tmp_path / "out"
    argv = ["coverage", "--scenario", str(MINIMAL), "--out", str(out), "--uav", "10", "10", "40", "--uav", "90", "90", "40"]
    assert main(argv) == EXIT_OK
    summary = yaml.safe_load((out / "coverage.yaml").read_text())
    assert summary["uavs"] == [[10.0, 10.0, 40.0], [90.0, 90.0, 40.0]]


def test_place_reports_are_byte_identical(tmp_path):
    outputs = []
    for name in ("a", "b"):
        out = tmp_path / name
        assert main(["place", "--scenario", str(MINIMAL), "--out", str(out)]) == EXIT_OK
        files = _artifacts(out)
        files.pop("timing.csv")
        outputs.append(files)
    assert outputs[0] == outputs[1]
    assert {"placement.yaml", "convergence.csv", "coverage.pgm", "manifest.json"} <= set(outputs[0])


def test_overrides_are_recorded(tmp_path):
    out = tmp_path / "out"
    argv = ["place", "--scenario", str(MINIMAL), "--out", str(out), "--seed", "5", "--uavs", "2", "--altitude", "40"]
    assert main(argv) == EXIT_OK
    recorded = yaml.safe_load((out / "scenario.yaml").read_text())
    assert recorded["seed"] == 5
    assert recorded["uav"]["count"] == 2
    assert recorded["uav"]["altitude"] == 40.0
    assert len(yaml.safe_load((out / "placement.yaml").read_text())["positions"]) == 2


def test_invalid_scenario_exits_with_usage_error(tmp_path):
    path = _write_scenario(tmp_path, {"uav": {"altitude": 500.0}})
    assert main(["coverage", "--scenario", str(path), "--out", str(tmp_path / "out")]) == EXIT_USAGE
    assert not (tmp_path / "out").exists()


def test_missing_scenario_exits_with_usage_error(tmp_path):
    assert main(["coverage", "--scenario", str(tmp_path / "absent.yaml"), "--out", str(tmp_path)]) == EXIT_USAGE


def test_place_with_network_planner_is_a_usage_error(tmp_path):
    argv = ["place", "--scenario", str(MINIMAL), "--out", str(tmp_path), "--algorithm", "geo"]
    assert main(argv) == EXIT_USAGE


def test_unknown_command_exits_through_argparse():
    with pytest.raises(SystemExit) as info:
        main(["launch", "--scenario", str(MINIMAL)])
    assert info.value.code == 2


def test_infeasible_plan_exits_3(tmp_path):
    out = tmp_path / "out"
    path = _write_scenario(tmp_path, COURTYARD)
    assert main(["plan", "--scenario", str(path), "--out", str(out)]) == EXIT_INFEASIBLE
    plan = yaml.safe_load((out / "plan.yaml").read_text())
    assert plan["feasible"] is False
    assert plan["failure"]["reason"] == "stranded_node"
    assert plan["failure"]["stranded"] == [0]


def test_infeasible_plan_is_fine_when_not_required(tmp_path, capsys):
    path = _write_scenario(tmp_path, {**COURTYARD, "require_all_los": False})
    assert main(["plan", "--scenario", str(path), "--out", str(tmp_path / "out")]) == EXIT_OK
    assert "all_los false" in capsys.readouterr().out


def test_sweep_writes_one_row_per_value(tmp_path):
    out = tmp_path / "out"
    argv = ["sweep", "--scenario", str(MINIMAL), "--out", str(out), "--axis", "n_uav", "--values", "1", "2"]
    assert main(argv) == EXIT_OK
    lines = (out / "sweep.csv").read_text().splitlines()
    assert lines[0] == "n_uav,objective,nlos_percent,eval_count"
    assert len(lines) == 3
    names = [e["name"] for e in json.loads((out / "manifest.json").read_text())["artifacts"]]
    assert names == ["scenario.yaml", "sweep.csv"]
