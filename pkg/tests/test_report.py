import json

import numpy as np
import pytest
import yaml

from los_planner.engine import CoverageGrid, PlanFailure, ProgressEvent
from los_planner.exceptions import ReportError
from los_planner.scenario_io import (
    Report,
    read_grid_csv,
    read_grid_pgm,
    write_grid_csv,
    write_grid_pgm,
    write_report,
)
from los_planner.scenario_io.report import grid_csv_text, manifest, plan_summary, trace_rows

BITS = np.array([[True, False, True], [False, False, True]])


@pytest.fixture
def grid():
    return CoverageGrid(BITS, source="uav-0")


def _trace():
    return [
        ProgressEvent("greedy", 1, 5, 80.0, 0.25),
        ProgressEvent("greedy", 2, 10, 92.5, 0.5),
    ]


def test_csv_layout(grid):
    assert grid_csv_text(grid) == "1,0,1\r\n0,0,1\r\n"


def test_csv_round_trip(tmp_path, grid):
    path = tmp_path / "coverage.csv"
    write_grid_csv(path, grid)
    assert read_grid_csv(path) == grid


def test_pgm_layout(tmp_path, grid):
    path = tmp_path / "coverage.pgm"
    write_grid_pgm(path, grid)
    data = path.read_bytes()
    assert data.startswith(b"P5\n3 2\n255\n")
    assert data[len(b"P5\n3 2\n255\n") :] == bytes([255, 0, 255, 0, 0, 255])
    assert read_grid_pgm(path) == grid


def test_reading_a_non_pgm_fails(tmp_path):
    path = tmp_path / "bad.pgm"
    path.write_bytes(b"P2\n1 1\n255\n0\n")
    with pytest.raises(ReportError, match="P5"):
        read_grid_pgm(path)


def test_reading_a_non_binary_csv_fails(tmp_path):
    path = tmp_path / "bad.csv"
    path.write_text("1,x\n", encoding="utf-8")
    with pytest.raises(ReportError, match="0/1 grid"):
        read_grid_csv(path)


def test_reading_a_missing_grid_fails(tmp_path):
    with pytest.raises(ReportError):
        read_grid_csv(tmp_path / "absent.csv")


def test_trace_rows():
    convergence, timing = trace_rows(_trace())
    assert convergence.decode().splitlines() == ["step,eval_count,best_objective", "1,5,80.0", "2,10,92.5"]
    assert timing.decode().splitlines() == ["eval_count,wall_seconds", "5,0.250000", "10,0.500000"]


def test_manifest_hashes_change_only_with_content():
    files = {"a.csv": b"1,0\r\n", "b.yaml": b"x: 1\n"}
    before = {e["name"]: e for e in manifest(files)["artifacts"]}
    files["a.csv"] = b"1,1\r\n"
    after = {e["name"]: e for e in manifest(files)["artifacts"]}
    assert before["a.csv"]["sha256"] != after["a.csv"]["sha256"]
    assert before["b.yaml"] == after["b.yaml"]
    assert before["a.csv"]["bytes"] == 5


def test_timing_is_listed_but_not_hashed():
    report = Report()
    report.add_trace(_trace())
    entries = {e["name"]: e for e in manifest(report.files)["artifacts"]}
    assert entries["timing.csv"] == {"name": "timing.csv", "informational": True}
    assert "sha256" in entries["convergence.csv"]


def test_write_report(tmp_path, grid):
    report = Report()
    report.add_grid("coverage", grid)
    report.add_yaml("coverage.yaml", {"coverage_percent": 50.0})
    result = write_report(report, tmp_path / "out")
    names = [e["name"] for e in result["artifacts"]]
    assert names == ["coverage.csv", "coverage.pgm", "coverage.yaml"]
    on_disk = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert on_disk == result
    assert read_grid_pgm(tmp_path / "out" / "coverage.pgm") == grid
    assert not list((tmp_path / "out").glob("*.tmp"))


def test_unwritable_directory_raises(tmp_path):
    blocker = tmp_path / "blocker"
    blocker.write_text("not a directory")
    report = Report()
    report.add("a.txt", b"a")
    with pytest.raises(ReportError, match="cannot write artifact"):
        write_report(report, blocker / "out")


def test_failure_summary_keeps_partial_plan():
    failure = PlanFailure("stranded_node", 2, (2, 4))
    summary = plan_summary(failure)
    assert summary == {
        "feasible": False,
        "failure": {"reason": "stranded_node", "index": 2, "stranded": [2, 4]},
    }
    yaml.safe_dump(summary)
