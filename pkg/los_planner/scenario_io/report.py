"""Result artifacts: grids as PGM/CSV, plan and placement summaries, traces, manifest.

Every file is written to a temporary name in the target directory and renamed
into place. The manifest lists each artifact with its SHA-256 digest; timing
data is listed but not hashed because wall time differs between runs.
"""

import csv
import hashlib
import io
import json
import logging
import os
import tempfile
from collections.abc import Sequence
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from ..engine import ClusterPlan, CoverageGrid, PlacementState, PlanFailure, ProgressEvent
from ..exceptions import ReportError

logger = logging.getLogger(__name__)

MANIFEST = "manifest.json"
INFORMATIONAL = ("timing.csv",)


def _atomic_write(path: Path, data: bytes) -> None:
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
        try:
            with os.fdopen(fd, "wb") as f:
                f.write(data)
            os.replace(tmp, path)
        except BaseException:
            Path(tmp).unlink(missing_ok=True)
            raise
    except OSError as e:
        raise ReportError(f"cannot write artifact: {e.strerror or e}", path) from e


def _read_bytes(path: Path) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as e:
        raise ReportError(f"cannot read artifact: {e.strerror or e}", path) from e


def _csv_bytes(rows: Sequence[Sequence[Any]], header: Sequence[str] | None = None) -> bytes:
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\r\n")
    if header is not None:
        writer.writerow(header)
    writer.writerows(rows)
    return buffer.getvalue().encode("utf-8")


def grid_csv_text(grid: CoverageGrid) -> str:
    """One row per i (first row i = 1), 1 = LoS."""
    return _csv_bytes(grid.bits.astype(np.uint8).tolist()).decode("utf-8")


def write_grid_csv(path: str | Path, grid: CoverageGrid) -> None:
    _atomic_write(Path(path), grid_csv_text(grid).encode("utf-8"))


def read_grid_csv(path: str | Path) -> CoverageGrid:
    text = _read_bytes(Path(path)).decode("utf-8")
    rows = [row for row in csv.reader(io.StringIO(text)) if row]
    try:
        bits = np.array([[int(v) for v in row] for row in rows], dtype=np.uint8)
    except ValueError as e:
        raise ReportError(f"not a 0/1 grid: {e}", path) from e
    return CoverageGrid(bits.astype(bool), source=Path(path).stem)


def grid_pgm_bytes(bits: np.ndarray) -> bytes:
    rows, cols = bits.shape
    header = f"P5\n{cols} {rows}\n255\n".encode("ascii")
    return header + (np.asarray(bits, dtype=bool).astype(np.uint8) * 255).tobytes()


def write_grid_pgm(path: str | Path, grid: CoverageGrid) -> None:
    """Binary PGM, rows = i, LoS white (255), NLoS black (0)."""
    _atomic_write(Path(path), grid_pgm_bytes(grid.bits))


def read_grid_pgm(path: str | Path) -> CoverageGrid:
    data = _read_bytes(Path(path))
    fields: list[bytes] = []
    pos = 0
    while len(fields) < 4:
        while pos < len(data) and data[pos : pos + 1].isspace():
            pos += 1
        start = pos
        while pos < len(data) and not data[pos : pos + 1].isspace():
            pos += 1
        if start == pos:
            raise ReportError("truncated PGM header", path)
        fields.append(data[start:pos])
    if fields[0] != b"P5":
        raise ReportError("not a binary PGM (P5) file", path)
    cols, rows, maxval = (int(f) for f in fields[1:])
    pixels = np.frombuffer(data[pos + 1 : pos + 1 + rows * cols], dtype=np.uint8)
    if pixels.size != rows * cols or maxval != 255:
        raise ReportError("PGM payload does not match its header", path)
    return CoverageGrid(pixels.reshape(rows, cols) > 127, source=Path(path).stem)


def _point(p: Any) -> list[float]:
    return [float(p.x), float(p.y), float(p.z)]


def plan_summary(outcome: ClusterPlan | PlanFailure) -> dict[str, Any]:
    """Key/value summary of a plan: positions, assignment, capacities, LoS flag."""
    plan = outcome.partial if isinstance(outcome, PlanFailure) else outcome
    summary: dict[str, Any] = {"feasible": isinstance(outcome, ClusterPlan)}
    if isinstance(outcome, PlanFailure):
        summary["failure"] = {
            "reason": outcome.reason,
            "index": outcome.index,
            "stranded": list(outcome.stranded),
        }
    if plan is not None:
        summary.update(
            {
                "uav_positions": [_point(p) for p in plan.uav_positions],
                "nodes": [_point(p) for p in plan.nodes.positions],
                "assignment": list(plan.assignment),
                "link_los": list(plan.link_los),
                "node_capacity": [float(c) for c in plan.node_capacity],
                "avg_capacity": float(plan.avg_capacity),
                "all_los": bool(plan.all_los),
            }
        )
    return summary


def placement_summary(state: PlacementState) -> dict[str, Any]:
    return {
        "positions": [_point(p) for p in state.positions],
        "objective": float(state.objective),
        "eval_count": int(state.eval_count),
    }


def trace_rows(trace: Sequence[ProgressEvent]) -> tuple[bytes, bytes]:
    """(convergence.csv, timing.csv) contents for a progress trace."""
    convergence = _csv_bytes(
        [(e.step, e.eval_count, repr(float(e.best))) for e in trace],
        header=("step", "eval_count", "best_objective"),
    )
    timing = _csv_bytes(
        [(e.eval_count, f"{e.wall_seconds:.6f}") for e in trace],
        header=("eval_count", "wall_seconds"),
    )
    return convergence, timing


@dataclass
class Report:
    """Artifacts collected in memory, then written together with their manifest."""

    files: dict[str, bytes] = field(default_factory=dict)

    def add(self, name: str, data: bytes) -> None:
        self.files[name] = data

    def add_yaml(self, name: str, data: Any) -> None:
        self.add(name, yaml.safe_dump(data, sort_keys=True, default_flow_style=None).encode("utf-8"))

    def add_grid(self, stem: str, grid: CoverageGrid) -> None:
        self.add(f"{stem}.pgm", grid_pgm_bytes(grid.bits))
        self.add(f"{stem}.csv", grid_csv_text(grid).encode("utf-8"))

    def add_trace(self, trace: Sequence[ProgressEvent]) -> None:
        convergence, timing = trace_rows(trace)
        self.add("convergence.csv", convergence)
        self.add("timing.csv", timing)

    def add_plan(self, outcome: ClusterPlan | PlanFailure) -> None:
        self.add_yaml("plan.yaml", plan_summary(outcome))
        plan = outcome.partial if isinstance(outcome, PlanFailure) else outcome
        if plan is not None and plan.feasible_regions is not None:
            for n, region in enumerate(plan.feasible_regions):
                if region is not None:
                    self.add(f"regions/cluster_{n}.pgm", grid_pgm_bytes(region))

    def add_rows(self, name: str, header: Sequence[str], rows: Sequence[Sequence[Any]]) -> None:
        self.add(name, _csv_bytes(rows, header=header))


def manifest(files: dict[str, bytes]) -> dict[str, Any]:
    artifacts = []
    for name in sorted(files):
        entry: dict[str, Any] = {"name": name}
        if name in INFORMATIONAL:
            entry["informational"] = True
        else:
            entry["bytes"] = len(files[name])
            entry["sha256"] = hashlib.sha256(files[name]).hexdigest()
        artifacts.append(entry)
    return {"artifacts": artifacts}


def write_report(report: Report, out_dir: str | Path) -> dict[str, Any]:
    """Write every artifact plus ``manifest.json``; returns the manifest."""
    out = Path(out_dir)
    for name, data in report.files.items():
        _atomic_write(out / name, data)
    result = manifest(report.files)
    _atomic_write(out / MANIFEST, (json.dumps(result, indent=2, sort_keys=True) + "\n").encode("utf-8"))
    logger.info(f"Wrote {len(report.files)} artifacts to {out}")
    return result
