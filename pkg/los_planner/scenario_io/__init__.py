"""Scenario files, seeded generation, runs and result artifacts."""

from .generator import block_from_spec, generate_nodes, generate_scene
from .loader import (
    RunContext,
    apply_overrides,
    build_run,
    dump_scenario,
    load_scenario,
    parse_scenario,
)
from .report import (
    Report,
    read_grid_csv,
    read_grid_pgm,
    write_grid_csv,
    write_grid_pgm,
    write_report,
)
from .runs import CoverageRun, PlanRun, run_coverage, run_place, run_plan, run_sweep

__all__ = [
    "CoverageRun",
    "PlanRun",
    "Report",
    "RunContext",
    "apply_overrides",
    "block_from_spec",
    "build_run",
    "dump_scenario",
    "generate_nodes",
    "generate_scene",
    "load_scenario",
    "parse_scenario",
    "read_grid_csv",
    "read_grid_pgm",
    "run_coverage",
    "run_place",
    "run_plan",
    "run_sweep",
    "write_grid_csv",
    "write_grid_pgm",
    "write_report",
]
