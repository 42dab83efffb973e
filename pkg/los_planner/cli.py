"""Command-line front end: coverage maps, placement searches, network plans and sweeps.

Exit status: 0 on success, 2 for usage or scenario errors, 3 when a plan is
infeasible while the scenario requires every node in LoS, 1 otherwise.
"""

import argparse
import logging
import sys
from pathlib import Path

from .config import OUTPUT_DIR, PROGRESS_LOGGER, configure_logging, resolve_threads
from .engine import Point3, ProgressEvent
from .exceptions import LosPlannerError, ReportError, ScenarioError
from .models import Scenario
from .scenario_io import (
    Report,
    apply_overrides,
    build_run,
    dump_scenario,
    load_scenario,
    run_coverage,
    run_place,
    run_plan,
    run_sweep,
    write_report,
)
from .scenario_io.report import placement_summary
from .scenario_io.runs import SWEEP_AXES

logger = logging.getLogger(__name__)
progress_logger = logging.getLogger(PROGRESS_LOGGER)

EXIT_OK = 0
EXIT_FAILURE = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3


def log_progress(event: ProgressEvent) -> None:
    progress_logger.info(
        f"algorithm={event.algorithm} step={event.step} eval_count={event.eval_count} "
        f"best={event.best!r} wall={event.wall_seconds:.3f}"
    )


def _parse_args(argv: list[str] | None) -> argparse.Namespace:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--scenario", required=True, type=Path, help="Scenario YAML file.")
    common.add_argument("--out", type=Path, default=Path(OUTPUT_DIR), help="Report directory (default: %(default)s).")
    common.add_argument("--seed", type=int, help="Override the scenario's master seed.")
    common.add_argument(
        "--algorithm",
        choices=("greedy", "ga", "hybrid", "geo", "geokmeans"),
        help="Override the scenario's search.",
    )
    common.add_argument("--uavs", type=int, help="Override the number of UAVs.")
    common.add_argument("--altitude", type=float, help="Override the UAV altitude in meters.")
    common.add_argument(
        "--threads",
        type=int,
        help="Worker cap for objective evaluation (default: LOS_PLANNER_THREADS or 1).",
    )
    common.add_argument("--log-level", default=None, help="Logging level (default: LOS_PLANNER_LOG_LEVEL or INFO).")

    parser = argparse.ArgumentParser(
        prog="los-planner",
        description="3D line-of-sight coverage and UAV placement planning for THz networks.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    coverage = commands.add_parser("coverage", parents=[common], help="Coverage map for fixed UAV positions.")
    coverage.add_argument(
        "--uav",
        nargs=3,
        type=float,
        action="append",
        metavar=("X", "Y", "Z"),
        help="UAV position; repeat for several UAVs (default: the scenario's uav.positions).",
    )
    commands.add_parser("place", parents=[common], help="Search UAV positions maximising LoS coverage.")
    commands.add_parser("plan", parents=[common], help="Cluster ground nodes and position UAVs for capacity.")
    sweep = commands.add_parser("sweep", parents=[common], help="Repeat place or plan over one axis.")
    sweep.add_argument("--axis", choices=SWEEP_AXES, required=True, help="Scenario value to sweep.")
    sweep.add_argument("--values", type=float, nargs="+", required=True, help="Values of the swept axis.")
    sweep.add_argument("--mode", choices=("place", "plan"), default="place", help="Run per value (default: place).")
    return parser.parse_args(argv)


def cmd_coverage(args: argparse.Namespace, scenario: Scenario, report: Report) -> int:
    ctx = build_run(scenario)
    uavs = [Point3(*p) for p in args.uav] if args.uav else None
    run = run_coverage(ctx, uavs)
    report.add_grid("coverage", run.union)
    report.add_yaml(
        "coverage.yaml",
        {
            "uavs": [[u.x, u.y, u.z] for u in run.uavs],
            "coverage_percent": run.percent,
            "nlos_percent": run.nlos_percent,
            "los_cells": run.union.los_count,
        },
    )
    print(f"coverage {run.percent:.4f}% nlos {run.nlos_percent:.4f}%")
    return EXIT_OK


def cmd_place(args: argparse.Namespace, scenario: Scenario, report: Report) -> int:
    ctx = build_run(scenario)
    state = run_place(ctx, workers=resolve_threads(args.threads), on_progress=log_progress)
    report.add_yaml("placement.yaml", placement_summary(state))
    report.add_trace(state.trace)
    if state.payload is not None:
        report.add_grid("coverage", state.payload)
    print(f"coverage {state.objective:.4f}% after {state.eval_count} evaluations")
    return EXIT_OK


def cmd_plan(args: argparse.Namespace, scenario: Scenario, report: Report) -> int:
    ctx = build_run(scenario)
    run = run_plan(ctx, workers=resolve_threads(args.threads), on_progress=log_progress)
    report.add_plan(run.outcome)
    report.add_trace(run.trace)
    plan = run.plan
    capacity = plan.avg_capacity if plan is not None else 0.0
    print(f"capacity {capacity:.4f} bits/s/Hz all_los {str(run.all_los).lower()} after {run.eval_count} evaluations")
    if scenario.require_all_los and not run.all_los:
        logger.error("Plan leaves nodes out of LoS but the scenario requires all-LoS")
        return EXIT_INFEASIBLE
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace, scenario: Scenario, report: Report) -> int:
    rows = run_sweep(
        scenario,
        args.axis,
        args.values,
        mode=args.mode,
        workers=resolve_threads(args.threads),
        on_progress=log_progress,
    )
    header = list(rows[0])
    report.add_rows("sweep.csv", header, [[row[key] for key in header] for row in rows])
    for row in rows:
        print(" ".join(f"{key}={value}" for key, value in row.items()))
    return EXIT_OK


COMMANDS = {
    "coverage": cmd_coverage,
    "place": cmd_place,
    "plan": cmd_plan,
    "sweep": cmd_sweep,
}


def _scenario(args: argparse.Namespace) -> Scenario:
    scenario = load_scenario(args.scenario)
    return apply_overrides(
        scenario,
        seed=args.seed,
        n_uav=args.uavs,
        altitude=args.altitude,
        algorithm=args.algorithm,
    )


def main(argv: list[str] | None = None) -> int:
    args = _parse_args(argv)
    configure_logging(args.log_level)
    report = Report()
    try:
        scenario = _scenario(args)
        status = COMMANDS[args.command](args, scenario, report)
        report.add("scenario.yaml", dump_scenario(scenario).encode("utf-8"))
        write_report(report, args.out)
    except ScenarioError as e:
        logger.error(f"Scenario error: {e}")
        return EXIT_USAGE
    except ReportError as e:
        logger.error(f"Report error: {e}")
        return EXIT_FAILURE
    except LosPlannerError as e:
        logger.error(f"Invalid request: {e}")
        return EXIT_USAGE
    except Exception as e:
        logger.error(f"Unexpected failure: {e}", exc_info=True)
        return EXIT_FAILURE
    return status


if __name__ == "__main__":
    sys.exit(main())
