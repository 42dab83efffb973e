"""Scenario-level runs shared by the command line and the HTTP API."""

import logging
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Any, Literal

from ..engine import (
    CapacityObjective,
    ClusterPlan,
    CoverageGrid,
    CoverageObjective,
    GeoObjective,
    ObjectiveFn,
    PlacementState,
    PlanFailure,
    Point3,
    ProgressEvent,
    coverage_matrix,
    coverage_percent,
    ga_search,
    geo_kmeans_plan,
    greedy_multistart,
    hybrid_search,
    union_coverage,
)
from ..engine.placement_opt import ProgressCallback
from ..exceptions import InvalidQueryError
from ..models import Scenario
from .loader import RunContext, apply_overrides, build_run

logger = logging.getLogger(__name__)

SweepAxis = Literal["n_uav", "h_u", "block_count", "mean_height"]
SWEEP_AXES: tuple[str, ...] = ("n_uav", "h_u", "block_count", "mean_height")


@dataclass(frozen=True, eq=False)
class CoverageRun:
    uavs: tuple[Point3, ...]
    grids: tuple[CoverageGrid, ...]
    union: CoverageGrid
    percent: float

    @property
    def nlos_percent(self) -> float:
        return 100.0 - self.percent


@dataclass(frozen=True, eq=False)
class PlanRun:
    outcome: ClusterPlan | PlanFailure
    eval_count: int
    trace: tuple[ProgressEvent, ...]

    @property
    def plan(self) -> ClusterPlan | None:
        if isinstance(self.outcome, PlanFailure):
            return self.outcome.partial
        return self.outcome

    @property
    def all_los(self) -> bool:
        return isinstance(self.outcome, ClusterPlan) and self.outcome.all_los


def run_coverage(ctx: RunContext, uavs: Sequence[Point3] | None = None) -> CoverageRun:
    """Coverage map of fixed UAV positions (defaults to the scenario's uav.positions)."""
    positions = tuple(uavs) if uavs else tuple(ctx.fixed_uavs())
    if not positions:
        raise InvalidQueryError("coverage needs at least one UAV position")
    grids = tuple(coverage_matrix(ctx.scene, uav) for uav in positions)
    union = union_coverage(grids)
    percent = coverage_percent(union, ctx.scene.counted_cells())
    logger.info(f"Coverage of {len(positions)} UAV(s): {percent:.3f}%")
    return CoverageRun(positions, grids, union, percent)


def _drive(
    driver: str,
    obj: ObjectiveFn,
    ctx: RunContext,
    workers: int,
    on_progress: ProgressCallback | None,
) -> PlacementState:
    if driver == "greedy":
        return greedy_multistart(
            obj,
            ctx.scene,
            ctx.scenario.algorithm.starts,
            ctx.search_rng(),
            ctx.n_uav,
            workers=workers,
            on_progress=on_progress,
        )
    if driver == "ga":
        return ga_search(ctx.ga_config(), obj, ctx.scene, ctx.n_uav, workers=workers, on_progress=on_progress)
    if driver == "hybrid":
        return hybrid_search(ctx.ga_config(), obj, ctx.scene, ctx.n_uav, workers=workers, on_progress=on_progress)
    raise InvalidQueryError(f"unknown search driver {driver!r}")


def run_place(
    ctx: RunContext,
    *,
    workers: int = 1,
    on_progress: ProgressCallback | None = None,
    obj: CoverageObjective | None = None,
) -> PlacementState:
    """Coverage-maximising placement with the scenario's search.

    ``obj`` lets several runs over the same scene and altitude share one grid cache.
    """
    name = ctx.scenario.algorithm.name
    if name in ("geo", "geokmeans"):
        raise InvalidQueryError(f"algorithm {name!r} plans networks; use the plan command")
    if obj is None:
        obj = CoverageObjective(ctx.scene, ctx.altitude)
    state = _drive(name, obj, ctx, workers, on_progress)
    logger.info(f"{name} placement: {state.objective:.3f}% coverage after {state.eval_count} evaluations")
    return state


def run_plan(
    ctx: RunContext, *, workers: int = 1, on_progress: ProgressCallback | None = None
) -> PlanRun:
    """Capacity-maximising clustering and positioning.

    ``geokmeans`` runs geometric k-means; ``geo`` drives the geometric planner
    with ``algorithm.driver``; the plain drivers search with capacity clustering.
    """
    if ctx.nodes is None:
        raise InvalidQueryError("plan needs ground nodes (nodes.positions or nodes.random)")
    name = ctx.scenario.algorithm.name
    if name == "geokmeans":
        events: list[ProgressEvent] = []

        def collect(event: ProgressEvent) -> None:
            events.append(event)
            if on_progress is not None:
                on_progress(event)

        plan = geo_kmeans_plan(
            ctx.nodes,
            ctx.scene,
            ctx.link,
            ctx.atm,
            ctx.n_uav,
            ctx.scenario.algorithm.restarts,
            ctx.search_rng(),
            h_u=ctx.altitude,
            workers=workers,
            on_progress=collect,
        )
        outcome: ClusterPlan | PlanFailure = plan
        if not plan.all_los:
            stranded = tuple(k for k, los in enumerate(plan.link_los) if not los)
            outcome = PlanFailure("empty_region", plan.assignment[stranded[0]], stranded, partial=plan)
        return PlanRun(outcome, len(events), tuple(events))

    obj: ObjectiveFn
    if name == "geo":
        obj = GeoObjective(ctx.nodes, ctx.scene, ctx.link, ctx.atm, ctx.altitude, seed=ctx.objective_seed)
        driver = ctx.scenario.algorithm.driver
    else:
        obj = CapacityObjective(ctx.nodes, ctx.scene, ctx.link, ctx.atm, ctx.altitude)
        driver = name
    state = _drive(driver, obj, ctx, workers, on_progress)
    return PlanRun(state.payload, state.eval_count, state.trace)


def sweep_value(axis: str, value: float) -> dict[str, Any]:
    if axis == "n_uav":
        return {"n_uav": int(value)}
    if axis == "h_u":
        return {"altitude": float(value)}
    if axis == "block_count":
        return {"block_count": int(value)}
    if axis == "mean_height":
        return {"mean_height": float(value)}
    raise InvalidQueryError(f"unknown sweep axis {axis!r}; expected one of {', '.join(SWEEP_AXES)}")


def run_sweep(
    scenario: Scenario,
    axis: str,
    values: Sequence[float],
    *,
    mode: Literal["place", "plan"] = "place",
    workers: int = 1,
    on_progress: ProgressCallback | None = None,
) -> list[dict[str, Any]]:
    """One place (or plan) run per value, each from the same master seed."""
    if not values:
        raise InvalidQueryError("sweep needs at least one value")
    rows = []
    # Scene and altitude do not depend on the UAV count.
    shared: CoverageObjective | None = None
    for value in values:
        ctx = build_run(apply_overrides(scenario, **sweep_value(axis, value)))
        if mode == "place":
            if axis == "n_uav" and shared is None:
                shared = CoverageObjective(ctx.scene, ctx.altitude)
            state = run_place(ctx, workers=workers, on_progress=on_progress, obj=shared)
            rows.append(
                {
                    axis: value,
                    "objective": state.objective,
                    "nlos_percent": 100.0 - state.objective,
                    "eval_count": state.eval_count,
                }
            )
        else:
            run = run_plan(ctx, workers=workers, on_progress=on_progress)
            plan = run.plan
            rows.append(
                {
                    axis: value,
                    "objective": plan.avg_capacity if plan is not None else 0.0,
                    "all_los": run.all_los,
                    "eval_count": run.eval_count,
                }
            )
    return rows
