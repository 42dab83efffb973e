"""Helper functions for API operations."""

import asyncio
import json
import logging
from collections.abc import AsyncIterator

from fastapi import status
from fastapi.responses import JSONResponse

from ..config import THREADS
from ..engine import PlacementState, ProgressEvent
from ..exceptions import LosPlannerError
from ..models import ErrorResponse, PlaceResponse, PlanResponse, ProgressChunk, RunRequest
from ..scenario_io import PlanRun, RunContext, apply_overrides, build_run, run_place

logger = logging.getLogger(__name__)


def context_for(req: RunRequest) -> RunContext:
    """Scenario from the request body with its overrides applied."""
    o = req.overrides
    scenario = apply_overrides(
        req.scenario,
        seed=o.seed,
        n_uav=o.uavs,
        altitude=o.altitude,
        algorithm=o.algorithm,
    )
    return build_run(scenario)


def error_response(exc: Exception) -> JSONResponse:
    """422 for request-level errors of the hierarchy, 500 for anything else."""
    if isinstance(exc, LosPlannerError):
        code = status.HTTP_422_UNPROCESSABLE_ENTITY
    else:
        logger.error(f"Unexpected API failure: {exc}", exc_info=True)
        code = status.HTTP_500_INTERNAL_SERVER_ERROR
    return JSONResponse(status_code=code, content=ErrorResponse(error=str(exc)).model_dump())


def progress_chunk(event: ProgressEvent, is_final: bool = False) -> ProgressChunk:
    return ProgressChunk(
        algorithm=event.algorithm,
        step=event.step,
        eval_count=event.eval_count,
        best=event.best,
        wall_seconds=event.wall_seconds,
        is_final=is_final,
    )


def place_response(state: PlacementState) -> PlaceResponse:
    return PlaceResponse(
        positions=[(p.x, p.y, p.z) for p in state.positions],
        objective=state.objective,
        eval_count=state.eval_count,
        trace=[progress_chunk(e) for e in state.trace],
    )


def plan_response(run: PlanRun) -> PlanResponse:
    plan = run.plan
    failure = None if run.all_los and plan is not None else getattr(run.outcome, "reason", "not_all_los")
    return PlanResponse(
        positions=[(p.x, p.y, p.z) for p in plan.uav_positions] if plan else [],
        assignment=list(plan.assignment) if plan else [],
        node_capacity=list(plan.node_capacity) if plan else [],
        avg_capacity=plan.avg_capacity if plan else 0.0,
        all_los=run.all_los,
        failure=failure,
    )


async def stream_search(req: RunRequest) -> AsyncIterator[str]:
    """Run a placement search in a worker thread and yield one JSON line per progress event,
    then a final line carrying the result."""
    loop = asyncio.get_running_loop()
    queue: asyncio.Queue[ProgressEvent | None] = asyncio.Queue()

    def on_progress(event: ProgressEvent) -> None:
        loop.call_soon_threadsafe(queue.put_nowait, event)

    def work() -> PlacementState:
        return run_place(context_for(req), workers=THREADS, on_progress=on_progress)

    async def runner() -> PlacementState:
        try:
            return await asyncio.to_thread(work)
        finally:
            queue.put_nowait(None)

    task = asyncio.create_task(runner())
    while (event := await queue.get()) is not None:
        yield progress_chunk(event).model_dump_json() + "\n"
    try:
        state = await task
    except Exception as e:
        if not isinstance(e, LosPlannerError):
            logger.error(f"Stream error: {e}", exc_info=True)
        yield json.dumps({"error": str(e)}) + "\n"
        return
    final = {"is_final": True, "result": place_response(state).model_dump()}
    yield json.dumps(final) + "\n"
