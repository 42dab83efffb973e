"""API endpoint handlers."""

import asyncio
import logging
from datetime import datetime, timezone

from fastapi import APIRouter
from fastapi.responses import StreamingResponse

from ..config import APP_VERSION, THREADS
from ..engine import Point3
from ..models import (
    CoverageRequest,
    CoverageResponse,
    ErrorResponse,
    PlaceResponse,
    PlanResponse,
    RunRequest,
)
from ..scenario_io import build_run, run_coverage, run_place, run_plan
from ..scenario_io.report import grid_csv_text
from .helpers import context_for, error_response, place_response, plan_response, stream_search

logger = logging.getLogger(__name__)

# Create router
router = APIRouter()


@router.post(
    "/coverage",
    tags=["coverage"],
    summary="LoS Coverage Map",
    description="""
    Computes the LoS grid of every ground cell for fixed UAV positions and the
    resulting coverage percentage.

    ### Response:
    - `coverage_percent`: share of counted cells in LoS of at least one UAV
    - `nlos_percent`: the remainder
    - `grid_csv`: the union grid as CSV rows of 0/1 (first row is i = 1)

    UAV positions come from the request's `uavs` or, if omitted, from the
    scenario's `uav.positions`.
    """,
    response_model=CoverageResponse,
    responses={
        200: {"model": CoverageResponse, "description": "Coverage computed"},
        422: {"model": ErrorResponse, "description": "Invalid scenario or UAV position"},
        500: {"model": ErrorResponse, "description": "Internal processing error"},
    },
)
async def coverage(req: CoverageRequest):
    """Coverage map for fixed UAV positions."""
    logger.info(f"Coverage request - blocks: {len(req.scenario.scene.blocks)}, uavs: {len(req.uavs or [])}")
    try:
        uavs = [Point3(*p) for p in req.uavs] if req.uavs else None
        run = await asyncio.to_thread(lambda: run_coverage(build_run(req.scenario), uavs))
        return CoverageResponse(
            coverage_percent=run.percent,
            nlos_percent=run.nlos_percent,
            grid_csv=grid_csv_text(run.union),
        )
    except Exception as e:
        return error_response(e)


@router.post(
    "/place",
    tags=["placement"],
    summary="UAV Placement Search",
    description="""
    Runs the scenario's placement search (`greedy`, `ga` or `hybrid`) and returns
    the final UAV positions with their coverage percentage.

    ### Response:
    - `positions`: final UAV positions on the UAV plane
    - `objective`: coverage percentage of those positions
    - `eval_count`: objective evaluations consumed
    - `trace`: best objective after every generation or start
    """,
    response_model=PlaceResponse,
    responses={
        200: {"model": PlaceResponse, "description": "Search finished"},
        422: {"model": ErrorResponse, "description": "Invalid scenario or override"},
        500: {"model": ErrorResponse, "description": "Internal processing error"},
    },
)
async def place(req: RunRequest):
    """Coverage-maximising placement search."""
    logger.info(f"Place request - overrides: {req.overrides.model_dump(exclude_none=True)}")
    try:
        state = await asyncio.to_thread(lambda: run_place(context_for(req), workers=THREADS))
        return place_response(state)
    except Exception as e:
        return error_response(e)


@router.post(
    "/place_stream",
    tags=["placement", "streaming"],
    summary="Stream UAV Placement Search",
    description="""
    **Streaming variant** of `/place`.

    ### Response Format:
    Newline-delimited JSON. Every progress event is a chunk with
    `algorithm`, `step`, `eval_count`, `best`, `wall_seconds` and `is_final`.
    The last chunk has `is_final: true` and carries the `/place` result under
    `result`, or an `error` field when the search failed.
    """,
    responses={
        200: {
            "description": "Streaming JSON chunks, one per progress event",
            "content": {
                "application/json": {
                    "example": {
                        "algorithm": "hybrid",
                        "step": 3,
                        "eval_count": 1460,
                        "best": 91.25,
                        "wall_seconds": 4.2,
                        "is_final": False,
                    }
                }
            },
        },
        422: {"model": ErrorResponse, "description": "Validation error"},
    },
)
async def place_stream(req: RunRequest):
    """Stream progress of a placement search."""
    logger.info(f"Stream place request - overrides: {req.overrides.model_dump(exclude_none=True)}")
    return StreamingResponse(
        stream_search(req),
        media_type="application/json",
        headers={"Cache-Control": "no-cache", "Connection": "keep-alive"},
    )


@router.post(
    "/plan",
    tags=["planning"],
    summary="Network Clustering and Positioning",
    description="""
    Clusters the scenario's ground nodes and positions one UAV per cluster to
    maximise the average THz capacity with every node in LoS.

    `geokmeans` runs geometric k-means, `geo` drives geometric repositioning with
    the scenario's `algorithm.driver`, and `greedy`/`ga`/`hybrid` search with
    capacity-based clustering.

    ### Response:
    - `positions`, `assignment`, `node_capacity`, `avg_capacity`
    - `all_los`: whether every node sees its UAV
    - `failure`: reason when the plan is infeasible
    """,
    response_model=PlanResponse,
    responses={
        200: {"model": PlanResponse, "description": "Plan computed (check all_los)"},
        422: {"model": ErrorResponse, "description": "Invalid scenario, override or missing nodes"},
        500: {"model": ErrorResponse, "description": "Internal processing error"},
    },
)
async def plan(req: RunRequest):
    """Capacity-maximising clustering and positioning."""
    logger.info(f"Plan request - overrides: {req.overrides.model_dump(exclude_none=True)}")
    try:
        run = await asyncio.to_thread(lambda: run_plan(context_for(req), workers=THREADS))
        return plan_response(run)
    except Exception as e:
        return error_response(e)


@router.get(
    "/",
    tags=["health"],
    summary="API Health Check",
    description="Simple health check endpoint to verify the API is running.",
    responses={
        200: {
            "description": "API is healthy and running",
            "content": {
                "application/json": {
                    "example": {
                        "status": "healthy",
                        "message": "LoS Coverage and UAV Placement API",
                        "version": APP_VERSION,
                    }
                }
            },
        }
    },
)
async def health_check():
    """Health check endpoint."""
    return {
        "status": "healthy",
        "message": "LoS Coverage and UAV Placement API",
        "version": APP_VERSION,
    }


@router.get(
    "/health",
    tags=["health"],
    summary="Detailed Health Status",
    description="Detailed health check with engine module status and the worker cap.",
    responses={
        200: {
            "description": "Detailed health status",
            "content": {
                "application/json": {
                    "example": {
                        "status": "healthy",
                        "engine": {
                            "los_engine": "active",
                            "thz_channel": "active",
                            "placement_opt": "active",
                            "network_planner": "active",
                        },
                        "threads": 1,
                        "timestamp": "2024-01-01T00:00:00Z",
                    }
                }
            },
        }
    },
)
async def detailed_health():
    """Detailed health check with engine status."""
    return {
        "status": "healthy",
        "engine": {
            "los_engine": "active",
            "thz_channel": "active",
            "placement_opt": "active",
            "network_planner": "active",
        },
        "threads": THREADS,
        "timestamp": datetime.now(timezone.utc).isoformat(),
    }
