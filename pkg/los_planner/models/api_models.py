"""Pydantic models for API request/response validation and documentation."""

from pydantic import BaseModel, Field

from .scenario import Algorithm, Scenario


class Overrides(BaseModel):
    """Per-request overrides applied on top of the inline scenario."""

    seed: int | None = Field(default=None, ge=0, description="Master seed", examples=[7])
    uavs: int | None = Field(default=None, ge=1, description="Number of UAVs", examples=[4])
    altitude: float | None = Field(default=None, gt=0, description="UAV altitude in meters", examples=[100.0])
    algorithm: Algorithm | None = Field(default=None, description="Search to run", examples=["hybrid"])


class CoverageRequest(BaseModel):
    """Request model for a coverage map."""

    scenario: Scenario = Field(..., description="Scenario, same schema as the YAML files")
    uavs: list[tuple[float, float, float]] | None = Field(
        default=None,
        description="UAV positions (x, y, z); defaults to the scenario's uav.positions",
        examples=[[[53.0, 343.0, 80.0]]],
    )


class RunRequest(BaseModel):
    """Request model for placement searches and network plans."""

    scenario: Scenario = Field(..., description="Scenario, same schema as the YAML files")
    overrides: Overrides = Field(default_factory=Overrides)


class CoverageResponse(BaseModel):
    coverage_percent: float = Field(..., description="LoS coverage percentage", examples=[87.5])
    nlos_percent: float = Field(..., description="100 minus the coverage percentage", examples=[12.5])
    grid_csv: str = Field(..., description="LoS grid as CSV rows of 0/1, first row is i = 1")


class ProgressChunk(BaseModel):
    """One progress line of a search, streamed as newline-delimited JSON."""

    algorithm: str = Field(..., description="Search producing the event", examples=["hybrid"])
    step: int = Field(..., description="Generation, start or restart number")
    eval_count: int = Field(..., description="Objective evaluations so far")
    best: float = Field(..., description="Best objective so far")
    wall_seconds: float = Field(..., description="Seconds since the search started")
    is_final: bool = Field(False, description="Whether this chunk carries the final result")


class PlaceResponse(BaseModel):
    positions: list[tuple[float, float, float]] = Field(..., description="Final UAV positions")
    objective: float = Field(..., description="Coverage percentage of the final placement")
    eval_count: int = Field(..., description="Objective evaluations consumed")
    trace: list[ProgressChunk] = Field(default_factory=list)


class PlanResponse(BaseModel):
    positions: list[tuple[float, float, float]] = Field(..., description="UAV positions")
    assignment: list[int] = Field(..., description="UAV index serving each node")
    node_capacity: list[float] = Field(..., description="Spectral efficiency per node in bits/s/Hz")
    avg_capacity: float = Field(..., description="Average network capacity in bits/s/Hz", examples=[12.4])
    all_los: bool = Field(..., description="Whether every node sees its UAV")
    failure: str | None = Field(default=None, description="Failure reason when the plan is infeasible")


class ErrorResponse(BaseModel):
    """Error response model."""

    error: str = Field(..., description="Error message", examples=["uav.altitude 400 exceeds scene.h_max 300"])
