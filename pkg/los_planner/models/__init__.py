"""Scenario schema and API models."""

from .api_models import (
    CoverageRequest,
    CoverageResponse,
    ErrorResponse,
    Overrides,
    PlaceResponse,
    PlanResponse,
    ProgressChunk,
    RunRequest,
)
from .scenario import (
    AlgorithmSpec,
    AreaSpec,
    BlockSpec,
    ChannelSpec,
    GaSpec,
    GridSpec,
    NodesSpec,
    RandomBlocksSpec,
    RandomNodesSpec,
    Scenario,
    SceneSpec,
    UavSpec,
)

__all__ = [
    "AlgorithmSpec",
    "AreaSpec",
    "BlockSpec",
    "ChannelSpec",
    "CoverageRequest",
    "CoverageResponse",
    "ErrorResponse",
    "GaSpec",
    "GridSpec",
    "NodesSpec",
    "Overrides",
    "PlaceResponse",
    "PlanResponse",
    "ProgressChunk",
    "RandomBlocksSpec",
    "RandomNodesSpec",
    "RunRequest",
    "Scenario",
    "SceneSpec",
    "UavSpec",
]
