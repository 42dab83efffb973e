from .geometry import (
    Face,
    Point3,
    PrismBlock,
    Scene,
    face_vertices,
    footprint_polygon,
    footprint_vertices,
    from_block_frame,
    inside_footprint,
    lateral_faces,
    point_in_block,
    rotate_zyx,
    to_block_frame,
)
from .los_engine import (
    CoverageGrid,
    LosVector,
    SpatialVectorBatch,
    acceptable_region,
    blocked_mask,
    coverage_matrix,
    coverage_percent,
    los_vector,
    segment_blocked,
    spatial_vectors,
    union_coverage,
)
from .network_planner import (
    CapacityObjective,
    ClusterPlan,
    GeoObjective,
    GroundNodeSet,
    PlanFailure,
    avg_network_capacity,
    cluster_by_capacity,
    geo_cluster_and_reposition,
    geo_kmeans_plan,
    kmeans,
)
from .placement_opt import (
    CoverageObjective,
    GaConfig,
    ObjectiveFn,
    ObjectiveResult,
    PlacementState,
    ProgressEvent,
    cells_to_positions,
    evaluate_batch,
    ga_search,
    greedy_actions,
    greedy_descend,
    greedy_multistart,
    hybrid_search,
    random_cells,
    roulette_weights,
)
from .thz_channel import (
    Atmosphere,
    LinkParams,
    absorption_coefficient,
    channel_gain,
    free_space_factor,
    link_capacity,
    mixing_ratio,
    molecular_loss,
)

__all__ = [
    "Atmosphere",
    "CapacityObjective",
    "ClusterPlan",
    "CoverageGrid",
    "CoverageObjective",
    "Face",
    "GaConfig",
    "GeoObjective",
    "GroundNodeSet",
    "LinkParams",
    "LosVector",
    "ObjectiveFn",
    "ObjectiveResult",
    "PlacementState",
    "PlanFailure",
    "Point3",
    "PrismBlock",
    "ProgressEvent",
    "Scene",
    "SpatialVectorBatch",
    "absorption_coefficient",
    "acceptable_region",
    "avg_network_capacity",
    "blocked_mask",
    "cells_to_positions",
    "channel_gain",
    "cluster_by_capacity",
    "coverage_matrix",
    "coverage_percent",
    "evaluate_batch",
    "face_vertices",
    "footprint_polygon",
    "footprint_vertices",
    "free_space_factor",
    "from_block_frame",
    "ga_search",
    "geo_cluster_and_reposition",
    "geo_kmeans_plan",
    "greedy_actions",
    "greedy_descend",
    "greedy_multistart",
    "hybrid_search",
    "inside_footprint",
    "kmeans",
    "lateral_faces",
    "link_capacity",
    "los_vector",
    "mixing_ratio",
    "molecular_loss",
    "point_in_block",
    "random_cells",
    "rotate_zyx",
    "roulette_weights",
    "segment_blocked",
    "spatial_vectors",
    "to_block_frame",
    "union_coverage",
]
