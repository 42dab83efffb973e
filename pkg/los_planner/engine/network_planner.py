"""Joint node clustering and UAV positioning for average-capacity planning.

Three planners share one plan type:

* :func:`cluster_by_capacity` assigns each node to its best LoS UAV and fails on
  the first node no UAV can see.
* :func:`geo_cluster_and_reposition` clusters the same way, parks NLoS nodes with
  the nearest UAV, then moves each UAV to a random cell of its cluster's
  acceptable region.
* :func:`geo_kmeans_plan` clusters with k-means and snaps each centroid to the
  closest acceptable cell, keeping the best of several restarts.

Infeasibility is reported as a :class:`PlanFailure` value, never raised.
"""

from __future__ import annotations

import logging
import math
import time
from collections.abc import Sequence
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from ..exceptions import InvalidQueryError
from .geometry import Point3, Scene
from .los_engine import acceptable_region, los_vector
from .placement_opt import ObjectiveResult, ProgressCallback, ProgressEvent
from .thz_channel import Atmosphere, LinkParams, channel_gain, link_capacity

logger = logging.getLogger(__name__)

KMEANS_MAX_ITER = 300


@dataclass(frozen=True)
class GroundNodeSet:
    positions: tuple[Point3, ...]

    def __post_init__(self) -> None:
        if not self.positions:
            raise InvalidQueryError("a ground node set needs at least one node")
        object.__setattr__(self, "positions", tuple(self.positions))

    def __len__(self) -> int:
        return len(self.positions)

    def xy(self) -> np.ndarray:
        return np.array([[p.x, p.y] for p in self.positions], dtype=float)


@dataclass(frozen=True, eq=False)
class ClusterPlan:
    """Node-to-UAV assignment with UAV positions and the resulting capacities.

    ``link_los[k]`` is the LoS bit between node k and its assigned UAV and
    ``node_capacity[k]`` its spectral efficiency (0 for NLoS links).
    """

    nodes: GroundNodeSet
    assignment: tuple[int, ...]
    uav_positions: tuple[Point3, ...]
    link_los: tuple[bool, ...]
    node_capacity: tuple[float, ...]
    avg_capacity: float
    all_los: bool
    feasible_regions: tuple[np.ndarray | None, ...] | None = None

    def clusters(self) -> list[list[int]]:
        members: list[list[int]] = [[] for _ in self.uav_positions]
        for k, n in enumerate(self.assignment):
            members[n].append(k)
        return members


@dataclass(frozen=True, eq=False)
class PlanFailure:
    """Why a clustering failed.

    ``reason`` is ``"stranded_node"`` (``index`` is the first node no UAV sees)
    or ``"empty_region"`` (``index`` is the first cluster with an empty
    acceptable region). ``stranded`` lists every affected node.
    """

    reason: str
    index: int
    stranded: tuple[int, ...] = ()
    partial: ClusterPlan | None = None


def _check_uavs(uavs: Sequence[Point3]) -> None:
    if not uavs:
        raise InvalidQueryError("at least one UAV position is required")


def _pair_capacity(link: LinkParams, atm: Atmosphere, node: Point3, uav: Point3) -> float:
    return link_capacity(link, channel_gain(link, atm, node.distance_to(uav)))


def _link_table(
    nodes: GroundNodeSet, uavs: Sequence[Point3], scene: Scene, link: LinkParams, atm: Atmosphere
) -> tuple[np.ndarray, np.ndarray]:
    """LoS bits and masked capacities, both shaped (N_g, N_u)."""
    los = np.stack([np.array(los_vector(nodes.positions, uav, scene).bits) for uav in uavs], axis=1)
    capacity = np.zeros(los.shape)
    for k, node in enumerate(nodes.positions):
        for n, uav in enumerate(uavs):
            if los[k, n]:
                capacity[k, n] = _pair_capacity(link, atm, node, uav)
    return los, capacity


def _build_plan(
    nodes: GroundNodeSet,
    uavs: Sequence[Point3],
    assignment: Sequence[int],
    scene: Scene,
    link: LinkParams,
    atm: Atmosphere,
    regions: tuple[np.ndarray | None, ...] | None = None,
) -> ClusterPlan:
    link_los = [False] * len(nodes)
    for n, uav in enumerate(uavs):
        members = [k for k, a in enumerate(assignment) if a == n]
        if not members:
            continue
        bits = los_vector([nodes.positions[k] for k in members], uav, scene).bits
        for k, bit in zip(members, bits, strict=True):
            link_los[k] = bit
    node_capacity = [
        _pair_capacity(link, atm, node, uavs[a]) if link_los[k] else 0.0
        for k, (node, a) in enumerate(zip(nodes.positions, assignment, strict=True))
    ]
    return ClusterPlan(
        nodes=nodes,
        assignment=tuple(int(a) for a in assignment),
        uav_positions=tuple(uavs),
        link_los=tuple(link_los),
        node_capacity=tuple(node_capacity),
        avg_capacity=math.fsum(node_capacity) / len(nodes),
        all_los=all(link_los),
        feasible_regions=regions,
    )


def _nearest_uav(node: Point3, uavs: Sequence[Point3]) -> int:
    return int(np.argmin([node.distance_to(u) for u in uavs]))


def avg_network_capacity(plan: ClusterPlan, link: LinkParams, atm: Atmosphere) -> float:
    """Mean spectral efficiency over all nodes; NLoS links contribute 0."""
    total = math.fsum(
        _pair_capacity(link, atm, node, plan.uav_positions[n])
        for node, n, los in zip(plan.nodes.positions, plan.assignment, plan.link_los, strict=True)
        if los
    )
    return total / len(plan.nodes)


def cluster_by_capacity(
    nodes: GroundNodeSet,
    uavs: Sequence[Point3],
    scene: Scene,
    link: LinkParams,
    atm: Atmosphere,
) -> ClusterPlan | PlanFailure:
    """Assign every node to the LoS UAV offering the highest capacity."""
    _check_uavs(uavs)
    los, capacity = _link_table(nodes, uavs, scene, link, atm)
    stranded = tuple(int(k) for k in np.flatnonzero(~los.any(axis=1)))
    assignment = [
        int(np.argmax(capacity[k])) if los[k].any() else _nearest_uav(node, uavs)
        for k, node in enumerate(nodes.positions)
    ]
    plan = _build_plan(nodes, uavs, assignment, scene, link, atm)
    if stranded:
        return PlanFailure("stranded_node", stranded[0], stranded, partial=plan)
    return plan


def _region_cells(region: np.ndarray) -> np.ndarray:
    """1-based lattice indices of the true cells, in flat (row-major) order."""
    return np.argwhere(region) + 1


def geo_cluster_and_reposition(
    nodes: GroundNodeSet,
    uavs: Sequence[Point3],
    scene: Scene,
    link: LinkParams,
    atm: Atmosphere,
    rng: np.random.Generator,
) -> ClusterPlan | PlanFailure:
    """Capacity clustering with NLoS nodes parked at the nearest UAV, then a
    random move of every UAV into its cluster's acceptable region.

    UAVs keep their altitude. Empty clusters keep their UAV in place.
    """
    _check_uavs(uavs)
    los, capacity = _link_table(nodes, uavs, scene, link, atm)
    assignment = [
        int(np.argmax(capacity[k])) if los[k].any() else _nearest_uav(node, uavs)
        for k, node in enumerate(nodes.positions)
    ]
    positions = list(uavs)
    regions: list[np.ndarray | None] = []
    failed: list[int] = []
    for n, uav in enumerate(uavs):
        members = [nodes.positions[k] for k, a in enumerate(assignment) if a == n]
        if not members:
            regions.append(None)
            continue
        region = acceptable_region(members, scene, uav.z)
        regions.append(region)
        cells = _region_cells(region)
        if len(cells) == 0:
            failed.append(n)
            continue
        i, j = cells[int(rng.integers(len(cells)))]
        positions[n] = scene.uav_cell_point(int(i), int(j), uav.z)

    plan = _build_plan(nodes, positions, assignment, scene, link, atm, tuple(regions))
    if failed:
        stranded = tuple(k for k, a in enumerate(assignment) if a in failed)
        return PlanFailure("empty_region", failed[0], stranded, partial=plan)
    return plan


def _assign(xy: np.ndarray, centers: np.ndarray) -> np.ndarray:
    d2 = ((xy[:, None, :] - centers[None, :, :]) ** 2).sum(axis=-1)
    return np.argmin(d2, axis=1)


def kmeans(xy: np.ndarray, init: np.ndarray, max_iter: int = KMEANS_MAX_ITER) -> tuple[np.ndarray, np.ndarray]:
    """Lloyd iterations in the x-y plane until the centers repeat exactly.

    An empty cluster is re-seeded at the node farthest from its current center.
    """
    centers = np.array(init, dtype=float)
    for _ in range(max_iter):
        labels = _assign(xy, centers)
        updated = centers.copy()
        for n in range(len(centers)):
            members = xy[labels == n]
            if len(members):
                updated[n] = members.mean(axis=0)
            else:
                far = int(np.argmax(((xy - centers[n]) ** 2).sum(axis=1)))
                updated[n] = xy[far]
        if np.array_equal(updated, centers):
            return centers, labels
        centers = updated
    logger.warning(f"k-means hit the {max_iter}-iteration cap; keeping the last centers")
    return centers, _assign(xy, centers)


def _snap(scene: Scene, center: np.ndarray, region: np.ndarray, h_u: float) -> Point3:
    """Closest true cell of ``region`` to ``center`` (ties to the lowest flat index)."""
    plane = scene.uav_plane_points(h_u)
    d2 = (plane[..., 0] - center[0]) ** 2 + (plane[..., 1] - center[1]) ** 2
    d2 = np.where(region, d2, np.inf)
    flat = int(np.argmin(d2))
    i, j = np.unravel_index(flat, region.shape)
    return scene.uav_cell_point(int(i) + 1, int(j) + 1, h_u)


@dataclass(frozen=True, eq=False)
class _RestartOutcome:
    plan: ClusterPlan
    failed_clusters: int


def _kmeans_restart(
    nodes: GroundNodeSet,
    scene: Scene,
    link: LinkParams,
    atm: Atmosphere,
    init: np.ndarray,
    h_u: float,
) -> _RestartOutcome:
    centers, labels = kmeans(nodes.xy(), init)
    positions = []
    regions: list[np.ndarray | None] = []
    failed = 0
    for n, center in enumerate(centers):
        members = [nodes.positions[k] for k in np.flatnonzero(labels == n)]
        if not members:
            regions.append(None)
            positions.append(_snap(scene, center, np.ones((scene.nux, scene.nuy), dtype=bool), h_u))
            continue
        region = acceptable_region(members, scene, h_u)
        regions.append(region)
        if region.any():
            positions.append(_snap(scene, center, region, h_u))
        else:
            failed += 1
            positions.append(_snap(scene, center, np.ones_like(region), h_u))
    plan = _build_plan(nodes, positions, labels.tolist(), scene, link, atm, tuple(regions))
    return _RestartOutcome(plan, failed)


def geo_kmeans_plan(
    nodes: GroundNodeSet,
    scene: Scene,
    link: LinkParams,
    atm: Atmosphere,
    n_uav: int,
    n_restarts: int,
    rng: np.random.Generator,
    *,
    h_u: float,
    workers: int = 1,
    on_progress: ProgressCallback | None = None,
) -> ClusterPlan:
    """Best k-means clustering over random restarts, each UAV snapped into its acceptable region.

    When every restart leaves some cluster without an acceptable region, the
    plan with the fewest failed clusters (then the highest capacity) comes back
    with ``all_los`` false.
    """
    if n_uav < 1:
        raise InvalidQueryError("n_uav must be at least 1")
    if n_restarts < 1:
        raise InvalidQueryError("n_restarts must be at least 1")
    if h_u > scene.h_max:
        raise InvalidQueryError(f"altitude {h_u} exceeds h_max {scene.h_max}")
    inits = [rng.uniform((0.0, 0.0), (scene.dx, scene.dy), size=(n_uav, 2)) for _ in range(n_restarts)]

    def run(init: np.ndarray) -> _RestartOutcome:
        return _kmeans_restart(nodes, scene, link, atm, init, h_u)

    started = time.perf_counter()
    pool = ThreadPoolExecutor(max_workers=workers) if workers > 1 else None
    best: ClusterPlan | None = None
    fallback: _RestartOutcome | None = None
    try:
        outcomes = pool.map(run, inits) if pool is not None else map(run, inits)
        for restart, outcome in enumerate(outcomes):
            if outcome.failed_clusters == 0:
                if best is None or outcome.plan.avg_capacity > best.avg_capacity:
                    best = outcome.plan
            elif fallback is None or (outcome.failed_clusters, -outcome.plan.avg_capacity) < (
                fallback.failed_clusters,
                -fallback.plan.avg_capacity,
            ):
                fallback = outcome
            if on_progress is not None:
                current = best.avg_capacity if best is not None else 0.0
                on_progress(
                    ProgressEvent("geokmeans", restart + 1, restart + 1, current, time.perf_counter() - started)
                )
    finally:
        if pool is not None:
            pool.shutdown()

    if best is not None:
        return best
    assert fallback is not None
    logger.warning(f"all {n_restarts} k-means restarts left a cluster without an acceptable region")
    return fallback.plan


class CapacityObjective:
    """Average capacity of capacity-based clustering for a UAV placement.

    Placements that strand nodes score -100 * stranded / N_g, below every
    feasible placement.
    """

    def __init__(self, nodes: GroundNodeSet, scene: Scene, link: LinkParams, atm: Atmosphere, altitude: float):
        self.nodes = nodes
        self.scene = scene
        self.link = link
        self.atm = atm
        self.altitude = altitude

    def __call__(self, positions: Sequence[Point3]) -> ObjectiveResult:
        outcome = cluster_by_capacity(self.nodes, positions, self.scene, self.link, self.atm)
        if isinstance(outcome, PlanFailure):
            return ObjectiveResult(-100.0 * len(outcome.stranded) / len(self.nodes), payload=outcome)
        return ObjectiveResult(outcome.avg_capacity, payload=outcome)


class GeoObjective:
    """Geometric clustering and repositioning as a search objective.

    The repaired UAV positions come back in the result so population drivers
    can continue from them. The random cell draw is seeded from ``seed`` and
    the incoming lattice indices, so equal inputs give equal outputs.
    """

    def __init__(
        self,
        nodes: GroundNodeSet,
        scene: Scene,
        link: LinkParams,
        atm: Atmosphere,
        altitude: float,
        seed: int = 0,
    ):
        self.nodes = nodes
        self.scene = scene
        self.link = link
        self.atm = atm
        self.altitude = altitude
        self.seed = seed

    def __call__(self, positions: Sequence[Point3]) -> ObjectiveResult:
        indices = [v for p in positions for v in self.scene.uav_cell_index(p.x, p.y)]
        rng = np.random.default_rng([self.seed, *(max(v, 0) for v in indices)])
        outcome = geo_cluster_and_reposition(self.nodes, positions, self.scene, self.link, self.atm, rng)
        if isinstance(outcome, PlanFailure):
            value = -100.0 * len(outcome.stranded) / len(self.nodes)
            repaired = outcome.partial.uav_positions if outcome.partial is not None else None
            return ObjectiveResult(value, payload=outcome, positions=repaired)
        return ObjectiveResult(outcome.avg_capacity, payload=outcome, positions=outcome.uav_positions)
