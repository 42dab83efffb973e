"""Seeded scene and ground-node generation."""

import logging
import math

import numpy as np
from shapely import contains_xy
from shapely.ops import unary_union

from ..engine import GroundNodeSet, Point3, PrismBlock, Scene, footprint_polygon
from ..exceptions import ScenarioValidationError
from ..models import BlockSpec, NodesSpec, Scenario

logger = logging.getLogger(__name__)

MAX_NODE_TRIES = 1000


def block_from_spec(spec: BlockSpec) -> PrismBlock:
    theta = math.radians(spec.rotation_deg)
    if spec.size is not None:
        return PrismBlock.cuboid(
            spec.center[0],
            spec.center[1],
            spec.size[0],
            spec.size[1],
            spec.height,
            theta=theta,
            base_z=spec.base_z,
            name=spec.name,
        )
    return PrismBlock(
        center_x=spec.center[0],
        center_y=spec.center[1],
        base_z=spec.base_z,
        height=spec.height,
        side_count=spec.sides,
        theta=theta,
        circumradius=spec.radius,
        name=spec.name,
    )


def random_blocks(scenario: Scenario, rng: np.random.Generator) -> list[PrismBlock]:
    spec = scenario.scene.random
    if spec is None or spec.block_count == 0:
        return []
    blocks = []
    for m in range(spec.block_count):
        cx = rng.uniform(0.0, scenario.area.dx)
        cy = rng.uniform(0.0, scenario.area.dy)
        sx = rng.uniform(*spec.size_x)
        sy = rng.uniform(*spec.size_y)
        height = rng.uniform(spec.height_mean - spec.height_spread, spec.height_mean + spec.height_spread)
        theta = math.radians(rng.uniform(*spec.rotation_deg))
        blocks.append(PrismBlock.cuboid(cx, cy, sx, sy, height, theta=theta, name=f"random-{m}"))
    return blocks


def roof_heights(scene_blocks: list[PrismBlock], gx: np.ndarray, gy: np.ndarray) -> np.ndarray:
    """Highest roof over each (x, y), 0 where no footprint covers it."""
    heights = np.zeros(gx.shape)
    for block in scene_blocks:
        inside = np.asarray(contains_xy(footprint_polygon(block), gx, gy), dtype=bool)
        heights = np.where(inside, np.maximum(heights, block.height), heights)
    return heights


def generate_scene(scenario: Scenario, seed: int | np.random.SeedSequence) -> Scene:
    """Explicit blocks plus seeded random blocks, on the scenario's grids."""
    rng = np.random.default_rng(seed)
    blocks = [block_from_spec(b) for b in scenario.scene.blocks]
    blocks += random_blocks(scenario, rng)
    grid = scenario.grid
    scene = Scene.flat(
        scenario.area.dx,
        scenario.area.dy,
        grid.nx,
        grid.ny,
        grid.nux,
        grid.nuy,
        blocks=blocks,
        h_max=scenario.scene.h_max,
    )
    ground = np.zeros((grid.nx, grid.ny))
    if scenario.scene.roof_ground and blocks:
        gx, gy = scene.ground_xy()
        ground = roof_heights(blocks, gx, gy)
        # Cell (1, 1) is the height reference.
        ground[0, 0] = 0.0
    logger.debug(f"Generated scene with {len(blocks)} blocks")
    return Scene(
        dx=scene.dx,
        dy=scene.dy,
        nx=scene.nx,
        ny=scene.ny,
        nux=scene.nux,
        nuy=scene.nuy,
        ground_height=ground,
        blocks=scene.blocks,
        h_max=scene.h_max,
        exclude_footprint_cells=scenario.scene.exclude_footprint_cells,
    )


def _node_at(scene: Scene, x: float, y: float, z: float | None = None) -> Point3:
    if z is not None:
        return Point3(x, y, z)
    # Nodes rest on the street (z = 0) or on the highest roof covering them.
    roof = roof_heights(list(scene.blocks), np.array(x), np.array(y))
    return Point3(x, y, float(roof))


def generate_nodes(spec: NodesSpec, scene: Scene, seed: int | np.random.SeedSequence) -> GroundNodeSet:
    """Explicit nodes plus random ones, rejection-sampled outside every footprint
    unless roof placement is allowed."""
    nodes = [_node_at(scene, *pos) for pos in spec.positions]
    if spec.random is not None:
        rng = np.random.default_rng(seed)
        union = unary_union([footprint_polygon(b) for b in scene.blocks]) if scene.blocks else None
        placed = 0
        tries = 0
        while placed < spec.random.count:
            tries += 1
            if tries > MAX_NODE_TRIES * spec.random.count:
                raise ScenarioValidationError(
                    f"could only place {placed} of {spec.random.count} nodes outside the footprints",
                    location="nodes.random.count",
                )
            x = rng.uniform(0.0, scene.dx)
            y = rng.uniform(0.0, scene.dy)
            if not spec.random.on_roofs and union is not None and contains_xy(union, x, y):
                continue
            nodes.append(_node_at(scene, x, y))
            placed += 1
    if not nodes:
        raise ScenarioValidationError("the scenario defines no ground nodes", location="nodes")
    return GroundNodeSet(tuple(nodes))
