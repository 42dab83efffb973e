"""Line-of-sight classification of ground cells, nodes and plane-A cells.

Every query funnels into :func:`blocked_mask`, which evaluates whole batches of
segments against each block face with element-wise products of the spatial
vector matrices. :func:`segment_blocked` is the same kernel on a one-element
batch, so per-cell and batch answers agree bit for bit.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence
from dataclasses import dataclass

import numpy as np

from ..exceptions import DimensionMismatchError, InvalidQueryError, OccludedEndpointError
from .geometry import Face, Point3, PrismBlock, Scene, frame_xy, inside_footprint, lateral_faces, point_in_block


@dataclass(frozen=True, eq=False)
class CoverageGrid:
    """LoS bits over a grid (true = LoS) for the endpoint named by ``source``."""

    bits: np.ndarray
    source: str = ""

    def __post_init__(self) -> None:
        bits = np.array(self.bits, dtype=bool)
        if bits.ndim != 2:
            raise DimensionMismatchError(f"coverage grid must be 2-D, got shape {bits.shape}")
        bits.setflags(write=False)
        object.__setattr__(self, "bits", bits)

    @property
    def rows(self) -> int:
        return int(self.bits.shape[0])

    @property
    def cols(self) -> int:
        return int(self.bits.shape[1])

    @property
    def los_count(self) -> int:
        return int(np.count_nonzero(self.bits))

    def complement(self) -> CoverageGrid:
        """The NLoS grid C' = 1 - C."""
        return CoverageGrid(~self.bits, source=self.source)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, CoverageGrid):
            return NotImplemented
        return self.bits.shape == other.bits.shape and bool(np.array_equal(self.bits, other.bits))

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class LosVector:
    bits: tuple[bool, ...]

    def __len__(self) -> int:
        return len(self.bits)

    def __getitem__(self, k: int) -> bool:
        return self.bits[k]

    @property
    def all_los(self) -> bool:
        return all(self.bits)


@dataclass(frozen=True, eq=False)
class SpatialVectorBatch:
    """Spatial vectors V = p'_source - p'_target in one block frame.

    Reciprocals use NaN where a component is zero; any comparison against NaN is
    false, so a segment parallel to a face plane never hits that face.
    """

    vx: np.ndarray
    vy: np.ndarray
    vz: np.ndarray
    vx_inv: np.ndarray
    vy_inv: np.ndarray
    vz_inv: np.ndarray
    sx: np.ndarray
    sy: np.ndarray
    sz: np.ndarray


def _reciprocal(v: np.ndarray) -> np.ndarray:
    out = np.full(v.shape, np.nan)
    np.divide(1.0, v, out=out, where=v != 0.0)
    return out


def spatial_vectors(source: np.ndarray, targets: np.ndarray, theta: float) -> SpatialVectorBatch:
    """Build V_x, V_y, V_z and their reciprocals in the frame rotated by theta."""
    source = np.asarray(source, dtype=float)
    targets = np.asarray(targets, dtype=float)
    if theta == 0.0:
        sx, sy = source[..., 0], source[..., 1]
        tx, ty = targets[..., 0], targets[..., 1]
    else:
        sx, sy = frame_xy(source[..., 0], source[..., 1], theta)
        tx, ty = frame_xy(targets[..., 0], targets[..., 1], theta)
    sz = source[..., 2]
    vx = np.asarray(sx - tx, dtype=float)
    vy = np.asarray(sy - ty, dtype=float)
    vz = np.asarray(sz - targets[..., 2], dtype=float)
    return SpatialVectorBatch(
        vx=vx,
        vy=vy,
        vz=vz,
        vx_inv=_reciprocal(vx),
        vy_inv=_reciprocal(vy),
        vz_inv=_reciprocal(vz),
        sx=np.broadcast_to(sx, vx.shape),
        sy=np.broadcast_to(sy, vx.shape),
        sz=np.broadcast_to(sz, vx.shape),
    )


def _canonical_pairs(a: np.ndarray, b: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Order every pair so the higher endpoint (then larger x, then larger y) comes first."""
    a, b = np.broadcast_arrays(np.asarray(a, dtype=float), np.asarray(b, dtype=float))
    az, bz = a[..., 2], b[..., 2]
    ax, bx = a[..., 0], b[..., 0]
    ay, by = a[..., 1], b[..., 1]
    swap = (az < bz) | ((az == bz) & ((ax < bx) | ((ax == bx) & (ay < by))))
    swap = swap[..., None]
    return np.where(swap, b, a), np.where(swap, a, b)


def _lateral_hits(face: Face, batch: SpatialVectorBatch) -> np.ndarray:
    if face.axis == "x":
        lam = (face.offset - batch.sx) * batch.vx_inv
        lateral = batch.vy * lam + batch.sy
    else:
        lam = (face.offset - batch.sy) * batch.vy_inv
        lateral = batch.vx * lam + batch.sx
    z = batch.vz * lam + batch.sz
    lo, hi = face.lateral
    zlo, zhi = face.vertical
    # -1 < lam < 0 is the open segment between source and target.
    return (
        (lam > -1.0) & (lam < 0.0) & (lo < lateral) & (lateral < hi) & (zlo < z) & (z < zhi)
    )


def _cap_hits(
    z_plane: float, faces: tuple[Face, ...], world: SpatialVectorBatch, target_z: np.ndarray
) -> np.ndarray:
    # Sources are never below targets; the plane must lie strictly between the two heights.
    crossing = (z_plane < world.sz) & (target_z < z_plane)
    lam = (z_plane - world.sz) * world.vz_inv
    hit_x = world.vx * lam + world.sx
    hit_y = world.vy * lam + world.sy
    if not crossing.any():
        return crossing
    return crossing & inside_footprint(faces, hit_x, hit_y)


def _block_mask(
    block: PrismBlock,
    faces: tuple[Face, ...],
    world: SpatialVectorBatch,
    first: np.ndarray,
    second: np.ndarray,
    frames: dict[float, SpatialVectorBatch],
) -> np.ndarray:
    blocked = np.zeros(world.vx.shape, dtype=bool)
    for face in faces:
        batch = frames.get(face.theta)
        if batch is None:
            batch = spatial_vectors(first, second, face.theta)
            frames[face.theta] = batch
        with np.errstate(invalid="ignore"):
            blocked |= _lateral_hits(face, batch)
    with np.errstate(invalid="ignore"):
        blocked |= _cap_hits(block.height, faces, world, second[..., 2])
        blocked |= _cap_hits(block.base_z, faces, world, second[..., 2])
    return blocked


def blocked_mask(
    a: np.ndarray,
    b: np.ndarray,
    blocks: Sequence[PrismBlock],
    faces: Sequence[tuple[Face, ...]] | None = None,
) -> np.ndarray:
    """True where the open segment (a, b) crosses any block.

    ``a`` and ``b`` broadcast against each other with a trailing axis of 3.
    Occlusion by several blocks is clamped to a single true.
    """
    first, second = _canonical_pairs(a, b)
    blocked = np.zeros(first.shape[:-1], dtype=bool)
    if not blocks:
        return blocked
    if faces is None:
        faces = [lateral_faces(block) for block in blocks]
    world = spatial_vectors(first, second, 0.0)
    for block, block_faces in zip(blocks, faces, strict=True):
        frames: dict[float, SpatialVectorBatch] = {0.0: world}
        blocked |= _block_mask(block, block_faces, world, first, second, frames)
    return blocked


def _scene_blocked(scene: Scene, a: np.ndarray, b: np.ndarray) -> np.ndarray:
    faces = [scene.faces_of(k) for k in range(len(scene.blocks))]
    return blocked_mask(a, b, scene.blocks, faces)


def segment_blocked(a: Point3, b: Point3, block: PrismBlock) -> bool:
    """True iff the open segment (a, b) intersects the block volume."""
    if a == b:
        raise InvalidQueryError("degenerate segment: both endpoints coincide")
    mask = blocked_mask(a.as_array()[None, :], b.as_array()[None, :], [block])
    return bool(mask[0])


def _check_endpoint(scene: Scene, uav: Point3) -> None:
    if uav.z > scene.h_max:
        raise InvalidQueryError(f"UAV altitude {uav.z} exceeds h_max {scene.h_max}")
    if uav.z <= scene.ground_height_at(uav.x, uav.y):
        raise OccludedEndpointError(f"endpoint occluded at source: {uav} is not above the ground")
    for block in scene.blocks:
        if point_in_block(uav, block):
            raise OccludedEndpointError(f"endpoint occluded at source: {uav} lies inside {block.name or 'a block'}")


def coverage_matrix(scene: Scene, uav: Point3, source: str | None = None) -> CoverageGrid:
    """LoS grid C_n of every ground cell with respect to one UAV."""
    _check_endpoint(scene, uav)
    blocked = _scene_blocked(scene, uav.as_array(), scene.ground_points())
    return CoverageGrid(~blocked, source=source or f"uav({uav.x:g},{uav.y:g},{uav.z:g})")


def los_vector(points: Sequence[Point3], uav: Point3, scene: Scene) -> LosVector:
    """LoS bit of each point with respect to ``uav``."""
    if not points:
        raise InvalidQueryError("los_vector needs at least one point")
    targets = np.array([p.as_array() for p in points])
    source = uav.as_array()
    if np.any(np.all(targets == source, axis=-1)):
        raise InvalidQueryError("degenerate segment: a point coincides with the endpoint")
    blocked = _scene_blocked(scene, source, targets)
    return LosVector(tuple(bool(v) for v in ~blocked))


def acceptable_region(cluster_points: Sequence[Point3], scene: Scene, h_u: float) -> np.ndarray:
    """Plane-A cells (Nux x Nuy) from which every cluster point is in LoS."""
    if not cluster_points:
        raise InvalidQueryError("acceptable_region needs a nonempty cluster")
    if h_u > scene.h_max:
        raise InvalidQueryError(f"altitude {h_u} exceeds h_max {scene.h_max}")
    plane = scene.uav_plane_points(h_u)
    region = np.ones(plane.shape[:-1], dtype=bool)
    for point in cluster_points:
        region &= ~_scene_blocked(scene, point.as_array(), plane)
        if not region.any():
            break
    return region


def union_coverage(grids: Iterable[CoverageGrid]) -> CoverageGrid:
    """Element-wise OR of LoS grids (C = sum C_n, counted as nonzero)."""
    grids = list(grids)
    if not grids:
        raise InvalidQueryError("union_coverage needs at least one grid")
    shape = grids[0].bits.shape
    bits = np.zeros(shape, dtype=bool)
    for grid in grids:
        if grid.bits.shape != shape:
            raise DimensionMismatchError(f"grid shape {grid.bits.shape} differs from {shape}")
        bits |= grid.bits
    return CoverageGrid(bits, source="+".join(g.source for g in grids))


def coverage_percent(grid: CoverageGrid, counted: np.ndarray | None = None) -> float:
    """Percentage of LoS cells; ``counted`` restricts the denominator (street-only statistic)."""
    if counted is None:
        return 100.0 * grid.los_count / grid.bits.size
    counted = np.asarray(counted, dtype=bool)
    if counted.shape != grid.bits.shape:
        raise DimensionMismatchError("counted mask does not match the grid")
    total = int(np.count_nonzero(counted))
    if total == 0:
        return 0.0
    return 100.0 * int(np.count_nonzero(grid.bits & counted)) / total
