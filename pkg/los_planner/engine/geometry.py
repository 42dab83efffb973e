"""Coordinate frames, rotations, prism faces and grid conventions.

Conventions
-----------
* Ground cell (i, j), 1-based, sits at ``(i * dx / Nx, j * dy / Ny, h_ij)``; there
  is no half-cell offset, so cell (Nx, Ny) lies on the far boundary of S.
  Arrays are 0-based: ``ground_height[i - 1, j - 1]`` is ``h_ij``.
* UAV candidate cell (i, j) of plane A sits at ``(i * dx / Nux, j * dy / Nuy, h_u)``.
* Angles are radians inside the engine.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np
from shapely import contains_xy
from shapely.geometry import Polygon
from shapely.ops import unary_union

from ..exceptions import InvalidQueryError


@dataclass(frozen=True)
class Point3:
    x: float
    y: float
    z: float

    def __post_init__(self) -> None:
        if not (math.isfinite(self.x) and math.isfinite(self.y) and math.isfinite(self.z)):
            raise InvalidQueryError(f"non-finite point {self}")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)

    @classmethod
    def from_array(cls, values: np.ndarray) -> Point3:
        return cls(float(values[0]), float(values[1]), float(values[2]))

    def distance_to(self, other: Point3) -> float:
        return math.sqrt(
            (self.x - other.x) ** 2 + (self.y - other.y) ** 2 + (self.z - other.z) ** 2
        )


@dataclass(frozen=True)
class Face:
    """One vertical face of a prism, described in its own rotated frame.

    The face plane is ``coord(axis) == offset`` in the frame rotated by ``theta``
    about z. ``lateral`` bounds the other horizontal coordinate of that frame and
    ``vertical`` bounds z. ``outward`` is +1 when the prism interior lies at
    coordinates below ``offset`` and -1 when it lies above.
    """

    theta: float
    axis: Literal["x", "y"]
    offset: float
    lateral: tuple[float, float]
    vertical: tuple[float, float]
    outward: int


@dataclass(frozen=True)
class PrismBlock:
    """Convex vertical prism obstacle.

    ``height`` is the absolute roof elevation, not the extent above ``base_z``.
    Four-sided blocks use ``half_extents``; other side counts (and four-sided
    blocks given only a circumradius) are regular polygons.
    """

    center_x: float
    center_y: float
    base_z: float
    height: float
    side_count: int = 4
    theta: float = 0.0
    half_extents: tuple[float, float] | None = None
    circumradius: float | None = None
    name: str | None = None

    def __post_init__(self) -> None:
        label = self.name or f"block@({self.center_x}, {self.center_y})"
        if not self.height > self.base_z:
            raise InvalidQueryError(f"{label}: height must exceed base_z")
        if self.side_count < 3:
            raise InvalidQueryError(f"{label}: side_count must be at least 3")
        if self.half_extents is not None:
            if self.side_count != 4:
                raise InvalidQueryError(f"{label}: half_extents only apply to 4-sided blocks")
            if min(self.half_extents) <= 0:
                raise InvalidQueryError(f"{label}: half extents must be positive")
        elif self.circumradius is None or self.circumradius <= 0:
            raise InvalidQueryError(f"{label}: needs half_extents or a positive circumradius")

    @classmethod
    def cuboid(
        cls,
        center_x: float,
        center_y: float,
        size_x: float,
        size_y: float,
        height: float,
        theta: float = 0.0,
        base_z: float = 0.0,
        name: str | None = None,
    ) -> PrismBlock:
        """The seven-parameter rectangular block."""
        return cls(
            center_x=center_x,
            center_y=center_y,
            base_z=base_z,
            height=height,
            side_count=4,
            theta=theta,
            half_extents=(size_x / 2.0, size_y / 2.0),
            name=name,
        )

    @property
    def bounding_radius(self) -> float:
        if self.half_extents is not None:
            return math.hypot(*self.half_extents)
        assert self.circumradius is not None
        return self.circumradius


@dataclass(frozen=True, eq=False)
class Scene:
    dx: float
    dy: float
    nx: int
    ny: int
    nux: int
    nuy: int
    ground_height: np.ndarray
    blocks: tuple[PrismBlock, ...] = ()
    h_max: float = 300.0
    exclude_footprint_cells: bool = False
    _faces: tuple[tuple[Face, ...], ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        heights = np.asarray(self.ground_height, dtype=float)
        if heights.shape != (self.nx, self.ny):
            raise InvalidQueryError(
                f"ground_height shape {heights.shape} does not match grid ({self.nx}, {self.ny})"
            )
        if heights[0, 0] != 0.0:
            raise InvalidQueryError("ground_height[1][1] is the reference cell and must be 0")
        if min(self.nx, self.ny, self.nux, self.nuy) < 1 or self.dx <= 0 or self.dy <= 0:
            raise InvalidQueryError("area and grid sizes must be positive")
        heights.setflags(write=False)
        object.__setattr__(self, "ground_height", heights)
        object.__setattr__(self, "blocks", tuple(self.blocks))
        object.__setattr__(self, "_faces", tuple(lateral_faces(b) for b in self.blocks))

    @classmethod
    def flat(
        cls,
        dx: float,
        dy: float,
        nx: int,
        ny: int,
        nux: int | None = None,
        nuy: int | None = None,
        blocks: tuple[PrismBlock, ...] | list[PrismBlock] = (),
        h_max: float = 300.0,
    ) -> Scene:
        return cls(
            dx=dx,
            dy=dy,
            nx=nx,
            ny=ny,
            nux=nux or nx,
            nuy=nuy or ny,
            ground_height=np.zeros((nx, ny)),
            blocks=tuple(blocks),
            h_max=h_max,
        )

    def faces_of(self, index: int) -> tuple[Face, ...]:
        return self._faces[index]

    @property
    def cell_size(self) -> tuple[float, float]:
        return self.dx / self.nx, self.dy / self.ny

    @property
    def uav_cell_size(self) -> tuple[float, float]:
        return self.dx / self.nux, self.dy / self.nuy

    @property
    def diagonal(self) -> float:
        return math.hypot(self.dx, self.dy)

    def ground_xy(self) -> tuple[np.ndarray, np.ndarray]:
        """World x and y of every ground cell, each shaped (Nx, Ny)."""
        cx, cy = self.cell_size
        xs = np.arange(1, self.nx + 1, dtype=float) * cx
        ys = np.arange(1, self.ny + 1, dtype=float) * cy
        return np.meshgrid(xs, ys, indexing="ij")

    def ground_points(self) -> np.ndarray:
        """(Nx, Ny, 3) positions p_ij."""
        gx, gy = self.ground_xy()
        return np.stack([gx, gy, self.ground_height], axis=-1)

    def uav_plane_points(self, h_u: float) -> np.ndarray:
        """(Nux, Nuy, 3) positions p_aij on plane A at altitude h_u."""
        ux, uy = self.uav_cell_size
        xs = np.arange(1, self.nux + 1, dtype=float) * ux
        ys = np.arange(1, self.nuy + 1, dtype=float) * uy
        gx, gy = np.meshgrid(xs, ys, indexing="ij")
        return np.stack([gx, gy, np.full_like(gx, float(h_u))], axis=-1)

    def uav_cell_point(self, i: int, j: int, h_u: float) -> Point3:
        """Plane-A lattice point for 1-based indices, bit-identical to uav_plane_points."""
        ux, uy = self.uav_cell_size
        return Point3(float(np.float64(i) * ux), float(np.float64(j) * uy), float(h_u))

    def uav_cell_index(self, x: float, y: float) -> tuple[int, int]:
        """1-based lattice indices of the plane-A cell nearest to (x, y)."""
        ux, uy = self.uav_cell_size
        return int(round(x / ux)), int(round(y / uy))

    def in_uav_lattice(self, i: int, j: int) -> bool:
        return 1 <= i <= self.nux and 1 <= j <= self.nuy

    def ground_height_at(self, x: float, y: float) -> float:
        """Height of the ground cell nearest to (x, y)."""
        cx, cy = self.cell_size
        i = min(max(int(round(x / cx)), 1), self.nx)
        j = min(max(int(round(y / cy)), 1), self.ny)
        return float(self.ground_height[i - 1, j - 1])

    def footprint_mask(self) -> np.ndarray:
        """(Nx, Ny) boolean, true for cells whose centre lies inside any footprint."""
        if not self.blocks:
            return np.zeros((self.nx, self.ny), dtype=bool)
        gx, gy = self.ground_xy()
        union = unary_union([footprint_polygon(b) for b in self.blocks])
        return np.asarray(contains_xy(union, gx, gy), dtype=bool)

    def counted_cells(self) -> np.ndarray | None:
        """Cells in the coverage denominator, or None when every cell counts."""
        if not self.exclude_footprint_cells:
            return None
        return ~self.footprint_mask()


def _rotation_z(theta: float) -> np.ndarray:
    c, s = math.cos(theta), math.sin(theta)
    return np.array([[c, -s, 0.0], [s, c, 0.0], [0.0, 0.0, 1.0]])


def frame_xy(x: np.ndarray | float, y: np.ndarray | float, theta: float):
    """Horizontal coordinates in the frame rotated by theta (R^-1 applied)."""
    c, s = math.cos(theta), math.sin(theta)
    return c * x + s * y, -s * x + c * y


def to_block_frame(p: Point3, theta: float) -> Point3:
    """f' = R^-1 f for the z-rotation R by theta."""
    if not math.isfinite(theta):
        raise InvalidQueryError("theta must be finite")
    xp, yp = frame_xy(p.x, p.y, theta)
    return Point3(xp, yp, p.z)


def from_block_frame(p_prime: Point3, theta: float) -> Point3:
    """f = R f'."""
    if not math.isfinite(theta):
        raise InvalidQueryError("theta must be finite")
    c, s = math.cos(theta), math.sin(theta)
    return Point3(c * p_prime.x - s * p_prime.y, s * p_prime.x + c * p_prime.y, p_prime.z)


def rotate_zyx(p: Point3, theta_z: float, theta_y: float, theta_x: float) -> Point3:
    """Apply R_z(theta_z) R_y(theta_y) R_x(theta_x) to p (standard SO(3) axis rotations)."""
    if not all(math.isfinite(a) for a in (theta_z, theta_y, theta_x)):
        raise InvalidQueryError("rotation angles must be finite")
    cy, sy = math.cos(theta_y), math.sin(theta_y)
    cx, sx = math.cos(theta_x), math.sin(theta_x)
    r_y = np.array([[cy, 0.0, sy], [0.0, 1.0, 0.0], [-sy, 0.0, cy]])
    r_x = np.array([[1.0, 0.0, 0.0], [0.0, cx, -sx], [0.0, sx, cx]])
    rotated = _rotation_z(theta_z) @ r_y @ r_x @ p.as_array()
    return Point3.from_array(rotated)


def _regular_faces(block: PrismBlock) -> tuple[Face, ...]:
    assert block.circumradius is not None
    n = block.side_count
    apothem = block.circumradius * math.cos(math.pi / n)
    half_side = block.circumradius * math.sin(math.pi / n)
    faces = []
    for k in range(n):
        # Face k joins vertices k and k + 1; its frame x axis is the outward normal.
        phi = block.theta + 2.0 * math.pi * (k + 0.5) / n
        cx, cy = frame_xy(block.center_x, block.center_y, phi)
        faces.append(
            Face(
                theta=phi,
                axis="x",
                offset=cx + apothem,
                lateral=(cy - half_side, cy + half_side),
                vertical=(block.base_z, block.height),
                outward=1,
            )
        )
    return tuple(faces)


def lateral_faces(b: PrismBlock) -> tuple[Face, ...]:
    """Vertical faces of a block, each with its own frame.

    Rectangular blocks give s_m1..s_m4 (planes X'_m1, Y'_m2, X'_m2, Y'_m1) in the
    shared block frame.
    """
    if b.half_extents is None:
        return _regular_faces(b)
    hx, hy = b.half_extents
    if b.theta == 0.0:
        bx, by = b.center_x, b.center_y
    else:
        bx, by = frame_xy(b.center_x, b.center_y, b.theta)
    x1, x2 = bx - hx, bx + hx
    y1, y2 = by - hy, by + hy
    vertical = (b.base_z, b.height)
    return (
        Face(b.theta, "x", x1, (y1, y2), vertical, -1),
        Face(b.theta, "y", y2, (x1, x2), vertical, 1),
        Face(b.theta, "x", x2, (y1, y2), vertical, 1),
        Face(b.theta, "y", y1, (x1, x2), vertical, -1),
    )


def footprint_vertices(b: PrismBlock) -> list[tuple[float, float]]:
    """Footprint corners built directly from the block parameters, counter-clockwise."""
    if b.half_extents is not None:
        hx, hy = b.half_extents
        local = [(-hx, -hy), (hx, -hy), (hx, hy), (-hx, hy)]
    else:
        assert b.circumradius is not None
        n = b.side_count
        local = [
            (
                b.circumradius * math.cos(2.0 * math.pi * k / n),
                b.circumradius * math.sin(2.0 * math.pi * k / n),
            )
            for k in range(n)
        ]
    c, s = math.cos(b.theta), math.sin(b.theta)
    return [(b.center_x + c * u - s * v, b.center_y + s * u + c * v) for u, v in local]


def face_vertices(face: Face) -> tuple[tuple[float, float], tuple[float, float]]:
    """World (x, y) endpoints of a face's bottom edge."""
    if face.axis == "x":
        ends = [(face.offset, face.lateral[0]), (face.offset, face.lateral[1])]
    else:
        ends = [(face.lateral[0], face.offset), (face.lateral[1], face.offset)]
    c, s = math.cos(face.theta), math.sin(face.theta)
    (u0, v0), (u1, v1) = ends
    return (c * u0 - s * v0, s * u0 + c * v0), (c * u1 - s * v1, s * u1 + c * v1)


def footprint_polygon(b: PrismBlock) -> Polygon:
    return Polygon(footprint_vertices(b))


def inside_footprint(faces: tuple[Face, ...], x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Strict inside test of world (x, y) against every face half-plane."""
    inside = np.ones(np.shape(x), dtype=bool)
    for face in faces:
        if face.theta == 0.0:
            u, v = x, y
        else:
            u, v = frame_xy(x, y, face.theta)
        coord = u if face.axis == "x" else v
        inside &= face.outward * (coord - face.offset) < 0.0
    return inside


def point_in_block(p: Point3, b: PrismBlock) -> bool:
    """Strict interior test (boundary points are outside)."""
    if not b.base_z < p.z < b.height:
        return False
    faces = lateral_faces(b)
    return bool(inside_footprint(faces, np.array(p.x), np.array(p.y)))
