import math

import numpy as np
import pytest

from los_planner.engine import (
    Point3,
    PrismBlock,
    Scene,
    face_vertices,
    footprint_polygon,
    footprint_vertices,
    from_block_frame,
    lateral_faces,
    point_in_block,
    rotate_zyx,
    to_block_frame,
)
from los_planner.exceptions import InvalidQueryError


def test_to_block_frame_identity():
    assert to_block_frame(Point3(1.0, 0.0, 5.0), 0.0) == Point3(1.0, 0.0, 5.0)


def test_to_block_frame_quarter_turn():
    p = to_block_frame(Point3(1.0, 0.0, 5.0), math.pi / 2)
    assert p.x == pytest.approx(0.0, abs=1e-12)
    assert p.y == pytest.approx(-1.0, abs=1e-12)
    assert p.z == 5.0


def test_from_block_frame_quarter_turn():
    p = from_block_frame(Point3(0.0, -1.0, 5.0), math.pi / 2)
    assert p.x == pytest.approx(1.0, abs=1e-12)
    assert p.y == pytest.approx(0.0, abs=1e-12)
    assert p.z == 5.0


def test_block_frame_round_trip(rng):
    for _ in range(100):
        p = Point3(*rng.uniform(-500.0, 500.0, 3))
        theta = rng.uniform(-2 * math.pi, 2 * math.pi)
        back = from_block_frame(to_block_frame(p, theta), theta)
        assert back.x == pytest.approx(p.x, abs=1e-12 * 500)
        assert back.y == pytest.approx(p.y, abs=1e-12 * 500)
        assert back.z == p.z


def test_block_frame_rejects_non_finite_angle():
    with pytest.raises(InvalidQueryError):
        to_block_frame(Point3(1.0, 2.0, 3.0), math.inf)


def test_point_rejects_non_finite():
    with pytest.raises(InvalidQueryError):
        Point3(math.nan, 0.0, 0.0)


def test_rotate_zyx_identity():
    p = Point3(1.5, -2.0, 3.0)
    assert rotate_zyx(p, 0.0, 0.0, 0.0) == p


def test_rotate_zyx_about_y():
    p = rotate_zyx(Point3(1.0, 0.0, 0.0), 0.0, math.pi / 2, 0.0)
    assert p.x == pytest.approx(0.0, abs=1e-12)
    assert p.y == pytest.approx(0.0, abs=1e-12)
    assert p.z == pytest.approx(-1.0, abs=1e-12)


def test_rotate_zyx_preserves_norm(rng):
    for _ in range(100):
        p = Point3(*rng.uniform(-10.0, 10.0, 3))
        angles = rng.uniform(-math.pi, math.pi, 3)
        q = rotate_zyx(p, *angles)
        assert math.dist((0, 0, 0), (q.x, q.y, q.z)) == pytest.approx(
            math.dist((0, 0, 0), (p.x, p.y, p.z)), rel=1e-12
        )


def test_z_rotation_matches_block_frame(rng):
    p = Point3(*rng.uniform(-10.0, 10.0, 3))
    q = rotate_zyx(p, 0.7, 0.0, 0.0)
    r = from_block_frame(p, 0.7)
    assert (q.x, q.y, q.z) == pytest.approx((r.x, r.y, r.z), abs=1e-12)


def test_unit_cube_faces_are_exact():
    faces = lateral_faces(PrismBlock.cuboid(0.0, 0.0, 1.0, 1.0, 1.0))
    assert [(f.axis, f.offset) for f in faces] == [("x", -0.5), ("y", 0.5), ("x", 0.5), ("y", -0.5)]
    assert all(f.theta == 0.0 for f in faces)
    assert all(f.vertical == (0.0, 1.0) for f in faces)


def test_unrotated_faces_sit_at_center_plus_half_extent():
    block = PrismBlock.cuboid(37.3, -12.1, 8.6, 3.3, 20.0)
    offsets = sorted(f.offset for f in lateral_faces(block) if f.axis == "x")
    assert offsets == [37.3 - 4.3, 37.3 + 4.3]


def test_octagon_face_angles_step_by_eighth_turn():
    block = PrismBlock(center_x=5.0, center_y=5.0, base_z=0.0, height=10.0, side_count=8, circumradius=4.0)
    faces = lateral_faces(block)
    assert len(faces) == 8
    steps = np.diff([f.theta for f in faces])
    assert steps == pytest.approx([math.pi / 4] * 7)


def test_faces_reproduce_directly_constructed_corners(rng):
    for k in range(50):
        theta = rng.uniform(0.0, 2 * math.pi)
        if k % 2:
            block = PrismBlock.cuboid(*rng.uniform(-50.0, 50.0, 2), *rng.uniform(1.0, 30.0, 2), 10.0, theta=theta)
        else:
            block = PrismBlock(
                center_x=rng.uniform(-50.0, 50.0),
                center_y=rng.uniform(-50.0, 50.0),
                base_z=0.0,
                height=10.0,
                side_count=int(rng.integers(3, 10)),
                theta=theta,
                circumradius=rng.uniform(1.0, 20.0),
            )
        expected = footprint_vertices(block)
        recovered = [v for face in lateral_faces(block) for v in face_vertices(face)]
        for x, y in recovered:
            assert min(math.dist((x, y), c) for c in expected) < 1e-9


def test_footprint_polygon_area_of_rotated_cuboid():
    block = PrismBlock.cuboid(0.0, 0.0, 10.0, 4.0, 5.0, theta=0.3)
    assert footprint_polygon(block).area == pytest.approx(40.0)


def test_block_height_must_exceed_base():
    with pytest.raises(InvalidQueryError, match="tower"):
        PrismBlock.cuboid(0.0, 0.0, 1.0, 1.0, 5.0, base_z=5.0, name="tower")


def test_point_in_block_is_strict():
    block = PrismBlock.cuboid(0.0, 0.0, 2.0, 2.0, 3.0)
    assert point_in_block(Point3(0.0, 0.0, 1.0), block)
    assert not point_in_block(Point3(1.0, 0.0, 1.0), block)
    assert not point_in_block(Point3(0.0, 0.0, 3.0), block)
    assert not point_in_block(Point3(0.0, 0.0, 4.0), block)


def test_scene_reference_cell_must_be_zero():
    heights = np.zeros((4, 4))
    heights[0, 0] = 1.0
    with pytest.raises(InvalidQueryError):
        Scene(dx=10.0, dy=10.0, nx=4, ny=4, nux=2, nuy=2, ground_height=heights)


def test_scene_ground_shape_must_match_grid():
    with pytest.raises(InvalidQueryError):
        Scene(dx=10.0, dy=10.0, nx=4, ny=4, nux=2, nuy=2, ground_height=np.zeros((3, 4)))


def test_grid_cells_have_no_half_cell_offset(empty_scene):
    points = empty_scene.ground_points()
    assert points[0, 0].tolist() == [5.0, 5.0, 0.0]
    assert points[-1, -1].tolist() == [100.0, 100.0, 0.0]


def test_uav_cell_point_matches_plane(empty_scene):
    plane = empty_scene.uav_plane_points(60.0)
    p = empty_scene.uav_cell_point(3, 7, 60.0)
    assert [p.x, p.y, p.z] == plane[2, 6].tolist()
    assert empty_scene.uav_cell_index(p.x, p.y) == (3, 7)


def test_footprint_mask_marks_cells_under_blocks(block_scene):
    mask = block_scene.footprint_mask()
    # Cells at 45, 50 and 55 m lie inside the 40-60 m footprint; 40 and 60 are on its edge.
    inside = [i for i in range(20) if mask[i, 9]]
    assert inside == [8, 9, 10]
    assert block_scene.counted_cells() is None
