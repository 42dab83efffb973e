import math

import numpy as np
import pytest

from los_planner.engine import Atmosphere, LinkParams, Point3, PrismBlock, Scene


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def empty_scene():
    return Scene.flat(100.0, 100.0, 20, 20, 10, 10)


@pytest.fixture
def tower():
    """20 x 20 m block, 120 m tall, centered at (100, 0)."""
    return PrismBlock.cuboid(100.0, 0.0, 20.0, 20.0, 120.0)


@pytest.fixture
def block_scene():
    """100 x 100 m area with one 40 m block in the middle."""
    return Scene.flat(
        100.0,
        100.0,
        20,
        20,
        10,
        10,
        blocks=[PrismBlock.cuboid(50.0, 50.0, 20.0, 20.0, 40.0, name="middle")],
    )


@pytest.fixture
def unity_link():
    return LinkParams(gain_tx=1.0, gain_rx=1.0)


@pytest.fixture
def link():
    return LinkParams()


@pytest.fixture
def atm():
    return Atmosphere()


@pytest.fixture
def dry_atm():
    return Atmosphere(relative_humidity_pct=0.0)


def random_scene(rng, n_blocks, nx=40, ny=40, size=100.0, rotated=True, polygons=False):
    blocks = []
    for m in range(n_blocks):
        cx, cy = rng.uniform(0.0, size, 2)
        height = rng.uniform(5.0, 40.0)
        theta = rng.uniform(0.0, math.pi / 2) if rotated else 0.0
        if polygons and m % 3 == 2:
            blocks.append(
                PrismBlock(
                    center_x=cx,
                    center_y=cy,
                    base_z=0.0,
                    height=height,
                    side_count=int(rng.integers(5, 9)),
                    theta=theta,
                    circumradius=rng.uniform(3.0, 10.0),
                )
            )
        else:
            sx, sy = rng.uniform(4.0, 20.0, 2)
            blocks.append(PrismBlock.cuboid(cx, cy, sx, sy, height, theta=theta))
    return Scene.flat(size, size, nx, ny, 10, 10, blocks=blocks)


def random_uav(rng, scene, altitude):
    """A UAV position above the area that is not inside any block."""
    return Point3(rng.uniform(0.0, scene.dx), rng.uniform(0.0, scene.dy), altitude)
