"""Scenario file schema.

Units at this boundary are meters, degrees, GHz, mW and dBm; the loader converts
them to SI and radians before anything reaches the engine.
"""

from typing import Literal

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

Algorithm = Literal["greedy", "ga", "hybrid", "geo", "geokmeans"]
Driver = Literal["greedy", "ga", "hybrid"]


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class AreaSpec(_Strict):
    dx: float = Field(500.0, gt=0, description="Target area extent along x in meters")
    dy: float = Field(500.0, gt=0, description="Target area extent along y in meters")


class GridSpec(_Strict):
    nx: int = Field(100, ge=1, description="Ground cells along x")
    ny: int = Field(100, ge=1, description="Ground cells along y")
    nux: int = Field(50, ge=1, description="UAV plane cells along x")
    nuy: int = Field(50, ge=1, description="UAV plane cells along y")


class BlockSpec(_Strict):
    """One prism obstacle. Rectangular when ``size`` is given, regular polygon otherwise."""

    center: tuple[float, float] = Field(..., description="Footprint center (x, y) in meters", examples=[[53.0, 120.0]])
    height: float = Field(..., description="Absolute roof elevation in meters", examples=[40.0])
    base_z: float = Field(0.0, description="Floor elevation in meters")
    size: tuple[float, float] | None = Field(None, description="Footprint side lengths (x, y) before rotation")
    sides: int = Field(4, ge=3, description="Number of lateral faces")
    radius: float | None = Field(None, gt=0, description="Circumradius of a regular footprint")
    rotation_deg: float = Field(0.0, description="Rotation about z in degrees")
    name: str | None = None

    @model_validator(mode="after")
    def _check_shape(self) -> "BlockSpec":
        label = self.name or f"at {list(self.center)}"
        if self.height <= self.base_z:
            raise ValueError(f"block {label}: height must exceed base_z")
        if self.size is None and self.radius is None:
            raise ValueError(f"block {label}: needs size or radius")
        if self.size is not None:
            if self.sides != 4:
                raise ValueError(f"block {label}: size only applies to 4-sided blocks")
            if min(self.size) <= 0:
                raise ValueError(f"block {label}: size must be positive")
        return self


class RandomBlocksSpec(_Strict):
    block_count: int = Field(0, ge=0, description="Number of random blocks M_b")
    size_x: tuple[float, float] = Field((10.0, 40.0), description="Uniform range of footprint x sizes")
    size_y: tuple[float, float] = Field((10.0, 40.0), description="Uniform range of footprint y sizes")
    height_mean: float = Field(40.0, gt=0, description="Mean roof height in meters")
    height_spread: float = Field(20.0, ge=0, description="Heights are uniform in mean +/- spread")
    rotation_deg: tuple[float, float] = Field((0.0, 90.0), description="Uniform rotation range, upper end excluded")

    @model_validator(mode="after")
    def _check_ranges(self) -> "RandomBlocksSpec":
        for name in ("size_x", "size_y", "rotation_deg"):
            lo, hi = getattr(self, name)
            if lo > hi:
                raise ValueError(f"{name}: lower bound exceeds upper bound")
        if min(self.size_x[0], self.size_y[0]) <= 0:
            raise ValueError("block sizes must be positive")
        if self.height_spread >= self.height_mean:
            raise ValueError("height_spread must be smaller than height_mean")
        return self


class SceneSpec(_Strict):
    blocks: list[BlockSpec] = Field(default_factory=list, description="Explicit obstacles")
    random: RandomBlocksSpec | None = Field(None, description="Seeded random obstacles added to the explicit ones")
    h_max: float = Field(300.0, gt=0, description="Maximum UAV altitude in meters")
    roof_ground: bool = Field(False, description="Raise ground cells inside footprints to the roof height")
    exclude_footprint_cells: bool = Field(False, description="Count only street cells in coverage percentages")


class RandomNodesSpec(_Strict):
    count: int = Field(25, ge=1, description="Number of ground nodes N_g")
    on_roofs: bool = Field(False, description="Allow nodes on block roofs")


class NodesSpec(_Strict):
    positions: list[tuple[float, float] | tuple[float, float, float]] = Field(
        default_factory=list,
        description="Explicit nodes (x, y) or (x, y, z); z defaults to the ground height",
    )
    random: RandomNodesSpec | None = None


class UavSpec(_Strict):
    count: int = Field(1, ge=1, description="Number of UAVs N_u")
    altitude: float = Field(100.0, gt=0, description="Plane-A altitude h_u in meters")
    positions: list[tuple[float, float] | tuple[float, float, float]] = Field(
        default_factory=list,
        description="Fixed UAV positions for coverage maps; z defaults to the altitude",
    )


class ChannelSpec(_Strict):
    frequency_ghz: float = Field(188.0, gt=0, description="Carrier frequency in GHz")
    tx_power_mw: float = Field(5.0, gt=0, description="Transmit power in mW")
    noise_dbm: float = Field(-85.0, description="Noise power in dBm")
    gain_tx_dbi: float = Field(30.0, description="Transmit antenna gain in dBi")
    gain_rx_dbi: float = Field(30.0, description="Receive antenna gain in dBi")
    temperature_c: float = Field(25.0, description="Air temperature in Celsius")
    pressure_hpa: float = Field(1013.25, gt=0, description="Air pressure in hPa")
    humidity_pct: float = Field(20.0, ge=0, le=100, description="Relative humidity in percent")
    antenna_elements: int = Field(400, ge=1, description="Elements of each UAV antenna array; recorded, not used by the link model")


class GaSpec(_Strict):
    population: int = Field(40, ge=1)
    elite: int = Field(4, ge=1)
    crossover: int = Field(24, ge=0)
    mutation: int = Field(12, ge=0)
    iterations: int = Field(20, ge=1)
    greedy_descents: int = Field(2, ge=0, description="Greedy descents per hybrid generation")
    greedy_pool: int = Field(8, ge=1, description="Columns the hybrid draws its descents from")
    mutation_kind: Literal["uniform", "gaussian"] = "uniform"
    mutation_sigma_cells: float = Field(5.0, gt=0)

    @model_validator(mode="after")
    def _check_sizes(self) -> "GaSpec":
        if self.elite + self.crossover + self.mutation != self.population:
            raise ValueError("elite + crossover + mutation must equal population")
        if not self.elite <= self.greedy_pool <= self.population:
            raise ValueError("greedy_pool must lie between elite and population")
        if self.greedy_descents > self.greedy_pool:
            raise ValueError("greedy_descents cannot exceed greedy_pool")
        return self


class AlgorithmSpec(_Strict):
    name: Algorithm = Field("hybrid", description="Search used by place and plan")
    driver: Driver = Field("hybrid", description="Search driver for the geometric planner")
    starts: int = Field(10, ge=1, description="Random starts for greedy multistart")
    restarts: int = Field(20, ge=1, description="Restarts of geometric k-means")
    ga: GaSpec = Field(default_factory=GaSpec)


class Scenario(_Strict):
    """Everything a run needs; the seed fully determines random content."""

    seed: int = Field(0, ge=0, description="Master seed")
    area: AreaSpec = Field(default_factory=AreaSpec)
    grid: GridSpec = Field(default_factory=GridSpec)
    scene: SceneSpec = Field(default_factory=SceneSpec)
    nodes: NodesSpec = Field(default_factory=NodesSpec)
    uav: UavSpec = Field(default_factory=UavSpec)
    channel: ChannelSpec = Field(default_factory=ChannelSpec)
    algorithm: AlgorithmSpec = Field(default_factory=AlgorithmSpec)
    require_all_los: bool = Field(False, description="plan fails (exit 3) unless every node ends in LoS")

    @field_validator("uav")
    @classmethod
    def _positive_altitude(cls, uav: UavSpec) -> UavSpec:
        for pos in uav.positions:
            if len(pos) == 3 and pos[2] <= 0:
                raise ValueError("UAV positions need a positive altitude")
        return uav

    @model_validator(mode="after")
    def _check_altitude(self) -> "Scenario":
        if self.uav.altitude > self.scene.h_max:
            raise ValueError(f"uav.altitude {self.uav.altitude} exceeds scene.h_max {self.scene.h_max}")
        return self
