"""Scenario files: YAML parsing, validation, canonical dumps and run setup."""

import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np
import yaml
from pydantic import ValidationError

from ..engine import Atmosphere, GaConfig, GroundNodeSet, LinkParams, Point3, Scene
from ..engine.thz_channel import db_to_linear, dbm_to_watts
from ..exceptions import ScenarioError, ScenarioValidationError
from ..models import Scenario
from .generator import generate_nodes, generate_scene

logger = logging.getLogger(__name__)

# Spawn keys of the master-seed sub-streams.
SCENE_STREAM = 0
NODES_STREAM = 1
SEARCH_STREAM = 2


def _validation_error(exc: ValidationError, path: str | Path | None) -> ScenarioValidationError:
    first = exc.errors()[0]
    location = ".".join(str(part) for part in first["loc"]) or "<root>"
    return ScenarioValidationError(first["msg"], path=path, location=location)


def parse_scenario(data: Any, path: str | Path | None = None) -> Scenario:
    """Validate already-parsed YAML data."""
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise ScenarioError("top level must be a mapping", path=path)
    try:
        return Scenario.model_validate(data)
    except ValidationError as e:
        raise _validation_error(e, path) from e


def load_scenario(path: str | Path) -> Scenario:
    """Read and validate a scenario file."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ScenarioError(f"cannot read scenario: {e.strerror or e}", path=path) from e
    try:
        data = yaml.safe_load(text)
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        location = f"line {mark.line + 1}, column {mark.column + 1}" if mark is not None else None
        raise ScenarioError(f"invalid YAML: {getattr(e, 'problem', None) or e}", path=path, location=location) from e
    scenario = parse_scenario(data, path)
    logger.info(f"Loaded scenario {path}")
    return scenario


def dump_scenario(scenario: Scenario) -> str:
    """Canonical YAML: every field present, keys sorted."""
    return yaml.safe_dump(scenario.model_dump(mode="json"), sort_keys=True, default_flow_style=None)


def apply_overrides(
    scenario: Scenario,
    *,
    seed: int | None = None,
    n_uav: int | None = None,
    altitude: float | None = None,
    algorithm: str | None = None,
    block_count: int | None = None,
    mean_height: float | None = None,
) -> Scenario:
    """A copy of ``scenario`` with overrides applied and re-validated."""
    data = scenario.model_dump(mode="json")
    if seed is not None:
        data["seed"] = seed
    if n_uav is not None:
        data["uav"]["count"] = n_uav
    if altitude is not None:
        data["uav"]["altitude"] = altitude
    if algorithm is not None:
        data["algorithm"]["name"] = algorithm
    if block_count is not None or mean_height is not None:
        random_spec = data["scene"]["random"]
        if random_spec is None:
            raise ScenarioValidationError("needs a scene.random section to override", location="scene.random")
        if block_count is not None:
            random_spec["block_count"] = block_count
        if mean_height is not None:
            # Keep the spread proportional to the mean.
            ratio = random_spec["height_spread"] / random_spec["height_mean"]
            random_spec["height_mean"] = mean_height
            random_spec["height_spread"] = ratio * mean_height
    return parse_scenario(data)


def link_params(scenario: Scenario) -> LinkParams:
    ch = scenario.channel
    return LinkParams(
        frequency_hz=ch.frequency_ghz * 1e9,
        tx_power_w=ch.tx_power_mw * 1e-3,
        noise_power_w=dbm_to_watts(ch.noise_dbm),
        gain_tx=db_to_linear(ch.gain_tx_dbi),
        gain_rx=db_to_linear(ch.gain_rx_dbi),
    )


def atmosphere(scenario: Scenario) -> Atmosphere:
    ch = scenario.channel
    return Atmosphere(
        temperature_c=ch.temperature_c,
        pressure_hpa=ch.pressure_hpa,
        relative_humidity_pct=ch.humidity_pct,
    )


def ga_config(scenario: Scenario, rng_seed: int) -> GaConfig:
    ga = scenario.algorithm.ga
    return GaConfig(
        population=ga.population,
        elite=ga.elite,
        crossover_count=ga.crossover,
        mutation_count=ga.mutation,
        iterations=ga.iterations,
        greedy_descents_per_iter=ga.greedy_descents,
        greedy_pool=ga.greedy_pool,
        rng_seed=rng_seed,
        mutation=ga.mutation_kind,
        mutation_sigma_cells=ga.mutation_sigma_cells,
    )


def sub_stream(seed: int, key: int) -> np.random.SeedSequence:
    return np.random.SeedSequence(seed, spawn_key=(key,))


@dataclass(frozen=True, eq=False)
class RunContext:
    """Engine-ready objects for one scenario and seed."""

    scenario: Scenario
    scene: Scene
    nodes: GroundNodeSet | None
    link: LinkParams
    atm: Atmosphere
    search_seed: int
    objective_seed: int

    @property
    def altitude(self) -> float:
        return self.scenario.uav.altitude

    @property
    def n_uav(self) -> int:
        return self.scenario.uav.count

    def search_rng(self) -> np.random.Generator:
        return np.random.default_rng(sub_stream(self.scenario.seed, SEARCH_STREAM))

    def ga_config(self) -> GaConfig:
        return ga_config(self.scenario, self.search_seed)

    def fixed_uavs(self) -> list[Point3]:
        return [
            Point3(p[0], p[1], p[2] if len(p) == 3 else self.altitude)  # type: ignore[misc]
            for p in self.scenario.uav.positions
        ]


def build_run(scenario: Scenario) -> RunContext:
    """Generate the scene and nodes from their own sub-streams of the master seed."""
    scene = generate_scene(scenario, sub_stream(scenario.seed, SCENE_STREAM))
    nodes = None
    if scenario.nodes.positions or scenario.nodes.random is not None:
        nodes = generate_nodes(scenario.nodes, scene, sub_stream(scenario.seed, NODES_STREAM))
    search_seed, objective_seed = (int(v) for v in sub_stream(scenario.seed, SEARCH_STREAM).generate_state(2))
    return RunContext(
        scenario=scenario,
        scene=scene,
        nodes=nodes,
        link=link_params(scenario),
        atm=atmosphere(scenario),
        search_seed=search_seed,
        objective_seed=objective_seed,
    )
