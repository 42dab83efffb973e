import math
from pathlib import Path

import numpy as np
import pytest
import yaml
from shapely import contains_xy

from los_planner.engine import footprint_polygon
from los_planner.exceptions import ScenarioError, ScenarioValidationError
from los_planner.scenario_io import (
    apply_overrides,
    build_run,
    dump_scenario,
    generate_nodes,
    generate_scene,
    load_scenario,
    parse_scenario,
)
from los_planner.scenario_io.loader import ga_config, link_params

SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


def _write(tmp_path, text):
    path = tmp_path / "scenario.yaml"
    path.write_text(text, encoding="utf-8")
    return path


def _random_scenario(block_count, **extra):
    data = {
        "seed": 3,
        "area": {"dx": 200.0, "dy": 200.0},
        "grid": {"nx": 20, "ny": 20, "nux": 10, "nuy": 10},
        "scene": {"random": {"block_count": block_count, "height_mean": 40.0, "height_spread": 30.0}},
    }
    data.update(extra)
    return parse_scenario(data)


def test_minimal_file_gets_defaults():
    scenario = load_scenario(SCENARIOS / "minimal.yaml")
    assert scenario.scene.blocks == []
    assert scenario.scene.random is None
    assert scenario.scene.h_max == 300.0
    assert scenario.uav.count == 1
    assert scenario.uav.positions == [(50.0, 50.0)]
    assert scenario.channel.frequency_ghz == 188.0
    assert scenario.channel.antenna_elements == 400
    assert scenario.algorithm.ga.population == 40
    assert scenario.algorithm.name == "greedy"


def test_block_with_floor_above_roof_names_the_block(tmp_path):
    path = _write(
        tmp_path,
        "scene:\n  blocks:\n    - {center: [10, 10], size: [5, 5], base_z: 10, height: 5, name: tower-7}\n",
    )
    with pytest.raises(ScenarioValidationError, match="tower-7") as info:
        load_scenario(path)
    assert info.value.location == "scene.blocks.0"
    assert info.value.path == str(path)


def test_unknown_field_is_rejected(tmp_path):
    with pytest.raises(ScenarioValidationError) as info:
        load_scenario(_write(tmp_path, "uav:\n  count: 2\n  colour: red\n"))
    assert info.value.location == "uav.colour"


def test_yaml_syntax_error_reports_line(tmp_path):
    with pytest.raises(ScenarioError) as info:
        load_scenario(_write(tmp_path, "seed: 1\narea: {dx: 10\n"))
    assert not isinstance(info.value, ScenarioValidationError)
    assert info.value.location.startswith("line ")


def test_missing_file_is_a_scenario_error(tmp_path):
    with pytest.raises(ScenarioError, match="cannot read scenario"):
        load_scenario(tmp_path / "absent.yaml")


def test_top_level_must_be_a_mapping():
    with pytest.raises(ScenarioError, match="mapping"):
        parse_scenario([1, 2, 3])


def test_empty_document_is_all_defaults():
    assert parse_scenario(None) == parse_scenario({})


@pytest.mark.parametrize(
    ("data", "location"),
    [
        ({"uav": {"altitude": 400.0}}, "<root>"),
        ({"algorithm": {"ga": {"population": 10}}}, "algorithm.ga"),
        ({"channel": {"humidity_pct": 120.0}}, "channel.humidity_pct"),
        ({"scene": {"random": {"height_mean": 10.0, "height_spread": 10.0}}}, "scene.random"),
    ],
)
def test_invariant_violations(data, location):
    with pytest.raises(ScenarioValidationError) as info:
        parse_scenario(data)
    assert info.value.location == location


def test_urban_preset():
    scenario = load_scenario(SCENARIOS / "urban.yaml")
    assert scenario.scene.random.block_count == 45
    assert scenario.scene.random.height_mean == 40.0
    assert scenario.uav.count == 4
    assert scenario.algorithm.name == "hybrid"


@pytest.mark.parametrize("name", sorted(p.name for p in SCENARIOS.glob("*.yaml")))
def test_canonical_round_trip(name):
    scenario = load_scenario(SCENARIOS / name)
    text = dump_scenario(scenario)
    again = parse_scenario(yaml.safe_load(text))
    assert again == scenario
    assert dump_scenario(again) == text


def test_scene_generation_is_deterministic():
    scenario = _random_scenario(20)
    first = generate_scene(scenario, 42)
    second = generate_scene(scenario, 42)
    assert first.blocks == second.blocks
    assert generate_scene(scenario, 43).blocks != first.blocks


def test_no_random_blocks_gives_empty_scene():
    scene = generate_scene(_random_scenario(0), 1)
    assert scene.blocks == ()
    assert not scene.ground_height.any()


def test_random_blocks_stay_within_their_ranges():
    scenario = _random_scenario(500)
    scene = generate_scene(scenario, 7)
    heights = np.array([b.height for b in scene.blocks])
    assert len(heights) == 500
    assert abs(heights.mean() - 40.0) < 4.0
    assert heights.min() >= 10.0
    assert heights.max() <= 70.0
    for block in scene.blocks:
        assert 0.0 <= block.theta < math.pi / 2
        assert 0.0 <= block.center_x <= 200.0
        assert 0.0 <= block.center_y <= 200.0


def test_explicit_blocks_convert_degrees():
    scenario = parse_scenario(
        {"scene": {"blocks": [{"center": [100, 100], "size": [10, 20], "height": 30, "rotation_deg": 45}]}}
    )
    (block,) = generate_scene(scenario, 0).blocks
    assert block.theta == pytest.approx(math.pi / 4)
    assert block.half_extents == (5.0, 10.0)


def test_roof_ground_raises_footprint_cells():
    scenario = parse_scenario(
        {
            "area": {"dx": 100.0, "dy": 100.0},
            "grid": {"nx": 20, "ny": 20, "nux": 10, "nuy": 10},
            "scene": {
                "roof_ground": True,
                "blocks": [{"center": [50, 50], "size": [20, 20], "height": 30}],
            },
        }
    )
    scene = generate_scene(scenario, 0)
    assert scene.ground_height[9, 9] == 30.0
    assert scene.ground_height[0, 0] == 0.0
    assert np.count_nonzero(scene.ground_height) == 9


def test_random_nodes_avoid_footprints():
    scenario = _random_scenario(15, nodes={"random": {"count": 40}})
    scene = generate_scene(scenario, 5)
    nodes = generate_nodes(scenario.nodes, scene, 6)
    assert len(nodes) == 40
    for node in nodes.positions:
        assert node.z == 0.0
        assert not any(contains_xy(footprint_polygon(b), node.x, node.y) for b in scene.blocks)


def test_roof_nodes_sit_on_the_roof():
    scenario = parse_scenario(
        {
            "area": {"dx": 100.0, "dy": 100.0},
            "scene": {"blocks": [{"center": [50, 50], "size": [20, 20], "height": 30}]},
            "nodes": {"positions": [[50, 50], [10, 10], [80, 80, 3.5]]},
        }
    )
    nodes = generate_nodes(scenario.nodes, generate_scene(scenario, 0), 0)
    assert [p.z for p in nodes.positions] == [30.0, 0.0, 3.5]


def test_scene_without_nodes_cannot_generate_nodes():
    scenario = _random_scenario(2)
    with pytest.raises(ScenarioValidationError):
        generate_nodes(scenario.nodes, generate_scene(scenario, 0), 0)


def test_sub_streams_keep_the_scene_fixed():
    scenario = _random_scenario(10, nodes={"random": {"count": 5}})
    base = build_run(scenario)
    other_algorithm = build_run(apply_overrides(scenario, algorithm="ga"))
    more_uavs = build_run(apply_overrides(scenario, n_uav=3))
    assert other_algorithm.scene.blocks == base.scene.blocks
    assert more_uavs.scene.blocks == base.scene.blocks
    assert more_uavs.nodes.positions == base.nodes.positions
    assert build_run(apply_overrides(scenario, seed=4)).scene.blocks != base.scene.blocks


def test_overrides_are_revalidated():
    scenario = load_scenario(SCENARIOS / "urban.yaml")
    changed = apply_overrides(scenario, mean_height=20.0, block_count=30, altitude=80.0)
    assert changed.scene.random.height_mean == 20.0
    assert changed.scene.random.height_spread == pytest.approx(15.0)
    assert changed.scene.random.block_count == 30
    assert changed.uav.altitude == 80.0
    assert scenario.scene.random.block_count == 45
    with pytest.raises(ScenarioValidationError):
        apply_overrides(scenario, altitude=500.0)


def test_random_overrides_need_a_random_section():
    with pytest.raises(ScenarioValidationError, match="scene.random"):
        apply_overrides(load_scenario(SCENARIOS / "minimal.yaml"), block_count=5)


def test_channel_units_are_converted():
    link = link_params(parse_scenario({"channel": {"tx_power_mw": 10.0, "noise_dbm": -80.0, "gain_tx_dbi": 20.0}}))
    assert link.frequency_hz == 188e9
    assert link.tx_power_w == pytest.approx(0.01)
    assert link.noise_power_w == pytest.approx(1e-11)
    assert link.gain_tx == pytest.approx(100.0)
    assert link.gain_rx == pytest.approx(1000.0)


def test_ga_section_maps_to_config():
    scenario = parse_scenario(
        {"algorithm": {"ga": {"population": 10, "elite": 2, "crossover": 5, "mutation": 3, "greedy_pool": 4}}}
    )
    cfg = ga_config(scenario, 99)
    assert (cfg.population, cfg.elite, cfg.crossover_count, cfg.mutation_count) == (10, 2, 5, 3)
    assert cfg.greedy_pool == 4
    assert cfg.rng_seed == 99


def test_fixed_uavs_default_to_the_altitude():
    ctx = build_run(load_scenario(SCENARIOS / "minimal.yaml"))
    (uav,) = ctx.fixed_uavs()
    assert (uav.x, uav.y, uav.z) == (50.0, 50.0, 50.0)
    assert ctx.nodes is None
