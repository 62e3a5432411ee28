import math

import numpy as np
import pytest

from globalmap.models.map import Category, Frame
from globalmap.schemas.scenario import ScenarioConfig, WorldConfig
from globalmap.services.geometry import polyline_length
from globalmap.services.world_generator import (
    expected_counts,
    generate_ground_truth,
    generate_trajectory,
    route_waypoints,
)
from globalmap.utils.exceptions import UsageError


def counts(m):
    return {c: len(e) for c, e in m.by_category().items()}


def test_single_block_world():
    gt = generate_ground_truth(WorldConfig(blocks_x=1, blocks_y=1, lanes_per_road=1))
    assert counts(gt) == {Category.ROAD_BOUNDARY: 1, Category.LANE_DIVIDER: 0, Category.PED_CROSSING: 4}
    assert gt.frame == Frame.GLOBAL
    assert all(e.score == 1.0 for e in gt.elements)


@pytest.mark.parametrize("bx, by, lanes", [(1, 1, 2), (2, 2, 2), (3, 1, 3), (2, 4, 1)])
def test_counts_follow_the_closed_form(bx, by, lanes):
    cfg = WorldConfig(blocks_x=bx, blocks_y=by, lanes_per_road=lanes)
    gt = generate_ground_truth(cfg)
    segments = bx * (by + 1) + (bx + 1) * by
    assert counts(gt) == expected_counts(cfg)
    assert expected_counts(cfg)[Category.PED_CROSSING] == segments
    assert expected_counts(cfg)[Category.LANE_DIVIDER] == segments * (lanes - 1)


def test_block_boundary_is_inset_by_half_the_road():
    gt = generate_ground_truth(WorldConfig(blocks_x=1, blocks_y=1))
    block = gt.by_category()[Category.ROAD_BOUNDARY][0]
    assert block.geometry.closed
    assert np.allclose(block.geometry.as_array(), [(6, 6), (54, 6), (54, 54), (6, 54)])


def test_lane_dividers_stop_short_of_the_crossings():
    cfg = WorldConfig(blocks_x=1, blocks_y=1)
    dividers = generate_ground_truth(cfg).by_category()[Category.LANE_DIVIDER]
    expected = cfg.block_size - cfg.road_width - 2 * cfg.crossing_length
    assert all(polyline_length(d.geometry) == pytest.approx(expected) for d in dividers)
    # two lanes: the divider runs down the road centreline
    first = dividers[0].geometry.as_array()
    assert np.allclose(first, [(9, 0), (51, 0)])


def test_crossings_span_the_road():
    cfg = WorldConfig(blocks_x=2, blocks_y=2, seed=5)
    for crossing in generate_ground_truth(cfg).by_category()[Category.PED_CROSSING]:
        assert crossing.geometry.closed
        assert polyline_length(crossing.geometry) == pytest.approx(2 * (cfg.road_width + cfg.crossing_length))


def test_ground_truth_is_deterministic():
    cfg = WorldConfig(seed=11)
    assert generate_ground_truth(cfg) == generate_ground_truth(cfg)


def test_world_seed_moves_crossings():
    dumps = {generate_ground_truth(WorldConfig(seed=s)).model_dump_json() for s in range(6)}
    assert len(dumps) > 1


def test_world_config_rejects_cramped_blocks():
    with pytest.raises(ValueError):
        WorldConfig(block_size=15.0, road_width=12.0, crossing_length=3.0)


def test_route_covers_every_horizontal_road():
    route = route_waypoints(WorldConfig(blocks_x=2, blocks_y=2))
    assert route.tolist() == [[0, 0], [120, 0], [120, 60], [0, 60], [0, 120], [120, 120]]


def test_trajectory_steps_and_headings(small_scenario):
    gt = generate_ground_truth(small_scenario.world)
    poses = generate_trajectory(gt, small_scenario)

    assert len(poses) == small_scenario.n_frames
    assert (poses[0].x, poses[0].y, poses[0].yaw) == (0.0, 0.0, 0.0)
    # 5 m/s at 2 Hz: 2.5 m per frame along the first road
    assert poses[1].x == pytest.approx(2.5)
    for a, b in zip(poses, poses[1:]):
        assert math.hypot(b.x - a.x, b.y - a.y) <= small_scenario.window.length / 2 + 1e-9


def test_trajectory_turns_at_corners():
    cfg = ScenarioConfig(world=WorldConfig(blocks_x=1, blocks_y=1), n_frames=40, speed=10.0, frame_hz=1.0)
    poses = generate_trajectory(generate_ground_truth(cfg.world), cfg)
    # 60 m east, then north up the far road
    assert poses[3].yaw == pytest.approx(0.0)
    assert poses[7].yaw == pytest.approx(math.pi / 2)
    assert (poses[7].x, poses[7].y) == pytest.approx((60.0, 10.0))


def test_trajectory_offset_and_determinism(small_scenario):
    gt = generate_ground_truth(small_scenario.world)
    shifted = small_scenario.model_copy(update={"route_offset_frames": 3})
    base = generate_trajectory(gt, small_scenario)

    assert generate_trajectory(gt, small_scenario) == base
    assert generate_trajectory(gt, shifted)[0] == base[3]


def test_trajectory_needs_global_map(small_scenario, make_map):
    with pytest.raises(UsageError):
        generate_trajectory(make_map([]), small_scenario)
