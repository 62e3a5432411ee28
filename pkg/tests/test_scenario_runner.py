import numpy as np
import pytest
from shapely.geometry import LineString

from globalmap.models.map import Category, Frame
from globalmap.schemas.scenario import NoiseConfig, ScenarioConfig, ScenarioMode, WorldConfig
from globalmap.services import map_io
from globalmap.services.map_clipper import clip_map_to_region, map_to_global
from globalmap.services.scenario_runner import report_metadata, run_scenario
from globalmap.utils.exceptions import InitialMapError

NOISY = NoiseConfig(point_sigma=0.3, pose_sigma_xy=0.2, pose_sigma_yaw=0.005, drop_prob=0.1, spurious_rate=0.5)


def test_noiseless_reconstruction():
    cfg = ScenarioConfig(world=WorldConfig(blocks_x=2, blocks_y=2), n_frames=60, update_every=4)
    result = run_scenario(cfg)

    assert result.report.mGAP >= 0.99
    assert result.report.mAP >= 0.99
    for category in (Category.ROAD_BOUNDARY, Category.LANE_DIVIDER, Category.PED_CROSSING):
        for t in cfg.eval_thresholds:
            assert result.report.gap.value(category, t) >= 0.99


def test_everything_dropped_scores_zero(small_world):
    cfg = ScenarioConfig(world=small_world, n_frames=12, noise=NoiseConfig(drop_prob=1.0))
    result = run_scenario(cfg)

    assert len(result.built_global) == 0
    assert result.report.mGAP == 0.0
    assert result.report.mAP == 0.0


def test_runs_are_deterministic(small_world):
    cfg = ScenarioConfig(world=small_world, n_frames=16, noise=NOISY, seed=4)
    first, second = run_scenario(cfg), run_scenario(cfg)

    assert first.report.model_dump() == second.report.model_dump()
    assert first.built_global == second.built_global
    assert first.predictions == second.predictions


def test_run_bookkeeping(small_scenario):
    result = run_scenario(small_scenario)
    merges = [i for i, m in enumerate(result.merged) if m]

    assert merges == list(range(0, small_scenario.n_frames, small_scenario.update_every))
    assert len(result.traced) == len(merges)
    assert len(result.predictions) == len(result.gt_frames) == len(result.poses) == small_scenario.n_frames
    assert all(p.frame == Frame.EGO for p in result.predictions)
    assert result.built_global.frame == Frame.GLOBAL
    assert result.state.next_id >= result.built_global.next_free_id()
    assert result.prior_masks == {}


def test_report_metadata_is_enough_to_rerun(small_scenario):
    metadata = report_metadata(small_scenario)
    assert metadata["seed"] == small_scenario.seed
    assert metadata["chamfer_variant"] == "mean-of-mins"
    assert map_io.scenario_config_from_dict(metadata["config"]) == small_scenario


def test_prior_masks_before_each_merge(small_world):
    cfg = ScenarioConfig(world=small_world, n_frames=9, export_prior_masks=True, raster_resolution=1.0)
    result = run_scenario(cfg)

    assert sorted(result.prior_masks) == [0, 4, 8]
    first = result.prior_masks[0]
    # nothing built yet before the first merge
    assert len(first) == 4 and all(not m.values.any() for m in first)
    later = result.prior_masks[8]
    assert [m.shape for m in later] == [(30, 60)] * 4
    assert later[3].values.any()
    assert any(m.values.max() > 0.5 for m in later[:3])


def test_cross_scene_needs_a_readable_map(tmp_path, small_world):
    cfg = ScenarioConfig(
        world=small_world,
        n_frames=4,
        mode=ScenarioMode.CROSS_SCENE,
        initial_map=str(tmp_path / "missing.json"),
    )
    with pytest.raises(InitialMapError):
        run_scenario(cfg)


def test_cross_scene_rejects_ego_map(tmp_path, small_world, make_map):
    path = map_io.save_map(make_map([]), tmp_path / "ego.json")
    cfg = ScenarioConfig(world=small_world, n_frames=4, mode=ScenarioMode.CROSS_SCENE, initial_map=str(path))
    with pytest.raises(InitialMapError):
        run_scenario(cfg)


def test_cross_scene_keeps_inherited_elements(tmp_path, small_world):
    prior = run_scenario(ScenarioConfig(world=small_world, n_frames=8))
    map_path = map_io.save_map(prior.built_global, tmp_path / "prior.json")
    traced_path = map_io.save_traced_region(prior.traced, tmp_path / "traced.json")

    cfg = ScenarioConfig(
        world=small_world,
        n_frames=4,
        mode=ScenarioMode.CROSS_SCENE,
        initial_map=str(map_path),
        initial_traced=str(traced_path),
        noise=NoiseConfig(drop_prob=1.0),
    )
    result = run_scenario(cfg)

    assert result.built_global == prior.built_global
    assert len(result.traced) == len(prior.traced) + 1
    assert result.report.mGAP == pytest.approx(prior.report.mGAP)


@pytest.mark.slow
def test_cross_scene_helps_with_lossy_perception(tmp_path, small_world):
    single, cross = [], []
    for seed in range(10):
        cfg = ScenarioConfig(world=small_world, n_frames=24, seed=seed, noise=NoiseConfig(drop_prob=0.6))
        first = run_scenario(cfg)
        map_path = map_io.save_map(first.built_global, tmp_path / f"{seed}.json")
        traced_path = map_io.save_traced_region(first.traced, tmp_path / f"{seed}_traced.json")
        second = run_scenario(cfg.model_copy(update={
            "mode": ScenarioMode.CROSS_SCENE,
            "initial_map": str(map_path),
            "initial_traced": str(traced_path),
        }))
        single.append(first.report.mGAP)
        cross.append(second.report.mGAP)
    assert np.mean(cross) >= np.mean(single)


@pytest.mark.slow
def test_more_point_noise_never_helps(small_world):
    means = []
    for sigma in (0.0, 0.5, 2.0):
        runs = [
            run_scenario(ScenarioConfig(world=small_world, n_frames=24, seed=seed, noise=NoiseConfig(point_sigma=sigma)))
            for seed in range(10)
        ]
        means.append(np.mean([r.report.mGAP for r in runs]))
    assert means[0] >= means[1] >= means[2]


@pytest.mark.parametrize("seed", [0, 1])
def test_traced_region_covers_exactly_what_was_merged(seed):
    cfg = ScenarioConfig(
        world=WorldConfig(blocks_x=2, blocks_y=1, seed=seed), n_frames=30, update_every=3, seed=seed, noise=NOISY,
    )
    result = run_scenario(cfg)
    merge_poses = [p for p, m in zip(result.poses, result.merged) if m]
    area = result.traced.polygon().buffer(1e-6)

    assert [f.pose for f in result.traced.footprints] == merge_poses
    assert result.traced.contains(np.array([[p.x, p.y] for p in merge_poses])).all()
    for index, pose in enumerate(result.poses):
        if result.merged[index]:
            for element in map_to_global(result.gt_frames[index], pose).elements:
                assert area.covers(LineString(element.geometry.path()))

    graded = clip_map_to_region(result.gt_global, result.traced)
    assert len(graded) > 0
    for element in graded.elements:
        assert area.covers(LineString(element.geometry.path()))
