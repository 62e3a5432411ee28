import json

import numpy as np
import pytest

from globalmap.main import run
from globalmap.schemas.scenario import ScenarioMode
from globalmap.services import map_io


@pytest.fixture
def config_path(tmp_path, small_scenario):
    return str(map_io.save_scenario_config(small_scenario, tmp_path / "scenario.yaml"))


@pytest.fixture
def bundle(tmp_path, config_path):
    out = tmp_path / "run"
    assert run(["simulate", "--config", config_path, "--out-dir", str(out)]) == 0
    return out


def test_simulate_writes_the_bundle(capsys, bundle):
    assert "mGAP" in capsys.readouterr().out
    for name in map_io.BUNDLE_FILES.values():
        assert (bundle / name).is_file()
    assert len(list((bundle / "frames").glob("*_pred.json"))) == 12


def test_simulate_is_reproducible(tmp_path, bundle, config_path):
    again = tmp_path / "again"
    assert run(["simulate", "--config", config_path, "--out-dir", str(again)]) == 0
    first = json.loads((bundle / "report.json").read_text())
    second = json.loads((again / "report.json").read_text())
    assert first == second
    assert (bundle / "built_global.json").read_bytes() == (again / "built_global.json").read_bytes()


def test_seed_override_changes_the_run(tmp_path, config_path):
    out = tmp_path / "seeded"
    assert run(["simulate", "--config", config_path, "--seed", "9", "--out-dir", str(out)]) == 0
    assert map_io.load_scenario_config(out / "scenario.yaml").seed == 9


def test_rerun_from_report_metadata(tmp_path, bundle):
    cfg = map_io.scenario_config_from_report(map_io.load_report(bundle / "report.json"))
    path = map_io.save_scenario_config(cfg, tmp_path / "from_report.yaml")
    again = tmp_path / "again"
    assert run(["simulate", "--config", str(path), "--out-dir", str(again)]) == 0

    first = map_io.load_report(bundle / "report.json")
    second = map_io.load_report(again / "report.json")
    assert (second.mAP, second.mGAP) == (first.mAP, first.mGAP)


def test_build_replays_the_stored_frames(tmp_path, bundle):
    out = tmp_path / "replayed.json"
    traced_out = tmp_path / "traced.json"
    code = run([
        "build",
        "--frames", str(bundle / "frames"),
        "--params", str(bundle / "builder_params.yaml"),
        "--out", str(out),
        "--traced-out", str(traced_out),
    ])
    assert code == 0

    replayed = map_io.load_map(out)
    built = map_io.load_map(bundle / "built_global.json")
    assert [e.id for e in replayed.elements] == [e.id for e in built.elements]
    for a, b in zip(replayed.elements, built.elements):
        assert a.category == b.category
        assert np.allclose(a.geometry.as_array(), b.geometry.as_array(), atol=1e-6)
    assert map_io.load_traced_region(traced_out) == map_io.load_traced_region(bundle / "traced_region.json")


def test_eval_of_ground_truth_against_itself(tmp_path, bundle, capsys):
    out = tmp_path / "eval.json"
    gt = str(bundle / "gt_global.json")
    assert run(["eval", "--pred", gt, "--gt", gt, "--out", str(out)]) == 0
    assert "mGAP 1.0000" in capsys.readouterr().out
    assert map_io.load_report(out).mGAP == pytest.approx(1.0)


def test_eval_of_a_frame_directory(tmp_path, bundle):
    out = tmp_path / "eval.json"
    code = run([
        "eval",
        "--pred", str(bundle / "built_global.json"),
        "--gt", str(bundle / "gt_global.json"),
        "--traced", str(bundle / "traced_region.json"),
        "--frames", str(bundle / "frames"),
        "--out", str(out),
    ])
    assert code == 0

    report = map_io.load_report(out)
    simulated = map_io.load_report(bundle / "report.json")
    assert report.mAP == pytest.approx(simulated.mAP)
    assert report.mGAP == pytest.approx(simulated.mGAP)
    assert report.metadata["thresholds"] == [0.5, 1.0, 1.5]


def test_eval_custom_thresholds(tmp_path, bundle):
    out = tmp_path / "eval.json"
    gt = str(bundle / "gt_global.json")
    assert run(["eval", "--pred", gt, "--gt", gt, "--thresholds", "0.25,2", "--out", str(out)]) == 0
    assert map_io.load_report(out).gap.thresholds == [0.25, 2.0]


def test_rasterize_writes_four_masks(tmp_path, bundle, capsys):
    out = tmp_path / "masks"
    code = run([
        "rasterize",
        "--map", str(bundle / "built_global.json"),
        "--pose", "30,0,0",
        "--res", "1.0",
        "--traced", str(bundle / "traced_region.json"),
        "--out", str(out),
    ])
    assert code == 0
    assert "30x60" in capsys.readouterr().out
    assert sorted(p.name for p in out.iterdir()) == [
        "lane_divider.grid", "ped_crossing.grid", "road_boundary.grid", "traced_region.grid",
    ]
    road, header = map_io.load_mask(out / "road_boundary.grid")
    assert road.shape == (30, 60)
    assert header["pose"] == "30.0,0.0,0.0"


def test_render_is_byte_identical(tmp_path, bundle):
    args = ["--map", str(bundle / "built_global.json"), "--gt", str(bundle / "gt_global.json"),
            "--traced", str(bundle / "traced_region.json")]
    assert run(["render", *args, "--out", str(tmp_path / "a.svg")]) == 0
    assert run(["render", *args, "--out", str(tmp_path / "b.svg")]) == 0
    assert (tmp_path / "a.svg").read_bytes() == (tmp_path / "b.svg").read_bytes()


def test_sweep_prints_the_table(tmp_path, config_path, capsys):
    out = tmp_path / "sweep.json"
    assert run(["sweep", "--config", config_path, "--seeds", "1", "--out", str(out)]) == 0
    printed = capsys.readouterr().out
    assert printed.splitlines()[0].startswith("D_road | D_lane | D_ped | GAP_road_boundary")
    assert len(json.loads(out.read_text())["rows"]) == 4


# Exit codes

@pytest.mark.parametrize("pose", ["1,2", "a,b,c", "1,2,3,4"])
def test_bad_pose_is_a_usage_error(tmp_path, bundle, pose):
    code = run(["rasterize", "--map", str(bundle / "gt_global.json"), "--pose", pose, "--out", str(tmp_path / "m")])
    assert code == 2


@pytest.mark.parametrize("option", [["--tau", "0"], ["--tau", "-1"], ["--res", "0.7"]])
def test_bad_raster_options(tmp_path, bundle, option):
    code = run([
        "rasterize", "--map", str(bundle / "gt_global.json"), "--pose", "0,0,0", *option, "--out", str(tmp_path / "m"),
    ])
    assert code == 2


def test_eval_needs_inputs(tmp_path, capsys):
    assert run(["eval", "--out", str(tmp_path / "r.json")]) == 2
    assert "--frames" in capsys.readouterr().err


def test_unknown_command_and_missing_file(tmp_path):
    assert run(["teleport"]) == 2
    assert run(["render", "--map", str(tmp_path / "nope.json"), "--out", str(tmp_path / "x.svg")]) == 2


def test_invalid_map_file_exits_3(tmp_path, bundle, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text(json.dumps({
        "format_version": 1,
        "frame": "global",
        "elements": [{"id": 0, "category": "lane_divider", "score": 2.0, "points": [[0, 0], [1, 0]]}],
    }))
    code = run(["eval", "--pred", str(bad), "--gt", str(bundle / "gt_global.json"), "--out", str(tmp_path / "r.json")])
    assert code == 3
    assert "elements[0]" in capsys.readouterr().err


def test_missing_initial_map_exits_1(tmp_path, small_scenario, capsys):
    cfg = small_scenario.model_copy(update={
        "mode": ScenarioMode.CROSS_SCENE,
        "initial_map": str(tmp_path / "gone.json"),
    })
    path = map_io.save_scenario_config(cfg, tmp_path / "cross.yaml")
    assert run(["simulate", "--config", str(path), "--out-dir", str(tmp_path / "out")]) == 1
    assert "gone.json" in capsys.readouterr().err


def test_build_without_frames_exits_3(tmp_path):
    empty = tmp_path / "frames"
    empty.mkdir()
    assert run(["build", "--frames", str(empty), "--out", str(tmp_path / "m.json")]) == 3
