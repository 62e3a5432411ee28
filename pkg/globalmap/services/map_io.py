"""
Reading and writing every file the tool exchanges: maps, traced regions,
reports, scenario/builder configs, mask grids and the simulate bundle.

Artifacts are JSON; configs are YAML (which also reads JSON). Angles in config
files are written in degrees under `*_deg` keys.
"""
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union
import json
import logging
import math

import numpy as np
import yaml
from pydantic import BaseModel, ValidationError

from globalmap.models.geometry import Polyline, Pose
from globalmap.models.map import MapElement, VectorMap
from globalmap.models.state import TracedRegion
from globalmap.schemas.builder import BuilderParams
from globalmap.schemas.files import MapFile, ReportFile, TracedRegionFile
from globalmap.schemas.metrics import EvalReport, SweepReport
from globalmap.schemas.raster import BevMask, GridSpec
from globalmap.schemas.scenario import ScenarioConfig, ScenarioResult
from globalmap.utils.exceptions import GlobalMapError, MapValidationError

logger = logging.getLogger(__name__)

PathLike = Union[str, Path]

# config fields stored in radians in memory, degrees on disk
ANGLE_FIELDS = ("pose_sigma_yaw",)
DEG_SUFFIX = "_deg"

FRAMES_DIR = "frames"
PRIORS_DIR = "priors"
BUNDLE_FILES = {
    "gt_global": "gt_global.json",
    "built_global": "built_global.json",
    "traced_region": "traced_region.json",
    "report": "report.json",
    "scenario": "scenario.yaml",
    "builder_params": "builder_params.yaml",
}


def _read_text(path: PathLike) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as e:
        raise GlobalMapError(f"cannot read {path}: {e.strerror or e}") from e


def _write_text(path: PathLike, text: str) -> Path:
    path = Path(path)
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")
    except OSError as e:
        raise GlobalMapError(f"cannot write {path}: {e.strerror or e}") from e
    return path


def _read_json(path: PathLike) -> Any:
    try:
        return json.loads(_read_text(path))
    except json.JSONDecodeError as e:
        raise MapValidationError(f"{path}:{e.lineno}:{e.colno}: {e.msg}") from e


def _read_yaml(path: PathLike) -> Dict[str, Any]:
    try:
        data = yaml.safe_load(_read_text(path))
    except yaml.YAMLError as e:
        mark = getattr(e, "problem_mark", None)
        where = f":{mark.line + 1}:{mark.column + 1}" if mark is not None else ""
        raise MapValidationError(f"{path}{where}: {getattr(e, 'problem', None) or e}") from e
    if data is None:
        return {}
    if not isinstance(data, dict):
        raise MapValidationError(f"{path}: expected a mapping at the top level")
    return data


def _describe(path: PathLike, error: ValidationError, data: Any = None) -> str:
    """Flatten a pydantic error into "path: location: message" lines, naming elements by index and id"""
    lines = []
    for item in error.errors():
        loc = list(item["loc"])
        where = ".".join(str(part) for part in loc)
        if len(loc) >= 2 and loc[0] == "elements" and isinstance(loc[1], int):
            element_id = None
            if isinstance(data, dict):
                try:
                    element_id = data["elements"][loc[1]].get("id")
                except (KeyError, IndexError, TypeError, AttributeError):
                    element_id = None
            rest = ".".join(str(part) for part in loc[2:])
            where = f"elements[{loc[1]}]" + (f" (id {element_id})" if element_id is not None else "") + (f".{rest}" if rest else "")
        lines.append(f"{path}: {where}: {item['msg']}")
    return "; ".join(lines)


def _validate(model: type, data: Any, path: PathLike) -> BaseModel:
    try:
        return model.model_validate(data)
    except ValidationError as e:
        raise MapValidationError(_describe(path, e, data)) from e


# Maps

def map_file_to_domain(mf: MapFile, path: PathLike = "<memory>") -> VectorMap:
    if mf.format_version != 1:
        raise MapValidationError(f"{path}: unsupported format_version {mf.format_version}")
    elements = []
    for index, record in enumerate(mf.elements):
        try:
            elements.append(MapElement(
                id=record.id,
                category=record.category,
                geometry=Polyline(points=tuple(record.points), closed=record.closed),
                score=record.score,
            ))
        except ValidationError as e:
            messages = "; ".join(item["msg"] for item in e.errors())
            raise MapValidationError(f"{path}: elements[{index}] (id {record.id}): {messages}") from e
    try:
        return VectorMap(frame=mf.frame, elements=tuple(elements))
    except ValidationError as e:
        raise MapValidationError(f"{path}: {e.errors()[0]['msg']}") from e


def load_map_file(path: PathLike) -> MapFile:
    data = _read_json(path)
    return _validate(MapFile, data, path)


def load_map(path: PathLike) -> VectorMap:
    return map_file_to_domain(load_map_file(path), path)


def load_frame(path: PathLike) -> Tuple[VectorMap, MapFile]:
    """A stored per-frame map plus its header (pose, frame_index, merged)"""
    mf = load_map_file(path)
    return map_file_to_domain(mf, path), mf


def save_map(
    m: VectorMap,
    path: PathLike,
    pose: Optional[Pose] = None,
    frame_index: Optional[int] = None,
    merged: Optional[bool] = None,
) -> Path:
    mf = MapFile.from_domain(m, pose=pose, frame_index=frame_index, merged=merged)
    return _write_text(path, mf.model_dump_json(indent=1, exclude_none=True) + "\n")


# Traced regions

def save_traced_region(tr: TracedRegion, path: PathLike) -> Path:
    return _write_text(path, TracedRegionFile.from_domain(tr).model_dump_json(indent=1) + "\n")


def load_traced_region(path: PathLike) -> TracedRegion:
    tf = _validate(TracedRegionFile, _read_json(path), path)
    try:
        return tf.to_domain()
    except ValidationError as e:
        raise MapValidationError(_describe(path, e)) from e


# Reports

def save_report(report: EvalReport, path: PathLike) -> Path:
    rf = ReportFile(
        ap=report.ap,
        gap=report.gap,
        mAP=report.mAP,
        mGAP=report.mGAP,
        metadata=report.metadata,
    )
    return _write_text(path, rf.model_dump_json(indent=2) + "\n")


def load_report(path: PathLike) -> EvalReport:
    rf = _validate(ReportFile, _read_json(path), path)
    return EvalReport(ap=rf.ap, gap=rf.gap, metadata=rf.metadata)


# Configs

def _from_degrees(data: Any, path: PathLike) -> Any:
    """Recursively turn `name_deg: value` into `name: radians(value)`"""
    if isinstance(data, list):
        return [_from_degrees(v, path) for v in data]
    if not isinstance(data, dict):
        return data
    out = {}
    for key, value in data.items():
        if isinstance(key, str) and key.endswith(DEG_SUFFIX):
            name = key[: -len(DEG_SUFFIX)]
            if name in data:
                raise MapValidationError(f"{path}: both {key} and {name} given")
            try:
                out[name] = math.radians(float(value))
            except (TypeError, ValueError) as e:
                raise MapValidationError(f"{path}: {key} must be a number of degrees") from e
        else:
            out[key] = _from_degrees(value, path)
    return out


def _to_degrees(data: Any) -> Any:
    if isinstance(data, list):
        return [_to_degrees(v) for v in data]
    if not isinstance(data, dict):
        return data
    out = {}
    for key, value in data.items():
        if key in ANGLE_FIELDS and isinstance(value, (int, float)):
            out[key + DEG_SUFFIX] = math.degrees(value)
        else:
            out[key] = _to_degrees(value)
    return out


def scenario_config_from_dict(data: Dict[str, Any], path: PathLike = "<memory>") -> ScenarioConfig:
    return _validate(ScenarioConfig, _from_degrees(data, path), path)


def load_scenario_config(path: PathLike) -> ScenarioConfig:
    return scenario_config_from_dict(_read_yaml(path), path)


def save_scenario_config(cfg: ScenarioConfig, path: PathLike) -> Path:
    data = _to_degrees(cfg.model_dump(mode="json"))
    return _write_text(path, yaml.safe_dump(data, sort_keys=False))


def load_builder_params(path: PathLike) -> BuilderParams:
    return _validate(BuilderParams, _from_degrees(_read_yaml(path), path), path)


def save_builder_params(params: BuilderParams, path: PathLike) -> Path:
    return _write_text(path, yaml.safe_dump(params.model_dump(mode="json"), sort_keys=False))


def scenario_config_from_report(report: EvalReport) -> ScenarioConfig:
    """Rebuild the exact config a report was produced from"""
    config = report.metadata.get("config")
    if not isinstance(config, dict):
        raise MapValidationError("report metadata has no scenario config")
    return _validate(ScenarioConfig, config, "report.metadata.config")


# Mask grids

def mask_header(mask: BevMask, spec: GridSpec, tau: float, pose: Pose) -> Dict[str, str]:
    return {
        "category": mask.category.value,
        "rows": str(spec.rows),
        "cols": str(spec.cols),
        "resolution": repr(spec.resolution),
        "tau": repr(tau),
        "pose": f"{pose.x!r},{pose.y!r},{math.degrees(pose.yaw)!r}",
    }


def save_masks(
    masks: Sequence[BevMask],
    out_dir: PathLike,
    spec: GridSpec,
    tau: float,
    pose: Pose,
) -> List[Path]:
    """One `<category>.grid` file per mask: `# key: value` header lines, then row-major values"""
    out_dir = Path(out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as e:
        raise GlobalMapError(f"cannot create {out_dir}: {e.strerror or e}") from e
    paths = []
    for mask in masks:
        header = "\n".join(f"{k}: {v}" for k, v in mask_header(mask, spec, tau, pose).items())
        path = out_dir / f"{mask.category.value}.grid"
        try:
            np.savetxt(path, mask.values, fmt="%.9f", header=header, comments="# ")
        except OSError as e:
            raise GlobalMapError(f"cannot write {path}: {e.strerror or e}") from e
        paths.append(path)
    return paths


def load_mask(path: PathLike) -> Tuple[BevMask, Dict[str, str]]:
    header: Dict[str, str] = {}
    for line in _read_text(path).splitlines():
        if not line.startswith("#"):
            break
        key, _, value = line.lstrip("#").partition(":")
        header[key.strip()] = value.strip()
    try:
        rows, cols = int(header["rows"]), int(header["cols"])
        values = np.loadtxt(path, comments="#", ndmin=2)
    except (KeyError, ValueError) as e:
        raise MapValidationError(f"{path}: malformed mask grid ({e})") from e
    if values.shape != (rows, cols):
        raise MapValidationError(f"{path}: header says {rows}x{cols}, found {values.shape[0]}x{values.shape[1]}")
    try:
        return BevMask(category=header["category"], values=values), header
    except (KeyError, ValidationError) as e:
        raise MapValidationError(f"{path}: invalid mask ({e})") from e


# Simulate bundle

def frame_file(frames_dir: PathLike, frame_index: int, kind: str) -> Path:
    return Path(frames_dir) / f"{frame_index:04d}_{kind}.json"


def write_bundle(result: ScenarioResult, out_dir: PathLike) -> Dict[str, Path]:
    """Write every artifact of a run under out_dir with the fixed bundle names"""
    out_dir = Path(out_dir)
    written = {
        "gt_global": save_map(result.gt_global, out_dir / BUNDLE_FILES["gt_global"]),
        "built_global": save_map(result.built_global, out_dir / BUNDLE_FILES["built_global"]),
        "traced_region": save_traced_region(result.traced, out_dir / BUNDLE_FILES["traced_region"]),
        "report": save_report(result.report, out_dir / BUNDLE_FILES["report"]),
        "scenario": save_scenario_config(result.config, out_dir / BUNDLE_FILES["scenario"]),
        "builder_params": save_builder_params(result.config.builder, out_dir / BUNDLE_FILES["builder_params"]),
    }
    frames_dir = out_dir / FRAMES_DIR
    for index, (pose, pred, gt, merged) in enumerate(
        zip(result.poses, result.predictions, result.gt_frames, result.merged)
    ):
        save_map(pred, frame_file(frames_dir, index, "pred"), pose=pose, frame_index=index, merged=merged)
        save_map(gt, frame_file(frames_dir, index, "gt"), pose=pose, frame_index=index)
    written["frames"] = frames_dir

    if result.prior_masks:
        grid = GridSpec(window=result.config.window, resolution=result.config.raster_resolution)
        for index, masks in sorted(result.prior_masks.items()):
            save_masks(masks, out_dir / PRIORS_DIR / f"{index:04d}", grid, result.config.raster_tau, result.poses[index])
        written["priors"] = out_dir / PRIORS_DIR

    logger.info(f"Wrote bundle of {len(result.predictions)} frames to {out_dir}")
    return written


def read_frame_dir(frames_dir: PathLike, kind: str = "pred") -> List[Tuple[VectorMap, MapFile]]:
    """All stored frames of one kind, in frame order"""
    frames_dir = Path(frames_dir)
    if not frames_dir.is_dir():
        raise GlobalMapError(f"{frames_dir} is not a directory")
    paths = sorted(frames_dir.glob(f"*_{kind}.json"))
    frames = [load_frame(p) for p in paths]
    for path, (_, mf) in zip(paths, frames):
        if mf.frame_index is None and kind == "pred":
            raise MapValidationError(f"{path}: stored frame has no frame_index")
    return sorted(frames, key=lambda item: item[1].frame_index if item[1].frame_index is not None else 0)


def save_sweep_report(report: SweepReport, path: PathLike) -> Path:
    return _write_text(path, report.model_dump_json(indent=2) + "\n")
