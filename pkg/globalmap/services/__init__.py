from globalmap.services import map_io
from globalmap.services.geometry import (
    polyline_length,
    resample_polyline,
    point_to_polyline_distance,
    project_point,
    chamfer_distance,
    transform_polyline,
    buffered_iou
)
from globalmap.services.map_clipper import clip_map, fragments_to_local_map, map_to_global, clip_map_to_region
from globalmap.services.map_builder import match_maps, inplace_replace, map_nms, merge_step, GlobalMapBuilder
from globalmap.services.map_evaluator import match_frame, pr_curve, auc, ap_stream, gap_map
from globalmap.services.rasterizer import rasterize_soft, update_traced_region, traced_mask, clip_and_rasterize
from globalmap.services.world_generator import generate_ground_truth, generate_trajectory
from globalmap.services.perception_oracle import perceive
from globalmap.services.scenario_runner import run_scenario
from globalmap.services.svg_renderer import render_svg
from globalmap.services.sweep_service import run_sweep

__all__ = [
    "map_io",
    "polyline_length",
    "resample_polyline",
    "point_to_polyline_distance",
    "project_point",
    "chamfer_distance",
    "transform_polyline",
    "buffered_iou",
    "clip_map",
    "fragments_to_local_map",
    "map_to_global",
    "clip_map_to_region",
    "match_maps",
    "inplace_replace",
    "map_nms",
    "merge_step",
    "GlobalMapBuilder",
    "match_frame",
    "pr_curve",
    "auc",
    "ap_stream",
    "gap_map",
    "rasterize_soft",
    "update_traced_region",
    "traced_mask",
    "clip_and_rasterize",
    "generate_ground_truth",
    "generate_trajectory",
    "perceive",
    "run_scenario",
    "render_svg",
    "run_sweep"
]
