"""
Procedural ground truth for the simulator: a Manhattan grid of blocks and a
boustrophedon drive over it.

Roads run along x = i * block_size and y = j * block_size. Every block gets one
closed road_boundary rectangle inset by road_width / 2; every road segment between
two intersections gets (lanes_per_road - 1) lane dividers and one ped crossing,
at the segment's start or end as drawn from the world seed.
"""
from typing import Dict, List
import logging
import math

import numpy as np

from globalmap.models.geometry import Polyline, Pose
from globalmap.models.map import Category, Frame, MapElement, VectorMap
from globalmap.schemas.scenario import ScenarioConfig, WorldConfig
from globalmap.utils.exceptions import UsageError

logger = logging.getLogger(__name__)


def expected_counts(cfg: WorldConfig) -> Dict[Category, int]:
    """Closed-form element counts of generate_ground_truth"""
    bx, by = cfg.blocks_x, cfg.blocks_y
    segments = bx * (by + 1) + (bx + 1) * by
    return {
        Category.ROAD_BOUNDARY: bx * by,
        Category.LANE_DIVIDER: segments * (cfg.lanes_per_road - 1),
        Category.PED_CROSSING: segments,
    }


def _road_segments(cfg: WorldConfig) -> List[np.ndarray]:
    """(start, unit direction, unit left normal) of every road segment, horizontal first"""
    bs = cfg.block_size
    segments = []
    for j in range(cfg.blocks_y + 1):
        for i in range(cfg.blocks_x):
            segments.append(np.array([[i * bs, j * bs], [1.0, 0.0], [0.0, 1.0]]))
    for i in range(cfg.blocks_x + 1):
        for j in range(cfg.blocks_y):
            segments.append(np.array([[i * bs, j * bs], [0.0, 1.0], [-1.0, 0.0]]))
    return segments


def _rectangle(start: np.ndarray, along: np.ndarray, left: np.ndarray,
               s0: float, s1: float, l0: float, l1: float) -> Polyline:
    corners = [
        start + s0 * along + l0 * left,
        start + s1 * along + l0 * left,
        start + s1 * along + l1 * left,
        start + s0 * along + l1 * left,
    ]
    return Polyline.from_array(np.array(corners), closed=True)


def generate_ground_truth(cfg: WorldConfig) -> VectorMap:
    """Deterministic ground-truth global map for a world config (all scores 1.0)"""
    rng = np.random.default_rng(cfg.seed)
    bs, half_road = cfg.block_size, cfg.road_width / 2.0
    geometries = []

    for j in range(cfg.blocks_y):
        for i in range(cfg.blocks_x):
            x0, y0 = i * bs + half_road, j * bs + half_road
            x1, y1 = (i + 1) * bs - half_road, (j + 1) * bs - half_road
            rect = Polyline.from_array(np.array([[x0, y0], [x1, y0], [x1, y1], [x0, y1]]), closed=True)
            geometries.append((Category.ROAD_BOUNDARY, rect))

    segments = _road_segments(cfg)
    inner_start = half_road + cfg.crossing_length
    inner_end = bs - half_road - cfg.crossing_length
    for start, along, left in segments:
        for k in range(1, cfg.lanes_per_road):
            offset = -half_road + k * cfg.road_width / cfg.lanes_per_road
            points = np.array([
                start + inner_start * along + offset * left,
                start + inner_end * along + offset * left,
            ])
            geometries.append((Category.LANE_DIVIDER, Polyline.from_array(points)))

    # One crossing per segment, bx*(by+1) + (bx+1)*by in all (see expected_counts), at a seed-chosen end
    for start, along, left in segments:
        if rng.integers(2) == 0:
            s0, s1 = half_road, half_road + cfg.crossing_length
        else:
            s0, s1 = bs - half_road - cfg.crossing_length, bs - half_road
        geometries.append((Category.PED_CROSSING, _rectangle(start, along, left, s0, s1, -half_road, half_road)))

    elements = tuple(
        MapElement(id=i, category=category, geometry=geometry, score=1.0)
        for i, (category, geometry) in enumerate(geometries)
    )
    logger.info(
        f"Generated {cfg.blocks_x}x{cfg.blocks_y} world with {len(elements)} elements "
        f"({len(segments)} road segments)"
    )
    return VectorMap(frame=Frame.GLOBAL, elements=elements)


def route_waypoints(cfg: WorldConfig) -> np.ndarray:
    """Boustrophedon over the horizontal roads, joined by vertical roads at alternating ends"""
    bs = cfg.block_size
    east = cfg.blocks_x * bs
    waypoints = []
    for j in range(cfg.blocks_y + 1):
        y = j * bs
        xs = (0.0, east) if j % 2 == 0 else (east, 0.0)
        waypoints.append((xs[0], y))
        waypoints.append((xs[1], y))
    return np.array(waypoints, dtype=float)


def generate_trajectory(gt: VectorMap, cfg: ScenarioConfig) -> List[Pose]:
    """
    Poses at frame_hz along the road centerlines

    The route is driven there and back as a loop, so long runs revisit roads.
    Yaw is the heading of the segment the pose lies on.
    """
    if gt.frame != Frame.GLOBAL:
        raise UsageError("trajectories are generated over a global-frame map")

    route = route_waypoints(cfg.world)
    loop = np.vstack([route, route[-2::-1]])
    deltas = np.diff(loop, axis=0)
    lengths = np.linalg.norm(deltas, axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(lengths)))
    total = cumulative[-1]

    step = cfg.step_length
    poses = []
    for frame in range(cfg.n_frames):
        s = ((frame + cfg.route_offset_frames) * step) % total
        k = min(int(np.searchsorted(cumulative, s, side="right") - 1), len(lengths) - 1)
        point = loop[k] + (s - cumulative[k]) / lengths[k] * deltas[k]
        yaw = math.atan2(deltas[k][1], deltas[k][0])
        poses.append(Pose(x=float(point[0]), y=float(point[1]), yaw=yaw))
    logger.debug(f"Trajectory of {len(poses)} poses, {step:.2f} m per frame over a {total:.1f} m loop")
    return poses
