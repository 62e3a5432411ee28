"""
Noisy perception oracle standing in for a learned local mapper.

It clips the ground truth at a drifted pose, drops and jitters elements, and
adds spurious short polylines. Random draws happen in a fixed order for every
frame (pose, then per element drop + jitter, then spurious count and spurious
elements) so outputs depend only on the frame seed.
"""
from typing import List, Optional, Tuple
import logging
import math

import numpy as np

from globalmap.config import settings
from globalmap.models.geometry import Polyline, Pose
from globalmap.models.map import Category, ClipWindow, ELEMENT_CATEGORIES, Frame, MapElement, VectorMap
from globalmap.schemas.scenario import NoiseConfig
from globalmap.services.geometry import dedupe_vertices
from globalmap.services.map_clipper import clip_map

logger = logging.getLogger(__name__)

SPURIOUS_LENGTH = (2.0, 10.0)
SPURIOUS_SCORE = (0.1, 0.5)
# spurious starts are kept this far inside the window edges
SPURIOUS_MARGIN = 1.0


def _drifted_pose(pose: Pose, noise: NoiseConfig, rng: np.random.Generator) -> Pose:
    dx, dy = rng.normal(0.0, noise.pose_sigma_xy, size=2)
    dyaw = rng.normal(0.0, noise.pose_sigma_yaw)
    return Pose(x=pose.x + float(dx), y=pose.y + float(dy), yaw=pose.yaw + float(dyaw))


def _spurious(window: ClipWindow, rng: np.random.Generator) -> Tuple[Category, Optional[Polyline], float]:
    """Category, geometry and score of one random short polyline; None geometry when clipped to a sliver"""
    length = rng.uniform(*SPURIOUS_LENGTH)
    angle = rng.uniform(-math.pi, math.pi)
    hl = max(window.half_length - SPURIOUS_MARGIN, 0.0)
    hw = max(window.half_width - SPURIOUS_MARGIN, 0.0)
    start = np.array([rng.uniform(-hl, hl), rng.uniform(-hw, hw)])
    category = ELEMENT_CATEGORIES[int(rng.integers(len(ELEMENT_CATEGORIES)))]
    score = rng.uniform(*SPURIOUS_SCORE)

    end = start + length * np.array([math.cos(angle), math.sin(angle)])
    end = np.clip(end, [-window.half_length, -window.half_width], [window.half_length, window.half_width])
    geometry = None
    if np.linalg.norm(end - start) >= settings.MIN_FRAGMENT_LENGTH:
        geometry = Polyline.from_array(np.vstack([start, end]))
    return category, geometry, float(score)


def perceive(
    gt: VectorMap,
    pose: Pose,
    noise: NoiseConfig,
    frame_seed: int,
    window: ClipWindow = ClipWindow(),
) -> VectorMap:
    """
    Ego-frame local prediction of one frame

    With every noise knob at zero this is exactly the ground-truth clip at pose
    with scores 1.0.
    """
    rng = np.random.default_rng(frame_seed)
    perceived_at = _drifted_pose(pose, noise, rng)

    elements: List[MapElement] = []
    dropped = 0
    for fragment in clip_map(gt, perceived_at, window):
        drop = rng.random() < noise.drop_prob
        points = fragment.element.geometry.as_array()
        jitter = rng.normal(0.0, noise.point_sigma, size=points.shape)
        if drop:
            dropped += 1
            continue
        closed = fragment.element.geometry.closed
        jittered = dedupe_vertices(points + jitter, closed=closed)
        if len(jittered) < (3 if closed else 2):
            continue
        displacement = float(np.linalg.norm(jitter, axis=1).mean())
        elements.append(MapElement(
            id=len(elements),
            category=fragment.element.category,
            geometry=Polyline.from_array(jittered, closed=closed),
            score=noise.score_model.score(displacement),
        ))

    n_spurious = int(rng.poisson(noise.spurious_rate))
    for _ in range(n_spurious):
        category, geometry, score = _spurious(window, rng)
        if geometry is None:
            continue
        elements.append(MapElement(id=len(elements), category=category, geometry=geometry, score=score))

    logger.debug(f"Perceived {len(elements)} elements ({dropped} dropped, {n_spurious} spurious)")
    return VectorMap(frame=Frame.EGO, elements=tuple(elements))
