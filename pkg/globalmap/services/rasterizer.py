"""Soft BEV rasterization of vector maps plus the traced-region channel"""
from typing import List, Sequence
import logging

import numpy as np

from globalmap.models.geometry import Direction, Pose
from globalmap.models.map import Category, ClipWindow, ELEMENT_CATEGORIES, MapElement, VectorMap
from globalmap.models.state import Footprint, TracedRegion
from globalmap.schemas.raster import BevMask, GridSpec
from globalmap.services.geometry import closest_on_path, transform_points
from globalmap.services.map_clipper import local_map_at
from globalmap.utils.exceptions import UsageError

logger = logging.getLogger(__name__)


def _check_tau(tau: float):
    if tau <= 0:
        raise UsageError(f"tau must be positive, got {tau}")


def distance_field(elements: Sequence[MapElement], spec: GridSpec) -> np.ndarray:
    """Distance from every cell center to the nearest of the given elements"""
    centers = spec.cell_centers().reshape(-1, 2)
    nearest = np.full(len(centers), np.inf)
    for element in elements:
        dist, _ = closest_on_path(centers, element.geometry.path())
        np.minimum(nearest, dist, out=nearest)
    return nearest.reshape(spec.shape)


def rasterize_category(
    elements: Sequence[MapElement],
    category: Category,
    spec: GridSpec,
    tau: float,
) -> BevMask:
    """exp(-D / tau) for one category; all zeros when the category has no elements"""
    _check_tau(tau)
    members = [e for e in elements if e.category == category]
    if not members:
        return BevMask(category=category, values=np.zeros(spec.shape))
    values = np.exp(-distance_field(members, spec) / tau)
    return BevMask(category=category, values=values)


def rasterize_soft(elements: Sequence[MapElement], spec: GridSpec, tau: float) -> List[BevMask]:
    """One soft mask per element category present, in category order"""
    _check_tau(tau)
    present = {e.category for e in elements}
    return [rasterize_category(elements, c, spec, tau) for c in ELEMENT_CATEGORIES if c in present]


def update_traced_region(tr: TracedRegion, pose: Pose, window: ClipWindow) -> TracedRegion:
    return TracedRegion(footprints=tr.footprints + (Footprint(pose=pose, window=window),))


def traced_mask(tr: TracedRegion, ego_pose: Pose, spec: GridSpec) -> BevMask:
    """1.0 where the cell center falls inside any footprint, else 0.0"""
    centers = transform_points(spec.cell_centers().reshape(-1, 2), ego_pose, Direction.EGO_TO_GLOBAL)
    inside = tr.contains(centers) if len(tr) else np.zeros(len(centers), dtype=bool)
    return BevMask(category=Category.TRACED_REGION, values=inside.reshape(spec.shape).astype(float))


def clip_and_rasterize(
    global_map: VectorMap,
    tr: TracedRegion,
    pose: Pose,
    spec: GridSpec,
    tau: float,
) -> List[BevMask]:
    """
    Map prior for one frame: clip the global map at pose and rasterize it

    Always returns one mask per element category followed by the traced-region
    mask; categories with nothing in the window give all-zero masks.
    """
    _check_tau(tau)
    local = local_map_at(global_map, pose, spec.window)
    masks = [rasterize_category(local.elements, c, spec, tau) for c in ELEMENT_CATEGORIES]
    masks.append(traced_mask(tr, pose, spec))
    logger.debug(f"Rasterized {len(local)} clipped elements into {len(masks)} masks of {spec.rows}x{spec.cols}")
    return masks
