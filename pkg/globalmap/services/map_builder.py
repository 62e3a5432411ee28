from typing import Dict, List, Optional, Tuple
import logging
import math

import numpy as np
from scipy.optimize import linear_sum_assignment

from globalmap.models.geometry import Polyline, Pose
from globalmap.models.map import ClipFragment, ELEMENT_CATEGORIES, Frame, MapElement, VectorMap
from globalmap.models.state import GlobalMapState
from globalmap.schemas.builder import BuilderParams, MatchPair, MatchResult
from globalmap.services.geometry import (
    buffer_polygon,
    chamfer_distance,
    closest_on_path,
    dedupe_vertices,
    polygon_iou,
    polyline_length,
    resample_path,
)
from globalmap.services.map_clipper import clip_map, element_to_global
from globalmap.utils.exceptions import UsageError

logger = logging.getLogger(__name__)


def assign_min_cost(cost: np.ndarray) -> Tuple[np.ndarray, np.ndarray, float]:
    """
    Minimum-total-cost one-to-one assignment on a (possibly rectangular) cost matrix

    Returns:
        (row indices, column indices, total cost of the assignment)
    """
    cost = np.atleast_2d(np.asarray(cost, dtype=float))
    if cost.size == 0:
        return np.array([], dtype=int), np.array([], dtype=int), 0.0
    rows, cols = linear_sum_assignment(cost)
    return rows, cols, math.fsum(cost[rows, cols])


def match_maps(
    global_fragments: List[ClipFragment],
    local: VectorMap,
    params: BuilderParams,
) -> MatchResult:
    """
    Match clipped global fragments with local elements, per category

    Hungarian assignment on the Chamfer cost matrix, then pairs costing more than
    the category's matching distance are dropped. When two fragments of one parent
    both match, the cheaper pair wins and the other local element is released.
    """
    if local.frame != Frame.EGO:
        raise UsageError(f"match_maps expects an ego-frame local map, got {local.frame.value}")

    candidates: List[MatchPair] = []
    assignment_costs: List[float] = []
    locals_by_category = local.by_category()

    for category in ELEMENT_CATEGORIES:
        fragments = [f for f in global_fragments if f.element.category == category]
        elements = locals_by_category[category]
        if not fragments or not elements:
            continue
        cost = np.array([
            [chamfer_distance(f.element.geometry, e.geometry) for e in elements]
            for f in fragments
        ])
        rows, cols, total = assign_min_cost(cost)
        assignment_costs.append(total)
        threshold = params.match_threshold(category)
        for r, c in zip(rows, cols):
            if cost[r, c] <= threshold:
                fragment = fragments[r]
                candidates.append(MatchPair(
                    parent_id=fragment.parent_id,
                    local_id=elements[c].id,
                    cost=float(cost[r, c]),
                    arc_offset=fragment.arc_offset,
                    arc_length=fragment.arc_length,
                ))

    # one splice per parent per frame
    best: Dict[int, MatchPair] = {}
    for pair in candidates:
        current = best.get(pair.parent_id)
        if current is None or (pair.cost, pair.local_id) < (current.cost, current.local_id):
            best[pair.parent_id] = pair
    if len(best) < len(candidates):
        logger.debug(f"Released {len(candidates) - len(best)} local elements matched to an already-matched parent")

    pairs = sorted(best.values(), key=lambda p: p.local_id)
    matched_parents = {p.parent_id for p in pairs}
    matched_locals = {p.local_id for p in pairs}
    return MatchResult(
        pairs=pairs,
        unmatched_global=sorted({f.parent_id for f in global_fragments} - matched_parents),
        unmatched_local=[e.id for e in local.elements if e.id not in matched_locals],
        assignment_cost=math.fsum(assignment_costs),
    )


def _splice_open(
    parent_points: np.ndarray,
    local_points: np.ndarray,
    min_span: float,
    arc_range: Optional[Tuple[float, float]],
) -> Optional[np.ndarray]:
    """Replace the parent sub-sequence between the local endpoints' projections"""
    _, arcs = closest_on_path(local_points[[0, -1]], parent_points, arc_range)
    s1, s2 = float(arcs[0]), float(arcs[1])
    if s1 > s2:
        local_points = local_points[::-1]
        s1, s2 = s2, s1
    if s2 - s1 < min_span:
        return None
    lengths = np.linalg.norm(np.diff(parent_points, axis=0), axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(lengths)))
    head = parent_points[cumulative < s1]
    tail = parent_points[cumulative > s2]
    return np.vstack([head, local_points, tail])


def _splice_closed(parent: Polyline, local_points: np.ndarray, min_span: float) -> Optional[np.ndarray]:
    """Cut the closed parent opposite the local element, splice as if open, close again"""
    path = parent.path()
    lengths = np.linalg.norm(np.diff(path, axis=0), axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(lengths)))
    total = cumulative[-1]

    middle = resample_path(local_points, 3, closed=False)[1]
    _, arc_mid = closest_on_path(middle[None, :], path)
    cut = (float(arc_mid[0]) + total / 2.0) % total
    k = min(int(np.searchsorted(cumulative, cut, side="right") - 1), len(lengths) - 1)
    cut_point = path[k] + (cut - cumulative[k]) / lengths[k] * (path[k + 1] - path[k])

    vertices = path[:-1]
    rotated = np.vstack([cut_point, vertices[k + 1:], vertices[:k + 1], cut_point])
    rotated = dedupe_vertices(rotated)
    if len(rotated) < 3:
        return None
    spliced = _splice_open(rotated, local_points, min_span, None)
    if spliced is None:
        return None
    return dedupe_vertices(spliced, closed=True)


def inplace_replace(
    parent: MapElement,
    fragment_offset: float,
    local_elem: MapElement,
    params: BuilderParams,
    fragment_length: Optional[float] = None,
) -> MapElement:
    """
    Splice a global-frame local element into its matched global parent

    The parent's vertices between the projections of the local element's endpoints
    are replaced by all local vertices. When the fragment's extent on the parent is
    known, projections are restricted to it (plus slack for extensions) so a
    parent that folds back on itself is not spliced at the wrong place.
    """
    if parent.category != local_elem.category:
        raise UsageError(
            f"cannot splice {local_elem.category.value} into {parent.category.value}"
        )

    local_geometry = local_elem.geometry
    if local_geometry.closed:
        return local_elem.model_copy(update={"id": parent.id})

    local_points = local_geometry.as_array()
    if parent.geometry.closed:
        spliced = _splice_closed(parent.geometry, local_points, params.min_splice_span)
    else:
        arc_range = None
        if fragment_length is not None:
            total = polyline_length(parent.geometry)
            slack = polyline_length(local_geometry) + params.match_threshold(parent.category)
            arc_range = (
                max(0.0, fragment_offset - slack),
                min(total, fragment_offset + fragment_length + slack),
            )
        spliced = _splice_open(parent.geometry.as_array(), local_points, params.min_splice_span, arc_range)

    if spliced is not None:
        spliced = dedupe_vertices(spliced, closed=parent.geometry.closed)
        try:
            geometry = Polyline.from_array(spliced, closed=parent.geometry.closed)
            return MapElement(id=parent.id, category=parent.category, geometry=geometry, score=local_elem.score)
        except ValueError as e:
            logger.warning(f"Splice into element {parent.id} produced invalid geometry: {e}")

    logger.debug(f"Skipped splice into element {parent.id}; keeping the higher-score element")
    if local_elem.score > parent.score:
        return local_elem.model_copy(update={"id": parent.id})
    return parent


def _overlap(a: MapElement, b: MapElement, buffers: Dict[int, object]) -> float:
    if a.geometry == b.geometry:
        return 1.0
    return polygon_iou(buffers[a.id], buffers[b.id])


def map_nms(elements: List[MapElement], params: BuilderParams) -> List[MapElement]:
    """
    Map NMS: per category, higher-score elements suppress overlapping lower ones

    Overlap is the buffered IoU with the category's buffer radius. Score ties
    go to the newer element (higher id). Survivors keep their input order.
    """
    if not params.enable_nms:
        return list(elements)

    keep_ids = set()
    for category in ELEMENT_CATEGORIES:
        members = [e for e in elements if e.category == category]
        if not members:
            continue
        radius = params.buffer_radius(category)
        buffers = {e.id: buffer_polygon(e.geometry, radius) for e in members}
        kept: List[MapElement] = []
        for element in sorted(members, key=lambda e: (-e.score, -e.id)):
            if all(_overlap(element, k, buffers) < params.nms_iou_threshold for k in kept):
                kept.append(element)
        keep_ids.update(e.id for e in kept)
        if len(kept) < len(members):
            logger.debug(f"Map NMS removed {len(members) - len(kept)} {category.value} elements")

    return [e for e in elements if e.id in keep_ids]


def merge_step(
    state: GlobalMapState,
    local_pred: VectorMap,
    pose: Pose,
    params: BuilderParams,
) -> GlobalMapState:
    """
    Merge one ego-frame local prediction into the global map

    clip -> match -> in-place replacement -> append unmatched -> Map NMS on the
    categories the local map touched. Global elements nobody matched persist.
    """
    if local_pred.frame != Frame.EGO:
        raise UsageError(f"merge_step expects an ego-frame local map, got {local_pred.frame.value}")
    if not local_pred.elements:
        return state

    fragments = clip_map(state.map, pose, params.window)
    match = match_maps(fragments, local_pred, params)

    elements: Dict[int, MapElement] = {e.id: e for e in state.map.elements}
    local_by_id = {e.id: e for e in local_pred.elements}

    for pair in match.pairs:
        local_global = element_to_global(local_by_id[pair.local_id], pose)
        elements[pair.parent_id] = inplace_replace(
            elements[pair.parent_id],
            pair.arc_offset,
            local_global,
            params,
            fragment_length=pair.arc_length,
        )

    next_id = state.next_id
    for local_id in match.unmatched_local:
        elements[next_id] = element_to_global(local_by_id[local_id], pose).model_copy(update={"id": next_id})
        next_id += 1

    touched = {e.category for e in local_pred.elements}
    merged = list(elements.values())
    survivors = {e.id for e in map_nms([e for e in merged if e.category in touched], params)}
    final = tuple(e for e in merged if e.category not in touched or e.id in survivors)

    logger.debug(
        f"Merged {len(match.pairs)} pairs, appended {len(match.unmatched_local)}, "
        f"global map now {len(final)} elements"
    )
    return GlobalMapState(map=VectorMap(frame=Frame.GLOBAL, elements=final), next_id=next_id)


class GlobalMapBuilder:
    """Keeps the global map and folds local predictions into it, one step at a time"""

    def __init__(self, params: Optional[BuilderParams] = None, initial_map: Optional[VectorMap] = None):
        self.params = params or BuilderParams()
        self.state = GlobalMapState.from_map(initial_map) if initial_map is not None else GlobalMapState()
        self.steps = 0

    def update(self, local_pred: VectorMap, pose: Pose) -> GlobalMapState:
        self.state = merge_step(self.state, local_pred, pose, self.params)
        self.steps += 1
        logger.debug(f"Builder step {self.steps}: {len(self.state.map)} global elements")
        return self.state

    @property
    def global_map(self) -> VectorMap:
        return self.state.map
