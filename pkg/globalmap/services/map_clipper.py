"""Clip global maps into ego-frame windows and move maps between frames"""
from typing import List, Optional, Tuple
import logging

import numpy as np
from shapely.geometry import LineString, MultiLineString
from shapely.ops import linemerge

from globalmap.config import settings
from globalmap.models.geometry import MIN_VERTEX_SEPARATION, Direction, Polyline, Pose
from globalmap.models.map import ClipFragment, ClipWindow, Frame, MapElement, VectorMap
from globalmap.models.state import TracedRegion
from globalmap.services.geometry import dedupe_vertices, polyline_length, transform_points, transform_polyline
from globalmap.utils.exceptions import UsageError

logger = logging.getLogger(__name__)


def _clip_segment(p: np.ndarray, q: np.ndarray, half_length: float, half_width: float) -> Optional[Tuple[float, float]]:
    """Liang-Barsky parameter interval of segment p->q inside the centered rectangle"""
    d = q - p
    t0, t1 = 0.0, 1.0
    for pk, qk in (
        (-d[0], p[0] + half_length),
        (d[0], half_length - p[0]),
        (-d[1], p[1] + half_width),
        (d[1], half_width - p[1]),
    ):
        if pk == 0.0:
            if qk < 0.0:
                return None
            continue
        r = qk / pk
        if pk < 0.0:
            t0 = max(t0, r)
        else:
            t1 = min(t1, r)
        if t0 > t1:
            return None
    return t0, t1


class _Piece:
    """In-window run of consecutive path points, tracked by parent arc length"""

    def __init__(self, start: np.ndarray, start_arc: float):
        self.points = [start]
        self.start_arc = start_arc
        self.end_arc = start_arc

    def extend(self, point: np.ndarray, arc: float):
        self.points.append(point)
        self.end_arc = arc


def _pieces_in_window(path: np.ndarray, window: ClipWindow) -> Tuple[List[_Piece], float]:
    deltas = np.diff(path, axis=0)
    lengths = np.linalg.norm(deltas, axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(lengths)))

    pieces: List[_Piece] = []
    current: Optional[_Piece] = None
    for k in range(len(lengths)):
        interval = _clip_segment(path[k], path[k + 1], window.half_length, window.half_width)
        if interval is None or (interval[1] - interval[0]) * lengths[k] <= MIN_VERTEX_SEPARATION:
            current = None
            continue
        t0, t1 = interval
        entry = path[k] + t0 * deltas[k]
        exit_ = path[k] + t1 * deltas[k]
        if current is not None and t0 == 0.0:
            current.extend(exit_, cumulative[k] + t1 * lengths[k])
        else:
            current = _Piece(entry, cumulative[k] + t0 * lengths[k])
            current.extend(exit_, cumulative[k] + t1 * lengths[k])
            pieces.append(current)
        if t1 < 1.0:
            current = None
    return pieces, float(cumulative[-1])


def clip_element(element: MapElement, pose: Pose, window: ClipWindow) -> List[Tuple[Polyline, float, float]]:
    """
    In-window pieces of one global element, expressed in the ego frame

    Returns:
        list of (ego geometry, parent arc offset, parent arc length covered)
    """
    geometry = element.geometry
    ego_path = transform_points(geometry.path(), pose, Direction.GLOBAL_TO_EGO)
    pieces, total = _pieces_in_window(ego_path, window)
    if not pieces:
        return []

    if geometry.closed:
        if len(pieces) == 1 and pieces[0].start_arc == 0.0 and pieces[0].end_arc >= total:
            ego = Polyline.from_array(ego_path[:-1], closed=True)
            return [(ego, 0.0, total)]
        if len(pieces) >= 2 and pieces[0].start_arc == 0.0 and pieces[-1].end_arc >= total:
            # the run through the first vertex is one piece, not two
            head, tail = pieces[0], pieces.pop()
            head.points = tail.points + head.points[1:]
            head.end_arc = head.end_arc + total
            head.start_arc = tail.start_arc
            pieces[0] = head

    out = []
    for piece in pieces:
        points = dedupe_vertices(np.asarray(piece.points))
        if len(points) < 2:
            continue
        ego = Polyline.from_array(points)
        covered = piece.end_arc - piece.start_arc
        if polyline_length(ego) < settings.MIN_FRAGMENT_LENGTH:
            continue
        out.append((ego, min(max(piece.start_arc, 0.0), total), covered))
    return out


def clip_map(m: VectorMap, pose: Pose, window: ClipWindow) -> List[ClipFragment]:
    """
    Clip a global map to the ego window at pose

    Each maximal connected in-window piece becomes one fragment that remembers
    its parent id and the parent arc length where it starts.
    """
    if m.frame != Frame.GLOBAL:
        raise UsageError(f"clip_map expects a global-frame map, got {m.frame.value}")

    fragments: List[ClipFragment] = []
    for element in m.elements:
        for ego, offset, covered in clip_element(element, pose, window):
            fragments.append(ClipFragment(
                element=MapElement(
                    id=len(fragments),
                    category=element.category,
                    geometry=ego,
                    score=element.score,
                ),
                parent_id=element.id,
                arc_offset=offset,
                arc_length=max(covered, MIN_VERTEX_SEPARATION),
            ))
    logger.debug(f"Clipped {len(m.elements)} elements into {len(fragments)} fragments")
    return fragments


def fragments_to_local_map(fs: List[ClipFragment]) -> VectorMap:
    """Drop parentage and regenerate ids, giving a plain ego-frame map"""
    return VectorMap(
        frame=Frame.EGO,
        elements=tuple(f.element.model_copy(update={"id": i}) for i, f in enumerate(fs)),
    )


def local_map_at(m: VectorMap, pose: Pose, window: ClipWindow) -> VectorMap:
    """Ego-frame local map of a global map at pose (clip then drop parentage)"""
    return fragments_to_local_map(clip_map(m, pose, window))


def map_to_global(m: VectorMap, pose: Pose) -> VectorMap:
    if m.frame != Frame.EGO:
        raise UsageError(f"map_to_global expects an ego-frame map, got {m.frame.value}")
    return VectorMap(
        frame=Frame.GLOBAL,
        elements=tuple(
            e.with_geometry(transform_polyline(e.geometry, pose, Direction.EGO_TO_GLOBAL))
            for e in m.elements
        ),
    )


def element_to_global(element: MapElement, pose: Pose) -> MapElement:
    return element.with_geometry(transform_polyline(element.geometry, pose, Direction.EGO_TO_GLOBAL))


def clip_map_to_region(m: VectorMap, region: TracedRegion) -> VectorMap:
    """
    Keep only the parts of a global map inside the traced region

    Pieces of one element that touch are merged back together, pieces shorter
    than MIN_FRAGMENT_LENGTH are dropped, ids are regenerated.
    """
    if m.frame != Frame.GLOBAL:
        raise UsageError(f"clip_map_to_region expects a global-frame map, got {m.frame.value}")
    area = region.polygon()
    elements: List[MapElement] = []
    if area.is_empty:
        return VectorMap(frame=Frame.GLOBAL, elements=())

    for element in m.elements:
        line = LineString(element.geometry.path())
        if element.geometry.closed and area.covers(line):
            elements.append(element.model_copy(update={"id": len(elements)}))
            continue
        clipped = line.intersection(area)
        parts = [g for g in getattr(clipped, "geoms", [clipped]) if isinstance(g, LineString) and not g.is_empty]
        if not parts:
            continue
        merged = linemerge(MultiLineString(parts)) if len(parts) > 1 else parts[0]
        for piece in getattr(merged, "geoms", [merged]):
            points = dedupe_vertices(np.asarray(piece.coords))
            if len(points) < 2 or piece.length < settings.MIN_FRAGMENT_LENGTH:
                continue
            elements.append(MapElement(
                id=len(elements),
                category=element.category,
                geometry=Polyline.from_array(points),
                score=element.score,
            ))
    return VectorMap(frame=Frame.GLOBAL, elements=tuple(elements))
