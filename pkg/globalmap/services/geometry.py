"""Pure 2-D geometry on polylines: lengths, resampling, distances, projections,
rigid transforms and buffered IoU.

Every function here is a pure function of its inputs and safe to call from any thread.
"""
from typing import Optional, Tuple
import math

import numpy as np
from shapely.geometry import LineString
from shapely.geometry.base import BaseGeometry

from globalmap.config import settings
from globalmap.models.geometry import MIN_VERTEX_SEPARATION, Direction, Point2, Polyline, Pose, Projection
from globalmap.utils.exceptions import UsageError

# Distances closer than this count as ties when picking a projection
TIE_TOLERANCE = 1e-12


def _segments(path: np.ndarray) -> Tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    """Segment starts, direction vectors, lengths and cumulative arc lengths of a path"""
    starts = path[:-1]
    deltas = path[1:] - path[:-1]
    lengths = np.linalg.norm(deltas, axis=1)
    cumulative = np.concatenate(([0.0], np.cumsum(lengths)))
    return starts, deltas, lengths, cumulative


def closest_on_path(
    queries: np.ndarray,
    path: np.ndarray,
    arc_range: Optional[Tuple[float, float]] = None,
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Distance and arc length of the closest path point for each query point

    Args:
        queries: (m, 2) query points
        path: (k + 1, 2) vertex path, closing vertex already appended if closed
        arc_range: optional (lo, hi) arc-length interval the answer must lie in

    Returns:
        (distances, arc_lengths), both of shape (m,)
    """
    queries = np.atleast_2d(np.asarray(queries, dtype=float))
    starts, deltas, lengths, cumulative = _segments(path)

    t_lo = np.zeros_like(lengths)
    t_hi = np.ones_like(lengths)
    usable = np.ones_like(lengths, dtype=bool)
    if arc_range is not None:
        lo, hi = arc_range
        usable = (cumulative[1:] >= lo) & (cumulative[:-1] <= hi)
        if not np.any(usable):
            raise UsageError(f"arc range [{lo}, {hi}] does not intersect the polyline")
        t_lo = np.clip((lo - cumulative[:-1]) / lengths, 0.0, 1.0)
        t_hi = np.clip((hi - cumulative[:-1]) / lengths, 0.0, 1.0)

    rel = queries[:, None, :] - starts[None, :, :]
    t = np.einsum("mkj,kj->mk", rel, deltas) / (lengths ** 2)[None, :]
    t = np.clip(t, t_lo[None, :], t_hi[None, :])
    closest = starts[None, :, :] + t[:, :, None] * deltas[None, :, :]
    dist = np.linalg.norm(queries[:, None, :] - closest, axis=2)
    dist = np.where(usable[None, :], dist, np.inf)
    arc = cumulative[:-1][None, :] + t * lengths[None, :]

    best = dist.min(axis=1)
    # ties resolve to the smallest arc length
    tied = dist <= best[:, None] + TIE_TOLERANCE
    arc_best = np.where(tied, arc, np.inf).min(axis=1)
    return best, arc_best


def polyline_length(p: Polyline) -> float:
    """Sum of segment lengths, closing segment included for closed polylines"""
    _, _, lengths, _ = _segments(p.path())
    return float(lengths.sum())


def resample_path(path: np.ndarray, n: int, closed: bool) -> np.ndarray:
    """n points at equal arc-length spacing along a vertex path"""
    if n < 2:
        raise UsageError(f"resampling needs n >= 2, got {n}")
    starts, deltas, lengths, cumulative = _segments(path)
    total = cumulative[-1]
    if closed:
        targets = np.arange(n) * (total / n)
    else:
        targets = np.linspace(0.0, total, n)
    idx = np.clip(np.searchsorted(cumulative, targets, side="right") - 1, 0, len(lengths) - 1)
    frac = (targets - cumulative[idx]) / lengths[idx]
    out = starts[idx] + frac[:, None] * deltas[idx]
    out[0] = path[0]
    if not closed:
        out[-1] = path[-1]
    return out


def resample_polyline(p: Polyline, n: int) -> Polyline:
    """Resample to n points; open polylines keep both endpoints"""
    return Polyline.from_array(resample_path(p.path(), n, p.closed), closed=p.closed)


def point_to_polyline_distance(q: Point2, p: Polyline) -> float:
    dist, _ = closest_on_path(np.asarray([q], dtype=float), p.path())
    return float(dist[0])


def project_point(
    q: Point2,
    p: Polyline,
    arc_range: Optional[Tuple[float, float]] = None,
) -> Projection:
    """Least-distance projection of q onto p, ties broken by smallest arc length"""
    dist, arc = closest_on_path(np.asarray([q], dtype=float), p.path(), arc_range)
    total = polyline_length(p)
    return Projection(arc_length=float(min(max(arc[0], 0.0), total)), distance=float(dist[0]))


def chamfer_distance(a: Polyline, b: Polyline, n: Optional[int] = None) -> float:
    """
    Symmetric mean-of-mins Chamfer distance

    Each polyline is resampled to n points (settings.CHAMFER_SAMPLES by default) and
    every sample is measured against the other polyline's continuous geometry.
    """
    if a == b:
        return 0.0
    n = n or settings.CHAMFER_SAMPLES
    path_a, path_b = a.path(), b.path()
    a_to_b, _ = closest_on_path(resample_path(path_a, n, a.closed), path_b)
    b_to_a, _ = closest_on_path(resample_path(path_b, n, b.closed), path_a)
    return 0.5 * (float(a_to_b.mean()) + float(b_to_a.mean()))


def transform_points(points: np.ndarray, pose: Pose, direction: Direction) -> np.ndarray:
    """Apply the pose as ego->global, or its exact inverse"""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    rot = pose.rotation()
    if direction == Direction.EGO_TO_GLOBAL:
        return points @ rot.T + pose.translation()
    return (points - pose.translation()) @ rot


def transform_polyline(p: Polyline, pose: Pose, direction: Direction) -> Polyline:
    return Polyline.from_array(transform_points(p.as_array(), pose, direction), closed=p.closed)


def buffer_polygon(p: Polyline, r: float, quad_segs: Optional[int] = None) -> BaseGeometry:
    """Minkowski sum of the polyline with a disc of radius r (round caps and joins)"""
    if r <= 0:
        raise UsageError(f"buffer radius must be positive, got {r}")
    return LineString(p.path()).buffer(r, quad_segs=quad_segs or settings.BUFFER_QUAD_SEGS)


def polygon_iou(a: BaseGeometry, b: BaseGeometry) -> float:
    if not a.intersects(b):
        return 0.0
    inter = a.intersection(b).area
    union = a.area + b.area - inter
    if union <= 0.0:
        return 0.0
    return min(max(inter / union, 0.0), 1.0)


def buffered_iou(a: Polyline, b: Polyline, r: float) -> float:
    """IoU of the two polylines' r-buffers, computed with exact polygon overlay"""
    if r <= 0:
        raise UsageError(f"buffer radius must be positive, got {r}")
    if a == b:
        return 1.0
    return polygon_iou(buffer_polygon(a, r), buffer_polygon(b, r))


def heading(p0: Point2, p1: Point2) -> float:
    return math.atan2(p1[1] - p0[1], p1[0] - p0[0])


def dedupe_vertices(points: np.ndarray, closed: bool = False) -> np.ndarray:
    """Drop vertices that repeat their predecessor; for closed paths also a last == first"""
    points = np.asarray(points, dtype=float)
    keep = [0]
    for i in range(1, len(points)):
        if np.linalg.norm(points[i] - points[keep[-1]]) > MIN_VERTEX_SEPARATION:
            keep.append(i)
    out = points[keep]
    if closed and len(out) > 2 and np.linalg.norm(out[-1] - out[0]) <= MIN_VERTEX_SEPARATION:
        out = out[:-1]
    return out
