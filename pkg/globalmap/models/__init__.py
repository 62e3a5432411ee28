from globalmap.models.geometry import Point2, Polyline, Projection, Pose, Direction
from globalmap.models.map import Category, ELEMENT_CATEGORIES, Frame, MapElement, VectorMap, ClipWindow, ClipFragment
from globalmap.models.state import GlobalMapState, Footprint, TracedRegion

__all__ = [
    "Point2",
    "Polyline",
    "Projection",
    "Pose",
    "Direction",
    "Category",
    "ELEMENT_CATEGORIES",
    "Frame",
    "MapElement",
    "VectorMap",
    "ClipWindow",
    "ClipFragment",
    "GlobalMapState",
    "Footprint",
    "TracedRegion"
]
