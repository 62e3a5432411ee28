from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Tuple

import numpy as np
from shapely.geometry import Polygon
from shapely.geometry.base import BaseGeometry
from shapely.ops import unary_union

from globalmap.models.geometry import Pose
from globalmap.models.map import ClipWindow, Frame, VectorMap


class GlobalMapState(BaseModel):
    """Global map plus the id counter for newly appended elements"""

    model_config = ConfigDict(frozen=True)

    map: VectorMap = Field(default_factory=lambda: VectorMap.empty(Frame.GLOBAL))
    next_id: int = 0

    @model_validator(mode="after")
    def check_state(self) -> "GlobalMapState":
        if self.map.frame != Frame.GLOBAL:
            raise ValueError("global map state must hold a global-frame map")
        if self.next_id < self.map.next_free_id():
            raise ValueError("next_id collides with existing element ids")
        return self

    @classmethod
    def from_map(cls, m: VectorMap) -> "GlobalMapState":
        return cls(map=m, next_id=m.next_free_id())


class Footprint(BaseModel):
    """One perception rectangle: the clip window placed at a pose"""

    model_config = ConfigDict(frozen=True)

    pose: Pose
    window: ClipWindow

    def corners(self) -> np.ndarray:
        hl, hw = self.window.half_length, self.window.half_width
        local = np.array([[-hl, -hw], [hl, -hw], [hl, hw], [-hl, hw]])
        return local @ self.pose.rotation().T + self.pose.translation()

    def contains(self, points: np.ndarray) -> np.ndarray:
        """Boolean mask of global points inside the rectangle (boundary included)"""
        ego = (np.atleast_2d(points) - self.pose.translation()) @ self.pose.rotation()
        return (np.abs(ego[:, 0]) <= self.window.half_length) & (np.abs(ego[:, 1]) <= self.window.half_width)


class TracedRegion(BaseModel):
    """Union of all perception footprints so far; append-only within a run"""

    model_config = ConfigDict(frozen=True)

    footprints: Tuple[Footprint, ...] = ()

    def __len__(self) -> int:
        return len(self.footprints)

    def contains(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        inside = np.zeros(len(points), dtype=bool)
        # linear scan over footprints
        for footprint in self.footprints:
            inside |= footprint.contains(points)
        return inside

    def polygon(self) -> BaseGeometry:
        return unary_union([Polygon(f.corners()) for f in self.footprints])
