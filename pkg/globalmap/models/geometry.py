from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Tuple
import enum
import math

import numpy as np


Point2 = Tuple[float, float]

# Consecutive vertices closer than this are treated as duplicates
MIN_VERTEX_SEPARATION = 1e-9


class Direction(str, enum.Enum):
    """Direction of a rigid frame change"""
    EGO_TO_GLOBAL = "ego_to_global"
    GLOBAL_TO_EGO = "global_to_ego"


class Polyline(BaseModel):
    """Ordered 2-D point sequence; a closed polyline has an implicit closing segment"""

    model_config = ConfigDict(frozen=True)

    points: Tuple[Point2, ...]
    closed: bool = False

    @model_validator(mode="after")
    def check_points(self) -> "Polyline":
        if len(self.points) < 2:
            raise ValueError("polyline needs at least 2 points")
        arr = np.asarray(self.points, dtype=float)
        if not np.all(np.isfinite(arr)):
            raise ValueError("polyline coordinates must be finite")
        path = np.vstack([arr, arr[:1]]) if self.closed else arr
        seg = np.linalg.norm(np.diff(path, axis=0), axis=1)
        # the closing segment of a closed polyline may not collapse either
        if np.any(seg <= MIN_VERTEX_SEPARATION):
            raise ValueError("polyline has consecutive duplicate points")
        if float(seg.sum()) <= 0.0:
            raise ValueError("polyline has zero length")
        return self

    @classmethod
    def from_array(cls, arr: np.ndarray, closed: bool = False) -> "Polyline":
        return cls(points=tuple((float(x), float(y)) for x, y in np.asarray(arr, dtype=float)), closed=closed)

    def as_array(self) -> np.ndarray:
        """Vertices as an (n, 2) float array"""
        return np.asarray(self.points, dtype=float)

    def path(self) -> np.ndarray:
        """Vertices with the first one repeated at the end when closed"""
        arr = self.as_array()
        return np.vstack([arr, arr[:1]]) if self.closed else arr

    @property
    def first(self) -> Point2:
        return self.points[0]

    @property
    def last(self) -> Point2:
        return self.points[-1]


class Projection(BaseModel):
    """Closest point on a polyline, as arc length from its start and distance to it"""
    arc_length: float = Field(ge=0.0)
    distance: float = Field(ge=0.0)


class Pose(BaseModel):
    """SE(2) ego pose in global meters; yaw in radians within (-pi, pi]"""

    model_config = ConfigDict(frozen=True)

    x: float
    y: float
    yaw: float = 0.0

    @field_validator("x", "y", "yaw")
    @classmethod
    def check_finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("pose components must be finite")
        return value

    @field_validator("yaw")
    @classmethod
    def normalize_yaw(cls, value: float) -> float:
        if -math.pi < value <= math.pi:
            return value
        wrapped = math.remainder(value, 2.0 * math.pi)
        return math.pi if wrapped <= -math.pi else wrapped

    @classmethod
    def from_degrees(cls, x: float, y: float, yaw_deg: float) -> "Pose":
        return cls(x=x, y=y, yaw=math.radians(yaw_deg))

    def rotation(self) -> np.ndarray:
        c, s = math.cos(self.yaw), math.sin(self.yaw)
        return np.array([[c, -s], [s, c]])

    def translation(self) -> np.ndarray:
        return np.array([self.x, self.y])
