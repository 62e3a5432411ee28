"""On-disk shapes of maps, traced regions and reports (JSON, format_version 1)"""
from pydantic import BaseModel, Field
from typing import Any, Dict, List, Optional, Tuple

from globalmap.models.geometry import Pose
from globalmap.models.map import Category, ClipWindow, Frame, VectorMap
from globalmap.models.state import Footprint, TracedRegion
from globalmap.schemas.metrics import MetricTable

FORMAT_VERSION = 1


class PoseRecord(BaseModel):
    """Pose as stored in artifact files; yaw in radians so replays are exact"""
    x: float
    y: float
    yaw: float

    @classmethod
    def from_domain(cls, pose: Pose) -> "PoseRecord":
        return cls(x=pose.x, y=pose.y, yaw=pose.yaw)

    def to_domain(self) -> Pose:
        return Pose(x=self.x, y=self.y, yaw=self.yaw)


class ElementRecord(BaseModel):
    id: int
    category: Category
    closed: bool = False
    score: float = 1.0
    points: List[Tuple[float, float]]


class MapFile(BaseModel):
    format_version: int = FORMAT_VERSION
    frame: Frame
    pose: Optional[PoseRecord] = None
    frame_index: Optional[int] = None
    merged: Optional[bool] = None
    elements: List[ElementRecord] = []

    @classmethod
    def from_domain(
        cls,
        m: VectorMap,
        pose: Optional[Pose] = None,
        frame_index: Optional[int] = None,
        merged: Optional[bool] = None,
    ) -> "MapFile":
        return cls(
            frame=m.frame,
            pose=PoseRecord.from_domain(pose) if pose is not None else None,
            frame_index=frame_index,
            merged=merged,
            elements=[
                ElementRecord(
                    id=e.id,
                    category=e.category,
                    closed=e.geometry.closed,
                    score=e.score,
                    points=list(e.geometry.points),
                )
                for e in m.elements
            ],
        )


class FootprintRecord(BaseModel):
    x: float
    y: float
    yaw: float
    length: float
    width: float


class TracedRegionFile(BaseModel):
    format_version: int = FORMAT_VERSION
    footprints: List[FootprintRecord] = []

    @classmethod
    def from_domain(cls, tr: TracedRegion) -> "TracedRegionFile":
        return cls(footprints=[
            FootprintRecord(x=f.pose.x, y=f.pose.y, yaw=f.pose.yaw, length=f.window.length, width=f.window.width)
            for f in tr.footprints
        ])

    def to_domain(self) -> TracedRegion:
        return TracedRegion(footprints=tuple(
            Footprint(pose=Pose(x=f.x, y=f.y, yaw=f.yaw), window=ClipWindow(length=f.length, width=f.width))
            for f in self.footprints
        ))


class ReportFile(BaseModel):
    format_version: int = FORMAT_VERSION
    ap: Optional[MetricTable] = None
    gap: Optional[MetricTable] = None
    mAP: Optional[float] = None
    mGAP: Optional[float] = None
    metadata: Dict[str, Any] = Field(default_factory=dict)
