from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Dict, List, NamedTuple, Optional

from globalmap.models.map import Category, ClipWindow, ELEMENT_CATEGORIES


DEFAULT_MATCH_DISTANCE: Dict[Category, float] = {
    Category.ROAD_BOUNDARY: 2.0,
    Category.LANE_DIVIDER: 1.0,
    Category.PED_CROSSING: 0.5,
}

# (D_road, D_lane, D_ped) settings compared in the builder-parameter sweep
SWEEP_SETTINGS = [
    (2.0, 1.0, 0.5),
    (1.0, 1.0, 1.0),
    (1.0, 0.5, 0.25),
    (4.0, 2.0, 1.0),
]


class BuilderParams(BaseModel):
    """Parameters of the global map builder (matching, replacement, Map NMS)"""

    model_config = ConfigDict(frozen=True)

    match_distance: Dict[Category, float] = Field(default_factory=lambda: dict(DEFAULT_MATCH_DISTANCE))
    # buffer radius per category; defaults to the matching distance
    nms_buffer: Optional[Dict[Category, float]] = None
    nms_iou_threshold: float = Field(default=0.5, gt=0.0, le=1.0)
    enable_nms: bool = True
    window: ClipWindow = Field(default_factory=ClipWindow)
    min_splice_span: float = Field(default=0.1, gt=0.0)

    @model_validator(mode="after")
    def check_distances(self) -> "BuilderParams":
        for name, table in (("match_distance", self.match_distance), ("nms_buffer", self.nms_buffer or {})):
            for category, value in table.items():
                if category not in ELEMENT_CATEGORIES:
                    raise ValueError(f"{name} has no meaning for {category.value}")
                if value <= 0:
                    raise ValueError(f"{name}[{category.value}] must be positive")
        missing = [c.value for c in ELEMENT_CATEGORIES if c not in self.match_distance]
        if missing:
            raise ValueError(f"match_distance missing categories: {missing}")
        return self

    def match_threshold(self, category: Category) -> float:
        return self.match_distance[category]

    def buffer_radius(self, category: Category) -> float:
        if self.nms_buffer and category in self.nms_buffer:
            return self.nms_buffer[category]
        return self.match_distance[category]

    @classmethod
    def from_distances(cls, road: float, lane: float, ped: float, **kwargs) -> "BuilderParams":
        return cls(
            match_distance={
                Category.ROAD_BOUNDARY: road,
                Category.LANE_DIVIDER: lane,
                Category.PED_CROSSING: ped,
            },
            **kwargs,
        )


class MatchPair(NamedTuple):
    """A matched (global parent, local element) pair and where the fragment sits on the parent"""
    parent_id: int
    local_id: int
    cost: float
    arc_offset: float
    arc_length: float


class MatchResult(BaseModel):
    """Outcome of matching clipped global fragments against a local map"""
    pairs: List[MatchPair] = []
    unmatched_global: List[int] = []
    unmatched_local: List[int] = []
    # total cost of the optimal assignments before thresholding
    assignment_cost: float = 0.0
