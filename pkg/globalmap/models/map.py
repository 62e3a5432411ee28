from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator
from typing import Dict, List, Optional, Tuple
import enum

from globalmap.models.geometry import Polyline


class Category(str, enum.Enum):
    """Map element category; TRACED_REGION exists only as a raster channel"""
    ROAD_BOUNDARY = "road_boundary"
    LANE_DIVIDER = "lane_divider"
    PED_CROSSING = "ped_crossing"
    TRACED_REGION = "traced_region"


ELEMENT_CATEGORIES: Tuple[Category, ...] = (
    Category.ROAD_BOUNDARY,
    Category.LANE_DIVIDER,
    Category.PED_CROSSING,
)


class Frame(str, enum.Enum):
    """Coordinate frame a map's geometry is expressed in"""
    EGO = "ego"
    GLOBAL = "global"


class MapElement(BaseModel):
    """One categorized, scored polyline"""

    model_config = ConfigDict(frozen=True)

    id: int
    category: Category
    geometry: Polyline
    score: float = Field(default=1.0, ge=0.0, le=1.0)

    @field_validator("category")
    @classmethod
    def check_category(cls, value: Category) -> Category:
        if value not in ELEMENT_CATEGORIES:
            raise ValueError(f"{value.value} is not a valid element category")
        return value

    def with_geometry(self, geometry: Polyline) -> "MapElement":
        return self.model_copy(update={"geometry": geometry})


class VectorMap(BaseModel):
    """Collection of map elements in one frame; serves as both local and global map"""

    model_config = ConfigDict(frozen=True)

    frame: Frame
    elements: Tuple[MapElement, ...] = ()

    @model_validator(mode="after")
    def check_unique_ids(self) -> "VectorMap":
        ids = [e.id for e in self.elements]
        if len(ids) != len(set(ids)):
            raise ValueError("element ids must be distinct within a map")
        return self

    @classmethod
    def empty(cls, frame: Frame) -> "VectorMap":
        return cls(frame=frame, elements=())

    def __len__(self) -> int:
        return len(self.elements)

    def by_category(self) -> Dict[Category, List[MapElement]]:
        grouped: Dict[Category, List[MapElement]] = {c: [] for c in ELEMENT_CATEGORIES}
        for element in self.elements:
            grouped[element.category].append(element)
        return grouped

    def element(self, element_id: int) -> Optional[MapElement]:
        for element in self.elements:
            if element.id == element_id:
                return element
        return None

    def next_free_id(self) -> int:
        return max((e.id for e in self.elements), default=-1) + 1


class ClipWindow(BaseModel):
    """Ego-frame perception rectangle: length along heading, width lateral"""

    model_config = ConfigDict(frozen=True)

    length: float = Field(default=60.0, gt=0.0)
    width: float = Field(default=30.0, gt=0.0)

    @classmethod
    def preset(cls, name: str) -> "ClipWindow":
        """Named local-mapping ranges, e.g. "60x30" or "100x50" """
        try:
            length, width = (float(v) for v in name.lower().split("x"))
        except ValueError as exc:
            raise ValueError(f"window must look like LxW, got {name!r}") from exc
        return cls(length=length, width=width)

    @property
    def half_length(self) -> float:
        return self.length / 2.0

    @property
    def half_width(self) -> float:
        return self.width / 2.0


class ClipFragment(BaseModel):
    """Ego-frame piece of a global element that fell inside the clip window"""

    model_config = ConfigDict(frozen=True)

    element: MapElement
    parent_id: int
    arc_offset: float = Field(ge=0.0)
    arc_length: float = Field(gt=0.0)
