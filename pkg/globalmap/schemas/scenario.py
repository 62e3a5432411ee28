from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Dict, List, Optional
import enum

from globalmap.config import settings
from globalmap.models.geometry import Pose
from globalmap.models.map import ClipWindow, VectorMap
from globalmap.models.state import GlobalMapState, TracedRegion
from globalmap.schemas.builder import BuilderParams
from globalmap.schemas.metrics import EvalReport
from globalmap.schemas.raster import BevMask


class ScenarioMode(str, enum.Enum):
    """Whether a run starts from an empty map or inherits a previous one"""
    SINGLE_SCENE = "single_scene"
    CROSS_SCENE = "cross_scene"


class WorldConfig(BaseModel):
    """Procedural Manhattan-grid world; block_size is the spacing of road centerlines"""

    model_config = ConfigDict(frozen=True)

    blocks_x: int = Field(default=2, ge=1)
    blocks_y: int = Field(default=2, ge=1)
    block_size: float = Field(default=60.0, gt=0.0)
    road_width: float = Field(default=12.0, gt=0.0)
    lanes_per_road: int = Field(default=2, ge=1)
    crossing_length: float = Field(default=3.0, gt=0.0)
    seed: int = 0

    @model_validator(mode="after")
    def check_layout(self) -> "WorldConfig":
        # crossings sit at both ends of every segment with lane dividers in between
        if self.block_size <= self.road_width + 2.0 * self.crossing_length:
            raise ValueError("block_size must exceed road_width + 2 * crossing_length")
        return self


class ScoreModel(BaseModel):
    """Confidence of a perceived element from its mean vertex displacement"""

    model_config = ConfigDict(frozen=True)

    floor: float = Field(default=0.05, ge=0.0, le=1.0)
    scale: float = Field(default=2.0, gt=0.0)

    def score(self, displacement: float) -> float:
        return max(self.floor, min(1.0, 1.0 - displacement / self.scale))


class NoiseConfig(BaseModel):
    """Knobs of the perception oracle; all zero means perfect perception"""

    model_config = ConfigDict(frozen=True)

    point_sigma: float = Field(default=0.0, ge=0.0)
    pose_sigma_xy: float = Field(default=0.0, ge=0.0)
    pose_sigma_yaw: float = Field(default=0.0, ge=0.0)  # radians
    drop_prob: float = Field(default=0.0, ge=0.0, le=1.0)
    spurious_rate: float = Field(default=0.0, ge=0.0)
    score_model: ScoreModel = Field(default_factory=ScoreModel)


class ScenarioConfig(BaseModel):
    """
    Everything a simulated run depends on

    `window` is authoritative for both perception and the builder; the builder's
    own window is overwritten with it.
    """
    world: WorldConfig = Field(default_factory=WorldConfig)
    noise: NoiseConfig = Field(default_factory=NoiseConfig)
    window: ClipWindow = Field(default_factory=ClipWindow)
    frame_hz: float = Field(default=2.0, gt=0.0)
    update_every: int = Field(default=4, ge=1)
    n_frames: int = Field(default=60, ge=1)
    speed: float = Field(default=5.0, gt=0.0)  # m/s along the route
    seed: int = 0
    builder: BuilderParams = Field(default_factory=BuilderParams)
    eval_thresholds: List[float] = Field(default_factory=lambda: settings.eval_thresholds)
    mode: ScenarioMode = ScenarioMode.SINGLE_SCENE
    initial_map: Optional[str] = None
    initial_traced: Optional[str] = None
    route_offset_frames: int = Field(default=0, ge=0)
    export_prior_masks: bool = False
    raster_resolution: float = Field(default_factory=lambda: settings.RASTER_RESOLUTION, gt=0.0)
    raster_tau: float = Field(default_factory=lambda: settings.RASTER_TAU, gt=0.0)

    @model_validator(mode="after")
    def check_scenario(self) -> "ScenarioConfig":
        if not self.eval_thresholds or any(t <= 0 for t in self.eval_thresholds):
            raise ValueError("eval_thresholds must be a non-empty list of positive distances")
        if self.mode == ScenarioMode.CROSS_SCENE and not self.initial_map:
            raise ValueError("cross_scene mode needs an initial_map")
        if self.builder.window != self.window:
            self.builder = self.builder.model_copy(update={"window": self.window})
        return self

    @property
    def step_length(self) -> float:
        """Distance advanced per frame, capped at half the window length"""
        return min(self.speed / self.frame_hz, self.window.length / 2.0)


class ScenarioResult(BaseModel):
    """Everything one simulated run produced, in memory"""

    model_config = ConfigDict(arbitrary_types_allowed=True)

    config: ScenarioConfig
    gt_global: VectorMap
    poses: List[Pose]
    predictions: List[VectorMap]
    gt_frames: List[VectorMap]
    merged: List[bool]
    state: GlobalMapState
    traced: TracedRegion
    report: EvalReport
    # frame index -> map-prior masks rasterized just before that merge
    prior_masks: Dict[int, List[BevMask]] = {}

    @property
    def built_global(self) -> VectorMap:
        return self.state.map
