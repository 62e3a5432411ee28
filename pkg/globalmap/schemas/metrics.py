from pydantic import BaseModel, ConfigDict, Field, model_validator
from typing import Any, Dict, List, Optional, Tuple
import math

from globalmap.models.map import Category


def threshold_key(threshold: float) -> str:
    """Report key of a matching threshold, e.g. 0.5 -> "0.5", 1.0 -> "1" """
    return f"{threshold:g}"


class Detection(BaseModel):
    """One scored prediction after matching, pooled across frames for the PR curve"""

    model_config = ConfigDict(frozen=True)

    score: float = Field(ge=0.0, le=1.0)
    is_tp: bool
    category: Category
    frame_index: int = 0


class PrCurve(BaseModel):
    """Precision/recall after each rank of the score-sorted detection list"""
    points: List[Tuple[float, float]] = []
    gt_count: int = Field(default=0, ge=0)

    @model_validator(mode="after")
    def check_points(self) -> "PrCurve":
        previous = 0.0
        for recall, precision in self.points:
            if not (0.0 <= recall <= 1.0 and 0.0 <= precision <= 1.0):
                raise ValueError("recall and precision must lie in [0, 1]")
            if recall < previous:
                raise ValueError("recalls must be non-decreasing")
            previous = recall
        return self

    @property
    def recalls(self) -> List[float]:
        return [r for r, _ in self.points]

    @property
    def precisions(self) -> List[float]:
        return [p for _, p in self.points]


class MetricTable(BaseModel):
    """AP (or GAP) per category and threshold with the derived means"""
    thresholds: List[float]
    values: Dict[Category, Dict[str, float]] = {}
    category_mean: Dict[Category, float] = {}
    mean: float = 0.0
    gt_counts: Dict[Category, int] = {}
    pred_counts: Dict[Category, int] = {}
    # categories with neither ground truth nor predictions stay out of the mean
    excluded: List[Category] = []

    @model_validator(mode="after")
    def check_values(self) -> "MetricTable":
        for per_threshold in self.values.values():
            for value in per_threshold.values():
                if not (math.isfinite(value) and 0.0 <= value <= 1.0):
                    raise ValueError(f"metric value {value} outside [0, 1]")
        return self

    def value(self, category: Category, threshold: float) -> float:
        return self.values[category][threshold_key(threshold)]


class EvalReport(BaseModel):
    """Evaluation result of one run: frame-stream AP, global-map GAP and provenance"""
    ap: Optional[MetricTable] = None
    gap: Optional[MetricTable] = None
    metadata: Dict[str, Any] = {}

    @property
    def mAP(self) -> Optional[float]:
        return self.ap.mean if self.ap is not None else None

    @property
    def mGAP(self) -> Optional[float]:
        return self.gap.mean if self.gap is not None else None


class SweepRow(BaseModel):
    """One builder-parameter setting averaged over seeds"""
    d_road: float
    d_lane: float
    d_ped: float
    gap: Dict[Category, float]
    mgap: float
    map_mean: float
    seeds: List[int]


class SweepReport(BaseModel):
    rows: List[SweepRow] = []
    metadata: Dict[str, Any] = {}
