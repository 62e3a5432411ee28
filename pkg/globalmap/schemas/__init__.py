from globalmap.schemas.builder import (
    BuilderParams,
    MatchPair,
    MatchResult,
    DEFAULT_MATCH_DISTANCE,
    SWEEP_SETTINGS
)
from globalmap.schemas.metrics import (
    Detection,
    PrCurve,
    MetricTable,
    EvalReport,
    SweepRow,
    SweepReport
)
from globalmap.schemas.raster import GridSpec, BevMask
from globalmap.schemas.scenario import (
    WorldConfig,
    NoiseConfig,
    ScoreModel,
    ScenarioConfig,
    ScenarioMode,
    ScenarioResult
)
from globalmap.schemas.files import MapFile, ReportFile, TracedRegionFile

__all__ = [
    "BuilderParams",
    "MatchPair",
    "MatchResult",
    "DEFAULT_MATCH_DISTANCE",
    "SWEEP_SETTINGS",
    "Detection",
    "PrCurve",
    "MetricTable",
    "EvalReport",
    "SweepRow",
    "SweepReport",
    "GridSpec",
    "BevMask",
    "WorldConfig",
    "NoiseConfig",
    "ScoreModel",
    "ScenarioConfig",
    "ScenarioMode",
    "ScenarioResult",
    "MapFile",
    "ReportFile",
    "TracedRegionFile"
]
