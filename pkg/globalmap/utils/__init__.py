from globalmap.utils.exceptions import (
    GlobalMapError,
    UsageError,
    MapValidationError,
    InitialMapError,
    ScenarioError
)
from globalmap.utils.seeding import frame_seed, config_hash

__all__ = [
    "GlobalMapError",
    "UsageError",
    "MapValidationError",
    "InitialMapError",
    "ScenarioError",
    "frame_seed",
    "config_hash"
]
