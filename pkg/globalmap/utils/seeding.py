from typing import Any, Dict
import hashlib
import json

import numpy as np
from pydantic import BaseModel


def frame_seed(seed: int, frame_index: int) -> int:
    """Independent per-frame seed derived from the run seed"""
    return int(np.random.SeedSequence([seed, frame_index]).generate_state(1)[0])


def config_hash(config: BaseModel) -> str:
    """Stable sha256 of a config's JSON form (keys sorted)"""
    payload: Dict[str, Any] = config.model_dump(mode="json")
    text = json.dumps(payload, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode("utf-8")).hexdigest()
