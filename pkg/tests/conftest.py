from typing import Sequence

import numpy as np
import pytest

from globalmap.models.geometry import Polyline
from globalmap.models.map import Category, Frame, MapElement, VectorMap
from globalmap.schemas.scenario import ScenarioConfig, WorldConfig


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture
def make_element():
    def _make(
        element_id: int,
        points: Sequence,
        category: Category = Category.LANE_DIVIDER,
        score: float = 1.0,
        closed: bool = False,
    ) -> MapElement:
        return MapElement(
            id=element_id,
            category=category,
            geometry=Polyline.from_array(np.asarray(points, dtype=float), closed=closed),
            score=score,
        )
    return _make


@pytest.fixture
def make_map():
    def _make(elements, frame: Frame = Frame.EGO) -> VectorMap:
        return VectorMap(frame=frame, elements=tuple(elements))
    return _make


@pytest.fixture
def small_world():
    return WorldConfig(blocks_x=1, blocks_y=1, seed=3)


@pytest.fixture
def small_scenario(small_world):
    """1x1 world, a dozen frames: fast enough for CLI round trips"""
    return ScenarioConfig(world=small_world, n_frames=12)


def random_polyline(rng: np.random.Generator, n_points: int = 5, closed: bool = False, spread: float = 20.0) -> Polyline:
    """Random polyline with strictly increasing x (never self-intersecting when open)"""
    xs = np.sort(rng.uniform(-spread, spread, size=n_points)) + np.arange(n_points) * 0.5
    ys = rng.uniform(-spread / 2, spread / 2, size=n_points)
    return Polyline.from_array(np.column_stack([xs, ys]), closed=closed)
