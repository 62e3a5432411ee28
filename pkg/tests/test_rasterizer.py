import math

import numpy as np
import pytest

from globalmap.models.geometry import Direction, Pose
from globalmap.models.map import Category, ClipWindow, Frame, VectorMap
from globalmap.models.state import Footprint, TracedRegion
from globalmap.schemas.raster import BevMask, GridSpec
from globalmap.schemas.scenario import WorldConfig
from globalmap.services.geometry import transform_points
from globalmap.services.map_clipper import element_to_global
from globalmap.services.rasterizer import (
    clip_and_rasterize,
    distance_field,
    rasterize_category,
    rasterize_soft,
    traced_mask,
    update_traced_region,
)
from globalmap.services.world_generator import generate_ground_truth
from globalmap.utils.exceptions import UsageError
from tests.conftest import random_polyline

ORIGIN = Pose(x=0.0, y=0.0, yaw=0.0)
# 6 rows x 10 columns of 1 m cells; centers at x = -4.5..4.5, y = 2.5..-2.5
SMALL = GridSpec(window=ClipWindow(length=10.0, width=6.0), resolution=1.0)


def test_default_grid_shape():
    spec = GridSpec()
    assert spec.shape == (100, 200)
    centers = spec.cell_centers()
    assert np.allclose(centers[0, 0], (-29.85, 14.85))
    assert np.allclose(centers[-1, -1], (29.85, -14.85))


def test_grid_must_divide_the_window():
    with pytest.raises(ValueError):
        GridSpec(window=ClipWindow(length=10.0, width=6.0), resolution=0.7)


def test_mask_values_are_validated():
    with pytest.raises(ValueError):
        BevMask(category=Category.LANE_DIVIDER, values=np.full((2, 2), 1.5))
    with pytest.raises(ValueError):
        BevMask(category=Category.LANE_DIVIDER, values=np.zeros(4))


def test_intensity_on_the_line_and_at_tau(make_element):
    line = make_element(0, [(-5, 0.5), (5, 0.5)])
    mask = rasterize_category([line], Category.LANE_DIVIDER, SMALL, tau=2.0)

    assert mask.shape == (6, 10)
    assert np.all(mask.values[2] == 1.0)
    # row 0 sits 2 m from the line
    assert np.allclose(mask.values[0], math.exp(-1.0), atol=1e-9)


def test_nearest_element_wins(make_element):
    near = make_element(0, [(-5, 1.5), (5, 1.5)])
    far = make_element(1, [(-5, -3.5), (5, -3.5)])
    mask = rasterize_category([near, far], Category.LANE_DIVIDER, SMALL, tau=2.0)
    # cell center (0.5, 0.5): 1 m from the near line, 4 m from the far one
    assert mask.values[2, 5] == pytest.approx(math.exp(-0.5), abs=1e-9)


def test_absent_category_is_all_zero(make_element):
    road = make_element(0, [(-5, 0), (5, 0)], category=Category.ROAD_BOUNDARY)
    mask = rasterize_category([road], Category.PED_CROSSING, SMALL, tau=1.0)
    assert not mask.values.any()


def test_rasterize_soft_only_present_categories(make_element):
    elements = [
        make_element(0, [(-5, 0), (5, 0)], category=Category.PED_CROSSING),
        make_element(1, [(-5, 2), (5, 2)], category=Category.ROAD_BOUNDARY),
    ]
    masks = rasterize_soft(elements, SMALL, tau=1.0)
    assert [m.category for m in masks] == [Category.ROAD_BOUNDARY, Category.PED_CROSSING]
    assert rasterize_soft([], SMALL, tau=1.0) == []


def test_tau_must_be_positive(make_element):
    with pytest.raises(UsageError):
        rasterize_soft([make_element(0, [(0, 0), (1, 0)])], SMALL, tau=0.0)


def test_update_traced_region_membership():
    region = update_traced_region(TracedRegion(), ORIGIN, ClipWindow(length=10.0, width=4.0))
    assert len(region) == 1
    assert region.contains(np.array([[4.9, 1.9], [5.1, 0.0]])).tolist() == [True, False]

    again = update_traced_region(region, ORIGIN, ClipWindow(length=10.0, width=4.0))
    points = np.random.default_rng(0).uniform(-8, 8, size=(500, 2))
    assert np.array_equal(again.contains(points), region.contains(points))


def test_disjoint_footprints():
    window = ClipWindow(length=10.0, width=4.0)
    region = update_traced_region(update_traced_region(TracedRegion(), ORIGIN, window), Pose(x=30.0, y=0.0), window)
    assert region.contains(np.array([[0, 0], [30, 0], [15, 0]])).tolist() == [True, True, False]


def test_traced_mask():
    region = update_traced_region(TracedRegion(), Pose(x=-3.0, y=0.0), ClipWindow(length=4.0, width=6.0))
    mask = traced_mask(region, ORIGIN, SMALL)

    assert mask.category == Category.TRACED_REGION
    # footprint covers x in [-5, -1]: the first four columns
    assert np.all(mask.values[:, :4] == 1.0)
    assert np.all(mask.values[:, 4:] == 0.0)
    assert not traced_mask(TracedRegion(), ORIGIN, SMALL).values.any()


def test_clip_and_rasterize_no_map():
    masks = clip_and_rasterize(VectorMap.empty(Frame.GLOBAL), TracedRegion(), ORIGIN, SMALL, tau=1.0)
    assert [m.category for m in masks] == [
        Category.ROAD_BOUNDARY, Category.LANE_DIVIDER, Category.PED_CROSSING, Category.TRACED_REGION,
    ]
    assert all(not m.values.any() for m in masks)


def test_clip_and_rasterize_road_only(make_element, make_map):
    pose = Pose.from_degrees(100.0, 20.0, 90.0)
    road = make_element(0, [(101, 0), (101, 40)], category=Category.ROAD_BOUNDARY)
    traced = update_traced_region(TracedRegion(), pose, SMALL.window)
    masks = clip_and_rasterize(make_map([road], frame=Frame.GLOBAL), traced, pose, SMALL, tau=1.0)

    assert len(masks) == 4
    road_mask, lane_mask, ped_mask, traced_values = masks
    assert road_mask.values.max() > 0.5
    assert not lane_mask.values.any() and not ped_mask.values.any()
    assert np.all(traced_values.values == 1.0)
    for m in masks:
        assert m.values.min() >= 0.0 and m.values.max() <= 1.0


# Properties

def moved(pose, transform):
    """pose expressed after moving the whole world by transform"""
    x, y = transform_points(np.array([[pose.x, pose.y]]), transform, Direction.EGO_TO_GLOBAL)[0]
    return Pose(x=float(x), y=float(y), yaw=transform.yaw + pose.yaw)


def test_doubling_tau_takes_the_square_root(rng, make_element):
    for _ in range(10):
        elements = [make_element(i, random_polyline(rng, spread=6.0).points) for i in range(3)]
        tau = float(rng.uniform(0.2, 3.0))
        single = rasterize_category(elements, Category.LANE_DIVIDER, SMALL, tau).values
        double = rasterize_category(elements, Category.LANE_DIVIDER, SMALL, 2.0 * tau).values
        assert np.allclose(double, np.sqrt(single), rtol=1e-12, atol=0.0)


def test_intensity_falls_with_distance_and_rises_with_tau(rng, make_element):
    for _ in range(10):
        elements = [make_element(i, random_polyline(rng, spread=6.0).points) for i in range(3)]
        order = np.argsort(distance_field(elements, SMALL).ravel(), kind="stable")
        previous = None
        for tau in (0.3, 0.7, 1.0, 2.5):
            values = rasterize_category(elements, Category.LANE_DIVIDER, SMALL, tau).values
            assert np.all(np.diff(values.ravel()[order]) <= 0.0)
            if previous is not None:
                assert np.all(values >= previous - 1e-15)
            previous = values


def test_masks_move_with_the_world(rng):
    gt = generate_ground_truth(WorldConfig(blocks_x=1, blocks_y=1, seed=3))
    spec = GridSpec(window=ClipWindow(length=60.0, width=30.0), resolution=1.0)
    for _ in range(4):
        transform = Pose(
            x=float(rng.uniform(-500, 500)), y=float(rng.uniform(-500, 500)), yaw=float(rng.uniform(-math.pi, math.pi)),
        )
        poses = [
            Pose(x=float(rng.uniform(0, 60)), y=float(rng.uniform(0, 60)), yaw=float(rng.uniform(-math.pi, math.pi)))
            for _ in range(3)
        ]
        region = TracedRegion(footprints=tuple(Footprint(pose=p, window=spec.window) for p in poses[:2]))
        moved_map = VectorMap(frame=Frame.GLOBAL, elements=tuple(element_to_global(e, transform) for e in gt.elements))
        moved_region = TracedRegion(footprints=tuple(
            Footprint(pose=moved(f.pose, transform), window=f.window) for f in region.footprints
        ))

        for pose in poses:
            before = clip_and_rasterize(gt, region, pose, spec, tau=1.0)
            after = clip_and_rasterize(moved_map, moved_region, moved(pose, transform), spec, tau=1.0)
            assert [m.category for m in after] == [m.category for m in before]
            for a, b in zip(before, after):
                assert np.allclose(a.values, b.values, rtol=0.0, atol=1e-8)
