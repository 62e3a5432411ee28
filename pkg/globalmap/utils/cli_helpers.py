"""click callbacks that turn CLI strings into domain values"""
from typing import List, Optional

import click

from globalmap.models.geometry import Pose
from globalmap.models.map import ClipWindow


def parse_pose(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[Pose]:
    """"X,Y,YAW_DEG" -> Pose (yaw converted to radians)"""
    if value is None:
        return None
    try:
        x, y, yaw_deg = (float(v) for v in value.split(","))
        return Pose.from_degrees(x, y, yaw_deg)
    except ValueError as e:
        raise click.BadParameter(f"expected X,Y,YAW_DEG, got {value!r}") from e


def parse_window(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[ClipWindow]:
    if value is None:
        return None
    try:
        return ClipWindow.preset(value)
    except ValueError as e:
        raise click.BadParameter(str(e)) from e


def parse_thresholds(ctx: click.Context, param: click.Parameter, value: Optional[str]) -> Optional[List[float]]:
    """Comma-separated positive distances in meters"""
    if value is None:
        return None
    try:
        thresholds = [float(t) for t in value.split(",") if t.strip()]
    except ValueError as e:
        raise click.BadParameter(f"thresholds must be numbers, got {value!r}") from e
    if not thresholds or any(t <= 0 for t in thresholds):
        raise click.BadParameter("thresholds must be positive")
    return thresholds
