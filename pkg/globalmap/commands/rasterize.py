from typing import Optional
import logging

import click
from pydantic import ValidationError

from globalmap.config import settings
from globalmap.models.geometry import Pose
from globalmap.models.map import ClipWindow, ELEMENT_CATEGORIES, Frame
from globalmap.models.state import TracedRegion
from globalmap.schemas.raster import GridSpec
from globalmap.services import map_io
from globalmap.services.rasterizer import clip_and_rasterize, rasterize_category, traced_mask
from globalmap.utils.cli_helpers import parse_pose, parse_window

logger = logging.getLogger(__name__)


@click.command("rasterize")
@click.option("--map", "map_path", type=click.Path(exists=True, dir_okay=False), required=True)
@click.option("--pose", callback=parse_pose, required=True, help="X,Y,YAW_DEG of the ego vehicle.")
@click.option("--window", callback=parse_window, default="60x30", show_default=True, help="LxW in meters.")
@click.option("--res", "resolution", type=float, default=settings.RASTER_RESOLUTION, show_default=True)
@click.option("--tau", type=float, default=settings.RASTER_TAU, show_default=True)
@click.option("--traced", "traced_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_dir", type=click.Path(file_okay=False), required=True)
def rasterize(
    map_path: str,
    pose: Pose,
    window: ClipWindow,
    resolution: float,
    tau: float,
    traced_path: Optional[str],
    out_dir: str,
):
    """
    Soft BEV masks (one per category plus the traced region) around a pose
    """
    if tau <= 0:
        raise click.BadParameter("tau must be positive", param_hint="--tau")
    try:
        spec = GridSpec(window=window, resolution=resolution)
    except ValidationError as e:
        raise click.BadParameter(e.errors()[0]["msg"], param_hint="--res") from e

    m = map_io.load_map(map_path)
    traced = map_io.load_traced_region(traced_path) if traced_path else TracedRegion()
    if m.frame == Frame.GLOBAL:
        masks = clip_and_rasterize(m, traced, pose, spec, tau)
    else:
        # already ego-centric; the pose only places the traced region
        masks = [rasterize_category(m.elements, c, spec, tau) for c in ELEMENT_CATEGORIES]
        masks.append(traced_mask(traced, pose, spec))

    paths = map_io.save_masks(masks, out_dir, spec, tau, pose)
    click.echo(f"{len(paths)} masks of {spec.rows}x{spec.cols}  ->  {out_dir}")
