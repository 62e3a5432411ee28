from typing import Optional
import logging

import click

from globalmap.schemas.builder import BuilderParams
from globalmap.services import map_io
from globalmap.services.map_builder import GlobalMapBuilder
from globalmap.services.rasterizer import update_traced_region
from globalmap.models.state import TracedRegion
from globalmap.utils.exceptions import MapValidationError

logger = logging.getLogger(__name__)


@click.command("build")
@click.option("--frames", "frames_dir", type=click.Path(exists=True, file_okay=False), required=True)
@click.option("--params", "params_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--initial", "initial_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Global map to continue from (cross-scene replay).")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
@click.option("--traced-out", type=click.Path(dir_okay=False), default=None)
def build(
    frames_dir: str,
    params_path: Optional[str],
    initial_path: Optional[str],
    out_path: str,
    traced_out: Optional[str],
):
    """
    Replay stored per-frame predictions through the global map builder
    """
    params = map_io.load_builder_params(params_path) if params_path else BuilderParams()
    initial = map_io.load_map(initial_path) if initial_path else None
    builder = GlobalMapBuilder(params, initial_map=initial)
    traced = TracedRegion()

    frames = map_io.read_frame_dir(frames_dir, "pred")
    if not frames:
        raise MapValidationError(f"{frames_dir}: no *_pred.json frames found")
    for prediction, header in frames:
        if header.merged is False:
            continue
        if header.pose is None:
            raise MapValidationError(f"{frames_dir}: frame {header.frame_index} has no pose")
        pose = header.pose.to_domain()
        builder.update(prediction, pose)
        traced = update_traced_region(traced, pose, params.window)

    map_io.save_map(builder.global_map, out_path)
    if traced_out:
        map_io.save_traced_region(traced, traced_out)
    logger.info(f"Replayed {builder.steps} merges from {len(frames)} frames")
    click.echo(f"{len(builder.global_map)} elements  ->  {out_path}")
