from typing import Optional, Tuple

import click

from globalmap.services import map_io
from globalmap.services.svg_renderer import render_svg


@click.command("render")
@click.option("--map", "map_paths", type=click.Path(exists=True, dir_okay=False), multiple=True, required=True)
@click.option("--gt", "gt_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--traced", "traced_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def render(map_paths: Tuple[str, ...], gt_path: Optional[str], traced_path: Optional[str], out_path: str):
    """
    Draw maps as SVG, optionally over ground truth and the traced region
    """
    maps = [map_io.load_map(p) for p in map_paths]
    gt = map_io.load_map(gt_path) if gt_path else None
    traced = map_io.load_traced_region(traced_path) if traced_path else None
    render_svg(maps, out_path, gt=gt, traced=traced)
    click.echo(f"Rendered {len(maps)} map(s)  ->  {out_path}")
