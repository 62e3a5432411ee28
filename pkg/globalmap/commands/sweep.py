from typing import Optional

import click

from globalmap.schemas.scenario import ScenarioConfig
from globalmap.services import map_io
from globalmap.services.sweep_service import format_table, run_sweep


@click.command("sweep")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--seeds", type=click.IntRange(min=1), default=10, show_default=True,
              help="Number of seeds, starting at the config seed.")
@click.option("--workers", type=click.IntRange(min=1), default=1, show_default=True)
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def sweep(config_path: Optional[str], seeds: int, workers: int, out_path: str):
    """
    GAP of the four builder distance settings, averaged over seeds
    """
    cfg = map_io.load_scenario_config(config_path) if config_path else ScenarioConfig()
    report = run_sweep(cfg, [cfg.seed + i for i in range(seeds)], workers=workers)
    map_io.save_sweep_report(report, out_path)
    click.echo(format_table(report))
