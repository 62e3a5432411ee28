from pathlib import Path
from typing import Optional
import logging

import click

from globalmap.schemas.scenario import ScenarioConfig
from globalmap.services import map_io
from globalmap.services.scenario_runner import run_scenario

logger = logging.getLogger(__name__)


@click.command("simulate")
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Scenario YAML; defaults apply to anything it leaves out.")
@click.option("--seed", type=int, default=None, help="Overrides the scenario seed.")
@click.option("--out-dir", type=click.Path(file_okay=False), required=True)
def simulate(config_path: Optional[str], seed: Optional[int], out_dir: str):
    """
    Run one simulated scenario and write its artifact bundle
    """
    cfg = map_io.load_scenario_config(config_path) if config_path else ScenarioConfig()
    if seed is not None:
        cfg = cfg.model_copy(update={"seed": seed})

    result = run_scenario(cfg)
    map_io.write_bundle(result, Path(out_dir))
    click.echo(f"mAP {result.report.mAP:.4f}  mGAP {result.report.mGAP:.4f}  ->  {out_dir}")
