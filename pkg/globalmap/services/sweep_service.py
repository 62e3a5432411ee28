"""Builder-parameter sweep: GAP of each distance setting averaged over seeds"""
from concurrent.futures import ProcessPoolExecutor
from typing import List, Optional, Sequence, Tuple
import logging
import math

from globalmap import __version__
from globalmap.models.map import ELEMENT_CATEGORIES
from globalmap.schemas.builder import SWEEP_SETTINGS
from globalmap.schemas.metrics import MetricTable, SweepReport, SweepRow
from globalmap.schemas.scenario import ScenarioConfig
from globalmap.services.scenario_runner import run_scenario
from globalmap.utils.exceptions import GlobalMapError, ScenarioError
from globalmap.utils.seeding import config_hash

logger = logging.getLogger(__name__)

Setting = Tuple[float, float, float]


def config_for(cfg: ScenarioConfig, setting: Setting, seed: int) -> ScenarioConfig:
    road, lane, ped = setting
    builder = cfg.builder.model_copy(update={"match_distance": {
        c: d for c, d in zip(ELEMENT_CATEGORIES, (road, lane, ped))
    }})
    return cfg.model_copy(update={"builder": builder, "seed": seed})


def _run_one(cfg: ScenarioConfig) -> Tuple[MetricTable, MetricTable]:
    try:
        result = run_scenario(cfg)
    except GlobalMapError as e:
        raise ScenarioError(f"sweep run with seed {cfg.seed} failed: {e.detail}") from e
    return result.report.gap, result.report.ap


def run_sweep(
    cfg: ScenarioConfig,
    seeds: Sequence[int],
    settings_list: Optional[Sequence[Setting]] = None,
    workers: int = 1,
) -> SweepReport:
    """
    Run every (setting, seed) pair and average GAP per setting

    Runs are independent, so with workers > 1 they go to a process pool;
    results are collected in submission order either way.
    """
    settings_list = list(settings_list or SWEEP_SETTINGS)
    jobs = [config_for(cfg, s, seed) for s in settings_list for seed in seeds]
    logger.info(f"Sweeping {len(settings_list)} settings x {len(seeds)} seeds ({len(jobs)} runs, {workers} workers)")

    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(job) for job in jobs]

    rows: List[SweepRow] = []
    for i, setting in enumerate(settings_list):
        chunk = results[i * len(seeds):(i + 1) * len(seeds)]
        gap = {
            c: math.fsum(g.category_mean[c] for g, _ in chunk) / len(chunk)
            for c in ELEMENT_CATEGORIES
        }
        rows.append(SweepRow(
            d_road=setting[0],
            d_lane=setting[1],
            d_ped=setting[2],
            gap=gap,
            mgap=math.fsum(g.mean for g, _ in chunk) / len(chunk),
            map_mean=math.fsum(a.mean for _, a in chunk) / len(chunk),
            seeds=list(seeds),
        ))
        logger.info(f"D=({setting[0]:g}, {setting[1]:g}, {setting[2]:g}): mGAP {rows[-1].mgap:.4f}")

    return SweepReport(rows=rows, metadata={
        "version": __version__,
        "config": cfg.model_dump(mode="json"),
        "config_hash": config_hash(cfg),
        "seeds": list(seeds),
        "settings": [list(s) for s in settings_list],
    })


def format_table(report: SweepReport) -> str:
    """Plain-text table: one row per setting, GAP per category and mGAP"""
    header = ["D_road", "D_lane", "D_ped"] + [f"GAP_{c.value}" for c in ELEMENT_CATEGORIES] + ["mGAP"]
    lines = [" | ".join(header), " | ".join("---" for _ in header)]
    for row in report.rows:
        cells = [f"{row.d_road:g}", f"{row.d_lane:g}", f"{row.d_ped:g}"]
        cells += [f"{100 * row.gap[c]:.1f}" for c in ELEMENT_CATEGORIES]
        cells.append(f"{100 * row.mgap:.1f}")
        lines.append(" | ".join(cells))
    return "\n".join(lines)
