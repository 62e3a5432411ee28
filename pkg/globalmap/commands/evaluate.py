from typing import List, Optional
import logging

import click

from globalmap.config import settings
from globalmap.schemas.metrics import EvalReport
from globalmap.services import map_io
from globalmap.services.map_clipper import clip_map_to_region
from globalmap.services.map_evaluator import ap_stream, gap_map
from globalmap.utils.cli_helpers import parse_thresholds
from globalmap.utils.exceptions import MapValidationError

logger = logging.getLogger(__name__)


def _metadata(thresholds: List[float], **sources) -> dict:
    return {
        "thresholds": thresholds,
        "chamfer_samples": settings.CHAMFER_SAMPLES,
        "chamfer_variant": "mean-of-mins",
        "pooling": "pooled",
        "interpolation": "all-point",
        "sources": {k: v for k, v in sources.items() if v is not None},
    }


@click.command("eval")
@click.option("--pred", "pred_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--gt", "gt_path", type=click.Path(exists=True, dir_okay=False), default=None)
@click.option("--traced", "traced_path", type=click.Path(exists=True, dir_okay=False), default=None,
              help="Clip the ground truth to this traced region first.")
@click.option("--frames", "frames_dir", type=click.Path(exists=True, file_okay=False), default=None,
              help="Frame directory for stream AP (NNNN_pred.json / NNNN_gt.json pairs).")
@click.option("--thresholds", callback=parse_thresholds, default=None, help="Comma-separated meters.")
@click.option("--out", "out_path", type=click.Path(dir_okay=False), required=True)
def evaluate(
    pred_path: Optional[str],
    gt_path: Optional[str],
    traced_path: Optional[str],
    frames_dir: Optional[str],
    thresholds: Optional[List[float]],
    out_path: str,
):
    """
    GAP of a built global map against ground truth, and/or AP over a frame directory
    """
    if frames_dir is None and (pred_path is None or gt_path is None):
        raise click.UsageError("give --pred and --gt, or --frames")
    thresholds = thresholds or settings.eval_thresholds

    report = EvalReport(metadata=_metadata(
        thresholds, pred=pred_path, gt=gt_path, traced=traced_path, frames=frames_dir,
    ))
    if pred_path is not None and gt_path is not None:
        pred, gt = map_io.load_map(pred_path), map_io.load_map(gt_path)
        if traced_path is not None:
            gt = clip_map_to_region(gt, map_io.load_traced_region(traced_path))
        report.gap = gap_map(pred, gt, thresholds)

    if frames_dir is not None:
        preds = map_io.read_frame_dir(frames_dir, "pred")
        gts = map_io.read_frame_dir(frames_dir, "gt")
        if [h.frame_index for _, h in preds] != [h.frame_index for _, h in gts]:
            raise MapValidationError(f"{frames_dir}: predicted and ground-truth frames do not pair up")
        report.ap = ap_stream([m for m, _ in preds], [m for m, _ in gts], thresholds)

    map_io.save_report(report, out_path)
    parts = []
    if report.ap is not None:
        parts.append(f"mAP {report.mAP:.4f}")
    if report.gap is not None:
        parts.append(f"mGAP {report.mGAP:.4f}")
    click.echo("  ".join(parts) + f"  ->  {out_path}")
