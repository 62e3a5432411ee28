"""Chamfer-based AP over frame streams and GAP over a built global map"""
from typing import Dict, List, Optional, Sequence, Tuple
import logging
import math

import numpy as np

from globalmap.config import settings
from globalmap.models.map import Category, ELEMENT_CATEGORIES, Frame, MapElement, VectorMap
from globalmap.schemas.metrics import Detection, MetricTable, PrCurve, threshold_key
from globalmap.services.geometry import chamfer_distance
from globalmap.utils.exceptions import UsageError

logger = logging.getLogger(__name__)


def _score_order(elements: List[MapElement]) -> List[int]:
    return sorted(range(len(elements)), key=lambda i: (-elements[i].score, elements[i].id))


def _chamfer_matrix(preds: List[MapElement], gts: List[MapElement]) -> np.ndarray:
    cost = np.empty((len(preds), len(gts)))
    for i, p in enumerate(preds):
        for j, g in enumerate(gts):
            cost[i, j] = chamfer_distance(p.geometry, g.geometry)
    return cost


def _claim(
    preds: List[MapElement],
    cost: np.ndarray,
    threshold: float,
    category: Category,
    frame_index: int,
) -> List[Detection]:
    """Greedy one-to-one claiming in descending score order"""
    claimed = np.zeros(cost.shape[1], dtype=bool)
    detections = []
    for i in _score_order(preds):
        is_tp = False
        if cost.shape[1] and not claimed.all():
            candidates = np.where(claimed, np.inf, cost[i])
            j = int(np.argmin(candidates))
            if candidates[j] < threshold:
                claimed[j] = True
                is_tp = True
        detections.append(Detection(
            score=preds[i].score,
            is_tp=is_tp,
            category=category,
            frame_index=frame_index,
        ))
    return detections


def _check_same_frame(pred: VectorMap, gt: VectorMap):
    if pred.frame != gt.frame:
        raise UsageError(f"cannot match a {pred.frame.value} map against a {gt.frame.value} map")


def _frame_detections(
    pred: VectorMap,
    gt: VectorMap,
    thresholds: Sequence[float],
    frame_index: int,
) -> Dict[Category, Dict[str, List[Detection]]]:
    """Detections per category and threshold; one Chamfer matrix per category"""
    _check_same_frame(pred, gt)
    preds, gts = pred.by_category(), gt.by_category()
    out: Dict[Category, Dict[str, List[Detection]]] = {}
    for category in ELEMENT_CATEGORIES:
        cost = _chamfer_matrix(preds[category], gts[category])
        out[category] = {
            threshold_key(t): _claim(preds[category], cost, t, category, frame_index)
            for t in thresholds
        }
    return out


def match_frame(
    pred: VectorMap,
    gt: VectorMap,
    threshold: float,
    frame_index: int = 0,
) -> Tuple[List[Detection], Dict[Category, int]]:
    """
    Match one predicted map against its ground truth at a Chamfer threshold

    Returns:
        (detections of all categories, ground-truth count per category)
    """
    per_category = _frame_detections(pred, gt, [threshold], frame_index)
    key = threshold_key(threshold)
    detections = [d for c in ELEMENT_CATEGORIES for d in per_category[c][key]]
    gt_counts = {c: len(elements) for c, elements in gt.by_category().items()}
    return detections, gt_counts


def pr_curve(dets: List[Detection], gt_count: int) -> PrCurve:
    """Pooled PR curve; ties rank TPs before FPs, then by frame index"""
    if gt_count < 0:
        raise UsageError(f"gt_count must be non-negative, got {gt_count}")
    ranked = sorted(dets, key=lambda d: (-d.score, not d.is_tp, d.frame_index))
    points = []
    tp = 0
    for rank, detection in enumerate(ranked, start=1):
        tp += detection.is_tp
        recall = tp / gt_count if gt_count else 0.0
        points.append((min(recall, 1.0), tp / rank))
    return PrCurve(points=points, gt_count=gt_count)


def auc(curve: PrCurve) -> float:
    """
    All-point interpolated area under the PR curve

    The precision envelope at rank k is the best precision at any rank >= k;
    each recall step contributes its width times the envelope there.
    """
    points = curve.points
    if not points:
        return 0.0
    envelope = [0.0] * len(points)
    best = 0.0
    for k in range(len(points) - 1, -1, -1):
        best = max(best, points[k][1])
        envelope[k] = best
    area = 0.0
    previous = 0.0
    for (recall, _), precision in zip(points, envelope):
        area += (recall - previous) * precision
        previous = recall
    return min(max(area, 0.0), 1.0)


def _table(
    detections: Dict[Category, Dict[str, List[Detection]]],
    gt_counts: Dict[Category, int],
    pred_counts: Dict[Category, int],
    thresholds: Sequence[float],
) -> MetricTable:
    values: Dict[Category, Dict[str, float]] = {}
    category_mean: Dict[Category, float] = {}
    excluded = []
    for category in ELEMENT_CATEGORIES:
        values[category] = {
            threshold_key(t): auc(pr_curve(detections[category][threshold_key(t)], gt_counts[category]))
            for t in thresholds
        }
        category_mean[category] = math.fsum(values[category].values()) / len(thresholds)
        if gt_counts[category] == 0 and pred_counts[category] == 0:
            excluded.append(category)
    included = [category_mean[c] for c in ELEMENT_CATEGORIES if c not in excluded]
    return MetricTable(
        thresholds=list(thresholds),
        values=values,
        category_mean=category_mean,
        mean=math.fsum(included) / len(included) if included else 0.0,
        gt_counts=gt_counts,
        pred_counts=pred_counts,
        excluded=excluded,
    )


def _resolve_thresholds(thresholds: Optional[Sequence[float]]) -> List[float]:
    thresholds = list(thresholds) if thresholds is not None else settings.eval_thresholds
    if not thresholds or any(t <= 0 for t in thresholds):
        raise UsageError(f"thresholds must be a non-empty list of positive distances, got {thresholds}")
    return thresholds


def ap_stream(
    preds: List[VectorMap],
    gts: List[VectorMap],
    thresholds: Optional[Sequence[float]] = None,
) -> MetricTable:
    """AP per category and threshold, detections pooled over all frames before one AUC"""
    if len(preds) != len(gts):
        raise UsageError(f"got {len(preds)} predicted frames but {len(gts)} ground-truth frames")
    thresholds = _resolve_thresholds(thresholds)
    keys = [threshold_key(t) for t in thresholds]

    pooled = {c: {k: [] for k in keys} for c in ELEMENT_CATEGORIES}
    gt_counts = {c: 0 for c in ELEMENT_CATEGORIES}
    pred_counts = {c: 0 for c in ELEMENT_CATEGORIES}
    for index, (pred, gt) in enumerate(zip(preds, gts)):
        frame = _frame_detections(pred, gt, thresholds, index)
        for category in ELEMENT_CATEGORIES:
            for key in keys:
                pooled[category][key].extend(frame[category][key])
        for category, elements in gt.by_category().items():
            gt_counts[category] += len(elements)
        for category, elements in pred.by_category().items():
            pred_counts[category] += len(elements)

    table = _table(pooled, gt_counts, pred_counts, thresholds)
    logger.info(f"AP over {len(preds)} frames: mAP {table.mean:.4f}")
    return table


def gap_map(
    pred_global: VectorMap,
    gt_global: VectorMap,
    thresholds: Optional[Sequence[float]] = None,
) -> MetricTable:
    """GAP: the AP machinery applied once to the built global map"""
    if pred_global.frame != Frame.GLOBAL or gt_global.frame != Frame.GLOBAL:
        raise UsageError("gap_map expects two global-frame maps")
    thresholds = _resolve_thresholds(thresholds)
    detections = _frame_detections(pred_global, gt_global, thresholds, 0)
    gt_counts = {c: len(e) for c, e in gt_global.by_category().items()}
    pred_counts = {c: len(e) for c, e in pred_global.by_category().items()}
    table = _table(detections, gt_counts, pred_counts, thresholds)
    logger.info(f"GAP over {len(pred_global)} built elements: mGAP {table.mean:.4f}")
    return table
