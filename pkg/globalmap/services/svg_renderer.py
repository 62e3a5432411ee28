from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Union
import logging

import numpy as np
from jinja2 import Environment, PackageLoader, StrictUndefined
from shapely.geometry.base import BaseGeometry

from globalmap.config import settings
from globalmap.models.map import Category, ELEMENT_CATEGORIES, VectorMap
from globalmap.models.state import TracedRegion
from globalmap.utils.exceptions import GlobalMapError

logger = logging.getLogger(__name__)

CATEGORY_COLORS = {
    Category.ROAD_BOUNDARY: "#2ca02c",
    Category.LANE_DIVIDER: "#d62728",
    Category.PED_CROSSING: "#1f77b4",
}
GT_COLOR = "#b0b0b0"
DEFAULT_EXTENT = (0.0, 0.0, 100.0, 100.0)
LEGEND_HEIGHT = 70.0

_env = Environment(
    loader=PackageLoader("globalmap", "templates"),
    undefined=StrictUndefined,
    trim_blocks=True,
    lstrip_blocks=True,
    autoescape=True,
)


def _bounds(maps: Iterable[VectorMap], traced: Optional[TracedRegion]):
    arrays = [e.geometry.as_array() for m in maps for e in m.elements]
    if traced is not None:
        arrays.extend(f.corners() for f in traced.footprints)
    if not arrays:
        return DEFAULT_EXTENT
    points = np.vstack(arrays)
    return points[:, 0].min(), points[:, 1].min(), points[:, 0].max(), points[:, 1].max()


class _Canvas:
    """World meters -> SVG pixels; y flipped so north is up"""

    def __init__(self, bounds, scale: float, margin: float):
        self.min_x, self.min_y, self.max_x, self.max_y = bounds
        self.scale = scale
        self.margin = margin
        self.width = (self.max_x - self.min_x + 2 * margin) * scale
        self.height = (self.max_y - self.min_y + 2 * margin) * scale + LEGEND_HEIGHT

    def xy(self, x: float, y: float) -> str:
        px = (x - self.min_x + self.margin) * self.scale
        py = (self.max_y - y + self.margin) * self.scale + LEGEND_HEIGHT
        return f"{px:.3f},{py:.3f}"

    def path(self, points: np.ndarray, closed: bool) -> str:
        d = "M " + " L ".join(self.xy(x, y) for x, y in points)
        return d + " Z" if closed else d

    def region(self, geometry: BaseGeometry) -> List[str]:
        polygons = getattr(geometry, "geoms", [geometry])
        out = []
        for polygon in polygons:
            if polygon.is_empty:
                continue
            rings = [polygon.exterior, *polygon.interiors]
            out.append(" ".join(self.path(np.asarray(r.coords)[:-1], True) for r in rings))
        return out


def _lines(canvas: _Canvas, m: VectorMap, opacity: float = 1.0):
    return [
        {
            "d": canvas.path(e.geometry.as_array(), e.geometry.closed),
            "id": e.id,
            "category": e.category.value,
            "color": CATEGORY_COLORS[e.category],
            "opacity": f"{opacity:.2f}",
        }
        for e in m.elements
    ]


def render_svg(
    maps: Union[VectorMap, Sequence[VectorMap]],
    path: Union[str, Path, None] = None,
    gt: Optional[VectorMap] = None,
    traced: Optional[TracedRegion] = None,
    scale: Optional[float] = None,
) -> str:
    """
    Render one or more global maps (optionally over a gray ground-truth
    underlay and the traced region) to an SVG document; writes it when a
    path is given and always returns the text.
    """
    maps = [maps] if isinstance(maps, VectorMap) else list(maps)
    canvas = _Canvas(
        _bounds(maps + ([gt] if gt is not None else []), traced),
        scale or settings.SVG_SCALE,
        settings.SVG_MARGIN,
    )
    legend = [
        {"y": 16 + 16 * i, "color": CATEGORY_COLORS[c], "label": c.value}
        for i, c in enumerate(ELEMENT_CATEGORIES)
    ]
    if gt is not None:
        legend.append({"y": 16 + 16 * len(legend), "color": GT_COLOR, "label": "ground truth"})

    document = _env.get_template("map.svg.j2").render(
        width=f"{canvas.width:.3f}",
        height=f"{canvas.height:.3f}",
        stroke_width=f"{max(canvas.scale * 0.25, 1.0):.3f}",
        traced=canvas.region(traced.polygon()) if traced is not None and len(traced) else [],
        gt=_lines(canvas, gt) if gt is not None else [],
        gt_color=GT_COLOR,
        layers=[_lines(canvas, m, opacity=1.0 if i == 0 else 0.6) for i, m in enumerate(maps)],
        legend=legend,
    )

    if path is not None:
        path = Path(path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_text(document, encoding="utf-8")
        except OSError as e:
            raise GlobalMapError(f"cannot write {path}: {e.strerror or e}") from e
        logger.info(f"Rendered {sum(len(m) for m in maps)} elements to {path}")
    return document
