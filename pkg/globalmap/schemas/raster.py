from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

import numpy as np

from globalmap.models.map import Category, ClipWindow

# window extents must be whole multiples of the resolution up to this slack
GRID_TOLERANCE = 1e-9


class GridSpec(BaseModel):
    """
    BEV grid over an ego window

    Row 0 is the left-most lateral band (+y), column 0 the rearmost longitudinal
    band (-x); intensities are sampled at cell centers.
    """

    model_config = ConfigDict(frozen=True)

    window: ClipWindow = Field(default_factory=ClipWindow)
    resolution: float = Field(default=0.3, gt=0.0)

    @model_validator(mode="after")
    def check_divisible(self) -> "GridSpec":
        for name, extent in (("length", self.window.length), ("width", self.window.width)):
            cells = extent / self.resolution
            if abs(cells - round(cells)) > GRID_TOLERANCE * max(1.0, cells) or round(cells) < 1:
                raise ValueError(f"window {name} {extent} is not a multiple of resolution {self.resolution}")
        return self

    @property
    def rows(self) -> int:
        return int(round(self.window.width / self.resolution))

    @property
    def cols(self) -> int:
        return int(round(self.window.length / self.resolution))

    @property
    def shape(self):
        return self.rows, self.cols

    def cell_centers(self) -> np.ndarray:
        """Ego-frame cell centers, shape (rows, cols, 2)"""
        xs = -self.window.half_length + (np.arange(self.cols) + 0.5) * self.resolution
        ys = self.window.half_width - (np.arange(self.rows) + 0.5) * self.resolution
        grid_x, grid_y = np.meshgrid(xs, ys)
        return np.stack([grid_x, grid_y], axis=-1)


class BevMask(BaseModel):
    """One rows x cols intensity grid for a category (or the traced-region channel)"""

    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    category: Category
    values: np.ndarray

    @field_validator("values")
    @classmethod
    def check_values(cls, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=float)
        if value.ndim != 2:
            raise ValueError("mask values must be a 2-D grid")
        if value.size and (np.nanmin(value) < 0.0 or np.nanmax(value) > 1.0 or not np.all(np.isfinite(value))):
            raise ValueError("mask intensities must lie in [0, 1]")
        return value

    @property
    def shape(self):
        return self.values.shape
