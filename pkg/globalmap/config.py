from pydantic_settings import BaseSettings, SettingsConfigDict
from typing import List


class Settings(BaseSettings):
    """Library and CLI defaults loaded from environment variables"""

    # Geometry
    CHAMFER_SAMPLES: int = 100
    BUFFER_QUAD_SEGS: int = 16
    MIN_FRAGMENT_LENGTH: float = 0.2

    # Evaluation
    EVAL_THRESHOLDS: str = "0.5,1.0,1.5"

    # Rasterization
    RASTER_RESOLUTION: float = 0.3
    RASTER_TAU: float = 1.0

    # SVG rendering
    SVG_SCALE: float = 4.0
    SVG_MARGIN: float = 10.0

    # Application
    ENVIRONMENT: str = "development"
    LOG_LEVEL: str = "INFO"
    LOG_FORMAT: str = "%(asctime)s %(levelname)s %(name)s: %(message)s"

    @property
    def eval_thresholds(self) -> List[float]:
        """Parse matching thresholds from comma-separated string"""
        return [float(t.strip()) for t in self.EVAL_THRESHOLDS.split(",") if t.strip()]

    model_config = SettingsConfigDict(
        env_file=".env",
        env_prefix="GLOBALMAP_",
        case_sensitive=True,
        extra="ignore",
    )


# Create global settings instance
settings = Settings()
