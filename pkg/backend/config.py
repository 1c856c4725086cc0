"""
Szego Lab Configuration Module
Loads and validates configuration from .env file
"""

import os
from pathlib import Path
from typing import Any, Dict
from dataclasses import dataclass, field
import logging

from dotenv import load_dotenv

logger = logging.getLogger("szego_lab.config")

# Load .env file
ENV_FILE = Path(__file__).parent.parent / ".env"


def load_env_file():
    """Load environment variables from .env file (process environment wins)"""
    if ENV_FILE.exists():
        load_dotenv(ENV_FILE, override=False)


# Load on import
load_env_file()


def get_env(key: str, default: Any = None, cast: type = str) -> Any:
    """Get environment variable with type casting"""
    value = os.environ.get(key, default)

    if value is None:
        return default

    if cast == bool:
        if isinstance(value, bool):
            return value
        return str(value).lower() in ("true", "1", "yes", "on")

    if cast == int:
        try:
            return int(value)
        except (ValueError, TypeError):
            return default

    if cast == float:
        try:
            return float(value)
        except (ValueError, TypeError):
            return default

    if cast == list:
        if isinstance(value, list):
            return value
        return [v.strip() for v in str(value).split(",") if v.strip()]

    return str(value) if value else default


@dataclass
class LinalgConfig:
    size_cap: int = field(default_factory=lambda: get_env("SZEGO_LAB_SIZE_CAP", 4096, int))
    pivot_tol: float = field(default_factory=lambda: get_env("SZEGO_LAB_PIVOT_TOL", 1e-14, float))
    structure_tol: float = field(default_factory=lambda: get_env("SZEGO_LAB_STRUCTURE_TOL", 1e-10, float))


@dataclass
class SeriesConfig:
    tol: float = field(default_factory=lambda: get_env("SZEGO_LAB_SERIES_TOL", 1e-12, float))
    grid_start: int = field(default_factory=lambda: get_env("SZEGO_LAB_GRID_START", 256, int))
    grid_max: int = field(default_factory=lambda: get_env("SZEGO_LAB_GRID_MAX", 2**18, int))


@dataclass
class AsymptoticsConfig:
    mean_tol: float = field(default_factory=lambda: get_env("SZEGO_LAB_MEAN_TOL", 1e-10, float))
    cauchy_tol: float = field(default_factory=lambda: get_env("SZEGO_LAB_CAUCHY_TOL", 1e-4, float))
    nonzero_band: float = 0.02
    zero_ratio: float = 0.98
    min_points: int = 6
    modified_deviation: float = 0.01


@dataclass
class ZeroModeConfig:
    eps_floor: float = field(default_factory=lambda: get_env("SZEGO_LAB_EPS_FLOOR", 1e-13, float))
    fit_floor: float = field(default_factory=lambda: get_env("SZEGO_LAB_FIT_FLOOR", 1e-12, float))
    residual_tol: float = field(default_factory=lambda: get_env("SZEGO_LAB_RESIDUAL_TOL", 1e-6, float))
    max_solves: int = 8
    n_min: int = 6
    n_max: int = 16


@dataclass
class ScanConfig:
    workers: int = field(default_factory=lambda: get_env("SZEGO_LAB_WORKERS", 4, int))


@dataclass
class ReportConfig:
    out_dir: str = field(default_factory=lambda: get_env("SZEGO_LAB_OUT_DIR", "reports"))
    outputs: list = field(default_factory=lambda: get_env("SZEGO_LAB_OUTPUTS", "json", list))


@dataclass
class LoggingConfig:
    level: str = field(default_factory=lambda: get_env("SZEGO_LAB_LOG_LEVEL", "INFO"))
    to_file: bool = field(default_factory=lambda: get_env("SZEGO_LAB_LOG_TO_FILE", False, bool))
    log_dir: str = field(default_factory=lambda: get_env("SZEGO_LAB_LOG_DIR", "logs"))


class Config:
    """Main configuration class"""

    def __init__(self):
        self.linalg = LinalgConfig()
        self.series = SeriesConfig()
        self.asymptotics = AsymptoticsConfig()
        self.zero_modes = ZeroModeConfig()
        self.scan = ScanConfig()
        self.report = ReportConfig()
        self.logging = LoggingConfig()

        self.errors = self._validate()

    def _validate(self):
        """Validate configuration"""
        errors = []

        if self.linalg.size_cap < 1:
            errors.append(f"Invalid SZEGO_LAB_SIZE_CAP: {self.linalg.size_cap}")

        grid_start = self.series.grid_start
        if grid_start < 2 or grid_start & (grid_start - 1):
            errors.append(f"SZEGO_LAB_GRID_START must be a power of two: {grid_start}")

        if self.series.grid_max < grid_start:
            errors.append(f"SZEGO_LAB_GRID_MAX below SZEGO_LAB_GRID_START: {self.series.grid_max}")

        if self.series.tol <= 0:
            errors.append(f"Invalid SZEGO_LAB_SERIES_TOL: {self.series.tol}")

        if self.scan.workers < 1:
            errors.append(f"Invalid SZEGO_LAB_WORKERS: {self.scan.workers}")

        unknown = set(self.report.outputs) - {"json", "csv", "svg"}
        if unknown:
            errors.append(f"Unknown SZEGO_LAB_OUTPUTS: {sorted(unknown)}")

        if errors:
            for error in errors:
                logger.error(f"❌ Config error: {error}")
        else:
            logger.debug("✅ Configuration validated")
        return errors

    def to_dict(self) -> Dict[str, Any]:
        """Convert config to dictionary"""
        return {
            "linalg": self.linalg.__dict__,
            "series": self.series.__dict__,
            "asymptotics": self.asymptotics.__dict__,
            "zero_modes": self.zero_modes.__dict__,
            "scan": self.scan.__dict__,
            "report": self.report.__dict__,
            "logging": self.logging.__dict__,
        }

    def tolerances(self) -> Dict[str, float]:
        """Tolerances embedded in every report header"""
        return {
            "series_tol": self.series.tol,
            "structure_tol": self.linalg.structure_tol,
            "pivot_tol": self.linalg.pivot_tol,
            "mean_tol": self.asymptotics.mean_tol,
            "cauchy_tol": self.asymptotics.cauchy_tol,
            "eps_floor": self.zero_modes.eps_floor,
            "fit_floor": self.zero_modes.fit_floor,
            "residual_tol": self.zero_modes.residual_tol,
        }


# Global config instance
config = Config()


def get_config() -> Config:
    """Get global config instance"""
    return config


def reload_config():
    """Reload configuration from .env and the environment"""
    global config
    load_env_file()
    config = Config()
    logger.info("🔄 Configuration reloaded")
    return config
