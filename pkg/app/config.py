"""Application configuration using Pydantic Settings."""

import logging
import math
from functools import lru_cache
from pathlib import Path
from typing import Any, Literal

from dotenv import dotenv_values
import numpy as np
from numpy.typing import NDArray
from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict

logger = logging.getLogger(__name__)


class Settings(BaseSettings):
    """Process-wide settings loaded from ``ZB_`` environment variables."""

    # Prime-table cache; caching is off when unset
    CACHE_DIR: Path | None = None
    LOG_LEVEL: str = "INFO"
    BLAS_THREADS_PER_WORKER: int = Field(default=1, ge=1)

    model_config = SettingsConfigDict(env_prefix="ZB_", env_file=".env", extra="ignore")


@lru_cache
def get_settings() -> Settings:
    """Get cached settings instance.

    Returns:
        Settings instance
    """
    return Settings()


class RunConfig(BaseSettings):
    """Parameters of one sampling or verification run.

    Built by ``load_run_config``: command-line flags, then the flat key-value file,
    then ``ZB_`` environment variables.
    """

    T: float = Field(default=1e6, gt=10)
    n_samples: int = Field(default=1000, ge=0)
    model: Literal["direct", "prime_sum", "selberg_mollified"] = "prime_sum"
    x_exponent: float = Field(default=1 / 20, gt=0, le=1 / 6)
    alpha_max: float = Field(default=1.0, gt=0, le=4)
    grid_points: int = Field(default=512, ge=2)
    tau_range: Literal["zero_to_T", "T_to_2T"] = "T_to_2T"
    seed: int = Field(default=20240601, ge=0, lt=2**64)
    workers: int = Field(default=1, ge=1)
    output_dir: Path = Path("out")

    subject: Literal["zeta", "oracle"] = "zeta"
    component: Literal["real", "imag"] = "real"
    batch_size: int = Field(default=16, ge=1)
    oracle_grid_points: int = Field(default=4096, ge=2)
    rmt_dimension: int = Field(default=256, ge=2, le=4096)
    mollifier_normalization: Literal["selberg", "literal"] = "selberg"
    plot: bool = False
    config_file: Path | None = None

    model_config = SettingsConfigDict(
        env_prefix="ZB_", case_sensitive=False, extra="ignore", frozen=True
    )

    @field_validator("T")
    @classmethod
    def finite_height(cls, value: float) -> float:
        if not math.isfinite(value):
            msg = "T must be finite"
            raise ValueError(msg)
        return value

    @property
    def x(self) -> float:
        """Mollifier length ``T^x_exponent``."""
        return float(self.T**self.x_exponent)

    def alpha_grid(self, points: int | None = None) -> NDArray[np.float64]:
        """Equispaced grid on ``[0, alpha_max]``."""
        return np.linspace(0.0, self.alpha_max, points or self.grid_points)

    def tau_bounds(self) -> tuple[float, float]:
        """Range of the uniform height draws; heights below 2 are excluded."""
        if self.tau_range == "zero_to_T":
            return 2.0, self.T
        return self.T, 2 * self.T

    def echo(self) -> dict[str, Any]:
        return self.model_dump(mode="json")


def load_run_config(config_file: Path | None = None, **overrides: Any) -> RunConfig:
    """Build a ``RunConfig`` from an optional flat key-value file plus overrides.

    Overrides win over file entries, which win over ``ZB_`` environment variables.
    ``None`` overrides are dropped so that unset flags fall through. Unknown file
    keys are logged and ignored.
    """
    values: dict[str, Any] = {}
    if config_file is not None:
        for key, value in dotenv_values(config_file).items():
            name = key.lower().removeprefix("zb_")
            name = "T" if name == "t" else name
            if name not in RunConfig.model_fields:
                logger.warning("Ignoring unknown config key %r in %s", key, config_file)
                continue
            if value is not None:
                values[name] = value
        values["config_file"] = config_file
    values.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig(**values)
