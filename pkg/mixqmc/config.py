"""
Configuration management for mixqmc.
Loads environment variables and provides library and CLI defaults.
"""
from functools import lru_cache
from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Settings loaded from MIXQMC_* environment variables or a .env file."""

    # Logging
    log_level: str = "INFO"

    # Experiment defaults
    default_seed: int = 20240101
    default_reps: int = Field(500, ge=2)
    default_m_min: int = Field(3, ge=0)
    default_m_max: int = Field(12, ge=0)
    slope_m_min: int = 7
    slope_m_max: int = 12
    threads: int = Field(1, ge=1)

    # Point generation
    scramble_kind: Literal["nested-uniform", "linear-with-shift"] = "nested-uniform"
    direction_numbers_path: Optional[str] = None

    # Work bounds for exact searches
    star_discrepancy_max_cells: int = 2**27
    brute_force_max_n: int = 14
    brute_force_max_strata: int = 4
    partition_max_strata: int = 24

    # Numerics
    minimax_grid_step: float = Field(0.01, gt=0)
    quadrature_epsrel: float = 1e-10

    model_config = SettingsConfigDict(
        env_prefix="MIXQMC_",
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


@lru_cache()
def get_settings() -> Settings:
    """
    Get cached settings instance.
    Using lru_cache ensures settings are loaded only once.
    """
    return Settings()
