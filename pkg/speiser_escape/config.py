"""
Configuration settings for speiser-escape.
"""

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Process-wide settings, overridable through SPEISER_* environment variables."""

    model_config = SettingsConfigDict(
        env_prefix="SPEISER_",
        env_file=".env",
        case_sensitive=False,
        extra="ignore",
    )

    # Logging
    log_level: str = "INFO"

    # Parallel grid work
    workers: int = 4
    row_block: int = 64

    # Numerical defaults
    grid_resolution: int = 1024
    quadrature_points: int = 4096
    radii_per_decade: int = 64
    truncation_order: int = 10
    divergence_cap: float = 1e6

    # Iteration
    iteration_cap: int = 64
    trajectory_cap: int = 256


settings = Settings()
