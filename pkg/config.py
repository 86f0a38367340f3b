"""
Configuration management for the causalgroups toolkit
"""
from typing import Optional

from pydantic import Field, field_validator
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Application settings loaded from environment variables"""

    model_config = SettingsConfigDict(env_file=".env", case_sensitive=False)

    # Hypothesis test
    nu: float = Field(default=0.05)

    # Clustering
    k: int = Field(default=2, ge=2)
    seed: int = Field(default=0)
    max_iter: int = Field(default=100, ge=1)

    # Performance
    num_threads: int = Field(default=1, ge=1)

    # Early warning
    window_w: int = Field(default=60, ge=4)
    embed_dim: int = Field(default=4, ge=2)
    max_lag: int = Field(default=100, ge=0)
    lag_stride: int = Field(default=10, ge=1)
    tau: float = Field(default=1.0, ge=0.0)
    time_stride: int = Field(default=5, ge=1)

    # Stability
    top_k: int = Field(default=3, ge=1)
    ridge_alpha: float = Field(default=1e-6, gt=0.0)

    # Output
    float_format: str = Field(default="%.12g")

    # Logging
    log_level: str = Field(default="INFO")
    log_file: Optional[str] = Field(default=None)

    @field_validator("nu")
    @classmethod
    def _nu_in_open_unit_interval(cls, value: float) -> float:
        if not 0.0 < value < 1.0:
            raise ValueError(f"nu must lie in (0, 1), got {value}")
        return value

    @field_validator("log_level")
    @classmethod
    def _upper_log_level(cls, value: str) -> str:
        return value.upper()


# Global settings instance
settings = Settings()
