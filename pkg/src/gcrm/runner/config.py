"""
Runner Settings
"""

from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    """Environment settings for the experiment runner."""

    model_config = SettingsConfigDict(
        env_prefix="GCRM_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",
    )

    # Default seed when --seed is absent
    SEED: Optional[int] = None

    # Where reports go when --out is absent
    OUTPUT_DIR: str = "."

    LOG_LEVEL: str = "WARNING"


def get_settings() -> Settings:
    """Read settings from the current environment."""
    return Settings()
