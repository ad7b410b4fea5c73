"""Settings and configuration management."""
from typing import Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

# Run semantics; fixed here and never read from the environment
FLOAT_DIGITS = 12
AUG_STATE_CAP = 2_000_000
BRUTE_FORCE_POLICY_CAP = 1_000_000


class Settings(BaseSettings):
    """Process-level settings loaded from environment variables or a .env file.

    Only presentation lives here. Experiment parameters come from the
    experiment config file and CLI flags; output precision and resource caps
    are the module constants above.
    """

    log_level: str = Field(
        default="INFO",
        description="Logging level",
    )

    model_config = SettingsConfigDict(
        env_file=".env",
        env_file_encoding="utf-8",
        case_sensitive=False,
        extra="ignore",
    )


_settings: Optional[Settings] = None


def load_settings() -> Settings:
    """Load and return application settings."""
    global _settings
    if _settings is None:
        _settings = Settings()
    return _settings


def get_settings() -> Settings:
    """Get current settings instance."""
    if _settings is None:
        return load_settings()
    return _settings
