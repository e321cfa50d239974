from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    PHYSICALITY_TOL: float = Field(default=1e-9, gt=0)
    SYMMETRY_TOL: float = Field(default=1e-12, gt=0)
    VACUUM_EPS: float = Field(default=1e-12, gt=0)
    DENOMINATOR_EPS: float = Field(default=1e-15, gt=0)
    IMAG_RESIDUE_TOL: float = Field(default=1e-12, gt=0)
    G2_NEGATIVE_TOL: float = Field(default=1e-9, ge=0)

    ORACLE_DIM_SINGLE: int = Field(default=200, ge=2)
    ORACLE_DIM_SINGLE_CAP: int = Field(default=800, ge=2)
    ORACLE_DIM_TWO_MODE: int = Field(default=60, ge=2)
    ORACLE_DIM_TWO_MODE_CAP: int = Field(default=80, ge=2)
    ORACLE_TAIL_ESCALATE: float = Field(default=1e-10, gt=0)
    ORACLE_TAIL_MAX: float = Field(default=1e-8, gt=0)

    SAMPLES_PER_PHASE: int = Field(default=100_000, ge=1)
    MIN_SAMPLES_PER_PHASE: int = Field(default=100, ge=2)
    BOOTSTRAP_RESAMPLES: int = Field(default=1000, ge=1)
    MIN_BOOTSTRAP_RESAMPLES: int = Field(default=100, ge=1)
    CONFIDENCE_LEVEL: float = Field(default=0.95, gt=0, lt=1)
    GAUSSIANITY_SIGMAS: float = Field(default=5.0, gt=0)
    BOOTSTRAP_MAX_DEGENERATE_FRACTION: float = Field(default=0.5, ge=0, lt=1)

    LOG_LEVEL: str = Field(default="INFO")
    model_config = SettingsConfigDict(env_file=".env", extra="ignore")


settings = Settings()


def get_settings() -> Settings:
    return settings
