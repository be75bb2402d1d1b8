from typing import Optional

from pydantic_settings import BaseSettings, SettingsConfigDict


class Settings(BaseSettings):
    PROJECT_NAME: str = "larmor-clock"
    VERSION: str = "1.0.0"
    LOG_LEVEL: str = "INFO"

    # sweep parallelism, None means one worker per logical core
    THREADS: Optional[int] = None

    FD_STEP: float = 1e-6
    STEP_HALVING_RTOL: float = 1e-4
    STEP_HALVING_ATOL: float = 1e-9
    RESONANCE_THRESHOLD: float = 1e-20

    THRESHOLD_TOL: float = 1e-14
    OVERFLOW_EXPONENT: float = 700.0
    SPLIT_EXPONENT: float = 30.0

    ODE_RTOL: float = 1e-10
    ODE_ATOL: float = 1e-12

    POLE_THRESHOLD: float = 1e-6
    DEGENERACY_THRESHOLD: float = 1e-6
    EVANESCENT_GUARD: float = 1e-6

    DEFAULT_SEGMENTS: int = 1024
    UNITARITY_TOL: float = 1e-8

    model_config = SettingsConfigDict(env_prefix="LARMOR_", env_file=".env", extra="ignore")

    @property
    def threads(self) -> Optional[int]:
        return self.THREADS


settings = Settings()


def get_settings() -> Settings:
    return settings


def show_current_settings():
    print("Current settings")
    for name, value in settings.model_dump().items():
        print(f"  {name}: {value}")
    if settings.THREADS is None:
        print("  (sweeps use one thread per logical core)")
    return True


if __name__ == "__main__":
    show_current_settings()
