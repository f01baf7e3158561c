from pydantic_settings import BaseSettings, PydanticBaseSettingsSource, SettingsConfigDict
from functools import lru_cache
from typing import List, Optional, Tuple, Type


class Settings(BaseSettings):
    model_config = SettingsConfigDict(case_sensitive=True, env_file=None, extra="ignore")

    # Application
    APP_NAME: str = "psdmix"
    LOG_LEVEL: str = "WARNING"
    WORKERS: int = 1

    # Solver (npmle)
    GRAD_TOL: float = 1e-6
    MAX_OUTER_ITERS: int = 200
    GRID_SIZE: int = 20
    MODAL_EM_ITERS: int = 100
    PRUNE_TOL: float = 1e-10
    MERGE_RADIUS_SCALE: float = 1e-6
    EM_POLISH_ITERS: int = 2
    EM_POLISH_MAX_ITERS: int = 200
    EM_POLISH_TOL: float = 1e-12
    REFINE_ITERS: int = 2000
    INIT_SUPPORT_SIZE: int = 10
    STAGNATION_WINDOW: int = 5
    STAGNATION_TOL: float = 1e-10
    LINE_SEARCH_MIN_EXPONENT: int = 30
    CERTIFY_POINTS: int = 10_000

    # Kernels and distances
    EPS_TAIL: float = 1e-12
    EPS_TAIL_HIGH_DIM: float = 1e-3
    MAX_TAIL_SCAN: int = 1_000_000
    MAX_BOX_POINTS: int = 50_000_000
    TAU_ENUMERATION_CAP: int = 100_000_000
    W_SCAN_CAP: int = 1_000_000
    V_SCAN_CAP: int = 1_000

    # Bootstrap test
    BOOTSTRAP_B: int = 1000
    ALPHA: float = 0.05
    METRICS: List[str] = ["hellinger", "l1", "l2"]

    # Desk-scale experiments
    NEGBIN_V: float = 2.0
    RATE_N_GRID_2D: List[int] = [100, 1_000, 10_000]
    RATE_N_GRID_4D: List[int] = [100, 1_000]
    RATE_REPLICATIONS: int = 20
    POWER_REPLICATIONS: int = 100
    POWER_B: int = 199
    POWER_N: int = 1000
    POWER_BETAS: List[float] = [0.0, 0.2, 0.4, 0.6, 0.8]
    POWER_LAMBDAS: List[float] = [1.0, 1.25, 1.5, 1.75, 2.0]
    CV_REPEATS: int = 100

    @classmethod
    def settings_customise_sources(
        cls,
        settings_cls: Type[BaseSettings],
        init_settings: PydanticBaseSettingsSource,
        env_settings: PydanticBaseSettingsSource,
        dotenv_settings: PydanticBaseSettingsSource,
        file_secret_settings: PydanticBaseSettingsSource,
    ) -> Tuple[PydanticBaseSettingsSource, ...]:
        # Process environment is never consulted; only an explicit file is.
        return init_settings, dotenv_settings


@lru_cache()
def get_settings(config_file: Optional[str] = None) -> Settings:
    return Settings(_env_file=config_file)


settings = get_settings()


def use_config_file(config_file: Optional[str]) -> Settings:
    """Reload the module-level settings in place from a dotenv-format file."""
    loaded = get_settings(config_file)
    for field, value in loaded.model_dump().items():
        setattr(settings, field, value)
    return settings
