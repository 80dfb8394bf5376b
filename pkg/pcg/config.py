"""
Настройки pcg.
"""

from pathlib import Path
from typing import Literal, Optional

from pydantic import Field
from pydantic_settings import BaseSettings, SettingsConfigDict

from geometry.constants import (  # noqa: F401  (реэкспорт констант ядра)
    CONDITION_CAP,
    DEFAULT_MC_BUDGET,
    EXACT_RTOL,
    MAX_COVERING_DIMENSION,
    MAX_DIMENSION,
    MAX_EXPERIMENT_DIMENSION,
    MAX_GENERATORS,
    MAX_LATTICE_POINTS,
    MIN_MC_BUDGET,
    ORACLE_TOL,
)


class Settings(BaseSettings):
    """Настройки из переменных окружения PCG_*."""

    threads: int = Field(default=4, ge=1)  # сколько экземпляров считается параллельно
    mc_budget: int = Field(default=DEFAULT_MC_BUDGET, ge=MIN_MC_BUDGET)
    logs_dir: Optional[Path] = None  # по умолчанию logs/ в корне проекта
    log_file: str = "pcg.log"
    core_log_level: Literal["DEBUG", "INFO", "WARNING", "ERROR"] = "INFO"  # логгеры geometry.*

    model_config = SettingsConfigDict(
        env_prefix="PCG_",
        env_file=".env",
        env_file_encoding="utf-8",
        extra="ignore",  # Игнорировать лишние переменные из .env
    )


settings = Settings()

# Параметры корпусов по умолчанию
DEFAULT_CONDITION_CAP = 20.0  # случайные эллипсоиды и отображения с det = 1
DEFAULT_POLYTOPE_VERTICES = 12
PCONV_GENERATOR_RANGE = (8, 32)  # число образующих random_pconv, включительно
RADIUS_RANGE = (0.5, 2.0)  # радиусы образующих
WITNESS_CAP_EPS = 0.05  # шапки свидетеля CapBody в prop1
ALPHA_MARGIN = 0.25  # alpha = 1/p - 1/2 + ALPHA_MARGIN по умолчанию
