"""
Командная строка: разбор конфигурации запуска.

Конфигурация собирается из файла `key = value` (строки с # - комментарии) и
флагов; флаги перекрывают значения из файла, неизвестные ключи - ошибка.
"""

import argparse
import hashlib
import logging
from pathlib import Path
from typing import Literal, Optional, Sequence

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import MAX_EXPERIMENT_DIMENSION, MIN_MC_BUDGET, settings
from corpus import CorpusSpec
from experiments import EXPERIMENTS

logger = logging.getLogger(__name__)

EmitFormat = Literal["csv", "json", "plotdata"]

# Порядок ключей в сериализованной конфигурации
CONFIG_KEYS = (
    "experiment",
    "dim",
    "p",
    "family",
    "family_param",
    "count",
    "mc_budget",
    "seed",
    "out",
    "emit",
    "alpha",
)


class ConfigError(ValueError):
    """Ошибка формата конфигурации (неизвестный ключ, битая строка файла)."""


class RunConfig(BaseModel):
    """Параметры одного запуска эксперимента."""

    model_config = ConfigDict(extra="forbid", frozen=True)

    experiment: str
    dim: int = 2
    p: float = Field(default=0.5, gt=0.0, le=1.0)
    family: str = "lp_ball"
    family_param: Optional[float] = None
    count: int = Field(default=10, ge=1)
    mc_budget: int = Field(default_factory=lambda: settings.mc_budget)
    seed: int = 0
    out: Path = Path("reports")
    emit: frozenset[EmitFormat] = frozenset({"csv", "json"})
    alpha: Optional[float] = None

    @field_validator("experiment")
    @classmethod
    def _known_experiment(cls, value: str) -> str:
        if value not in EXPERIMENTS:
            raise ValueError(f"Неизвестный эксперимент {value}, доступны: {', '.join(EXPERIMENTS)}")
        return value

    @field_validator("dim")
    @classmethod
    def _dimension_cap(cls, value: int) -> int:
        if not 1 <= value <= MAX_EXPERIMENT_DIMENSION:
            raise ValueError(
                f"dim={value} вне 1..{MAX_EXPERIMENT_DIMENSION} (лимит размерности MAX_EXPERIMENT_DIMENSION)"
            )
        return value

    @field_validator("mc_budget")
    @classmethod
    def _budget_cap(cls, value: int) -> int:
        if value < MIN_MC_BUDGET:
            raise ValueError(f"mc_budget={value} меньше минимального бюджета MIN_MC_BUDGET={MIN_MC_BUDGET}")
        return value

    @field_validator("emit", mode="before")
    @classmethod
    def _split_emit(cls, value):
        if isinstance(value, str):
            return frozenset(part.strip() for part in value.split(",") if part.strip())
        return value

    @model_validator(mode="after")
    def _check_corpus(self):
        try:
            self.corpus_spec()
        except ValueError as e:
            raise ValueError(f"Корпус: {e}") from e
        return self

    def corpus_spec(self) -> CorpusSpec:
        return CorpusSpec(
            family=self.family,
            dim=self.dim,
            p=self.p,
            count=self.count,
            seed=self.seed,
            param=self.family_param,
        )


def _render(value) -> str:
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, frozenset):
        return ",".join(sorted(value))
    return str(value)


def serialize_config(config: RunConfig) -> str:
    """Конфигурация в формате файла `key = value`; None-значения опускаются."""
    lines = []
    for key in CONFIG_KEYS:
        value = getattr(config, key)
        if value is not None:
            lines.append(f"{key} = {_render(value)}")
    return "\n".join(lines) + "\n"


def config_hash(config: RunConfig) -> str:
    return hashlib.sha256(serialize_config(config).encode("utf-8")).hexdigest()


def parse_config_text(text: str) -> dict[str, str]:
    """
    Разбирает файл конфигурации в словарь сырых значений.

    Raises:
        ConfigError: строка без '=', неизвестный или повторный ключ
    """
    values: dict[str, str] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Строка {number}: ожидается 'key = value', получено {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in CONFIG_KEYS:
            raise ConfigError(f"Строка {number}: неизвестный ключ {key!r}")
        if key in values:
            raise ConfigError(f"Строка {number}: ключ {key!r} задан повторно")
        values[key] = value
    return values


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="pcg",
        description="Численные эксперименты с выпуклыми и p-выпуклыми телами",
        argument_default=argparse.SUPPRESS,
    )
    parser.add_argument("--experiment", choices=sorted(EXPERIMENTS))
    parser.add_argument("--dim", type=int)
    parser.add_argument("--p", type=float)
    parser.add_argument("--family", help="семейство корпуса, F или F:PARAM")
    parser.add_argument("--count", type=int)
    parser.add_argument("--mc-budget", dest="mc_budget", type=int)
    parser.add_argument("--seed", type=int)
    parser.add_argument("--out")
    parser.add_argument("--emit", help="форматы через запятую: csv,json,plotdata")
    parser.add_argument("--alpha", type=float)
    parser.add_argument("--config", type=Path, help="файл key = value")
    return parser


def parse_config(argv: Optional[Sequence[str]] = None) -> RunConfig:
    """
    Собирает RunConfig из файла и флагов.

    Args:
        argv: Аргументы командной строки (по умолчанию sys.argv[1:])

    Returns:
        Проверенная конфигурация

    Raises:
        ConfigError: ошибка формата файла
        pydantic.ValidationError: недопустимые значения (сообщение называет лимит)
        OSError: файл конфигурации не читается
    """
    flags = vars(_build_parser().parse_args(argv))
    values: dict[str, object] = {}
    config_file = flags.pop("config", None)
    if config_file is not None:
        values.update(parse_config_text(Path(config_file).read_text(encoding="utf-8")))
        logger.info(f"Конфигурация из файла {config_file}: {sorted(values)}")

    family = flags.pop("family", None)
    if family is not None:
        name, _, param = family.partition(":")
        values["family"] = name
        if param:
            values["family_param"] = param
        else:
            values.pop("family_param", None)
    values.update(flags)
    return RunConfig.model_validate(values)


def load_config_text(text: str) -> RunConfig:
    """RunConfig из текста файла конфигурации (обратное к serialize_config)."""
    return RunConfig.model_validate(parse_config_text(text))
