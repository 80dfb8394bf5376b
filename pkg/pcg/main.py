"""
Запуск эксперимента из командной строки.

    python pcg/main.py --experiment brunn_minkowski --dim 2 --count 50 --seed 7

Коды выхода:
0 - успех;
2 - ошибка конфигурации;
3 - нарушено неравенство (отчёт уже записан);
4 - превышен лимит ресурсов (решётка покрытия).
"""

import asyncio
import logging
import sys
from typing import Optional, Sequence

from cli import ConfigError, config_hash, parse_config
from config import settings
from dotenv import load_dotenv
from experiments import run_experiment
from geometry import InequalityViolationError, ResourceExceededError
from logger_config import setup_root_logger
from pydantic import ValidationError
from reports import emit_report

# Загружаем переменные окружения
load_dotenv()

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_ASSERTION = 3
EXIT_RESOURCE = 4


async def main(argv: Optional[Sequence[str]] = None) -> int:
    """Разбирает конфигурацию, запускает эксперимент и пишет отчёт; возвращает код выхода."""
    try:
        config = parse_config(argv)
    except (ValidationError, ConfigError) as e:
        logger.error(f"❌ Ошибка конфигурации: {e}")
        print(f"Ошибка конфигурации: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as e:
        logger.error(f"❌ Файл конфигурации не прочитан: {e}")
        print(f"Файл конфигурации не прочитан: {e}", file=sys.stderr)
        return EXIT_CONFIG

    try:
        report = await run_experiment(
            config.experiment, config.corpus_spec(), config.mc_budget, config.alpha
        )
    except ResourceExceededError as e:
        logger.error(f"❌ Превышен лимит ресурсов: {e}")
        print(f"Превышен лимит ресурсов: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    except ValueError as e:
        # Недопустимые параметры эксперимента (например, alpha ≤ 1/p - 1/2)
        logger.error(f"❌ Недопустимые параметры эксперимента: {e}")
        print(f"Недопустимые параметры эксперимента: {e}", file=sys.stderr)
        return EXIT_CONFIG

    report = report.model_copy(update={"config_hash": config_hash(config)})
    emit_report(report, config)

    try:
        report.assert_holds()
    except InequalityViolationError as e:
        logger.error(f"❌ {e}")
        print(str(e), file=sys.stderr)
        return EXIT_ASSERTION

    logger.info(f"✅ {report.name}: summary={report.summary.model_dump()}")
    return EXIT_OK


if __name__ == "__main__":
    setup_root_logger(
        settings.log_file,
        file_level=logging.INFO,
        console_level=logging.WARNING,
        logs_dir=settings.logs_dir,
        core_level=settings.core_log_level,
    )
    sys.exit(asyncio.run(main()))
