"""
Модуль для настройки логирования в приложении.

Корневой логгер получает файл с ротацией и консоль. Модули ядра geometry
(итерации MVEE, шаги бисекции, отчёты покрытий) логируют под именем
"geometry.*", их уровень задаётся отдельно от уровня файла.
"""

import logging
from logging.handlers import RotatingFileHandler
from pathlib import Path
from typing import Optional, Union

CORE_LOGGER = "geometry"


def _create_handlers(
    log_file: Path, file_level: int = logging.INFO, console_level: int = logging.WARNING
) -> tuple[RotatingFileHandler, logging.StreamHandler]:
    """
    Создает обработчики для файла и консоли с разными уровнями логирования.

    Returns:
        Кортеж (file_handler, console_handler)
    """
    # Детальный формат для файла (с filename:lineno для отладки)
    file_format = logging.Formatter(
        "%(asctime)s - %(name)s - %(levelname)s - [%(filename)s:%(lineno)d] - %(message)s"
    )
    console_format = logging.Formatter("%(levelname)s - %(name)s - %(message)s")

    # Ротация: 7 MB, 5 файлов
    file_handler = RotatingFileHandler(
        log_file, mode="a", encoding="utf-8", maxBytes=7 * 1024 * 1024, backupCount=5
    )
    file_handler.setLevel(file_level)
    file_handler.setFormatter(file_format)

    console_handler = logging.StreamHandler()
    console_handler.setLevel(console_level)
    console_handler.setFormatter(console_format)

    return file_handler, console_handler


def _has_file_handler(root_logger: logging.Logger, log_file: Path) -> bool:
    target = str(log_file.resolve())
    return any(
        isinstance(h, RotatingFileHandler) and h.baseFilename == target
        for h in root_logger.handlers
    )


def setup_root_logger(
    log_filename: str = "pcg.log",
    file_level: int = logging.INFO,
    console_level: int = logging.WARNING,
    logs_dir: Optional[Path] = None,
    core_level: Union[int, str] = logging.INFO,
) -> Path:
    """
    Настраивает корневой логгер для экспериментов и ядра geometry.

    Повторный вызов с тем же файлом обработчики не дублирует.

    Args:
        log_filename: Имя файла для логов
        file_level: Уровень логирования для файла
        console_level: Уровень логирования для консоли
        logs_dir: Директория для логов. Если не указана, используется logs/ в корне проекта
        core_level: Уровень логгеров geometry.* (DEBUG включает итерации решателей)

    Returns:
        Путь к файлу логов
    """
    if logs_dir is None:
        logs_dir = Path(__file__).parent.parent / "logs"
    logs_dir = Path(logs_dir)
    logs_dir.mkdir(parents=True, exist_ok=True)
    log_file = logs_dir / log_filename

    logging.getLogger(CORE_LOGGER).setLevel(core_level)
    root_logger = logging.getLogger()
    if _has_file_handler(root_logger, log_file):
        return log_file

    root_logger.setLevel(min(file_level, console_level, logging.getLogger(CORE_LOGGER).level))
    file_handler, console_handler = _create_handlers(log_file, file_level, console_level)
    root_logger.addHandler(file_handler)
    root_logger.addHandler(console_handler)
    return log_file
