"""
Сериализация отчётов экспериментов.

Файлы в каталоге вывода:
- <name>_<seed>.json - полный отчёт, схема "v1";
- <name>_<seed>.csv - строка на экземпляр: instance_id, lhs, rhs, ratio, stderr;
- <name>_<seed>.plot.csv - x (номер экземпляра), y (отношение) для внешних графиков.

Числа в JSON и CSV записываются с 17 значащими цифрами (format(v, ".17g")),
поэтому строки чисел в обоих файлах совпадают посимвольно. NaN и бесконечности
в JSON становятся null, в CSV - пустой ячейкой. Временных меток нет:
повторный запуск с той же конфигурацией даёт побайтно те же файлы.
"""

import csv
import io
import json
import logging
import math
from pathlib import Path
from typing import Any, Optional

from cli import RunConfig
from experiments import ExperimentReport

logger = logging.getLogger(__name__)

SCHEMA_VERSION = "v1"
CSV_HEADER = ["instance_id", "lhs", "rhs", "ratio", "stderr"]
PLOT_HEADER = ["x", "y"]
JSON_INDENT = 2


def _number(value: Optional[float]) -> str:
    if value is None or not math.isfinite(value):
        return ""
    return format(float(value), ".17g")


def _json_value(value: Any, level: int) -> str:
    """JSON-запись значения; float идут через _number, нечисловые float - null."""
    if isinstance(value, bool) or value is None or isinstance(value, (int, str)):
        return json.dumps(value, ensure_ascii=False)
    if isinstance(value, float):
        return _number(value) or "null"
    pad = " " * (JSON_INDENT * (level + 1))
    end = " " * (JSON_INDENT * level)
    if isinstance(value, dict):
        if not value:
            return "{}"
        items = [
            f"{pad}{json.dumps(str(k), ensure_ascii=False)}: {_json_value(v, level + 1)}"
            for k, v in value.items()
        ]
        return "{\n" + ",\n".join(items) + f"\n{end}}}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{pad}{_json_value(v, level + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + f"\n{end}]"
    raise TypeError(f"Значение типа {type(value).__name__} не сериализуется в JSON")


def report_to_json(report: ExperimentReport) -> str:
    payload = {"schema": SCHEMA_VERSION, **report.model_dump(mode="python")}
    return _json_value(payload, 0) + "\n"


def report_to_csv(report: ExperimentReport) -> str:
    output = io.StringIO()
    writer = csv.writer(output)  # RFC 4180: CRLF, минимальное экранирование
    writer.writerow(CSV_HEADER)
    for row in report.rows:
        writer.writerow([
            row.instance_id,
            _number(row.lhs),
            _number(row.rhs),
            _number(row.ratio),
            _number(row.stderr),
        ])
    return output.getvalue()


def report_to_plot_csv(report: ExperimentReport) -> str:
    output = io.StringIO()
    writer = csv.writer(output)
    writer.writerow(PLOT_HEADER)
    for row in report.rows:
        if row.ok:
            writer.writerow([row.instance_id, _number(row.ratio)])
    return output.getvalue()


def _write(path: Path, text: str) -> Path:
    with open(path, "w", encoding="utf-8", newline="") as f:
        f.write(text)
    return path


def emit_report(report: ExperimentReport, config: RunConfig) -> list[Path]:
    """
    Записывает файлы отчёта в config.out.

    Args:
        report: Отчёт эксперимента
        config: Конфигурация запуска (каталог и набор форматов)

    Returns:
        Пути записанных файлов

    Raises:
        OSError: каталог недоступен для записи
    """
    out = Path(config.out)
    out.mkdir(parents=True, exist_ok=True)
    stem = f"{report.name}_{report.seed}"
    written = []
    if "json" in config.emit:
        written.append(_write(out / f"{stem}.json", report_to_json(report)))
    if "csv" in config.emit:
        written.append(_write(out / f"{stem}.csv", report_to_csv(report)))
    if "plotdata" in config.emit:
        written.append(_write(out / f"{stem}.plot.csv", report_to_plot_csv(report)))
    logger.info(f"Отчёт {report.name} записан: {', '.join(p.name for p in written)}")
    return written
