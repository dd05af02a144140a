import functools
import json
import logging
from typing import Any, Callable, Dict

import pandas as pd

from src import __version__

# Настройка логирования
logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

SCHEMA = "iwasawa-report/1"


def render_report(report: Dict[str, Any]) -> str:
    """Каноническая сериализация отчёта: одинаковый отчёт даёт одинаковые байты."""
    return json.dumps(report, sort_keys=True, indent=4, ensure_ascii=False) + "\n"


def report_to_file(default_filename: str = "report.json") -> Callable:
    """
    Декоратор: результат функции записывается в файл.

    Имя файла передаётся именованным аргументом filename. DataFrame пишется
    построчным JSON, всё остальное - через render_report.
    """

    def decorator(func: Callable) -> Callable:
        @functools.wraps(func)
        def wrapper(*args: Any, **kwargs: Any) -> Any:
            filename = kwargs.pop("filename", default_filename)
            result = func(*args, **kwargs)
            with open(filename, "w", encoding="utf-8") as f:
                if isinstance(result, pd.DataFrame):
                    result.to_json(f, orient="records", lines=True, force_ascii=False)
                else:
                    f.write(render_report(result))
            logging.info(f"Отчёт сохранён в {filename}")
            return result

        return wrapper

    return decorator


def assemble_report(command: str, config: Dict[str, Any], result: Dict[str, Any]) -> Dict[str, Any]:
    """
    Собирает документ отчёта.

    :param command: Имя команды.
    :param config: Действующая конфигурация.
    :param result: Результат обработчика (или {"error": ...}).
    :return: Словарь со схемой, версией, конфигурацией, результатом и статусом.
    """
    return {
        "schema": SCHEMA,
        "version": __version__,
        "command": command,
        "config": config,
        "result": result,
        "status": "error" if "error" in result else "ok",
    }


@report_to_file()
def write_report(command: str, config: Dict[str, Any], result: Dict[str, Any]) -> Dict[str, Any]:
    return assemble_report(command, config, result)


@report_to_file("checks.jsonl")
def export_table(frame: pd.DataFrame) -> pd.DataFrame:
    """Таблица (например, результаты selftest) в построчном JSON."""
    return frame


def summary_frame(result: Dict[str, Any]) -> pd.DataFrame:
    """
    Табличное представление результата для вывода в консоль.

    Результат selftest уже содержит таблицу checks; остальные результаты
    разворачиваются в пары поле/значение.
    """
    if isinstance(result.get("checks"), list):
        return pd.DataFrame(result["checks"])
    flat = pd.json_normalize(result, sep=".")
    if flat.empty:
        return pd.DataFrame(columns=["field", "value"])
    row = flat.iloc[0]
    return pd.DataFrame({"field": list(flat.columns), "value": [str(row[c]) for c in flat.columns]})


def summarize(report: Dict[str, Any]) -> str:
    """Краткая человекочитаемая сводка отчёта."""
    header = f"{report['command']} [{report['status']}] версия {report['version']}"
    frame = summary_frame(report["result"])
    if frame.empty:
        return header
    return header + "\n" + frame.to_string(index=False)
