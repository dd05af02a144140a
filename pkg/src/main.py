import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional, Sequence

import pandas as pd

from src.reports import export_table, summarize, write_report
from src.utils import NILPOTENCY_MODES, SUBGROUPS, RunConfig, build_config, setup_logging
from src.views import PAGES


def _int_list(text: str) -> List[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"Ожидался список целых через запятую, получено {text!r}")


def _matrix(text: str) -> List[List[int]]:
    try:
        rows = json.loads(text)
    except json.JSONDecodeError as e:
        raise argparse.ArgumentTypeError(f"Матрица должна быть JSON-списком строк: {e}")
    if not isinstance(rows, list) or not all(isinstance(row, list) for row in rows):
        raise argparse.ArgumentTypeError("Матрица должна быть списком строк")
    return rows


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="iwasawa", description="Эксперименты с модулями над алгебрами Ивасавы")
    parser.add_argument("command", choices=sorted(PAGES))
    parser.add_argument("--p", type=int, help="простое p")
    parser.add_argument("--prec", type=int, help="точность N в p-адических цифрах")
    parser.add_argument("--trunc", type=int, help="степень усечения рядов M")
    parser.add_argument("--level", type=int, help="уровень n для конечных групп")
    parser.add_argument("--char", dest="characters", action="append", help="файл характера или форма `a^m1 d^m2`")
    parser.add_argument("--k", type=int, help="образующий ω_(p^k)")
    parser.add_argument("--ell", type=int, help="степень образующего")
    parser.add_argument("--samples", type=_int_list, help="выборка элементов тора через запятую")
    parser.add_argument("--generations", type=int, help="число поколений пробы простоты")
    parser.add_argument("--seed", type=int, help="зерно генератора случайных чисел")
    parser.add_argument("--subgroup", choices=SUBGROUPS, help="подгруппа H для nilpotency и nakayama")
    parser.add_argument("--mode", choices=NILPOTENCY_MODES, help="режим nilpotency")
    parser.add_argument("--matrix", type=_matrix, help="матрица для duality, например [[1,0],[0,3]]")
    parser.add_argument("--out", help="файл отчёта")
    parser.add_argument("--log-level", dest="log_level", help="уровень логирования")
    return parser


def run(command: str, config: RunConfig) -> int:
    """
    Выполняет команду, пишет отчёт и печатает сводку.

    :param command: Имя команды.
    :param config: Действующая конфигурация.
    :return: Код завершения: 0 при полученном вердикте, 1 при ошибке.
    """
    if command not in PAGES:
        raise ValueError(f"Неизвестная команда {command!r}")
    result = PAGES[command](config)
    report = write_report(command, config.to_dict(), result, filename=config.out)
    print(summarize(report))
    if command == "selftest" and "checks" in result:
        stem, _ = os.path.splitext(config.out)
        export_table(pd.DataFrame(result["checks"]), filename=f"{stem}.checks.jsonl")
        if not result["passed"]:
            return 1
    return 1 if report["status"] == "error" else 0


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    overrides: Dict[str, Any] = {key: value for key, value in vars(args).items() if key != "command"}
    try:
        config = build_config(overrides)
        setup_logging(config.log_level)
    except (ValueError, TypeError) as e:
        logging.error(f"Некорректная конфигурация: {e}")
        return 1
    return run(args.command, config)


if __name__ == "__main__":
    sys.exit(main())
