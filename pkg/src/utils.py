import json
import logging
import os
from dataclasses import asdict, dataclass, fields
from typing import Any, Dict, List, Optional, Tuple

from dotenv import load_dotenv

from src.finite_level import (
    GL2ModElement,
    IdealData,
    enumerate_group,
    generate_subgroup,
    reduction_kernel,
    unipotent_u,
)
from src.padic_core import PrecisionContext
from src.torus_characters import TorusCharacter, character_from_dict, load_character

# Загружаем переменные окружения из файла .env
load_dotenv()

# Настройка логирования
logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

SETTINGS_FILENAME = "user_settings.json"
CONFIG_DIR_ENV = "IWASAWA_CONFIG_DIR"
ROOT_DIR = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))

SUBGROUPS = ("unipotent", "kernel")
NILPOTENCY_MODES = ("char_p", "pi_containment")


@dataclass(frozen=True)
class RunConfig:
    """Действующая конфигурация запуска: CLI поверх файла настроек поверх значений по умолчанию."""

    p: int = 3
    prec: int = 16
    trunc: int = 64
    level: int = 1
    characters: Tuple[str, ...] = ()
    k: int = 1
    ell: int = 1
    samples: Optional[Tuple[int, ...]] = None
    generations: int = 3
    seed: int = 0
    subgroup: str = "unipotent"
    mode: str = "char_p"
    matrix: Optional[Tuple[Tuple[int, ...], ...]] = None
    out: str = "report.json"
    log_level: str = "INFO"

    def __post_init__(self) -> None:
        if self.level < 1:
            raise ValueError(f"Уровень должен быть не меньше 1, получено {self.level}")
        if self.subgroup not in SUBGROUPS:
            raise ValueError(f"Неизвестная подгруппа {self.subgroup!r}, допустимы {', '.join(SUBGROUPS)}")
        if self.mode not in NILPOTENCY_MODES:
            raise ValueError(f"Неизвестный режим {self.mode!r}, допустимы {', '.join(NILPOTENCY_MODES)}")

    @classmethod
    def from_dict(cls, data: Dict[str, Any]) -> "RunConfig":
        """Строит конфигурацию из словаря; неизвестные ключи отвергаются."""
        known = {f.name for f in fields(cls)}
        unknown = sorted(set(data) - known)
        if unknown:
            raise ValueError(f"Неизвестные параметры конфигурации: {', '.join(unknown)}")
        values = dict(data)
        if values.get("characters") is not None:
            values["characters"] = tuple(str(c) for c in values["characters"])
        if values.get("samples") is not None:
            values["samples"] = tuple(int(a) for a in values["samples"])
        if values.get("matrix") is not None:
            values["matrix"] = tuple(tuple(int(x) for x in row) for row in values["matrix"])
        return cls(**values)

    def to_dict(self) -> Dict[str, Any]:
        data = asdict(self)
        data["characters"] = list(self.characters)
        data["samples"] = None if self.samples is None else list(self.samples)
        data["matrix"] = None if self.matrix is None else [list(row) for row in self.matrix]
        return data

    def context(self) -> PrecisionContext:
        return PrecisionContext(self.p, self.prec, self.trunc)


def config_dir() -> str:
    """Каталог с user_settings.json: переменная окружения IWASAWA_CONFIG_DIR или корень проекта."""
    return os.getenv(CONFIG_DIR_ENV) or ROOT_DIR


def load_settings(directory: Optional[str] = None) -> Dict[str, Any]:
    """
    Читает файл настроек пользователя.

    :param directory: Каталог с файлом; по умолчанию config_dir().
    :return: Словарь настроек (пустой, если файла нет или он пуст).
    """
    path = os.path.join(directory or config_dir(), SETTINGS_FILENAME)
    if not os.path.exists(path):
        logging.info(f"Файл настроек {path} не найден, используются значения по умолчанию")
        return {}
    with open(path, "r", encoding="utf-8") as file:
        text = file.read().strip()
    if not text:
        return {}
    data = json.loads(text)
    if not isinstance(data, dict):
        raise ValueError(f"Файл настроек {path} должен содержать JSON-объект")
    logging.info(f"Настройки загружены из {path}")
    return data


def build_config(overrides: Dict[str, Any], directory: Optional[str] = None) -> RunConfig:
    """Сливает настройки из файла с параметрами командной строки; значения None не переопределяют."""
    merged = load_settings(directory)
    merged.update({key: value for key, value in overrides.items() if value is not None})
    return RunConfig.from_dict(merged)


def setup_logging(level: str) -> None:
    numeric = getattr(logging, level.upper(), None)
    if not isinstance(numeric, int):
        raise ValueError(f"Неизвестный уровень логирования {level!r}")
    logging.getLogger().setLevel(numeric)


def resolve_character(ctx: PrecisionContext, text: str) -> TorusCharacter:
    """Путь к JSON-описанию характера либо замкнутая форма вида `a^m1 d^m2`."""
    if os.path.exists(text):
        return load_character(ctx, text)
    return character_from_dict(ctx, {"closed_form": text})


def resolve_characters(config: RunConfig, ctx: PrecisionContext, count: int = 1) -> List[TorusCharacter]:
    """Первые count характеров конфигурации; недостающие заменяются тривиальным."""
    result = [resolve_character(ctx, text) for text in config.characters[:count]]
    while len(result) < count:
        result.append(TorusCharacter.trivial(ctx))
    return result


def resolve_subgroup(config: RunConfig) -> Tuple[List[GL2ModElement], IdealData]:
    """
    Объемлющая группа и идеал I_H для команд nilpotency и nakayama.

    unipotent: G = H = <u> порядка p^level; kernel: H - ядро приведения в GL2(Z/p^level).
    """
    p, level = config.p, config.level
    if config.subgroup == "unipotent":
        u = unipotent_u(p, level)
        return sorted(generate_subgroup([u], p, level)), IdealData((u,))
    kernel = [g for g in reduction_kernel(p, level) if not g.is_identity()]
    return enumerate_group(p, level), IdealData(tuple(kernel))
