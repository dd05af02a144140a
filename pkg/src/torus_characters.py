import json
import logging
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Any, Dict, Optional, Tuple, Union

from sympy.ntheory import discrete_log

from src.padic_core import PadicNumber, PrecisionContext, Scalar, pexp, plog, teichmuller

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

_EXP_IMAGE = re.compile(r"^exp\(c\*log\)\s+c=(.+)$")
_CLOSED_TOKEN = re.compile(r"^([ad])(?:\^(-?\d+))?$")
_RATIONAL = re.compile(r"^-?\d+(?:/\d+)?$")

# запас цифр при сверке значений, полученных через log/exp
VERIFY_LOSS = 3


class CharacterDataError(ValueError):
    """Некорректные данные характера тора."""


def torsion_generator(ctx: PrecisionContext) -> PadicNumber:
    """τ: подъём Тейхмюллера наименьшего первообразного корня; -1 при p = 2."""
    if ctx.p == 2:
        return ctx.number(-1)
    return teichmuller(ctx, ctx.primitive_root)


def principal_generator(ctx: PrecisionContext) -> PadicNumber:
    return ctx.number(1 + ctx.q)


def _torsion_order(ctx: PrecisionContext) -> int:
    return 2 if ctx.p == 2 else ctx.p - 1


def _principal_depth(ctx: PrecisionContext) -> int:
    return 2 if ctx.p == 2 else 1


def decompose_unit(ctx: PrecisionContext, unit: Scalar) -> Tuple[int, PadicNumber]:
    """
    Раскладывает единицу Z_p как τ^i * (1 + q)^s.

    :param ctx: Контекст точности.
    :param unit: Единица Z_p.
    :return: Пара (i, s), s из Z_p.
    """
    unit = ctx.number(unit)
    if not unit.is_unit:
        raise ValueError(f"{unit.to_text()} не является единицей Z_p")
    residue_modulus = 4 if ctx.p == 2 else ctx.p
    residue = unit.to_integer() % residue_modulus
    if ctx.p == 2:
        index = 0 if residue == 1 else 1
    else:
        index = int(discrete_log(ctx.p, residue, ctx.primitive_root))
    principal = unit / (torsion_generator(ctx) ** index)
    s = plog(principal) / plog(principal_generator(ctx))
    return index, s


def _power(eta: PadicNumber, s: PadicNumber) -> PadicNumber:
    # η^s = exp(s log η) для η из главных единиц
    return pexp(s * plog(eta))


@dataclass(frozen=True)
class TorusCharacter:
    """
    Непрерывный характер χ: T -> o^x диагонального тора, заданный образами образующих.

    torsion_i: образ τ на i-й диагональной позиции, principal_i: образ 1 + q.
    """

    ctx: PrecisionContext
    torsion_1: PadicNumber
    torsion_2: PadicNumber
    principal_1: PadicNumber
    principal_2: PadicNumber
    conductor_hint: Optional[int] = None

    def __post_init__(self) -> None:
        order = _torsion_order(self.ctx)
        for name in ("torsion_1", "torsion_2"):
            zeta = getattr(self, name)
            if not zeta.is_unit or not (zeta ** order).agrees_with(1):
                raise CharacterDataError(f"{name} = {zeta.to_text()} не является корнем из единицы степени {order}")
        depth = _principal_depth(self.ctx)
        for name in ("principal_1", "principal_2"):
            eta = getattr(self, name)
            shifted = eta - 1
            if not eta.is_unit or (not shifted.is_zero and shifted.valuation < depth):
                raise CharacterDataError(f"{name} = {eta.to_text()} не лежит в 1 + {self.ctx.q}Z_{self.ctx.p}")

    @classmethod
    def trivial(cls, ctx: PrecisionContext) -> "TorusCharacter":
        one = ctx.one()
        return cls(ctx, one, one, one, one, 0)

    @classmethod
    def from_exponents(cls, ctx: PrecisionContext, m1: int, m2: int) -> "TorusCharacter":
        """Характер diag(a, d) -> a^m1 d^m2."""
        tau = torsion_generator(ctx)
        eta = principal_generator(ctx)
        return cls(ctx, tau ** m1, tau ** m2, eta ** m1, eta ** m2)

    @classmethod
    def from_torsion(cls, ctx: PrecisionContext, k1: int, k2: int) -> "TorusCharacter":
        """Характер конечного порядка, тривиальный на главных единицах."""
        tau = torsion_generator(ctx)
        one = ctx.one()
        return cls(ctx, tau ** k1, tau ** k2, one, one, 1 if (k1, k2) != (0, 0) else 0)

    @classmethod
    def from_c(cls, ctx: PrecisionContext, c: Scalar) -> "TorusCharacter":
        """Характер с образом exp(c log(1 + q)) на второй главной образующей; c(χ) = c."""
        c = ctx.number(c)
        if not c.is_exact_zero and c.valuation < 0:
            raise CharacterDataError(f"c = {c.to_text()} не лежит в Z_p")
        one = ctx.one()
        return cls(ctx, one, one, one, pexp(c * plog(principal_generator(ctx))))

    def images(self) -> Tuple[PadicNumber, PadicNumber, PadicNumber, PadicNumber]:
        return self.torsion_1, self.torsion_2, self.principal_1, self.principal_2

    def product(self, other: "TorusCharacter") -> "TorusCharacter":
        pairs = [a * b for a, b in zip(self.images(), other.images())]
        return TorusCharacter(self.ctx, *pairs)

    def inverse(self) -> "TorusCharacter":
        return TorusCharacter(self.ctx, *[1 / a for a in self.images()], conductor_hint=self.conductor_hint)

    def agrees_with(self, other: "TorusCharacter", loss: int = 0) -> bool:
        return all(a.agrees_with(b, loss) for a, b in zip(self.images(), other.images()))

    def is_trivial(self) -> bool:
        return all(a.agrees_with(1) for a in self.images())

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.ctx.p,
            "torsion_1": self.torsion_1.to_text(),
            "torsion_2": self.torsion_2.to_text(),
            "principal_1": self.principal_1.to_text(),
            "principal_2": self.principal_2.to_text(),
            "conductor_hint": self.conductor_hint,
        }


def _eval_component(ctx: PrecisionContext, zeta: PadicNumber, eta: PadicNumber, unit: Scalar) -> PadicNumber:
    index, s = decompose_unit(ctx, unit)
    return (zeta ** index) * _power(eta, s)


def char_eval(chi: TorusCharacter, a: Scalar, d: Scalar) -> PadicNumber:
    """
    Значение χ(diag(a, d)).

    :param chi: Характер тора.
    :param a: Левый верхний элемент, единица Z_p.
    :param d: Правый нижний элемент, единица Z_p.
    :return: Единица o.
    """
    ctx = chi.ctx
    return _eval_component(ctx, chi.torsion_1, chi.principal_1, a) * _eval_component(
        ctx, chi.torsion_2, chi.principal_2, d
    )


@dataclass(frozen=True)
class CInvariant:
    c: PadicNumber
    derivation_precision: int

    def to_dict(self) -> Dict[str, Any]:
        return {"c": self.c.to_text(), "derivation_precision": self.derivation_precision}


def _sample_points(ctx: PrecisionContext) -> Tuple[int, ...]:
    q = ctx.q
    return 1 + q, 1 + 2 * q, 1 + q * q


def c_of_chi(chi: TorusCharacter) -> CInvariant:
    """
    Инвариант c(χ): χ(diag(a^-1, a)) = exp(c log a) для a из 1 + qZ_p.

    Полученное значение проверяется подстановкой в трёх точках.
    """
    ctx = chi.ctx
    c = (plog(chi.principal_2) - plog(chi.principal_1)) / plog(principal_generator(ctx))
    if not c.is_zero and c.valuation < 0:
        raise CharacterDataError(f"c(χ) = {c.to_text()} не лежит в Z_p")
    for a in _sample_points(ctx):
        expected = char_eval(chi, ctx.one() / a, a)
        candidate = pexp(c * plog(ctx.number(a)))
        if not expected.agrees_with(candidate, VERIFY_LOSS):
            raise CharacterDataError(f"Проверка c(χ) не прошла в точке a = {a}")
    precision = int(c.absolute_precision) if not c.is_exact_zero else ctx.N
    return CInvariant(c, precision)


def w_twist(chi: TorusCharacter) -> TorusCharacter:
    """wχ(t) = χ(w^-1 t w): образы на двух диагональных позициях меняются местами."""
    return TorusCharacter(chi.ctx, chi.torsion_2, chi.torsion_1, chi.principal_2, chi.principal_1,
                          chi.conductor_hint)


@dataclass(frozen=True)
class CClassification:
    in_n0: Optional[int]
    in_neg_n0: Optional[int]
    bound: int
    precision: int

    @property
    def verdict(self) -> str:
        return "in_N0" if self.in_n0 is not None else "not_in_N0_within_precision"

    @property
    def negative_verdict(self) -> str:
        return "in_neg_N0" if self.in_neg_n0 is not None else "not_in_neg_N0_within_precision"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "in_N0_at": self.in_n0,
            "negative_verdict": self.negative_verdict,
            "in_neg_N0_at": self.in_neg_n0,
            "bound": self.bound,
            "precision": self.precision,
        }


def classify_c(c: CInvariant, bound: int) -> CClassification:
    """
    Трихотомия: c ≡ m для m из [0, bound], c ≡ -m, либо совпадений нет при данной точности.

    :param c: Инвариант c(χ).
    :param bound: Граница поиска; должна быть меньше p^precision.
    """
    value = c.c
    p = value.p
    if value.is_exact_zero:
        return CClassification(0, 0, bound, c.derivation_precision)
    precision = int(value.absolute_precision)
    if value.valuation < 0:
        return CClassification(None, None, bound, precision)
    if bound < 0 or bound >= p ** precision:
        raise ValueError(f"Граница {bound} должна лежать в [0, {p}^{precision})")
    modulus = p ** precision
    residue = value.to_integer() % modulus
    positive = residue if residue <= bound else None
    negative = (modulus - residue) % modulus
    negative_match = negative if negative <= bound else None
    return CClassification(positive, negative_match, bound, precision)


def char_conductor(chi: TorusCharacter) -> Optional[int]:
    """
    Наименьший уровень n, на котором χ тривиален на 1 + p^n Z_p, определённый с точностью N.

    0 для тривиального характера, None если уровень больше N - 1.
    """
    ctx = chi.ctx
    if chi.is_trivial():
        return 0
    torsion_trivial = chi.torsion_1.agrees_with(1) and chi.torsion_2.agrees_with(1)
    etas = [chi.principal_1, chi.principal_2]
    if all(eta.agrees_with(1) for eta in etas) and (ctx.p != 2 or torsion_trivial):
        return 1
    start = 2 if ctx.p == 2 else 1
    powers = etas
    for level in range(start, ctx.N):
        if all(eta.agrees_with(1) for eta in powers):
            return level
        powers = [eta ** ctx.p for eta in powers]
    return None


def conductor_text(ctx: PrecisionContext, level: Optional[int]) -> str:
    return f"> {ctx.N}" if level is None else str(level)


def _parse_closed_form(ctx: PrecisionContext, text: str) -> TorusCharacter:
    m1 = m2 = 0
    for token in text.split():
        if token == "1":
            continue
        match = _CLOSED_TOKEN.match(token)
        if not match:
            raise CharacterDataError(f"Не удалось разобрать замкнутую форму {text!r}")
        exponent = int(match.group(2) or 1)
        if match.group(1) == "a":
            m1 += exponent
        else:
            m2 += exponent
    return TorusCharacter.from_exponents(ctx, m1, m2)


def _parse_scalar(ctx: PrecisionContext, text: str) -> PadicNumber:
    # целое или дробь вида 1/2, иначе текстовый p-адический вид
    text = text.strip()
    if _RATIONAL.match(text):
        return ctx.number(Fraction(text))
    return ctx.number(text)


def _parse_image(ctx: PrecisionContext, text: str, principal: bool) -> PadicNumber:
    match = _EXP_IMAGE.match(text.strip())
    if match:
        if not principal:
            raise CharacterDataError("Форма exp(c*log) допустима только для главных образующих")
        c = _parse_scalar(ctx, match.group(1))
        return pexp(c * plog(principal_generator(ctx)))
    return _parse_scalar(ctx, text)


def character_from_dict(ctx: PrecisionContext, data: Dict[str, Any]) -> TorusCharacter:
    """
    Строит характер из словаря файла описания.

    Допустимы ключи closed_form (`a^m1 d^m2`) либо четыре образа
    torsion_1, torsion_2, principal_1, principal_2: целое, дробь, текстовый
    p-адический вид или `exp(c*log) c=<число>`.
    """
    if int(data.get("p", ctx.p)) != ctx.p:
        raise CharacterDataError(f"Характер задан для p = {data.get('p')}, а вычисление ведётся при p = {ctx.p}")
    try:
        if "closed_form" in data:
            return _parse_closed_form(ctx, str(data["closed_form"]))
        images = [
            _parse_image(ctx, str(data[name]), name.startswith("principal"))
            for name in ("torsion_1", "torsion_2", "principal_1", "principal_2")
        ]
    except CharacterDataError:
        raise
    except KeyError as e:
        raise CharacterDataError(f"В описании характера нет поля {e}")
    except (ValueError, TypeError) as e:
        raise CharacterDataError(f"Некорректное описание характера: {e}")
    hint = data.get("conductor_hint")
    return TorusCharacter(ctx, *images, conductor_hint=None if hint is None else int(hint))


def load_character(ctx: PrecisionContext, path: str) -> TorusCharacter:
    logging.info(f"Чтение описания характера из {path}")
    with open(path, "r", encoding="utf-8") as file:
        data = json.load(file)
    return character_from_dict(ctx, data)


def dump_character(chi: TorusCharacter, path: Union[str, None] = None) -> str:
    """Сериализует характер явными образами; при указании path пишет файл."""
    text = json.dumps(chi.to_dict(), indent=4, sort_keys=True, ensure_ascii=False)
    if path is not None:
        with open(path, "w", encoding="utf-8") as file:
            file.write(text)
        logging.info(f"Описание характера сохранено в {path}")
    return text
