import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from src.padic_core import (
    INFINITY,
    PadicNumber,
    PrecisionContext,
    PrecisionError,
    Scalar,
    dot,
    pbinomial,
)

NEG_INFINITY = -math.inf

Floor = Union[int, float]

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")


class UndeterminedError(ArithmeticError):
    """Ответ не определяется при данной степени усечения и точности."""


def _floor_sum(a: Floor, b: Floor) -> Floor:
    if a == INFINITY or b == INFINITY:
        return INFINITY
    return a + b


def _visible_floor(coeffs: Sequence[PadicNumber]) -> Floor:
    return min((c.valuation for c in coeffs if not c.is_exact_zero), default=INFINITY)


def _order(coeffs: Sequence[PadicNumber]) -> int:
    for index, c in enumerate(coeffs):
        if not c.is_exact_zero:
            return index
    return len(coeffs)


@dataclass(frozen=True)
class TruncatedSeries:
    """
    Ряд F(x) = sum f_k x^k по модулю x^M с коэффициентами из Q_p; x играет роль γ - 1.

    valuation_floor: нижняя оценка нормирований всех коэффициентов
    (-inf для формально неограниченных рядов, +inf для нулевого ряда).
    """

    ctx: PrecisionContext
    coeffs: Tuple[PadicNumber, ...]
    valuation_floor: Floor = field(default=NEG_INFINITY)

    def __post_init__(self) -> None:
        if len(self.coeffs) != self.ctx.M:
            raise ValueError(f"Ожидалось {self.ctx.M} коэффициентов, получено {len(self.coeffs)}")

    @classmethod
    def build(cls, ctx: PrecisionContext, values: Sequence[Union[Scalar, str]],
              floor: Optional[Floor] = None) -> "TruncatedSeries":
        """
        Собирает ряд из коэффициентов, дополняя нулями или обрезая до длины M.

        :param ctx: Контекст точности.
        :param values: Коэффициенты, младший первым.
        :param floor: Заявленная нижняя граница нормирований; уточняется видимыми коэффициентами.
        :return: Усечённый ряд.
        """
        coeffs = [ctx.number(v) for v in list(values)[: ctx.M]]
        coeffs += [ctx.zero()] * (ctx.M - len(coeffs))
        visible = _visible_floor(coeffs)
        bound = visible if floor is None else min(floor, visible)
        return cls(ctx, tuple(coeffs), bound)

    @classmethod
    def constant(cls, ctx: PrecisionContext, value: Scalar) -> "TruncatedSeries":
        return cls.build(ctx, [value])

    @classmethod
    def variable(cls, ctx: PrecisionContext) -> "TruncatedSeries":
        return cls.build(ctx, [0, 1])

    @property
    def is_exact_zero(self) -> bool:
        return all(c.is_exact_zero for c in self.coeffs)

    @property
    def is_bounded(self) -> bool:
        return self.valuation_floor > NEG_INFINITY

    def coefficient(self, k: int) -> PadicNumber:
        return self.coeffs[k]

    def _with(self, coeffs: Sequence[PadicNumber], floor: Floor) -> "TruncatedSeries":
        bound = min(floor, _visible_floor(coeffs))
        return TruncatedSeries(self.ctx, tuple(coeffs), bound)

    def _check_ctx(self, other: "TruncatedSeries") -> None:
        if other.ctx != self.ctx:
            raise ValueError("Ряды построены в разных контекстах точности")

    def __add__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_ctx(other)
        coeffs = [a + b for a, b in zip(self.coeffs, other.coeffs)]
        return self._with(coeffs, min(self.valuation_floor, other.valuation_floor))

    def __neg__(self) -> "TruncatedSeries":
        return self._with([-c for c in self.coeffs], self.valuation_floor)

    def __sub__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        return self + (-other)

    def __mul__(self, other: "TruncatedSeries") -> "TruncatedSeries":
        self._check_ctx(other)
        size = self.ctx.M
        first, second = _order(self.coeffs), _order(other.coeffs)
        coeffs = []
        for k in range(size):
            if k < first + second:
                coeffs.append(self.ctx.zero())
                continue
            left = self.coeffs[first: k - second + 1]
            right = other.coeffs[k - first: second - 1 if second else None: -1]
            coeffs.append(dot(left, right))
        return self._with(coeffs, _floor_sum(self.valuation_floor, other.valuation_floor))

    def scale(self, c: Scalar) -> "TruncatedSeries":
        """Умножение на скаляр поля K."""
        c = self.ctx.number(c)
        if c.is_exact_zero:
            return TruncatedSeries.build(self.ctx, [])
        return self._with([c * a for a in self.coeffs], _floor_sum(self.valuation_floor, c.valuation))

    def inverse(self) -> "TruncatedSeries":
        """
        Обратный ряд по модулю x^M.

        Требует ненулевого свободного члена; граница нормирований сохраняется,
        только если F / f_0 лежит в 1 + x o[[x]].
        """
        head = self.coeffs[0]
        if head.is_exact_zero:
            raise ZeroDivisionError("Ряд с нулевым свободным членом необратим")
        if head.known_precision == 0:
            raise PrecisionError(f"Свободный член {head.to_text()} равен нулю в пределах точности")
        inverse_head = 1 / head
        result = [inverse_head]
        for k in range(1, self.ctx.M):
            acc = dot(self.coeffs[1: k + 1], result[::-1])
            result.append(-(acc * inverse_head))
        if self.valuation_floor >= head.valuation:
            floor: Floor = -head.valuation
        else:
            floor = NEG_INFINITY
        return self._with(result, floor)

    def compose(self, inner: "TruncatedSeries") -> "TruncatedSeries":
        """F(G(x)) по модулю x^M; свободный член G должен быть нулевым."""
        self._check_ctx(inner)
        if not inner.coeffs[0].is_zero:
            raise ValueError(f"Подстановка требует нулевого свободного члена, получено {inner.coeffs[0].to_text()}")
        inner = TruncatedSeries(self.ctx, (self.ctx.zero(),) + inner.coeffs[1:], inner.valuation_floor)
        if inner.valuation_floor >= 0:
            floor = self.valuation_floor
        else:
            floor = NEG_INFINITY
        result = TruncatedSeries.constant(self.ctx, self.coeffs[0])
        power = TruncatedSeries.constant(self.ctx, 1)
        for k in range(1, self.ctx.M):
            power = power * inner
            if power.is_exact_zero:
                break
            if self.coeffs[k].is_exact_zero:
                continue
            result = result + power.scale(self.coeffs[k])
        return self._with(result.coeffs, floor)

    def agrees_with(self, other: "TruncatedSeries", loss: int = 0) -> bool:
        return all(a.agrees_with(b, loss) for a, b in zip(self.coeffs, other.coeffs))

    def valuation_profile(self) -> Dict[int, Optional[int]]:
        """Индекс -> нормирование; None для точного нуля."""
        return {k: None if c.is_exact_zero else int(c.valuation) for k, c in enumerate(self.coeffs)}

    def min_absolute_precision(self) -> Floor:
        return min(c.absolute_precision for c in self.coeffs)


_SERIES_OPERATIONS = ("add", "sub", "mul")


def series_arith(F: TruncatedSeries, G: TruncatedSeries, op: str) -> TruncatedSeries:
    if op == "add":
        return F + G
    if op == "sub":
        return F - G
    if op == "mul":
        return F * G
    raise ValueError(f"Неизвестная операция над рядами {op!r}, допустимы {_SERIES_OPERATIONS}")


def series_compose(F: TruncatedSeries, G: TruncatedSeries) -> TruncatedSeries:
    return F.compose(G)


def omega_sub(ctx: PrecisionContext, a: Scalar) -> TruncatedSeries:
    """
    Ряд ω_a(x) = (1 + x)^a - 1 с коэффициентами C(a, n).

    :param ctx: Контекст точности.
    :param a: Единица Z_p; целый неединичный a допускается с предупреждением.
    :return: Ряд с нулевым свободным членом и границей нормирований 0.
    """
    a = ctx.number(a)
    if a.is_exact_zero or a.valuation < 0:
        raise ValueError(f"omega_sub: {a.to_text()} не является элементом Z_p \\ {{0}}")
    if a.valuation > 0:
        logging.warning(f"omega_sub: аргумент {a.to_text()} не является единицей")
    coeffs = [ctx.zero()] + [pbinomial(a, n) for n in range(1, ctx.M)]
    return TruncatedSeries.build(ctx, coeffs, 0)


@dataclass(frozen=True)
class DistinguishedData:
    """
    Результат подготовки Вейерштрасса: F = p^mu * P * U.

    distinguished_part: коэффициенты P младшим первым, старший равен 1.
    """

    weierstrass_degree: int
    distinguished_part: Tuple[PadicNumber, ...]
    unit_cofactor_valid_to: int
    valid_mod_degree: int
    mu_invariant: int = 0
    unit_cofactor: Optional[TruncatedSeries] = None

    def __post_init__(self) -> None:
        if len(self.distinguished_part) != self.weierstrass_degree + 1:
            raise ValueError("Степень различённого многочлена не совпадает с числом коэффициентов")
        if not self.distinguished_part[-1].agrees_with(1):
            raise ValueError("Различённый многочлен должен быть унитарным")
        for c in self.distinguished_part[:-1]:
            if not c.is_zero and c.valuation < 1:
                raise ValueError(f"Младший коэффициент {c.to_text()} не делится на p")

    def as_series(self, ctx: PrecisionContext) -> TruncatedSeries:
        return TruncatedSeries.build(ctx, self.distinguished_part, 0)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "weierstrass_degree": self.weierstrass_degree,
            "distinguished_part": [c.to_text() for c in self.distinguished_part],
            "unit_cofactor_valid_to": self.unit_cofactor_valid_to,
            "valid_mod_degree": self.valid_mod_degree,
            "mu_invariant": self.mu_invariant,
        }


def _shift_down(F: TruncatedSeries, d: int) -> TruncatedSeries:
    # τ_d: sum a_i x^i -> sum_{i >= d} a_i x^(i-d)
    return TruncatedSeries.build(F.ctx, F.coeffs[d:], F.valuation_floor)


def _leading_index(F: TruncatedSeries) -> Tuple[int, int]:
    known = [c.valuation for c in F.coeffs if not c.is_zero]
    if not known:
        raise UndeterminedError(f"Все коэффициенты равны нулю в пределах точности до x^{F.ctx.M}")
    mu = int(min(known))
    for index, c in enumerate(F.coeffs):
        if c.is_zero:
            if c.absolute_precision <= mu:
                raise UndeterminedError(f"Коэффициент при x^{index} неизвестен на уровне p^{mu}")
            continue
        if c.valuation == mu:
            return index, mu
    raise UndeterminedError("Не найден коэффициент минимального нормирования")


def weierstrass_data(F: TruncatedSeries) -> DistinguishedData:
    """
    Подготовка Вейерштрасса последовательными приближениями.

    F / p^mu = A + x^d B, где deg A < d, A делится на p, B обратим.
    Единица y = (1 + S)^(-1) 1 для сжимающего S(y) = τ_d(A B^(-1) y) даёт
    q = y B^(-1), для которого q F / p^mu = P, P = x^d + (q A mod x^d).

    :param F: Ограниченный усечённый ряд.
    :return: DistinguishedData с точностью, на которой верно разложение.
    """
    if not F.is_bounded:
        raise ValueError("Подготовка Вейерштрасса определена только для ограниченных рядов")
    ctx = F.ctx
    d, mu = _leading_index(F)
    normalized = F.scale(ctx.number(ctx.p) ** (-mu)) if mu else F
    if d == 0:
        return DistinguishedData(0, (ctx.one(),), ctx.N, ctx.M, mu, normalized)
    if 2 * d >= ctx.M:
        raise UndeterminedError(f"Степень Вейерштрасса {d} слишком велика для усечения x^{ctx.M}")

    lower = TruncatedSeries.build(ctx, normalized.coeffs[:d], 0)
    upper_inverse = _shift_down(normalized, d).inverse()
    contraction = lower * upper_inverse
    iterations = min(ctx.N - 1, (ctx.M - 2 * d) // d)

    term = TruncatedSeries.constant(ctx, 1)
    total = term
    converged_to: Optional[Floor] = None
    for _ in range(iterations):
        term = -_shift_down(contraction * term, d)
        total = total + term
        if all(c.is_zero for c in term.coeffs) and term.min_absolute_precision() > iterations:
            # дальнейшие члены получаются умножением на целый ряд и остаются нулями до той же точности
            converged_to = term.min_absolute_precision()
            break
    quotient = total * upper_inverse
    product = quotient * lower
    valid_to = iterations + 1 if converged_to is None else int(min(ctx.N, converged_to))
    part = tuple(c.reduce_precision(valid_to) for c in product.coeffs[:d]) + (ctx.one(),)
    logging.info(f"Подготовка Вейерштрасса: степень {d}, mu = {mu}, итераций {iterations}")
    return DistinguishedData(d, part, valid_to, ctx.M - d * (iterations + 1), mu, quotient.inverse())


def _poly_trim(poly: List[PadicNumber]) -> List[PadicNumber]:
    while poly and poly[-1].is_zero:
        poly = poly[:-1]
    return poly


def _poly_monic(poly: List[PadicNumber]) -> List[PadicNumber]:
    lead = poly[-1]
    return [c / lead for c in poly[:-1]] + [lead / lead]


def _poly_rem(a: List[PadicNumber], b: List[PadicNumber]) -> List[PadicNumber]:
    # b унитарный
    rest = list(a)
    degree = len(b) - 1
    for top in range(len(rest) - 1, degree - 1, -1):
        coefficient = rest[top]
        if coefficient.is_exact_zero:
            continue
        shift = top - degree
        for i, c in enumerate(b):
            rest[shift + i] = rest[shift + i] - coefficient * c
    return _poly_trim(rest[:degree])


@dataclass(frozen=True)
class GcdVerdict:
    verdict: str
    divisor: Optional[DistinguishedData] = None
    chain_degrees: Tuple[int, ...] = ()
    diagnostic: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "divisor": None if self.divisor is None else self.divisor.to_dict(),
            "chain_degrees": list(self.chain_degrees),
            "diagnostic": self.diagnostic,
        }


def _poly_gcd(a: List[PadicNumber], b: List[PadicNumber], chain: List[int]) -> List[PadicNumber]:
    if len(a) < len(b):
        a, b = b, a
    while b:
        remainder = _poly_rem(a, b)
        if not remainder:
            return b
        monic = _poly_monic(remainder)
        for c in monic:
            if not c.is_exact_zero and c.absolute_precision <= 0:
                raise PrecisionError(f"Остаток степени {len(monic) - 1} не содержит достоверных цифр")
        chain.append(len(monic) - 1)
        a, b = b, monic
    return a


def series_gcd_unit_test(gens: Sequence[TruncatedSeries]) -> GcdVerdict:
    """
    Проверяет, порождают ли ряды единичный идеал в o[[x]] ⊗ K.

    Каждый образующий заменяется своей различённой частью, затем
    НОД многочленов над Q_p ищется алгоритмом Евклида. Если хотя бы
    один образующий не определён, ответ unit_ideal остаётся возможным
    (его доказывают остальные), а общий делитель уже не утверждается.

    :param gens: Образующие идеала.
    :return: GcdVerdict с вердиктом unit_ideal, common_divisor или undetermined.
    """
    parts: List[List[PadicNumber]] = []
    skipped: List[str] = []
    for index, gen in enumerate(gens):
        try:
            data = weierstrass_data(gen)
        except UndeterminedError as e:
            logging.warning(f"Образующий #{index} не определён: {e}")
            skipped.append(f"#{index}: {e}")
            continue
        if data.weierstrass_degree == 0:
            return GcdVerdict("unit_ideal", None, (0,), f"образующий #{index} обратим")
        parts.append(list(data.distinguished_part))
    if not parts:
        return GcdVerdict("undetermined", None, (), "ни один образующий не определён при данной точности")

    parts.sort(key=len)
    chain = [len(parts[0]) - 1]
    gcd = parts[0]
    try:
        for poly in parts[1:]:
            gcd = _poly_gcd(gcd, poly, chain)
            if len(gcd) == 1:
                break
    except PrecisionError as e:
        return GcdVerdict("undetermined", None, tuple(chain), str(e))

    degree = len(gcd) - 1
    if degree == 0:
        return GcdVerdict("unit_ideal", None, tuple(chain), "НОД имеет степень 0")
    if skipped:
        # общий делитель определённых образующих может не делить пропущенные
        return GcdVerdict("undetermined", None, tuple(chain), "не определены образующие " + "; ".join(skipped))
    ctx = gens[0].ctx
    valid_to = min((int(c.absolute_precision) for c in gcd[:-1] if not c.is_exact_zero), default=ctx.N)
    try:
        divisor = DistinguishedData(degree, tuple(gcd), valid_to, ctx.M)
    except ValueError as e:
        return GcdVerdict("undetermined", None, tuple(chain), f"НОД не является различённым: {e}")
    return GcdVerdict("common_divisor", divisor, tuple(chain), f"общий делитель степени {degree}")


def log_series_power(ctx: PrecisionContext, m: int) -> TruncatedSeries:
    """[log(1 + x)]^m по модулю x^M."""
    if m < 0:
        raise ValueError(f"Показатель степени логарифма должен быть неотрицательным, получено {m}")
    result = TruncatedSeries.constant(ctx, 1)
    if m == 0:
        return TruncatedSeries.build(ctx, result.coeffs, 0)
    log_coeffs = [ctx.zero()] + [ctx.number((-1) ** (n + 1)) / n for n in range(1, ctx.M)]
    log_series = TruncatedSeries.build(ctx, log_coeffs, NEG_INFINITY)
    for _ in range(m):
        result = result * log_series
    return TruncatedSeries.build(ctx, result.coeffs, NEG_INFINITY)


@dataclass(frozen=True)
class BoundednessReport:
    verdict: str
    floor: Optional[int]
    evidence: Tuple[int, ...]
    profile: Dict[int, Optional[int]]

    @property
    def bounded(self) -> bool:
        return self.verdict == "bounded"

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "floor": self.floor,
            "evidence": list(self.evidence),
            "profile": {str(k): v for k, v in self.profile.items() if v is not None},
        }


def boundedness_floor(F: TruncatedSeries) -> BoundednessReport:
    """
    Сертификат ограниченности ряда.

    Для ряда с конечной границей возвращает её. Иначе ищет индексы,
    на которых нормирование коэффициентов ставит новый минимум (для log(1 + x)
    это p, p^2, ...); каждый такой индекс после первого служит свидетельством.
    """
    profile = F.valuation_profile()
    if F.is_bounded:
        floor = None if F.valuation_floor == INFINITY else int(F.valuation_floor)
        return BoundednessReport("bounded", floor, (), profile)
    records: List[int] = []
    lowest: Floor = INFINITY
    for index, c in enumerate(F.coeffs):
        if c.is_zero:
            continue
        if c.valuation < lowest:
            lowest = c.valuation
            records.append(index)
    evidence = tuple(records[1:])
    verdict = "unbounded" if evidence else "undetermined"
    return BoundednessReport(verdict, None, evidence, profile)
