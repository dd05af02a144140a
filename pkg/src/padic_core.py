import math
import operator
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Dict, List, Sequence, Union

from sympy import integer_log, isprime, multiplicity, primitive_root

INFINITY = math.inf

Scalar = Union["PadicNumber", int, Fraction]

_TEXT_ZERO = "0"
_TEXT_INEXACT = re.compile(r"^O\((\d+)\^(-?\d+)\)$")
_TEXT_FULL = re.compile(r"^(\d+)\^(-?\d+) \* \((.+)\) \+ O\((\d+)\^(-?\d+)\)$")
_TEXT_TERM = re.compile(r"^(\d+)(?:\*(\d+)(?:\^(\d+))?)?$")


class PrecisionError(ArithmeticError):
    """Точность исчерпана: у результата не осталось ни одной достоверной цифры."""


def _vp(value: int, p: int) -> int:
    if value % p:
        return 0
    return int(multiplicity(p, value))


def ilog(n: int, p: int) -> int:
    """Целая часть log_p(n) для n >= 1."""
    if n < 1:
        raise ValueError(f"ilog определён только для n >= 1, получено {n}")
    return int(integer_log(n, p)[0])


@dataclass(frozen=True)
class PadicNumber:
    """
    Элемент Q_p с явным нормированием и единицей, известной по модулю p^known_precision.

    Точный ноль хранится с valuation = INFINITY. Ноль «с точностью до p^K»
    хранится как valuation = K, unit = 0, known_precision = 0.
    Оператор == сравнивает представления побитово; численное совпадение
    проверяется методом agrees_with.
    """

    p: int
    cap: int
    valuation: Union[int, float]
    unit: int
    known_precision: int

    @property
    def is_exact_zero(self) -> bool:
        return self.valuation == INFINITY

    @property
    def is_zero(self) -> bool:
        """Точный ноль или ноль в пределах известной точности."""
        return self.is_exact_zero or self.known_precision == 0

    @property
    def absolute_precision(self) -> Union[int, float]:
        return self.valuation + self.known_precision

    @property
    def is_unit(self) -> bool:
        return not self.is_zero and self.valuation == 0

    def digits(self) -> List[int]:
        """Цифры единицы по основанию p, младшая первой."""
        result = []
        rest = self.unit
        for _ in range(self.known_precision):
            rest, digit = divmod(rest, self.p)
            result.append(digit)
        return result

    def to_integer(self) -> int:
        """Целый представитель по модулю p^absolute_precision; только для элементов Z_p."""
        if self.is_exact_zero:
            return 0
        if self.valuation < 0:
            raise ValueError(f"{self.to_text()} не лежит в Z_p")
        return self.unit * self.p ** int(self.valuation)

    def reduce_precision(self, absolute: Union[int, float]) -> "PadicNumber":
        """Огрубляет абсолютную точность до p^absolute."""
        if absolute == INFINITY:
            return self
        if self.is_exact_zero:
            return _normalize(self.p, self.cap, 0, int(absolute), absolute)
        target = min(self.absolute_precision, absolute)
        return _normalize(self.p, self.cap, self.unit, int(self.valuation), target)

    def agrees_with(self, other: Scalar, loss: int = 0) -> bool:
        """
        Проверяет совпадение с точностью до min(absolute_precision) - loss.

        :param other: Второе число (или целое/дробь).
        :param loss: Допустимая потеря цифр.
        :return: True, если разность нулевая в пределах этой точности.
        """
        other = self._coerce(other)
        diff = self - other
        if diff.is_exact_zero:
            return True
        bound = min(self.absolute_precision, other.absolute_precision) - loss
        return diff.valuation >= bound

    def _coerce(self, other: Scalar) -> "PadicNumber":
        if isinstance(other, PadicNumber):
            if other.p != self.p:
                raise ValueError(f"Смешение простых чисел: {self.p} и {other.p}")
            return other
        if isinstance(other, int):
            return from_int(self.p, self.cap, other)
        if isinstance(other, Fraction):
            return from_fraction(self.p, self.cap, other)
        raise TypeError(f"Нельзя привести {type(other).__name__} к p-адическому числу")

    def __add__(self, other: Scalar) -> "PadicNumber":
        other = self._coerce(other)
        if self.is_exact_zero:
            return other
        if other.is_exact_zero:
            return self
        base = int(min(self.valuation, other.valuation))
        absolute = min(self.absolute_precision, other.absolute_precision)
        value = (self.unit * self.p ** (int(self.valuation) - base)
                 + other.unit * self.p ** (int(other.valuation) - base))
        return _normalize(self.p, self.cap, value, base, absolute)

    def __radd__(self, other: Scalar) -> "PadicNumber":
        return self + other

    def __neg__(self) -> "PadicNumber":
        if self.is_exact_zero:
            return self
        return _normalize(self.p, self.cap, -self.unit, int(self.valuation), self.absolute_precision)

    def __sub__(self, other: Scalar) -> "PadicNumber":
        return self + (-self._coerce(other))

    def __rsub__(self, other: Scalar) -> "PadicNumber":
        return self._coerce(other) - self

    def __mul__(self, other: Scalar) -> "PadicNumber":
        other = self._coerce(other)
        if self.is_exact_zero or other.is_exact_zero:
            return exact_zero(self.p, self.cap)
        base = int(self.valuation + other.valuation)
        relative = min(self.known_precision, other.known_precision)
        return _normalize(self.p, self.cap, self.unit * other.unit, base, base + relative)

    def __rmul__(self, other: Scalar) -> "PadicNumber":
        return self * other

    def __truediv__(self, other: Scalar) -> "PadicNumber":
        other = self._coerce(other)
        if other.is_exact_zero:
            raise ZeroDivisionError("Деление на точный ноль")
        if other.known_precision == 0:
            raise PrecisionError(f"Деление на ноль в пределах точности: {other.to_text()}")
        if self.is_exact_zero:
            return self
        base = int(self.valuation - other.valuation)
        relative = min(self.known_precision, other.known_precision)
        if relative == 0:
            return _normalize(self.p, self.cap, 0, base, base)
        modulus = self.p ** relative
        value = self.unit * pow(other.unit, -1, modulus)
        return _normalize(self.p, self.cap, value, base, base + relative)

    def __rtruediv__(self, other: Scalar) -> "PadicNumber":
        return self._coerce(other) / self

    def __pow__(self, exponent: int) -> "PadicNumber":
        if exponent < 0:
            return from_int(self.p, self.cap, 1) / (self ** (-exponent))
        result = from_int(self.p, self.cap, 1)
        square = self
        while exponent:
            if exponent & 1:
                result = result * square
            exponent >>= 1
            if exponent:
                square = square * square
        return result

    def to_text(self) -> str:
        """Текстовый вид `p^v * (d0 + d1*p + ...) + O(p^K)`; обратим через from_text."""
        if self.is_exact_zero:
            return _TEXT_ZERO
        if self.known_precision == 0:
            return f"O({self.p}^{self.valuation})"
        terms = []
        for i, digit in enumerate(self.digits()):
            if i == 0:
                terms.append(f"{digit}")
            elif i == 1:
                terms.append(f"{digit}*{self.p}")
            else:
                terms.append(f"{digit}*{self.p}^{i}")
        return f"{self.p}^{self.valuation} * ({' + '.join(terms)}) + O({self.p}^{self.absolute_precision})"

    def __str__(self) -> str:
        return self.to_text()


def _normalize(p: int, cap: int, value: int, base: int, absolute: Union[int, float]) -> PadicNumber:
    # value * p^base, известное по модулю p^absolute
    if absolute == INFINITY:
        if value == 0:
            return exact_zero(p, cap)
        v = _vp(value, p)
        return PadicNumber(p, cap, base + v, (value // p ** v) % p ** cap, cap)
    absolute = int(absolute)
    digits = absolute - base
    if digits <= 0:
        return PadicNumber(p, cap, absolute, 0, 0)
    value %= p ** digits
    if value == 0:
        return PadicNumber(p, cap, absolute, 0, 0)
    v = _vp(value, p)
    relative = min(digits - v, cap)
    return PadicNumber(p, cap, base + v, (value // p ** v) % p ** relative, relative)


def exact_zero(p: int, cap: int) -> PadicNumber:
    return PadicNumber(p, cap, INFINITY, 0, 0)


def from_int(p: int, cap: int, value: int) -> PadicNumber:
    """Целое число с относительной точностью cap; 0 даёт точный ноль."""
    if value == 0:
        return exact_zero(p, cap)
    v = _vp(value, p)
    return PadicNumber(p, cap, v, (value // p ** v) % p ** cap, cap)


def from_fraction(p: int, cap: int, value: Fraction) -> PadicNumber:
    if value == 0:
        return exact_zero(p, cap)
    numerator, denominator = value.numerator, value.denominator
    vn, vd = _vp(numerator, p), _vp(denominator, p)
    modulus = p ** cap
    unit = (numerator // p ** vn) * pow(denominator // p ** vd, -1, modulus) % modulus
    return PadicNumber(p, cap, vn - vd, unit, cap)


def from_text(p: int, cap: int, text: str) -> PadicNumber:
    """
    Разбирает текстовый вид, который выдаёт PadicNumber.to_text.

    :param p: Ожидаемое простое число.
    :param cap: Ограничение относительной точности.
    :param text: Строка вида `p^v * (d0 + d1*p + ...) + O(p^K)`, `O(p^K)` или `0`.
    :return: Число, побитово совпадающее с исходным.
    """
    text = text.strip()
    if text == _TEXT_ZERO:
        return exact_zero(p, cap)
    match = _TEXT_INEXACT.match(text)
    if match:
        _check_prime(p, int(match.group(1)), text)
        return PadicNumber(p, cap, int(match.group(2)), 0, 0)
    match = _TEXT_FULL.match(text)
    if not match:
        raise ValueError(f"Не удалось разобрать p-адическое число: {text!r}")
    _check_prime(p, int(match.group(1)), text)
    _check_prime(p, int(match.group(4)), text)
    valuation = int(match.group(2))
    absolute = int(match.group(5))
    unit = 0
    terms = match.group(3).split(" + ")
    for index, term in enumerate(terms):
        parsed = _TEXT_TERM.match(term)
        if not parsed:
            raise ValueError(f"Некорректная цифра {term!r} в {text!r}")
        digit = int(parsed.group(1))
        if parsed.group(2) is not None:
            _check_prime(p, int(parsed.group(2)), text)
        power = 0 if parsed.group(2) is None else int(parsed.group(3) or 1)
        if power != index or not 0 <= digit < p:
            raise ValueError(f"Нарушен порядок или диапазон цифр в {text!r}")
        unit += digit * p ** index
    if len(terms) != absolute - valuation or len(terms) > cap or unit % p == 0:
        raise ValueError(f"Несогласованная точность в {text!r}")
    return PadicNumber(p, cap, valuation, unit, len(terms))


def _check_prime(expected: int, found: int, text: str) -> None:
    if expected != found:
        raise ValueError(f"В {text!r} простое {found}, ожидалось {expected}")


@dataclass(frozen=True)
class PrecisionContext:
    """
    Общие параметры вычисления: простое p, точность N (цифры) и степень усечения рядов M.

    Поле K = Q_p, кольцо целых o = Z_p, простой элемент π = p.
    """

    p: int
    N: int = 16
    M: int = 64

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise ValueError(f"p = {self.p} не является простым числом")
        if self.N < 1:
            raise ValueError(f"Точность N должна быть положительной, получено {self.N}")
        if self.M < 1:
            raise ValueError(f"Степень усечения M должна быть положительной, получено {self.M}")

    @property
    def q(self) -> int:
        """q = p для нечётного p и q = 4 для p = 2; 1 + q порождает главные единицы."""
        return 4 if self.p == 2 else self.p

    @property
    def primitive_root(self) -> int:
        """Наименьший первообразный корень по модулю p."""
        return 1 if self.p == 2 else int(primitive_root(self.p))

    def number(self, value: Union[Scalar, str]) -> PadicNumber:
        if isinstance(value, PadicNumber):
            if value.p != self.p:
                raise ValueError(f"Число над Q_{value.p} в контексте p = {self.p}")
            return value
        if isinstance(value, bool):
            raise TypeError("Логическое значение не является p-адическим числом")
        if isinstance(value, int):
            return from_int(self.p, self.N, value)
        if isinstance(value, Fraction):
            return from_fraction(self.p, self.N, value)
        if isinstance(value, str):
            return from_text(self.p, self.N, value)
        raise TypeError(f"Нельзя построить p-адическое число из {type(value).__name__}")

    def zero(self) -> PadicNumber:
        return exact_zero(self.p, self.N)

    def one(self) -> PadicNumber:
        return from_int(self.p, self.N, 1)


_OPERATIONS: Dict[str, Callable[[PadicNumber, PadicNumber], PadicNumber]] = {
    "add": operator.add,
    "sub": operator.sub,
    "mul": operator.mul,
    "div": operator.truediv,
}


def arith(a: PadicNumber, b: PadicNumber, op: str) -> PadicNumber:
    """
    Арифметика поля K с учётом потерь точности.

    Сложение: абсолютная точность = минимум абсолютных точностей.
    Умножение и деление: относительная точность = минимум относительных.

    :param op: Одна из операций add, sub, mul, div.
    """
    if op not in _OPERATIONS:
        raise ValueError(f"Неизвестная операция {op!r}")
    return _OPERATIONS[op](a, b)


def valuation(a: PadicNumber) -> Union[int, float]:
    return a.valuation


def dot(xs: Sequence[PadicNumber], ys: Sequence[PadicNumber]) -> PadicNumber:
    """Сумма попарных произведений за одну нормализацию; точные нули пропускаются."""
    if not xs:
        raise ValueError("Пустая сумма произведений")
    p, cap = xs[0].p, xs[0].cap
    base = None
    absolute: Union[int, float] = INFINITY
    terms = []
    for a, b in zip(xs, ys):
        if a.is_exact_zero or b.is_exact_zero:
            continue
        v = int(a.valuation + b.valuation)
        terms.append((a.unit * b.unit, v))
        absolute = min(absolute, v + min(a.known_precision, b.known_precision))
        base = v if base is None else min(base, v)
    if base is None:
        return exact_zero(p, cap)
    value = sum(product * p ** (v - base) for product, v in terms)
    return _normalize(p, cap, value, base, absolute)


def teichmuller(ctx: PrecisionContext, r: int) -> PadicNumber:
    """
    Представитель Тейхмюллера вычета r: корень степени p-1 из единицы, сравнимый с r.

    Итерирует x -> x^p по модулю p^N до неподвижной точки.
    """
    if r % ctx.p == 0:
        raise ValueError(f"Вычет {r} делится на p = {ctx.p}")
    modulus = ctx.p ** ctx.N
    x = r % modulus
    for _ in range(ctx.N + 1):
        following = pow(x, ctx.p, modulus)
        if following == x:
            break
        x = following
    return ctx.number(x)


def _principal_depth(p: int) -> int:
    return 2 if p == 2 else 1


def plog(a: PadicNumber) -> PadicNumber:
    """
    p-адический логарифм на 1 + pZ_p (на 1 + 4Z_2 при p = 2).

    Ряд sum (-1)^(k+1) (a-1)^k / k суммируется, пока оценка k*v - log_p(k)
    не достигнет абсолютной точности аргумента.
    """
    if a.is_zero or a.valuation != 0:
        raise ValueError(f"plog: аргумент {a.to_text()} не является единицей")
    z = a - 1
    if z.is_exact_zero:
        return exact_zero(a.p, a.cap)
    v = int(z.valuation)
    if v < _principal_depth(a.p):
        raise ValueError(f"plog: аргумент {a.to_text()} вне области сходимости")
    target = z.absolute_precision
    total = exact_zero(a.p, a.cap)
    power = from_int(a.p, a.cap, 1)
    k = 1
    while k * v - ilog(k, a.p) < target:
        power = power * z
        term = power / k
        total = total + term if k % 2 else total - term
        k += 1
    return total.reduce_precision(target)


def pexp(a: PadicNumber) -> PadicNumber:
    """
    p-адическая экспонента на pZ_p (на 4Z_2 при p = 2).

    Суммирует a^k / k!, пока нижняя оценка k*v - (k-1)/(p-1) нормирования
    члена меньше абсолютной точности аргумента; потеря v_p(k!) учитывается
    делением в арифметике PadicNumber.
    """
    one = from_int(a.p, a.cap, 1)
    if a.is_exact_zero:
        return one
    v = int(a.valuation)
    if v < _principal_depth(a.p):
        raise ValueError(f"pexp: аргумент {a.to_text()} вне области сходимости")
    target = a.absolute_precision
    total = one
    term = one
    k = 1
    while k * v - Fraction(k - 1, a.p - 1) < target:
        term = term * a / k
        total = total + term
        k += 1
    return total.reduce_precision(target)


def pbinomial(s: PadicNumber, n: int) -> PadicNumber:
    """
    Обобщённый биномиальный коэффициент s(s-1)...(s-n+1)/n! для s из Z_p.

    Если s известно по модулю p^A, то результат известен по модулю
    p^(A - floor(log_p n)): разность C(x, n) - C(y, n) раскладывается по
    Вандермонду в сумму C(x-y, k) C(y, n-k), а |C(x-y, k)| <= |x-y| * p^(log_p k).
    Эта потеря не превосходит v_p(n!).
    """
    if n < 0:
        raise ValueError(f"pbinomial: отрицательный индекс {n}")
    if n == 0:
        return from_int(s.p, s.cap, 1)
    if s.is_exact_zero:
        return s
    if s.valuation < 0:
        raise ValueError(f"pbinomial: {s.to_text()} не лежит в Z_p")
    value = math.comb(s.to_integer(), n)
    return _normalize(s.p, s.cap, value, 0, s.absolute_precision - ilog(n, s.p))

