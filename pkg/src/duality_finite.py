import logging
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from sympy import Matrix, isprime, multiplicity
from sympy.polys.domains import GF, QQ, ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import invariant_factors

from src.padic_core import INFINITY, PadicNumber, PrecisionError

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

RANK_GUARD = 200

Grid = Tuple[Tuple[int, ...], ...]


@dataclass(frozen=True)
class FreeModuleMap:
    """
    o-линейное отображение o^m -> o^n, заданное матрицей n x m (строки отвечают o^n).

    precision = None означает точные целые коэффициенты; иначе элементы
    известны по модулю p^precision.
    """

    p: int
    domain_rank: int
    codomain_rank: int
    matrix: Grid
    precision: Optional[int] = None

    def __post_init__(self) -> None:
        if not isprime(self.p):
            raise ValueError(f"p = {self.p} не является простым")
        if self.domain_rank < 0 or self.codomain_rank < 0:
            raise ValueError("Ранги должны быть неотрицательными")
        if len(self.matrix) != self.codomain_rank or any(len(row) != self.domain_rank for row in self.matrix):
            raise ValueError(f"Матрица не имеет размер {self.codomain_rank} x {self.domain_rank}")
        if self.precision is not None and self.precision < 1:
            raise ValueError(f"Точность должна быть не меньше 1, получено {self.precision}")

    @classmethod
    def of(
        cls, p: int, rows: Sequence[Sequence[int]], precision: Optional[int] = None, domain_rank: Optional[int] = None
    ) -> "FreeModuleMap":
        """
        Строит отображение по списку строк.

        :param p: Простое число.
        :param rows: Строки матрицы (целые числа).
        :param precision: Точность коэффициентов или None для точных.
        :param domain_rank: Ранг области определения; нужен только для матрицы без строк.
        :return: FreeModuleMap.
        """
        matrix = tuple(tuple(int(x) for x in row) for row in rows)
        if domain_rank is None:
            if not matrix:
                raise ValueError("Для матрицы без строк нужно явно указать domain_rank")
            domain_rank = len(matrix[0])
        if precision is not None:
            modulus = p**precision
            matrix = tuple(tuple(x % modulus for x in row) for row in matrix)
        return cls(p, domain_rank, len(matrix), matrix, precision)

    @classmethod
    def from_padic(cls, rows: Sequence[Sequence[PadicNumber]]) -> "FreeModuleMap":
        """Отображение с p-адическими коэффициентами; точность равна наименьшей из известных."""
        if not rows or not rows[0]:
            raise ValueError("Пустая p-адическая матрица")
        p = rows[0][0].p
        precision: Union[int, float] = INFINITY
        for row in rows:
            for x in row:
                precision = min(precision, x.absolute_precision)
        if precision != INFINITY and precision < 1:
            raise PrecisionError("Коэффициенты матрицы не известны даже по модулю p")
        integers = [[x.to_integer() for x in row] for row in rows]
        return cls.of(p, integers, None if precision == INFINITY else int(precision))

    @classmethod
    def identity(cls, p: int, rank: int) -> "FreeModuleMap":
        return cls.of(p, [[int(i == j) for j in range(rank)] for i in range(rank)], domain_rank=rank)

    @classmethod
    def zero(cls, p: int, domain_rank: int, codomain_rank: int) -> "FreeModuleMap":
        return cls.of(p, [[0] * domain_rank for _ in range(codomain_rank)], domain_rank=domain_rank)

    @property
    def is_exact(self) -> bool:
        return self.precision is None

    def columns(self) -> List[List[int]]:
        return [[row[j] for row in self.matrix] for j in range(self.domain_rank)]

    def apply(self, vector: Sequence[int]) -> List[int]:
        if len(vector) != self.domain_rank:
            raise ValueError(f"Вектор длины {len(vector)} не лежит в o^{self.domain_rank}")
        return [sum(a * x for a, x in zip(row, vector)) for row in self.matrix]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "p": self.p,
            "domain_rank": self.domain_rank,
            "codomain_rank": self.codomain_rank,
            "matrix": [list(row) for row in self.matrix],
            "precision": self.precision,
        }


def dual_map(f: FreeModuleMap) -> FreeModuleMap:
    """
    Двойственное отображение f^d: (o^n)^d -> (o^m)^d, ℓ -> ℓ ∘ f.

    В двойственных базисах это транспонированная матрица.
    """
    transposed = tuple(tuple(row) for row in zip(*f.matrix)) if f.codomain_rank else ((),) * f.domain_rank
    return FreeModuleMap(f.p, f.codomain_rank, f.domain_rank, transposed, f.precision)


def compose(g: FreeModuleMap, f: FreeModuleMap) -> FreeModuleMap:
    """Композиция g ∘ f (сначала f)."""
    if f.p != g.p:
        raise ValueError(f"Разные простые: {f.p} и {g.p}")
    if f.codomain_rank != g.domain_rank:
        raise ValueError(f"Нельзя скомпоновать: o^{f.codomain_rank} не совпадает с o^{g.domain_rank}")
    columns = f.columns()
    product = [[sum(row[k] * column[k] for k in range(g.domain_rank)) for column in columns] for row in g.matrix]
    if f.precision is None:
        precision = g.precision
    elif g.precision is None:
        precision = f.precision
    else:
        precision = min(f.precision, g.precision)
    return FreeModuleMap.of(f.p, product, precision, domain_rank=f.domain_rank)


def _padic_valuation(value: int, p: int) -> Union[int, float]:
    if value == 0:
        return INFINITY
    return int(multiplicity(p, value))


def _integer_matrix(f: FreeModuleMap) -> Any:
    return DM([list(row) for row in f.matrix], ZZ)


def _nonzero_invariant_factors(f: FreeModuleMap) -> List[int]:
    if f.codomain_rank == 0 or f.domain_rank == 0:
        return []
    return [abs(int(d)) for d in invariant_factors(_integer_matrix(f)) if d != 0]


def elementary_divisors(f: FreeModuleMap) -> Tuple[int, ...]:
    """
    Элементарные делители f над Z_p (p-степени), упорядоченные по делимости.

    Берутся p-части нормальной формы Смита над Z: локализация в p её не меняет.
    Для матрицы, известной по модулю p^N, делители должны быть строго меньше p^N,
    а ранг полным; иначе делители не определены этой точностью.

    :raises PrecisionError: если точности не хватает.
    """
    factors = _nonzero_invariant_factors(f)
    divisors = [f.p ** int(_padic_valuation(d, f.p)) for d in factors]
    if f.precision is not None:
        bound = f.p**f.precision
        if any(d >= bound for d in divisors) or len(divisors) < min(f.domain_rank, f.codomain_rank):
            raise PrecisionError(f"Элементарные делители не определяются по модулю p^{f.precision}")
    return tuple(sorted(divisors))


@dataclass(frozen=True)
class DualData:
    dual: FreeModuleMap
    valuation_vector: Tuple[Union[int, float], ...]
    elementary_divisors: Tuple[int, ...]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dual": self.dual.to_dict(),
            "valuation_vector": [None if v == INFINITY else v for v in self.valuation_vector],
            "elementary_divisors": list(self.elementary_divisors),
        }


def dual_data(f: FreeModuleMap) -> DualData:
    """
    Двойственное отображение вместе с описанием единичного шара.

    valuation_vector[i] - нормирование sup-нормы образа f^d(e_i^*) = e_i^* ∘ f
    (минимум нормирований i-й строки). Все значения неотрицательны:
    f^d не увеличивает норму.
    """
    vector = tuple(min((_padic_valuation(x, f.p) for x in row), default=INFINITY) for row in f.matrix)
    return DualData(dual_map(f), vector, elementary_divisors(f))


@dataclass(frozen=True)
class DoubleDualReport:
    rank: int
    permutation: Tuple[int, ...]
    evaluation_matrix: Grid
    is_identity: bool
    matches_permutation: bool

    @property
    def verdict(self) -> bool:
        return self.matches_permutation and self.is_identity == (self.permutation == tuple(range(self.rank)))

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "permutation": list(self.permutation),
            "evaluation_matrix": [list(row) for row in self.evaluation_matrix],
            "is_identity": self.is_identity,
            "matches_permutation": self.matches_permutation,
            "verdict": self.verdict,
        }


def double_dual_check(rank: int, permutation: Optional[Sequence[int]] = None) -> DoubleDualReport:
    """
    Матрица канонического вложения ι_M: M -> M^dd для M = o^rank.

    Базис M^dd берётся двойственным к двойственному базису b_j = e_{π(j)}.
    Элемент (j, i) равен ι(e_i)(b_j^*) = b_j^*(e_i); базисные функционалы
    b_j^* - строки обратной к матрице базиса. Для тождественной перестановки
    получается единичная матрица, в общем случае - транспонированная матрица перестановки.

    :param rank: Ранг M.
    :param permutation: Перестановка π базиса (по умолчанию тождественная).
    :return: DoubleDualReport.
    """
    if rank < 1 or rank > RANK_GUARD:
        raise ValueError(f"Ранг должен лежать в [1, {RANK_GUARD}], получено {rank}")
    pi = tuple(range(rank)) if permutation is None else tuple(int(i) for i in permutation)
    if sorted(pi) != list(range(rank)):
        raise ValueError(f"{list(pi)} не является перестановкой {rank} элементов")
    # столбец j матрицы базиса - вектор b_j
    basis = [[int(i == pi[j]) for j in range(rank)] for i in range(rank)]
    inverse = Matrix(basis).inv()
    evaluation = tuple(tuple(int(inverse[i, j]) for j in range(rank)) for i in range(rank))
    transposed = tuple(tuple(basis[i][j] for i in range(rank)) for j in range(rank))
    is_identity = all(evaluation[i][j] == int(i == j) for i in range(rank) for j in range(rank))
    logging.info(f"Двойное двойственное для ранга {rank}: единичная матрица = {is_identity}")
    return DoubleDualReport(rank, pi, evaluation, is_identity, evaluation == transposed)


@dataclass(frozen=True)
class ExactnessReport:
    domain_rank: int
    codomain_rank: int
    rank: int
    elementary_divisors: Tuple[int, ...]
    kernel_rank: int
    dual_image_closure_rank: int
    cokernel_cot_rank: int
    cokernel_torsion: Tuple[int, ...]
    dual_kernel_rank: int
    dual_valuation_vector: Tuple[Union[int, float], ...]
    surjective: bool
    dual_isometry: bool

    @property
    def kernel_identity(self) -> bool:
        # rank ker(f)^d = rank M^d / closure(f^d(N^d))
        return self.kernel_rank == self.domain_rank - self.dual_image_closure_rank

    @property
    def cokernel_identity(self) -> bool:
        return self.cokernel_cot_rank == self.dual_kernel_rank

    @property
    def surjectivity_criterion(self) -> bool:
        return self.surjective == self.dual_isometry

    @property
    def holds(self) -> bool:
        return self.kernel_identity and self.cokernel_identity and self.surjectivity_criterion

    def to_dict(self) -> Dict[str, Any]:
        return {
            "domain_rank": self.domain_rank,
            "codomain_rank": self.codomain_rank,
            "rank": self.rank,
            "elementary_divisors": list(self.elementary_divisors),
            "kernel_rank": self.kernel_rank,
            "dual_image_closure_rank": self.dual_image_closure_rank,
            "cokernel_cot_rank": self.cokernel_cot_rank,
            "cokernel_torsion": list(self.cokernel_torsion),
            "dual_kernel_rank": self.dual_kernel_rank,
            "dual_valuation_vector": [None if v == INFINITY else v for v in self.dual_valuation_vector],
            "surjective": self.surjective,
            "dual_isometry": self.dual_isometry,
            "kernel_identity": self.kernel_identity,
            "cokernel_identity": self.cokernel_identity,
            "surjectivity_criterion": self.surjectivity_criterion,
            "holds": self.holds,
        }


def _nullity_over_q(rows: Grid, width: int) -> int:
    if width == 0:
        return 0
    if not rows:
        return width
    return width - int(DM([list(row) for row in rows], QQ).rank())


def exactness_suite(f: FreeModuleMap) -> ExactnessReport:
    """
    Проверка двойственности ядра, коядра и сюръективности для f: o^m -> o^n.

    Ранги ядер считаются над Q независимо от нормальной формы Смита.
    Замыкание образа f^d на конечном ранге - его насыщение, ранг которого
    равен рангу A^T над Q. (M)_cot для коядра - коядро по модулю кручения.
    Изометричность f^d: строки A линейно независимы по модулю p.

    :param f: Отображение.
    :return: ExactnessReport.
    :raises PrecisionError: если элементарные делители не определяются точностью f.
    """
    m, n = f.domain_rank, f.codomain_rank
    logging.info(f"Проверка точности для отображения o^{m} -> o^{n}")
    divisors = elementary_divisors(f)
    rank = len(divisors)
    transposed = dual_map(f).matrix
    kernel_rank = _nullity_over_q(f.matrix, m)
    dual_kernel_rank = _nullity_over_q(transposed, n)
    closure_rank = n - dual_kernel_rank
    surjective = rank == n and all(d == 1 for d in divisors)
    if n == 0:
        dual_isometry = True
    elif m == 0:
        dual_isometry = False
    else:
        dual_isometry = int(DM([list(row) for row in transposed], ZZ).convert_to(GF(f.p)).rank()) == n
    report = ExactnessReport(
        domain_rank=m,
        codomain_rank=n,
        rank=rank,
        elementary_divisors=divisors,
        kernel_rank=kernel_rank,
        dual_image_closure_rank=closure_rank,
        cokernel_cot_rank=n - rank,
        cokernel_torsion=tuple(d for d in divisors if d > 1),
        dual_kernel_rank=dual_kernel_rank,
        dual_valuation_vector=dual_data(f).valuation_vector,
        surjective=surjective,
        dual_isometry=dual_isometry,
    )
    if not report.holds:
        logging.error(f"Нарушено соотношение двойственности для {f.to_dict()}")
    return report
