import itertools
import logging
import random
from dataclasses import dataclass, field
from typing import Any, Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

from sympy import Matrix
from sympy.polys.domains import GF, ZZ
from sympy.polys.matrices import DM
from sympy.polys.matrices.normalforms import invariant_factors

from src.padic_core import PadicNumber
from src.torus_characters import TorusCharacter, char_conductor, char_eval

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

GROUP_ORDER_GUARD = 10 ** 7
ALGEBRA_DIMENSION_GUARD = 10 ** 4
PRODUCT_FRONTIER_GUARD = 10 ** 5


class SizeGuardError(ValueError):
    """Задача превышает допустимый размер."""


@dataclass(frozen=True, order=True)
class GL2ModElement:
    """Матрица [[a, b], [c, d]] из GL2(Z/p^level)."""

    p: int
    level: int
    a: int
    b: int
    c: int
    d: int

    def __post_init__(self) -> None:
        modulus = self.modulus
        for entry in (self.a, self.b, self.c, self.d):
            if not 0 <= entry < modulus:
                raise ValueError(f"Элемент {entry} не приведён по модулю {modulus}")
        if self.det() % self.p == 0:
            raise ValueError(f"Определитель {self.entries()} не обратим по модулю {self.p}")

    @classmethod
    def of(cls, p: int, level: int, a: int, b: int, c: int, d: int) -> "GL2ModElement":
        modulus = p ** level
        return cls(p, level, a % modulus, b % modulus, c % modulus, d % modulus)

    @property
    def modulus(self) -> int:
        return self.p ** self.level

    def entries(self) -> Tuple[int, int, int, int]:
        return self.a, self.b, self.c, self.d

    def det(self) -> int:
        return (self.a * self.d - self.b * self.c) % self.modulus

    def __mul__(self, other: "GL2ModElement") -> "GL2ModElement":
        if (self.p, self.level) != (other.p, other.level):
            raise ValueError("Умножение элементов разных групп")
        return GL2ModElement.of(
            self.p,
            self.level,
            self.a * other.a + self.b * other.c,
            self.a * other.b + self.b * other.d,
            self.c * other.a + self.d * other.c,
            self.c * other.b + self.d * other.d,
        )

    def inverse(self) -> "GL2ModElement":
        inv = pow(self.det(), -1, self.modulus)
        return GL2ModElement.of(self.p, self.level, self.d * inv, -self.b * inv, -self.c * inv, self.a * inv)

    def conjugate(self, g: "GL2ModElement") -> "GL2ModElement":
        """g * self * g^-1."""
        return g * self * g.inverse()

    def is_identity(self) -> bool:
        return self.entries() == (1, 0, 0, 1)

    def to_list(self) -> List[int]:
        return list(self.entries())


def identity(p: int, level: int) -> GL2ModElement:
    return GL2ModElement.of(p, level, 1, 0, 0, 1)


def weyl(p: int, level: int) -> GL2ModElement:
    """w = [[0, -1], [1, 0]]."""
    return GL2ModElement.of(p, level, 0, -1, 1, 0)


def unipotent_u(p: int, level: int) -> GL2ModElement:
    """u = [[1, 0], [1, 1]]."""
    return GL2ModElement.of(p, level, 1, 0, 1, 1)


def gamma(p: int, level: int) -> GL2ModElement:
    """γ = [[1, p], [0, 1]]."""
    return GL2ModElement.of(p, level, 1, p, 0, 1)


def torus(p: int, level: int, a: int, d: int = 1) -> GL2ModElement:
    """t = diag(a, d); t_a = torus(p, level, a)."""
    return GL2ModElement.of(p, level, a, 0, 0, d)


def group_order(p: int, level: int) -> int:
    return (p * p - 1) * (p * p - p) * p ** (4 * (level - 1))


def enumerate_group(p: int, level: int) -> List[GL2ModElement]:
    """
    Все элементы GL2(Z/p^level) в лексикографическом порядке.

    :param p: Простое число.
    :param level: Уровень n >= 1.
    :return: Список длины (p^2 - 1)(p^2 - p)p^(4(n - 1)).
    """
    order = group_order(p, level)
    if order > GROUP_ORDER_GUARD:
        raise SizeGuardError(f"Порядок GL2(Z/{p}^{level}) = {order} превышает {GROUP_ORDER_GUARD}")
    logging.info(f"Перечисление GL2(Z/{p}^{level}), порядок {order}")
    modulus = p ** level
    elements = [
        GL2ModElement(p, level, a, b, c, d)
        for a, b, c, d in itertools.product(range(modulus), repeat=4)
        if (a * d - b * c) % p
    ]
    if len(elements) != order:
        raise RuntimeError(f"Найдено {len(elements)} элементов вместо {order}")
    return elements


def in_iwahori(g: GL2ModElement) -> bool:
    return g.b % g.p == 0


def in_parabolic(g: GL2ModElement) -> bool:
    return g.b == 0


def iwahori_factor(g: GL2ModElement) -> Tuple[GL2ModElement, GL2ModElement]:
    """
    Разложение g = u⁻ * q, u⁻ = [[1, x], [0, 1]] с x ≡ 0 mod p, q нижнетреугольная.

    x = b / d, где d обратим, поскольку b ≡ 0 mod p.
    """
    if not in_iwahori(g):
        raise ValueError(f"{g.entries()} не лежит в образе подгруппы Ивахори")
    x = g.b * pow(g.d, -1, g.modulus)
    u_minus = GL2ModElement.of(g.p, g.level, 1, x, 0, 1)
    p_part = GL2ModElement.of(g.p, g.level, g.a - x * g.c, 0, g.c, g.d)
    if u_minus * p_part != g:
        raise RuntimeError(f"Разложение Ивахори не восстанавливает {g.entries()}")
    return u_minus, p_part


def bruhat_classify(g: GL2ModElement) -> str:
    return "cell_B" if in_iwahori(g) else "cell_BwP"


def bruhat_cell_sizes(p: int, level: int) -> Dict[str, int]:
    sizes = {"cell_B": 0, "cell_BwP": 0}
    for g in enumerate_group(p, level):
        sizes[bruhat_classify(g)] += 1
    return sizes


def generate_subgroup(generators: Iterable[GL2ModElement], p: int, level: int) -> FrozenSet[GL2ModElement]:
    """Замыкание множества образующих относительно умножения."""
    elements = {identity(p, level)}
    frontier = list(elements)
    gens = list(generators)
    while frontier:
        following = []
        for x in frontier:
            for s in gens:
                y = x * s
                if y not in elements:
                    elements.add(y)
                    following.append(y)
        frontier = following
    return frozenset(elements)


def all_subgroups(group: Sequence[GL2ModElement]) -> List[FrozenSet[GL2ModElement]]:
    """Все подгруппы небольшой группы: наращивание подгрупп по одному образующему."""
    if len(group) > 200:
        raise SizeGuardError(f"Перебор подгрупп для группы порядка {len(group)} не поддерживается")
    p, level = group[0].p, group[0].level
    found = {generate_subgroup([], p, level)}
    frontier = list(found)
    while frontier:
        following = []
        for subgroup in frontier:
            for g in group:
                if g in subgroup:
                    continue
                bigger = generate_subgroup(list(subgroup) + [g], p, level)
                if bigger not in found:
                    found.add(bigger)
                    following.append(bigger)
        frontier = following
    return sorted(found, key=lambda h: (len(h), sorted(h)))


def is_normal(subgroup: FrozenSet[GL2ModElement], group: Sequence[GL2ModElement]) -> bool:
    return all(h.conjugate(g) in subgroup for g in group for h in subgroup)


def conjugation_closure(elements: Iterable[GL2ModElement], group: Sequence[GL2ModElement]) -> List[GL2ModElement]:
    return sorted({s.conjugate(g) for s in elements for g in group})


def reduction_kernel(p: int, level: int) -> List[GL2ModElement]:
    """Ядро приведения GL2(Z/p^level) -> GL2(Z/p); для p = 2, level = 2 это K1 порядка 16."""
    return [g for g in enumerate_group(p, level) if g.a % p == 1 and g.d % p == 1 and g.b % p == 0 and g.c % p == 0]


@dataclass(frozen=True)
class GroupRingElement:
    """Элемент Z[G] (или F_p[G] при modulus = p) как словарь элемент -> коэффициент."""

    coefficients: Tuple[Tuple[GL2ModElement, int], ...]
    modulus: Optional[int] = None

    @classmethod
    def from_dict(cls, data: Dict[GL2ModElement, int], modulus: Optional[int] = None) -> "GroupRingElement":
        items = []
        for g, value in data.items():
            if modulus is not None:
                value %= modulus
            if value:
                items.append((g, value))
        return cls(tuple(sorted(items)), modulus)

    @classmethod
    def augmentation_generator(cls, h: GL2ModElement, modulus: Optional[int] = None) -> "GroupRingElement":
        """h - 1."""
        return cls.from_dict({h: 1, identity(h.p, h.level): -1} if not h.is_identity() else {}, modulus)

    def as_dict(self) -> Dict[GL2ModElement, int]:
        return dict(self.coefficients)

    def is_zero(self) -> bool:
        return not self.coefficients

    def __add__(self, other: "GroupRingElement") -> "GroupRingElement":
        data = self.as_dict()
        for g, value in other.coefficients:
            data[g] = data.get(g, 0) + value
        return GroupRingElement.from_dict(data, self.modulus)

    def __mul__(self, other: "GroupRingElement") -> "GroupRingElement":
        data: Dict[GL2ModElement, int] = {}
        for g, x in self.coefficients:
            for h, y in other.coefficients:
                key = g * h
                data[key] = data.get(key, 0) + x * y
        return GroupRingElement.from_dict(data, self.modulus)

    def divisible_by(self, p: int) -> bool:
        return all(value % p == 0 for _, value in self.coefficients)

    def augmentation(self) -> int:
        return sum(value for _, value in self.coefficients)


@dataclass(frozen=True)
class IdealData:
    """Идеал I_H, порождённый элементами h - 1 для образующих h подгруппы H."""

    subgroup_generators: Tuple[GL2ModElement, ...]

    def subgroup(self, p: int, level: int) -> FrozenSet[GL2ModElement]:
        return generate_subgroup(self.subgroup_generators, p, level)

    def to_dict(self) -> Dict[str, Any]:
        return {"subgroup_generators": [h.to_list() for h in self.subgroup_generators]}


@dataclass(frozen=True)
class NilpotencyReport:
    mode: str
    index: Optional[int]
    dimensions: Tuple[int, ...]
    ambient_order: int
    subgroup_order: int
    verified: bool

    def to_dict(self) -> Dict[str, Any]:
        return {
            "mode": self.mode,
            "index": self.index,
            "dimensions": list(self.dimensions),
            "ambient_order": self.ambient_order,
            "subgroup_order": self.subgroup_order,
            "verified": self.verified,
        }


def _rows_mod_p(rows: Sequence[Sequence[int]], p: int) -> Any:
    return DM([list(row) for row in rows], ZZ).convert_to(GF(p)) if rows else None


def _echelon_basis(rows: List[List[int]], p: int) -> List[List[int]]:
    # строки ступенчатого вида над F_p, порядок столбцов задан порядком элементов группы
    matrix = _rows_mod_p(rows, p)
    if matrix is None:
        return []
    reduced, pivots = matrix.rref()
    return [[int(x) % p for x in row] for row in reduced.to_list()[: len(pivots)]]


def _right_multiply_rows(
    rows: List[List[int]], elements: Sequence[GL2ModElement], index: Dict[GL2ModElement, int], h: GL2ModElement, p: int
) -> List[List[int]]:
    # v -> v (h - 1) в координатах базиса G
    result = []
    for row in rows:
        image = [0] * len(elements)
        for position, value in enumerate(row):
            if value:
                image[index[elements[position] * h]] += value
                image[position] -= value
        result.append([x % p for x in image])
    return result


def _check_p_group(subgroup: FrozenSet[GL2ModElement], p: int) -> None:
    order = len(subgroup)
    while order % p == 0:
        order //= p
    if order != 1:
        logging.warning(f"Подгруппа порядка {len(subgroup)} не является p-группой при p = {p}")


def ideal_power_nilpotency(
    ambient: Sequence[GL2ModElement], ideal: IdealData, mode: str = "char_p", max_power: int = 64
) -> NilpotencyReport:
    """
    Наименьшее m с I_H^m = 0 в F_p[G] (char_p) или I_H^m ⊆ p Z[G] (pi_containment).

    :param ambient: Элементы объемлющей группы G.
    :param ideal: Образующие подгруппы H; H должна быть нормальной в G.
    :param mode: char_p либо pi_containment.
    :param max_power: Верхняя граница поиска.
    :return: NilpotencyReport; index = None, если степени стабилизировались на ненулевом идеале.
    """
    elements = sorted(ambient)
    p = elements[0].p
    level = elements[0].level
    if len(elements) > ALGEBRA_DIMENSION_GUARD:
        raise SizeGuardError(f"Размерность групповой алгебры {len(elements)} превышает {ALGEBRA_DIMENSION_GUARD}")
    subgroup = ideal.subgroup(p, level)
    if not subgroup <= set(elements):
        raise ValueError("Подгруппа H не содержится в объемлющей группе")
    if not is_normal(subgroup, elements):
        raise ValueError("Подгруппа H не нормальна в объемлющей группе")
    _check_p_group(subgroup, p)
    logging.info(f"Нильпотентность I_H: |G| = {len(elements)}, |H| = {len(subgroup)}, режим {mode}")
    if mode == "char_p":
        return _nilpotency_char_p(elements, subgroup, ideal, max_power)
    if mode == "pi_containment":
        return _nilpotency_pi(elements, subgroup, ideal, max_power)
    raise ValueError(f"Неизвестный режим {mode!r}")


def _annihilated_by_generators(
    rows: List[List[int]], elements: Sequence[GL2ModElement], generators: Sequence[GL2ModElement], p: int
) -> bool:
    # строки базиса I^(m-1), умноженные на h - 1 в групповом кольце, должны обнуляться по модулю p
    for row in rows:
        x = GroupRingElement.from_dict({elements[i]: value for i, value in enumerate(row) if value}, p)
        for h in generators:
            if not (x * GroupRingElement.augmentation_generator(h, p)).is_zero():
                return False
    return True


def _nilpotency_char_p(
    elements: List[GL2ModElement], subgroup: FrozenSet[GL2ModElement], ideal: IdealData, max_power: int
) -> NilpotencyReport:
    p = elements[0].p
    index = {g: i for i, g in enumerate(elements)}
    generators = [h for h in ideal.subgroup_generators if not h.is_identity()]
    unit_rows = [[1 if j == i else 0 for j in range(len(elements))] for i in range(len(elements))]
    spanning: List[List[int]] = []
    for h in generators:
        spanning += _right_multiply_rows(unit_rows, elements, index, h, p)
    basis = _echelon_basis(spanning, p)
    dimensions = [len(basis)]
    previous = unit_rows
    power = 1
    while basis and power < max_power:
        spanning = []
        for h in generators:
            spanning += _right_multiply_rows(basis, elements, index, h, p)
        following = _echelon_basis(spanning, p)
        power += 1
        if len(following) == len(basis):
            logging.warning(f"Степени идеала стабилизировались на размерности {len(basis)}")
            return NilpotencyReport("char_p", None, tuple(dimensions), len(elements), len(subgroup), False)
        previous, basis = basis, following
        dimensions.append(len(basis))
    if basis:
        return NilpotencyReport("char_p", None, tuple(dimensions), len(elements), len(subgroup), False)
    verified = bool(previous) and _annihilated_by_generators(previous, elements, generators, p)
    return NilpotencyReport("char_p", power, tuple(dimensions), len(elements), len(subgroup), verified)


def _nilpotency_pi(
    elements: List[GL2ModElement], subgroup: FrozenSet[GL2ModElement], ideal: IdealData, max_power: int
) -> NilpotencyReport:
    p = elements[0].p
    closed = [s for s in conjugation_closure(ideal.subgroup_generators, elements) if not s.is_identity()]
    factors = [GroupRingElement.augmentation_generator(s) for s in closed]
    frontier = {f for f in factors if not f.divisible_by(p)}
    sizes = [len(frontier)]
    power = 1
    while frontier and power < max_power:
        following = set()
        for x in frontier:
            for f in factors:
                y = x * f
                if not y.divisible_by(p):
                    following.add(y)
        if len(following) > PRODUCT_FRONTIER_GUARD:
            raise SizeGuardError(f"Число произведений {len(following)} превышает {PRODUCT_FRONTIER_GUARD}")
        frontier = following
        power += 1
        sizes.append(len(frontier))
    if frontier:
        return NilpotencyReport("pi_containment", None, tuple(sizes), len(elements), len(subgroup), False)
    return NilpotencyReport("pi_containment", power, tuple(sizes), len(elements), len(subgroup), True)


def random_product_check(
    ambient: Sequence[GL2ModElement], ideal: IdealData, m: int, samples: int, rng: random.Random
) -> bool:
    """Проверяет случайные произведения m множителей (s - 1) на делимость на p в Z[G]."""
    elements = sorted(ambient)
    p = elements[0].p
    closed = [s for s in conjugation_closure(ideal.subgroup_generators, elements) if not s.is_identity()]
    if not closed:
        return True
    for _ in range(samples):
        product = GroupRingElement.from_dict({rng.choice(elements): 1})
        for _ in range(m):
            product = product * GroupRingElement.augmentation_generator(rng.choice(closed))
        if not product.divisible_by(p):
            return False
    return True


@dataclass(frozen=True)
class GroupModule:
    """Свободный Z_p-модуль ранга rank с действием, заданным целыми матрицами."""

    rank: int
    action: Dict[GL2ModElement, Tuple[Tuple[int, ...], ...]] = field(default_factory=dict)

    def matrix(self, g: GL2ModElement) -> Tuple[Tuple[int, ...], ...]:
        if g not in self.action:
            raise ValueError(f"Нет матрицы действия для {g.entries()}")
        return self.action[g]


def regular_module(group: Sequence[GL2ModElement], acting: Iterable[GL2ModElement]) -> GroupModule:
    """Регулярный модуль Z_p[G] с левым действием перестановками базиса; матрицы только для acting."""
    elements = sorted(group)
    index = {g: i for i, g in enumerate(elements)}
    action = {}
    for g in acting:
        rows = [[0] * len(elements) for _ in elements]
        for i, x in enumerate(elements):
            rows[index[g * x]][i] = 1
        action[g] = tuple(tuple(row) for row in rows)
    return GroupModule(len(elements), action)


@dataclass(frozen=True)
class NakayamaReport:
    rank: int
    torsion_divisors: Tuple[int, ...]
    dual_invariants_corank: int
    presentation_shape: Tuple[int, int]

    @property
    def consistent(self) -> bool:
        return self.rank == self.dual_invariants_corank

    def to_dict(self) -> Dict[str, Any]:
        return {
            "rank": self.rank,
            "torsion_divisors": list(self.torsion_divisors),
            "dual_invariants_corank": self.dual_invariants_corank,
            "presentation_shape": list(self.presentation_shape),
            "consistent": self.consistent,
        }


def nakayama_dimension(module: GroupModule, ideal: IdealData, p: int) -> NakayamaReport:
    """
    Ранг M / I_H M над Z_p и кокоранг H-инвариантов двойственного по Понтрягину модуля.

    Коинварианты: коядро матрицы со столбцами (ρ(h) - 1) e_i; элементарные
    делители берутся из нормальной формы Смита над Z, p-кручение из их p-частей.
    Двойственная сторона считается отдельно: ядро над Q блочной матрицы
    из строк ρ(h)^T - 1 даёт H-инварианты двойственного модуля.
    """
    columns: List[List[int]] = []
    for h in ideal.subgroup_generators:
        matrix = module.matrix(h)
        if len(matrix) != module.rank or any(len(row) != module.rank for row in matrix):
            raise ValueError(f"Матрица действия {h.entries()} имеет неверный размер")
        for j in range(module.rank):
            columns.append([matrix[i][j] - (1 if i == j else 0) for i in range(module.rank)])
    if not columns:
        return NakayamaReport(module.rank, (), module.rank, (module.rank, 0))
    presentation = DM([list(row) for row in zip(*columns)], ZZ)
    divisors = [abs(int(d)) for d in invariant_factors(presentation) if d != 0]
    torsion = []
    for d in divisors:
        power = 1
        while d % (power * p) == 0:
            power *= p
        if power > 1:
            torsion.append(power)
    rank = module.rank - len(divisors)
    # столбец (ρ(h) - 1) e_j совпадает со строкой j матрицы ρ(h)^T - 1
    invariants = Matrix(columns).nullspace()
    return NakayamaReport(rank, tuple(sorted(torsion)), len(invariants), (module.rank, len(columns)))


def _coset_key(g: GL2ModElement) -> Tuple[int, int]:
    # смежный класс gP <-> прямая, натянутая на второй столбец (b, d)
    modulus = g.modulus
    if g.d % g.p:
        return g.b * pow(g.d, -1, modulus) % modulus, 1
    return 1, g.d * pow(g.b, -1, modulus) % modulus


@dataclass
class InducedModule:
    """
    Ind_P^G(χ) на уровне n: базис f_i с носителем r_i P и f_i(r_i p) = χ(p^-1).

    Левый сдвиг: g f_i = χ(p') f_j, где g r_i = r_j p'.
    """

    character: TorusCharacter
    level: int
    representatives: Tuple[GL2ModElement, ...]
    twist: int = 1
    _index: Dict[Tuple[int, int], int] = field(default_factory=dict, init=False, repr=False)
    _values: Dict[Tuple[int, int], PadicNumber] = field(default_factory=dict, init=False, repr=False)

    def __post_init__(self) -> None:
        self._index = {_coset_key(r): i for i, r in enumerate(self.representatives)}

    @property
    def dimension(self) -> int:
        return len(self.representatives)

    def coset_of(self, g: GL2ModElement) -> int:
        return self._index[_coset_key(g)]

    def chi_on_parabolic(self, q: GL2ModElement) -> PadicNumber:
        key = (q.a, q.d)
        if key not in self._values:
            value = char_eval(self.character, q.a, q.d)
            self._values[key] = value if self.twist == 1 else 1 / value
        return self._values[key]

    def action(self, g: GL2ModElement) -> Tuple[Tuple[int, ...], Tuple[PadicNumber, ...]]:
        """Мономиальная матрица ρ(g): i -> (j, χ(p'))."""
        targets = []
        scalars = []
        for r in self.representatives:
            j = self.coset_of(g * r)
            q = self.representatives[j].inverse() * g * r
            if not in_parabolic(q):
                raise RuntimeError(f"Элемент {q.entries()} не лежит в P")
            targets.append(j)
            scalars.append(self.chi_on_parabolic(q))
        return tuple(targets), tuple(scalars)

    def matrix(self, g: GL2ModElement) -> List[List[PadicNumber]]:
        ctx = self.character.ctx
        targets, scalars = self.action(g)
        rows = [[ctx.zero() for _ in range(self.dimension)] for _ in range(self.dimension)]
        for i, (j, value) in enumerate(zip(targets, scalars)):
            rows[j][i] = value
        return rows

    def basis_value(self, i: int, x: GL2ModElement) -> PadicNumber:
        """f_i(x)."""
        ctx = self.character.ctx
        if self.coset_of(x) != i:
            return ctx.zero()
        q = self.representatives[i].inverse() * x
        return 1 / self.chi_on_parabolic(q)


def coset_representatives(p: int, level: int, largest: bool = False) -> Tuple[GL2ModElement, ...]:
    """Минимальные (или максимальные при largest) представители G/P, упорядоченные по представителю."""
    chosen: Dict[Tuple[int, int], GL2ModElement] = {}
    for g in enumerate_group(p, level):
        if largest:
            chosen[_coset_key(g)] = g
        else:
            chosen.setdefault(_coset_key(g), g)
    return tuple(sorted(chosen.values()))


def _check_conductor(character: TorusCharacter, level: int) -> None:
    conductor = char_conductor(character)
    if conductor is None or conductor > level:
        shown = "> N" if conductor is None else conductor
        raise ValueError(f"Кондуктор характера {shown} превышает уровень {level}")


def build_induced(character: TorusCharacter, level: int) -> InducedModule:
    _check_conductor(character, level)
    representatives = coset_representatives(character.ctx.p, level)
    logging.info(f"Индуцированный модуль уровня {level}: размерность {len(representatives)}")
    return InducedModule(character, level, representatives)


def coset_module(character: TorusCharacter, level: int) -> InducedModule:
    """Модель M_χ на уровне n: базис r_i ⊗ 1, g (r_i ⊗ 1) = χ(p') r_j ⊗ 1 с g r_i = r_j p'."""
    _check_conductor(character, level)
    return InducedModule(character, level, coset_representatives(character.ctx.p, level), twist=1)


@dataclass(frozen=True)
class PairingReport:
    dimension: int
    model_dimension: int
    nonsingular: bool
    invariant: bool
    checked_elements: int

    @property
    def perfect(self) -> bool:
        return self.dimension == self.model_dimension and self.nonsingular and self.invariant

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "model_dimension": self.model_dimension,
            "nonsingular": self.nonsingular,
            "invariant": self.invariant,
            "checked_elements": self.checked_elements,
            "perfect": self.perfect,
        }


def dual_pairing_check(ind: InducedModule) -> PairingReport:
    """
    Спаривание Ind_P^G(χ) с конечной моделью M_{χ^-1}: <s_j ⊗ 1, f_i> = f_i(s_j).

    Модель строится на максимальных представителях s_j, независимо от
    минимальных r_i базиса Ind, поэтому матрица спаривания мономиальна и в общем
    случае не диагональна. Проверяются её невырожденность по модулю p и инвариантность
    ρ_M(g)^T * Pair * ρ_Ind(g) = Pair для всех g группы уровня n.
    """
    p = ind.character.ctx.p
    model = InducedModule(ind.character, ind.level, coset_representatives(p, ind.level, largest=True), twist=-1)
    pairing = [[ind.basis_value(i, r) for i in range(ind.dimension)] for r in model.representatives]
    residues = [[c.to_integer() % p for c in row] for row in pairing]
    nonsingular = int(DM(residues, ZZ).convert_to(GF(p)).rank()) == ind.dimension
    group = enumerate_group(p, ind.level)
    invariant = True
    for g in group:
        targets_ind, scalars_ind = ind.action(g)
        targets_m, scalars_m = model.action(g)
        for i in range(ind.dimension):
            for k in range(ind.dimension):
                # (ρ_M^T Pair ρ_Ind)_{ik} = ρ_M[σ_M(i), i] Pair[σ_M(i), σ_Ind(k)] ρ_Ind[σ_Ind(k), k]
                value = scalars_m[i] * pairing[targets_m[i]][targets_ind[k]] * scalars_ind[k]
                if not value.agrees_with(pairing[i][k], 3):
                    invariant = False
                    break
            if not invariant:
                break
        if not invariant:
            logging.warning(f"Спаривание не инвариантно относительно {g.entries()}")
            break
    return PairingReport(ind.dimension, model.dimension, nonsingular, invariant, len(group))


@dataclass(frozen=True)
class SplitReport:
    dimension: int
    n_block: Tuple[int, ...]
    n_minus_block: Tuple[int, ...]
    w_maps_into_minus: bool
    iwahori_preserves_blocks: bool
    identity_preserves_blocks: bool
    witness: Optional[GL2ModElement]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "dimension": self.dimension,
            "n_block_dimension": len(self.n_block),
            "n_minus_block_dimension": len(self.n_minus_block),
            "w_maps_into_minus": self.w_maps_into_minus,
            "iwahori_preserves_blocks": self.iwahori_preserves_blocks,
            "identity_preserves_blocks": self.identity_preserves_blocks,
            "non_equivariance_witness": None if self.witness is None else self.witness.to_list(),
        }


def bruhat_module_split(character: TorusCharacter, level: int) -> SplitReport:
    """
    Разложение конечной модели M_χ по клеткам Брюа представителей смежных классов.

    N-блок: классы из клетки B, N⁻-блок: классы из клетки BwP. Разложение
    сохраняется подгруппой Ивахори, w переводит N-блок в N⁻-блок, а первый
    элемент группы, выводящий N-блок за его пределы, служит свидетелем
    неэквивариантности.
    """
    module = coset_module(character, level)
    p = character.ctx.p
    n_block = tuple(i for i, r in enumerate(module.representatives) if in_iwahori(r))
    n_minus = tuple(i for i, r in enumerate(module.representatives) if not in_iwahori(r))

    def preserves(g: GL2ModElement) -> bool:
        targets, _ = module.action(g)
        return all(targets[i] in n_block for i in n_block) and all(targets[i] in n_minus for i in n_minus)

    w_targets, _ = module.action(weyl(p, level))
    w_into = all(w_targets[i] in n_minus for i in n_block)
    group = enumerate_group(p, level)
    iwahori_ok = all(preserves(g) for g in group if in_iwahori(g))
    witness = None
    for g in group:
        targets, _ = module.action(g)
        if any(targets[i] not in n_block for i in n_block):
            witness = g
            break
    return SplitReport(module.dimension, n_block, n_minus, w_into, iwahori_ok,
                       preserves(identity(p, level)), witness)
