import logging
import random
from fractions import Fraction
from math import factorial
from typing import Any, Callable, Dict, List, Tuple

import pandas as pd
from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_form
from sympy.polys.domains import ZZ

from src.duality_finite import FreeModuleMap, double_dual_check, exactness_suite
from src.finite_level import (
    IdealData,
    bruhat_cell_sizes,
    bruhat_module_split,
    build_induced,
    dual_pairing_check,
    enumerate_group,
    generate_subgroup,
    group_order,
    ideal_power_nilpotency,
    in_iwahori,
    iwahori_factor,
    random_product_check,
    reduction_kernel,
    unipotent_u,
)
from src.iwasawa_modules import (
    NChiElement,
    ProbeConfig,
    act_torus,
    finite_difference_sum,
    intertwiner_solve,
    obstruction_coefficients,
    simplicity_probe,
)
from src.padic_core import PadicNumber, PrecisionContext
from src.power_series import TruncatedSeries, omega_sub
from src.torus_characters import CInvariant, TorusCharacter

# Настройка логгера
logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

CheckResult = Tuple[bool, str]

DUALITY_PRIMES = (2, 3, 5)
OBSTRUCTION_PRIMES = (3, 5)
EXPECTED_ORDERS = {(2, 1): 6, (3, 1): 48, (2, 2): 96}


def _random_unit(rng: random.Random, p: int, bound: int) -> int:
    while True:
        a = rng.randrange(1, bound)
        if a % p:
            return a


def _random_p_adic_unit(rng: random.Random, ctx: PrecisionContext) -> PadicNumber:
    # единица u/d со случайным p-адическим хвостом; d > 1 взаимно просто с p, так что число не целое
    p = ctx.p
    while True:
        u = rng.randrange(1, p) + p * rng.randrange(p ** (ctx.N - 1))
        d = _random_unit(rng, p, p**3)
        value = Fraction(u, d)
        if value.denominator > 1:
            return ctx.number(value)


def _snf_divisors(rows: List[List[int]], p: int) -> Tuple[int, ...]:
    # p-части ненулевых диагональных элементов нормальной формы Смита над Z
    normal = smith_normal_form(Matrix(rows), domain=ZZ)
    result = []
    for i in range(min(normal.shape)):
        d = abs(int(normal[i, i]))
        if d == 0:
            continue
        power = 1
        while d % (power * p) == 0:
            power *= p
        result.append(power)
    return tuple(sorted(result))


def check_duality(rng: random.Random, count: int = 200) -> CheckResult:
    """Соотношения ядра, коядра и критерий сюръективности на случайных целых матрицах."""
    for index in range(count):
        p = DUALITY_PRIMES[index % len(DUALITY_PRIMES)]
        rows = [[rng.randint(-p * p, p * p) for _ in range(rng.randint(1, 5))]]
        width = len(rows[0])
        rows += [[rng.randint(-p * p, p * p) for _ in range(width)] for _ in range(rng.randint(0, 4))]
        report = exactness_suite(FreeModuleMap.of(p, rows))
        if not report.holds:
            return False, f"нарушение на матрице {rows} при p = {p}"
        if report.elementary_divisors != _snf_divisors(rows, p):
            return False, f"делители {list(report.elementary_divisors)} расходятся с нормальной формой Смита"
    for rank in range(1, 6):
        permutation = list(range(rank))
        rng.shuffle(permutation)
        if not double_dual_check(rank).is_identity or not double_dual_check(rank, permutation).verdict:
            return False, f"двойное двойственное не согласовано на ранге {rank}"
    return True, f"{count} матриц, ранги 1..5"


def check_omega_multiplicativity(
    rng: random.Random, prec: int = 16, trunc: int = 64, pairs: int = 50, loss: int = 4
) -> CheckResult:
    """ω_a ∘ ω_b = ω_ab с потерей не более loss цифр."""
    for p in DUALITY_PRIMES:
        ctx = PrecisionContext(p, prec, trunc)
        for _ in range(pairs):
            a, b = _random_unit(rng, p, p**4), _random_unit(rng, p, p**4)
            left = omega_sub(ctx, a).compose(omega_sub(ctx, b))
            if not left.agrees_with(omega_sub(ctx, a * b), loss):
                return False, f"ω_{a} ∘ ω_{b} != ω_{a * b} при p = {p}"
    return True, f"{pairs} пар для p = 2, 3, 5"


def check_torus_composition(rng: random.Random, prec: int = 16, trunc: int = 64, count: int = 50) -> CheckResult:
    """act_torus(a) ∘ act_torus(b) = act_torus(ab) в пределах накопленной потери."""
    for index in range(count):
        p = DUALITY_PRIMES[index % len(DUALITY_PRIMES)]
        ctx = PrecisionContext(p, prec, trunc)
        chi = TorusCharacter.from_exponents(ctx, rng.randint(-3, 3), rng.randint(-3, 3))
        series = TruncatedSeries.build(ctx, [rng.randint(-p**3, p**3) for _ in range(rng.randint(1, 6))])
        element = NChiElement(series, chi)
        a, b = _random_unit(rng, p, p**3), _random_unit(rng, p, p**3)
        left = act_torus(a, act_torus(b, element))
        right = act_torus(a * b, element)
        if not left.series.agrees_with(right.series, left.loss_digits + right.loss_digits + 4):
            return False, f"композиция не совпала при p = {p}, a = {a}, b = {b}"
    return True, f"{count} троек (a, b, F)"


def check_finite_differences(max_ell: int = 12) -> CheckResult:
    """sum (-1)^j C(ell, j) j^m = 0 при m < ell и (-1)^ell ell! при m = ell."""
    for ell in range(1, max_ell + 1):
        for m in range(ell):
            if finite_difference_sum(ell, m) != 0:
                return False, f"ненулевая сумма при ell = {ell}, m = {m}"
        if finite_difference_sum(ell, ell) != (-1) ** ell * factorial(ell):
            return False, f"неверное значение при m = ell = {ell}"
    return True, f"ell <= {max_ell}"


def check_obstruction(
    rng: random.Random, prec: int = 16, trunc: int = 64, ell: int = 4, degree: int = 10
) -> CheckResult:
    """Ряд препятствий исчезает ровно для c из {0, ..., ell - 1}."""
    for p in OBSTRUCTION_PRIMES:
        ctx = PrecisionContext(p, prec, trunc)
        vanishing = list(range(ell))
        failing = [ctx.number(ell), ctx.number(ell + 1), ctx.number(Fraction(1, 1 + p))]
        failing.append(_random_p_adic_unit(rng, ctx))
        for c in vanishing:
            if not obstruction_coefficients(CInvariant(ctx.number(c), prec), ell, degree).vanishes:
                return False, f"препятствие не исчезло при c = {c}, p = {p}"
        for value in failing:
            if obstruction_coefficients(CInvariant(value, prec), ell, degree).vanishes:
                return False, f"препятствие исчезло при c = {value.to_text()}, p = {p}"
    return True, f"ell = {ell}, степень {degree}, p = 3, 5"


def check_simplicity(p: int = 3, prec: int = 16, trunc: int = 64) -> CheckResult:
    """Тривиальный характер с образующим x даёт устойчивый делитель x; c = 1/(1 + p) даёт единичный идеал."""
    ctx = PrecisionContext(p, prec, trunc)
    trivial = simplicity_probe(TorusCharacter.trivial(ctx), ProbeConfig(generator=TruncatedSeries.variable(ctx)))
    if trivial.verdict != "persistent_divisor" or trivial.divisor is None or trivial.divisor.weierstrass_degree != 1:
        return False, f"тривиальный характер: {trivial.verdict}"
    chi = TorusCharacter.from_c(ctx, Fraction(1, 1 + p))
    for ell in (1, 2):
        result = simplicity_probe(chi, ProbeConfig(ell=ell))
        if result.verdict != "unit_ideal_reached":
            return False, f"c = 1/(1 + p), ell = {ell}: {result.verdict}"
    return True, "x устойчив; ω_p и ω_p^2 порождают единичный идеал"


def check_intertwiners(p: int = 5, prec: int = 16, trunc: int = 64) -> CheckResult:
    """Остатки функционального уравнения для [log(1 + x)]^m и вывод о сплетающем операторе."""
    ctx = PrecisionContext(p, prec, trunc)
    chi = TorusCharacter.trivial(ctx)
    for m in range(3):
        chi_prime = chi.product(TorusCharacter.from_exponents(ctx, m, -m))
        report = intertwiner_solve(chi_prime, chi)
        if report.candidate_power != m or not all(r["vanishes"] for r in report.residuals):
            return False, f"m = {m}: остатки не исчезают"
        bounded = report.boundedness is not None and report.boundedness["verdict"] == "bounded"
        if bounded != (m == 0) or (report.conclusion == "nonzero_intertwiner") != (m == 0):
            return False, f"m = {m}: вывод {report.conclusion}"
    return True, "m = 0, 1, 2 при p = 5"


def check_nilpotency(rng: random.Random, samples: int = 20) -> CheckResult:
    """Индекс нильпотентности для Z/p и для K1 в GL2(Z/4) с проверкой случайными произведениями."""
    for p in DUALITY_PRIMES:
        u = unipotent_u(p, 1)
        cyclic = sorted(generate_subgroup([u], p, 1))
        report = ideal_power_nilpotency(cyclic, IdealData((u,)))
        if report.index != p or not report.verified:
            return False, f"Z/{p}: индекс {report.index}"
    ambient = enumerate_group(2, 2)
    ideal = IdealData(tuple(g for g in reduction_kernel(2, 2) if not g.is_identity()))
    report = ideal_power_nilpotency(ambient, ideal)
    if report.index is None or not report.verified:
        return False, "K1 в GL2(Z/4): индекс не найден"
    if not random_product_check(ambient, ideal, report.index, samples, rng):
        return False, f"K1 в GL2(Z/4): случайное произведение {report.index} множителей не делится на 2"
    return True, f"Z/p: индекс p; K1 в GL2(Z/4): индекс {report.index}"


def check_bruhat() -> CheckResult:
    """Разбиение на клетки и разложение Ивахори на всей группе."""
    parts = []
    for (p, level), expected in sorted(EXPECTED_ORDERS.items()):
        sizes = bruhat_cell_sizes(p, level)
        total = sizes["cell_B"] + sizes["cell_BwP"]
        if total != expected or total != group_order(p, level):
            return False, f"({p}, {level}): сумма клеток {total}, ожидалось {expected}"
        for g in enumerate_group(p, level):
            if in_iwahori(g):
                u_minus, p_part = iwahori_factor(g)
                if u_minus * p_part != g:
                    return False, f"разложение Ивахори не восстанавливает {g.entries()}"
        parts.append(f"({p}, {level}): {sizes['cell_B']} + {sizes['cell_BwP']}")
    return True, "; ".join(parts)


def check_principal_series(prec: int = 16, trunc: int = 64) -> CheckResult:
    """Размерность Ind, невырожденность спаривания и разложение по клеткам на уровне 1."""
    for p in (2, 3):
        ctx = PrecisionContext(p, prec, trunc)
        chi = TorusCharacter.trivial(ctx)
        induced = build_induced(chi, 1)
        if induced.dimension != p + 1:
            return False, f"p = {p}: размерность {induced.dimension}"
        if not dual_pairing_check(induced).perfect:
            return False, f"p = {p}: спаривание не совершенно"
        split = bruhat_module_split(chi, 1)
        blocks = len(split.n_block) + len(split.n_minus_block)
        if blocks != split.dimension or not split.w_maps_into_minus or split.witness is None:
            return False, f"p = {p}: разложение по клеткам не согласовано"
    return True, "p = 2, 3"


def _checks(config: Dict[str, Any], rng: random.Random) -> Dict[int, Tuple[str, Callable[[], CheckResult]]]:
    prec, trunc = config["prec"], config["trunc"]
    return {
        1: ("duality", lambda: check_duality(rng)),
        2: ("omega_multiplicativity", lambda: check_omega_multiplicativity(rng, prec, trunc)),
        3: ("torus_composition", lambda: check_torus_composition(rng, prec, trunc)),
        4: ("finite_differences", lambda: check_finite_differences()),
        5: ("obstruction", lambda: check_obstruction(rng, prec, trunc)),
        6: ("simplicity", lambda: check_simplicity(config["p"], prec, trunc)),
        7: ("intertwiners", lambda: check_intertwiners(5, prec, trunc)),
        8: ("nilpotency", lambda: check_nilpotency(rng)),
        9: ("bruhat", lambda: check_bruhat()),
        10: ("principal_series", lambda: check_principal_series(prec, trunc)),
    }


def run_selftest(config: Dict[str, Any]) -> Dict[str, Any]:
    """
    Прогон набора приёмочных проверок.

    :param config: Словарь конфигурации (нужны p, prec, trunc, seed).
    :return: Словарь с таблицей checks и общим флагом passed.
    """
    rng = random.Random(config["seed"])
    rows = []
    for number, (name, check) in _checks(config, rng).items():
        logging.info(f"Проверка {number}: {name}")
        try:
            passed, detail = check()
        except Exception as e:
            logging.error(f"Проверка {name} завершилась ошибкой: {e}")
            passed, detail = False, f"ошибка: {e}"
        rows.append({"check": number, "name": name, "passed": passed, "detail": detail})
    frame = pd.DataFrame(rows, columns=["check", "name", "passed", "detail"])
    passed_all = bool(frame["passed"].all())
    logging.info(f"Пройдено {int(frame['passed'].sum())} из {len(frame)} проверок")
    return {"checks": rows, "passed": passed_all}
