import logging
from dataclasses import dataclass, field, replace
from math import comb
from typing import Any, Dict, List, Optional, Sequence, Tuple

from src.finite_level import bruhat_module_split
from src.padic_core import INFINITY, PadicNumber, PrecisionContext, PrecisionError, Scalar, ilog, pbinomial
from src.power_series import (
    DistinguishedData,
    TruncatedSeries,
    UndeterminedError,
    boundedness_floor,
    log_series_power,
    omega_sub,
    series_gcd_unit_test,
)
from src.torus_characters import (
    CInvariant,
    TorusCharacter,
    c_of_chi,
    char_conductor,
    char_eval,
    classify_c,
    conductor_text,
    torsion_generator,
    w_twist,
)

logging.basicConfig(level=logging.INFO, format="%(asctime)s - %(levelname)s - %(message)s")

N_CHI = "N_chi"
N_CHI_MINUS = "N_chi_minus"
SIDES = (N_CHI, N_CHI_MINUS)

DEFAULT_GENERATIONS = 3
INTERTWINER_SAMPLES = (2, 3, 7)


def _loss_of(series: TruncatedSeries) -> int:
    # потеря цифр относительно целого ряда с точностью N
    ctx = series.ctx
    floor = series.valuation_floor
    if floor in (INFINITY, -INFINITY):
        floor = 0
    worst = series.min_absolute_precision()
    if worst == INFINITY:
        return 0
    return max(0, int(ctx.N + floor - worst))


@dataclass(frozen=True)
class NChiElement:
    """
    Элемент N_χ (или N_χ⁻) как ряд F(x), x = γ - 1 (соответственно x = u - 1).

    loss_digits: накопленная потеря точности относительно N.
    """

    series: TruncatedSeries
    character: TorusCharacter
    side: str = N_CHI
    loss_digits: int = 0
    dropped_terms: Tuple[int, ...] = ()

    def __post_init__(self) -> None:
        if self.side not in SIDES:
            raise ValueError(f"Неизвестная сторона {self.side!r}, допустимы {SIDES}")
        if self.series.ctx != self.character.ctx:
            raise ValueError("Ряд и характер построены в разных контекстах")

    def with_series(self, series: TruncatedSeries, dropped: Tuple[int, ...] = ()) -> "NChiElement":
        return replace(self, series=series, loss_digits=max(self.loss_digits, _loss_of(series)),
                       dropped_terms=self.dropped_terms + dropped)


def _unit(ctx: PrecisionContext, a: Scalar) -> PadicNumber:
    a = ctx.number(a)
    if not a.is_unit:
        raise ValueError(f"{a.to_text()} не является единицей Z_p")
    return a


def act_torus(a: Scalar, element: NChiElement) -> NChiElement:
    """
    Действие t_a = diag(a, 1): F -> χ(t_a) * F(ω_a(x)).

    На N_χ⁻ подстановка идёт через ω_(a^-1), поскольку t_a u t_a^-1 = u^(1/a).

    :param a: Единица Z_p.
    :param element: Элемент модуля.
    :return: Образ элемента.
    """
    ctx = element.series.ctx
    a = _unit(ctx, a)
    exponent = a if element.side == N_CHI else 1 / a
    scalar = char_eval(element.character, a, 1)
    moved = element.series.compose(omega_sub(ctx, exponent)).scale(scalar)
    return element.with_series(moved)


def grouplike(ctx: PrecisionContext, s: Scalar) -> TruncatedSeries:
    """γ^s = sum C(s, k) x^k для s из Z_p."""
    s = ctx.number(s)
    if not s.is_exact_zero and s.valuation < 0:
        raise ValueError(f"grouplike: {s.to_text()} не лежит в Z_p")
    return TruncatedSeries.build(ctx, [pbinomial(s, k) for k in range(ctx.M)], 0)


def _gamma_basis(series: TruncatedSeries, top: int) -> List[PadicNumber]:
    # sum f_k (γ - 1)^k = sum g_j γ^j, g_j = sum_{k >= j} (-1)^(k-j) C(k, j) f_k
    ctx = series.ctx
    result = []
    for j in range(top + 1):
        total = ctx.zero()
        for k in range(j, top + 1):
            f = series.coeffs[k]
            if f.is_exact_zero:
                continue
            binomial = comb(k, j)
            total = total + f * (binomial if (k - j) % 2 == 0 else -binomial)
        result.append(total)
    return result


def expansion_degree(ctx: PrecisionContext) -> int:
    """Наибольшая степень, до которой разложение по γ^j держит потерю под N/2 цифр."""
    top = ctx.M - 1
    while top > 0 and 2 * ilog(top, ctx.p) >= ctx.N:
        top -= 1
    return top


def _unipotent_action(element: NChiElement, diagonal: bool) -> NChiElement:
    ctx = element.series.ctx
    p = ctx.p
    top = expansion_degree(ctx)
    dropped = tuple(k for k in range(top + 1, ctx.M) if not element.series.coeffs[k].is_zero)
    if dropped:
        logging.warning(f"Разложение по групповым элементам обрезано на степени {top}: отброшено {len(dropped)}")
    weights = _gamma_basis(element.series, top)
    result = TruncatedSeries.build(ctx, [])
    for j, weight in enumerate(weights):
        if weight.is_exact_zero:
            continue
        base = ctx.number(1 + j * p)
        if diagonal:
            scalar = char_eval(element.character, base, 1 / base)
        else:
            scalar = char_eval(element.character, 1 / base, base)
        image = grouplike(ctx, ctx.number(j) / base)
        result = result + image.scale(scalar * weight)
    return element.with_series(result, dropped)


def act_u(element: NChiElement) -> NChiElement:
    """
    Действие u = [[1, 0], [1, 1]] на N_χ.

    u(γ^n) = χ(diag((1 + np)^-1, 1 + np)) * γ^(n / (1 + np)); ряд раскладывается
    по γ^j, каждая компонента переводится этой формулой и вновь разлагается по x.
    """
    if element.side != N_CHI:
        raise ValueError("Действие u определено на стороне N_chi")
    return _unipotent_action(element, diagonal=False)


def act_gamma(element: NChiElement) -> NChiElement:
    """Действие γ на N_χ⁻: γ(u^n) = χ(diag(1 + np, (1 + np)^-1)) * u^(n / (1 + np))."""
    if element.side != N_CHI_MINUS:
        raise ValueError("Действие γ определено на стороне N_chi_minus")
    return _unipotent_action(element, diagonal=True)


def finite_difference_sum(ell: int, m: int) -> int:
    """sum_{j=0}^{ell} (-1)^j C(ell, j) j^m, где 0^0 = 1."""
    return sum((-1) ** j * comb(ell, j) * (j ** m if j or m else 1) for j in range(ell + 1))


@dataclass(frozen=True)
class ObstructionReport:
    coefficients: Tuple[PadicNumber, ...]
    threshold: float
    vanishes: bool

    def valuations(self) -> List[Optional[int]]:
        return [None if c.is_exact_zero else int(c.valuation) for c in self.coefficients]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "valuations": self.valuations(),
            "threshold": None if self.threshold == INFINITY else int(self.threshold),
            "vanishes": self.vanishes,
        }


def obstruction_coefficients(c: CInvariant, ell: int, degree: int) -> ObstructionReport:
    """
    Коэффициенты ряда sum_j (-1)^j C(ell, j) (1 + j y)^c до y^degree.

    Коэффициент при y^m равен C(c, m) * sum_j (-1)^j C(ell, j) j^m. Ряд считается
    исчезающим, если все коэффициенты имеют нормирование не ниже
    absolute_precision(c) - floor(log_p degree).
    """
    if ell < 1:
        raise ValueError(f"ell должно быть положительным, получено {ell}")
    value = c.c
    coefficients = tuple(pbinomial(value, m) * finite_difference_sum(ell, m) for m in range(degree + 1))
    threshold = value.absolute_precision - ilog(max(degree, 1), value.p)
    vanishes = all(coef.is_exact_zero or coef.valuation >= threshold for coef in coefficients)
    return ObstructionReport(coefficients, threshold, vanishes)


@dataclass(frozen=True)
class ProbeConfig:
    """Параметры пробы простоты: уровень k, кратность ell, выборка тора, применение u."""

    k: int = 1
    ell: int = 1
    torus_samples: Optional[Tuple[int, ...]] = None
    include_u: bool = True
    generator: Optional[TruncatedSeries] = None
    generations: int = DEFAULT_GENERATIONS

    def validate(self, ctx: PrecisionContext) -> None:
        if self.k < 1 or self.ell < 1:
            raise ValueError(f"k и ell должны быть положительными, получено k = {self.k}, ell = {self.ell}")
        if ctx.p ** self.k * self.ell >= ctx.M:
            raise ValueError(f"p^k * ell = {ctx.p ** self.k * self.ell} не меньше степени усечения {ctx.M}")
        if self.generations < 1:
            raise ValueError("Число поколений должно быть положительным")

    def samples(self, ctx: PrecisionContext) -> List[PadicNumber]:
        """Выборка единиц тора; по умолчанию 1 + p, τ и 2, неединицы отбрасываются."""
        if self.torus_samples is None:
            raw: List[Any] = [1 + ctx.p, torsion_generator(ctx), 2]
        else:
            raw = list(self.torus_samples)
        kept = []
        for a in raw:
            value = ctx.number(a)
            if not value.is_unit:
                logging.warning(f"Элемент выборки {value.to_text()} не является единицей и пропущен")
                continue
            if value not in kept:
                kept.append(value)
        return kept

    def resolve_generator(self, ctx: PrecisionContext) -> TruncatedSeries:
        if self.generator is not None:
            return self.generator
        base = omega_sub(ctx, ctx.p ** self.k)
        result = base
        for _ in range(self.ell - 1):
            result = result * base
        return result

    def to_dict(self, ctx: PrecisionContext) -> Dict[str, Any]:
        return {
            "k": self.k,
            "ell": self.ell,
            "torus_samples": [a.to_text() for a in self.samples(ctx)],
            "include_u": self.include_u,
            "custom_generator": self.generator is not None,
            "generations": self.generations,
            "p": ctx.p,
            "N": ctx.N,
            "M": ctx.M,
        }


@dataclass(frozen=True)
class ProbeVerdict:
    verdict: str
    divisor: Optional[DistinguishedData]
    generation_sizes: Tuple[int, ...]
    gcd_degrees: Tuple[int, ...]
    obstruction: ObstructionReport
    classification: Dict[str, Any]
    config: Dict[str, Any]
    side: str = N_CHI
    diagnostic: str = ""

    def to_dict(self) -> Dict[str, Any]:
        return {
            "verdict": self.verdict,
            "side": self.side,
            "divisor": None if self.divisor is None else self.divisor.to_dict(),
            "generation_sizes": list(self.generation_sizes),
            "gcd_degrees": list(self.gcd_degrees),
            "obstruction": self.obstruction.to_dict(),
            "classification": self.classification,
            "config": self.config,
            "diagnostic": self.diagnostic,
        }


def _orbit(seeds: Sequence[NChiElement], samples: Sequence[PadicNumber], include_u: bool) -> List[NChiElement]:
    orbit = list(seeds)
    for seed in seeds:
        for a in samples:
            orbit.append(act_torus(a, seed))
        if include_u:
            orbit.append(act_u(seed) if seed.side == N_CHI else act_gamma(seed))
    return orbit


def simplicity_probe(chi: TorusCharacter, cfg: ProbeConfig, side: str = N_CHI) -> ProbeVerdict:
    """
    Проба простоты N_χ: замыкание образующего под выборкой действий B и проверка единичности идеала.

    Каждое поколение добавляет образы под t_a и u (γ на стороне N_χ⁻),
    после чего НОД поколения становится затравкой следующего. Отчёт
    также содержит независимую проверку ряда препятствий для c(χ)
    (для N_χ⁻ используется -c(χ)).

    :param chi: Характер тора.
    :param cfg: Параметры пробы.
    :param side: N_chi или N_chi_minus.
    :return: ProbeVerdict: unit_ideal_reached, persistent_divisor или undetermined.
    """
    ctx = chi.ctx
    cfg.validate(ctx)
    invariant = c_of_chi(chi)
    if side == N_CHI_MINUS:
        invariant = CInvariant(-invariant.c, invariant.derivation_precision)
    obstruction = obstruction_coefficients(invariant, cfg.ell, cfg.ell + 3)
    classification = classify_c(invariant, ctx.M - 1).to_dict()
    config = cfg.to_dict(ctx)
    samples = cfg.samples(ctx)

    seeds = [NChiElement(cfg.resolve_generator(ctx), chi, side)]
    sizes: List[int] = []
    degrees: List[int] = []
    divisor: Optional[DistinguishedData] = None

    def verdict(name: str, diagnostic: str) -> ProbeVerdict:
        return ProbeVerdict(name, divisor, tuple(sizes), tuple(degrees), obstruction, classification, config,
                            side, diagnostic)

    for generation in range(cfg.generations):
        try:
            orbit = _orbit(seeds, samples, cfg.include_u)
        except (PrecisionError, UndeterminedError) as e:
            return verdict("undetermined", f"поколение {generation + 1}: {e}")
        sizes.append(len(orbit))
        result = series_gcd_unit_test([element.series for element in orbit])
        logging.info(f"Поколение {generation + 1}: {len(orbit)} рядов, вердикт {result.verdict}")
        if result.verdict == "unit_ideal":
            degrees.append(0)
            divisor = None
            return verdict("unit_ideal_reached", result.diagnostic)
        if result.verdict == "undetermined" or result.divisor is None:
            return verdict("undetermined", result.diagnostic)
        degree = result.divisor.weierstrass_degree
        stable = bool(degrees) and degrees[-1] == degree
        degrees.append(degree)
        divisor = result.divisor
        if stable:
            break
        seeds = [NChiElement(divisor.as_series(ctx), chi, side)]
    return verdict("persistent_divisor", f"делитель степени {degrees[-1]} устойчив")


@dataclass(frozen=True)
class IntertwinerReport:
    central_match: bool
    c_difference: Optional[str]
    candidate_power: Optional[int]
    residuals: Tuple[Dict[str, Any], ...]
    loss_budget: int
    boundedness: Optional[Dict[str, Any]]
    conclusion: str
    cross_cell: Dict[str, Any] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "central_match": self.central_match,
            "c_difference": self.c_difference,
            "candidate_power": self.candidate_power,
            "residuals": list(self.residuals),
            "loss_budget": self.loss_budget,
            "boundedness": self.boundedness,
            "conclusion": self.conclusion,
            "cross_cell": self.cross_cell,
        }


def central_match(chi_prime: TorusCharacter, chi: TorusCharacter) -> bool:
    """Совпадение ограничений на центр diag(b, b)."""
    return (chi_prime.torsion_1 * chi_prime.torsion_2).agrees_with(chi.torsion_1 * chi.torsion_2) and (
        chi_prime.principal_1 * chi_prime.principal_2
    ).agrees_with(chi.principal_1 * chi.principal_2)


def cross_cell_hom(chi_prime: TorusCharacter, chi: TorusCharacter) -> Dict[str, Any]:
    """Гомоморфизмы между клетками N_χ' и N_χ⁻ тождественно нулевые; результат структурный."""
    return {
        "hom_N_chi_prime_to_N_chi_minus": 0,
        "hom_N_chi_minus_to_N_chi_prime": 0,
        "computed": False,
        "reason": "на N_χ' элемент u действует топологически нильпотентно, на N_χ⁻ сопряжённым образом",
    }


def intertwiner_solve(chi_prime: TorusCharacter, chi: TorusCharacter,
                      samples: Sequence[int] = INTERTWINER_SAMPLES) -> IntertwinerReport:
    """
    Анализ сплетающих операторов N_χ' -> N_χ.

    Функциональное уравнение χ(t_a) F(ω_a(x)) = χ'(t_a) F(x) решается
    рядом F = [log(1 + x)]^m при χ' = χ * (a^m d^-m), то есть при
    c(χ') - c(χ) = -2m. Ряд ограничен только при m = 0.
    """
    ctx = chi.ctx
    cross = cross_cell_hom(chi_prime, chi)
    if not central_match(chi_prime, chi):
        return IntertwinerReport(False, None, None, (), 0, None, "zero_by_central_character", cross)

    difference = c_of_chi(chi_prime).c - c_of_chi(chi).c
    half = -difference / 2
    classification = classify_c(CInvariant(half, int(min(half.absolute_precision, ctx.N))), ctx.M - 1)
    m = classification.in_n0
    if m is None:
        return IntertwinerReport(True, difference.to_text(), None, (), 0, None, "zero_no_candidate", cross)

    candidate = log_series_power(ctx, m)
    loss = (m + 1) * ilog(ctx.M - 1, ctx.p) + 3
    threshold = ctx.N - loss
    residuals = []
    for a in samples:
        value = ctx.number(a)
        if not value.is_unit:
            logging.warning(f"Выборка {a} не является единицей и пропущена")
            continue
        moved = candidate.compose(omega_sub(ctx, value)).scale(char_eval(chi, value, 1))
        residual = moved - candidate.scale(char_eval(chi_prime, value, 1))
        lowest = min((c.valuation for c in residual.coeffs if not c.is_exact_zero), default=INFINITY)
        residuals.append({
            "a": a,
            "min_valuation": None if lowest == INFINITY else int(lowest),
            "threshold": threshold,
            "vanishes": lowest >= threshold,
        })
    bounded = boundedness_floor(candidate)
    solved = all(r["vanishes"] for r in residuals)
    if m == 0 and bounded.bounded and solved:
        conclusion = "nonzero_intertwiner"
    elif not solved:
        conclusion = "zero_no_solution"
    else:
        conclusion = "zero_unbounded_candidate"
    return IntertwinerReport(True, difference.to_text(), m, tuple(residuals), loss, bounded.to_dict(),
                             conclusion, cross)


def _finite_level_split(chi: TorusCharacter, level: int) -> Dict[str, Any]:
    conductor = char_conductor(chi)
    if conductor is None or conductor > level:
        shown = conductor_text(chi.ctx, conductor)
        logging.info(f"Конечная модель не строится: кондуктор {shown} превышает уровень {level}")
        return {"applicable": False, "reason": f"кондуктор {shown} превышает уровень {level}"}
    return {"applicable": True, **bruhat_module_split(chi, level).to_dict()}


def principal_series_evidence(chi: TorusCharacter, cfg: ProbeConfig, level: int) -> Dict[str, Any]:
    """
    Сводка о неприводимости Ind_P^G(χ), двойственный к которому модуль есть M_{χ^-1}.

    Проверки простоты идут по клеткам M_{χ^-1}: на N_{χ^-1} и на N⁻_{w(χ^-1)}. К ним добавляются
    структурный ноль между клетками, свидетель неэквивариантности конечной модели
    M_{χ^-1} (если кондуктор не превышает уровень) и критерий c(χ) ∉ -N0.
    """
    dual = chi.inverse()
    twisted = w_twist(dual)
    invariant = c_of_chi(chi)
    classification = classify_c(invariant, chi.ctx.M - 1)
    on_cell = simplicity_probe(dual, cfg, N_CHI)
    on_opposite_cell = simplicity_probe(twisted, cfg, N_CHI_MINUS)
    return {
        "c": invariant.to_dict(),
        "dual_c": c_of_chi(dual).to_dict(),
        "simplicity_N_chi_inverse": on_cell.to_dict(),
        "simplicity_N_w_chi_inverse_minus": on_opposite_cell.to_dict(),
        "cross_cell": cross_cell_hom(dual, twisted),
        "split": _finite_level_split(dual, level),
        "irreducibility_criterion": {
            "c_not_in_neg_N0": classification.in_neg_n0 is None,
            "classification": classification.to_dict(),
        },
    }
