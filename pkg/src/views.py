import logging
import random
from typing import Any, Callable, Dict

from src.duality_finite import FreeModuleMap, double_dual_check, dual_data, exactness_suite
from src.finite_level import (
    bruhat_cell_sizes,
    bruhat_module_split,
    build_induced,
    dual_pairing_check,
    enumerate_group,
    group_order,
    ideal_power_nilpotency,
    in_iwahori,
    iwahori_factor,
    nakayama_dimension,
    random_product_check,
    regular_module,
)
from src.iwasawa_modules import (
    INTERTWINER_SAMPLES,
    ProbeConfig,
    intertwiner_solve,
    obstruction_coefficients,
    principal_series_evidence,
    simplicity_probe,
)
from src.services import run_selftest
from src.torus_characters import c_of_chi, char_conductor, classify_c, conductor_text, w_twist
from src.utils import RunConfig, resolve_characters, resolve_subgroup

OBSTRUCTION_DEGREE = 10
RANDOM_PRODUCT_SAMPLES = 20


def _simplicity_config(config: RunConfig) -> ProbeConfig:
    return ProbeConfig(k=config.k, ell=config.ell, torus_samples=config.samples, generations=config.generations)


def _handle(name: str, func: Callable[[RunConfig], Dict[str, Any]], config: RunConfig) -> Dict[str, Any]:
    logging.info(f"Команда {name}: старт")
    try:
        result = func(config)
    except Exception as e:
        logging.error(f"Ошибка в команде {name}: {e}")
        return {"error": str(e)}
    logging.info(f"Команда {name}: готово")
    return result


def _cchi(config: RunConfig) -> Dict[str, Any]:
    ctx = config.context()
    chi = resolve_characters(config, ctx)[0]
    invariant = c_of_chi(chi)
    return {
        "character": chi.to_dict(),
        "c": invariant.to_dict(),
        "classification": classify_c(invariant, ctx.M - 1).to_dict(),
        "conductor": conductor_text(ctx, char_conductor(chi)),
        "w_twist_c": c_of_chi(w_twist(chi)).to_dict(),
    }


def cchi_page(config: RunConfig) -> Dict[str, Any]:
    """Инвариант c(χ), его классификация и кондуктор."""
    return _handle("cchi", _cchi, config)


def simplicity_page(config: RunConfig) -> Dict[str, Any]:
    """Проба простоты N_χ для первого характера конфигурации."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        chi = resolve_characters(cfg, cfg.context())[0]
        return simplicity_probe(chi, _simplicity_config(cfg)).to_dict()

    return _handle("simplicity", body, config)


def intertwine_page(config: RunConfig) -> Dict[str, Any]:
    """Сплетающие операторы N_χ' -> N_χ; χ' - первый характер, χ - второй."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        chi_prime, chi = resolve_characters(cfg, cfg.context(), 2)
        return intertwiner_solve(chi_prime, chi, cfg.samples or INTERTWINER_SAMPLES).to_dict()

    return _handle("intertwine", body, config)


def obstruction_page(config: RunConfig) -> Dict[str, Any]:
    """Ряд препятствий для c(χ) и кратности ell."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        chi = resolve_characters(cfg, cfg.context())[0]
        invariant = c_of_chi(chi)
        degree = max(OBSTRUCTION_DEGREE, cfg.ell + 3)
        report = obstruction_coefficients(invariant, cfg.ell, degree)
        return {"c": invariant.to_dict(), "ell": cfg.ell, "degree": degree, **report.to_dict()}

    return _handle("obstruction", body, config)


def nilpotency_page(config: RunConfig) -> Dict[str, Any]:
    """Индекс нильпотентности I_H и его проверка случайными произведениями."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        ambient, ideal = resolve_subgroup(cfg)
        report = ideal_power_nilpotency(ambient, ideal, cfg.mode)
        result = {"subgroup": cfg.subgroup, "ideal": ideal.to_dict(), **report.to_dict()}
        if report.index is not None:
            rng = random.Random(cfg.seed)
            checked = random_product_check(ambient, ideal, report.index, RANDOM_PRODUCT_SAMPLES, rng)
            result["random_products_divisible"] = checked
        return result

    return _handle("nilpotency", body, config)


def nakayama_page(config: RunConfig) -> Dict[str, Any]:
    """Коинварианты регулярного модуля и кокоранг инвариантов двойственного."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        ambient, ideal = resolve_subgroup(cfg)
        module = regular_module(ambient, ideal.subgroup_generators)
        report = nakayama_dimension(module, ideal, cfg.p)
        subgroup = ideal.subgroup(cfg.p, cfg.level)
        return {"subgroup": cfg.subgroup, "coset_count": len(ambient) // len(subgroup), **report.to_dict()}

    return _handle("nakayama", body, config)


def bruhat_page(config: RunConfig) -> Dict[str, Any]:
    """Размеры клеток Брюа и проверка разложения Ивахори на всей клетке B."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        sizes = bruhat_cell_sizes(cfg.p, cfg.level)
        factored = 0
        for g in enumerate_group(cfg.p, cfg.level):
            if in_iwahori(g):
                u_minus, p_part = iwahori_factor(g)
                factored += int(u_minus * p_part == g)
        order = group_order(cfg.p, cfg.level)
        return {
            "cells": [{"cell": name, "size": size} for name, size in sorted(sizes.items())],
            "group_order": order,
            "partition_ok": sum(sizes.values()) == order,
            "iwahori_factor_ok": factored == sizes["cell_B"],
        }

    return _handle("bruhat", body, config)


def induce_page(config: RunConfig) -> Dict[str, Any]:
    """Ind_P^G(χ) на уровне n: размерность, спаривание, разложение и сводка о неприводимости."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        ctx = cfg.context()
        chi = resolve_characters(cfg, ctx)[0]
        result: Dict[str, Any] = {"evidence": principal_series_evidence(chi, _simplicity_config(cfg), cfg.level)}
        conductor = char_conductor(chi)
        if conductor is None or conductor > cfg.level:
            result["finite_model"] = {
                "applicable": False,
                "reason": f"кондуктор {conductor_text(ctx, conductor)} превышает уровень {cfg.level}",
            }
            return result
        induced = build_induced(chi, cfg.level)
        result["finite_model"] = {
            "applicable": True,
            "dimension": induced.dimension,
            "pairing": dual_pairing_check(induced).to_dict(),
            "split": bruhat_module_split(chi, cfg.level).to_dict(),
        }
        return result

    return _handle("induce", body, config)


def duality_page(config: RunConfig) -> Dict[str, Any]:
    """Двойственность для матрицы конфигурации; по умолчанию diag(1, p)."""

    def body(cfg: RunConfig) -> Dict[str, Any]:
        rows = cfg.matrix if cfg.matrix is not None else ((1, 0), (0, cfg.p))
        f = FreeModuleMap.of(cfg.p, rows)
        result = {"map": f.to_dict(), "exactness": exactness_suite(f).to_dict(), "dual": dual_data(f).to_dict()}
        if f.domain_rank:
            result["double_dual"] = double_dual_check(f.domain_rank).to_dict()
        return result

    return _handle("duality", body, config)


def selftest_page(config: RunConfig) -> Dict[str, Any]:
    """Полный прогон приёмочных проверок."""
    return _handle("selftest", lambda cfg: run_selftest(cfg.to_dict()), config)


PAGES: Dict[str, Callable[[RunConfig], Dict[str, Any]]] = {
    "cchi": cchi_page,
    "simplicity": simplicity_page,
    "intertwine": intertwine_page,
    "obstruction": obstruction_page,
    "nilpotency": nilpotency_page,
    "nakayama": nakayama_page,
    "bruhat": bruhat_page,
    "induce": induce_page,
    "duality": duality_page,
    "selftest": selftest_page,
}
