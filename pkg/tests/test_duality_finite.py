import pytest

from src.duality_finite import (
    FreeModuleMap,
    compose,
    double_dual_check,
    dual_data,
    dual_map,
    elementary_divisors,
    exactness_suite,
)
from src.padic_core import INFINITY, PrecisionContext, PrecisionError


@pytest.fixture
def diag_1_p():
    return FreeModuleMap.of(3, [[1, 0], [0, 3]])


def test_map_validation():
    with pytest.raises(ValueError):
        FreeModuleMap(4, 1, 1, ((1,),))
    with pytest.raises(ValueError):
        FreeModuleMap(3, 2, 1, ((1,),))
    with pytest.raises(ValueError):
        FreeModuleMap.of(3, [])


def test_reduction_modulo_precision():
    f = FreeModuleMap.of(3, [[10, -1]], precision=2)
    assert f.matrix == ((1, 8),)
    assert not f.is_exact


def test_from_padic():
    ctx = PrecisionContext(3, 8)
    f = FreeModuleMap.from_padic([[ctx.number(1), ctx.number(3)]])
    assert f.precision == 8
    assert f.matrix == ((1, 3),)


def test_apply_and_columns(diag_1_p):
    assert diag_1_p.apply([2, 5]) == [2, 15]
    assert diag_1_p.columns() == [[1, 0], [0, 3]]
    with pytest.raises(ValueError):
        diag_1_p.apply([1])


def test_dual_is_transpose():
    f = FreeModuleMap.of(3, [[1, 2, 3]])
    assert dual_map(f).matrix == ((1,), (2,), (3,))
    assert dual_map(dual_map(f)) == f


def test_dual_reverses_composition():
    f = FreeModuleMap.of(5, [[1, 2], [0, 5], [3, 1]])
    g = FreeModuleMap.of(5, [[2, 0, 1]])
    assert dual_map(compose(g, f)).matrix == compose(dual_map(f), dual_map(g)).matrix


def test_compose_rank_mismatch(diag_1_p):
    with pytest.raises(ValueError):
        compose(FreeModuleMap.identity(3, 3), diag_1_p)


def test_compose_takes_lower_precision():
    f = FreeModuleMap.of(3, [[1]], precision=4)
    g = FreeModuleMap.of(3, [[2]], precision=2)
    assert compose(g, f).precision == 2
    assert compose(g, FreeModuleMap.identity(3, 1)).precision == 2


def test_elementary_divisors(diag_1_p):
    assert elementary_divisors(FreeModuleMap.identity(3, 2)) == (1, 1)
    assert elementary_divisors(diag_1_p) == (1, 3)
    assert elementary_divisors(FreeModuleMap.of(3, [[2, 0], [0, 18]])) == (1, 9)


def test_elementary_divisors_unimodular_invariance():
    f = FreeModuleMap.of(3, [[3, 6], [9, 0]])
    unimodular = FreeModuleMap.of(3, [[1, 1], [0, 1]])
    assert elementary_divisors(compose(unimodular, f)) == elementary_divisors(f)
    assert elementary_divisors(compose(f, unimodular)) == elementary_divisors(f)


def test_elementary_divisors_need_precision():
    assert elementary_divisors(FreeModuleMap.of(3, [[3]], precision=2)) == (3,)
    with pytest.raises(PrecisionError):
        elementary_divisors(FreeModuleMap.of(3, [[9]], precision=2))


def test_dual_data(diag_1_p):
    data = dual_data(diag_1_p)
    assert data.valuation_vector == (0, 1)
    assert data.elementary_divisors == (1, 3)
    assert dual_data(FreeModuleMap.of(3, [[1, 0], [0, 0]])).valuation_vector == (0, INFINITY)
    assert dual_data(FreeModuleMap.of(3, [[1, 0], [0, 0]])).to_dict()["valuation_vector"] == [0, None]


def test_double_dual_identity():
    report = double_dual_check(3)
    assert report.is_identity
    assert report.verdict


def test_double_dual_permutation():
    report = double_dual_check(3, [1, 2, 0])
    assert not report.is_identity
    assert report.matches_permutation
    assert report.verdict


@pytest.mark.parametrize("rank, permutation", [(0, None), (2, [0, 0]), (2, [0, 1, 2])])
def test_double_dual_rejects(rank, permutation):
    with pytest.raises(ValueError):
        double_dual_check(rank, permutation)


def test_exactness_identity():
    report = exactness_suite(FreeModuleMap.identity(5, 2))
    assert report.surjective
    assert report.dual_isometry
    assert report.holds


def test_exactness_diag(diag_1_p):
    report = exactness_suite(diag_1_p)
    assert report.kernel_rank == 0
    assert report.cokernel_torsion == (3,)
    assert report.cokernel_cot_rank == 0
    assert not report.surjective
    assert not report.dual_isometry
    assert report.holds


def test_exactness_zero_map():
    report = exactness_suite(FreeModuleMap.zero(3, 2, 2))
    assert report.kernel_rank == 2
    assert report.cokernel_cot_rank == 2
    assert report.dual_kernel_rank == 2
    assert report.holds


def test_exactness_injection():
    report = exactness_suite(FreeModuleMap.of(3, [[1, 0], [0, 1], [0, 0]]))
    assert report.kernel_rank == 0
    assert report.dual_image_closure_rank == 2
    assert report.cokernel_cot_rank == 1
    assert report.dual_kernel_rank == 1
    assert report.holds
    assert report.to_dict()["holds"]


def test_exactness_projection():
    report = exactness_suite(FreeModuleMap.of(3, [[1, 0, 2]]))
    assert report.kernel_rank == 2
    assert report.surjective
    assert report.dual_isometry
    assert report.holds
