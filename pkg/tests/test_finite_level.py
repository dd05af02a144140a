import random

import pytest

from src.finite_level import (
    GL2ModElement,
    GroupModule,
    GroupRingElement,
    IdealData,
    SizeGuardError,
    _annihilated_by_generators,
    all_subgroups,
    bruhat_cell_sizes,
    bruhat_module_split,
    build_induced,
    coset_representatives,
    dual_pairing_check,
    enumerate_group,
    gamma,
    generate_subgroup,
    group_order,
    ideal_power_nilpotency,
    identity,
    in_iwahori,
    is_normal,
    iwahori_factor,
    nakayama_dimension,
    random_product_check,
    reduction_kernel,
    regular_module,
    torus,
    unipotent_u,
    weyl,
)
from src.padic_core import PrecisionContext
from src.torus_characters import TorusCharacter


@pytest.fixture
def trivial_3():
    return TorusCharacter.trivial(PrecisionContext(3, 16, 16))


@pytest.fixture
def k1_ideal():
    return IdealData(tuple(g for g in reduction_kernel(2, 2) if not g.is_identity()))


def test_element_validation():
    with pytest.raises(ValueError):
        GL2ModElement(3, 1, 1, 1, 1, 1)
    with pytest.raises(ValueError):
        GL2ModElement(3, 1, 4, 0, 0, 1)
    assert GL2ModElement.of(3, 1, 4, 0, 0, -1).entries() == (1, 0, 0, 2)


def test_multiplication_and_inverse():
    g = GL2ModElement.of(3, 2, 2, 3, 1, 5)
    assert g * g.inverse() == identity(3, 2)
    assert weyl(3, 1) * weyl(3, 1) == torus(3, 1, -1, -1)


@pytest.mark.parametrize("p, level, order", [(2, 1, 6), (3, 1, 48), (2, 2, 96)])
def test_group_order(p, level, order):
    assert group_order(p, level) == order
    assert len(enumerate_group(p, level)) == order


def test_enumerate_guard():
    with pytest.raises(SizeGuardError):
        enumerate_group(5, 3)


@pytest.mark.parametrize("p, level, cells", [(2, 1, (2, 4)), (3, 1, (12, 36))])
def test_bruhat_cell_sizes(p, level, cells):
    sizes = bruhat_cell_sizes(p, level)
    assert (sizes["cell_B"], sizes["cell_BwP"]) == cells


def test_iwahori_factor():
    for g in enumerate_group(3, 1):
        if in_iwahori(g):
            u_minus, q = iwahori_factor(g)
            assert u_minus * q == g
            assert q.b == 0
    with pytest.raises(ValueError):
        iwahori_factor(weyl(3, 1))


def test_generate_subgroup():
    assert len(generate_subgroup([unipotent_u(5, 1)], 5, 1)) == 5
    assert len(generate_subgroup([gamma(3, 2)], 3, 2)) == 3


def test_subgroups_of_s3():
    group = enumerate_group(2, 1)
    subgroups = all_subgroups(group)
    assert [len(h) for h in subgroups] == [1, 2, 2, 2, 3, 6]
    assert [is_normal(h, group) for h in subgroups] == [True, False, False, False, True, True]


def test_reduction_kernel():
    assert len(reduction_kernel(2, 2)) == 16


def test_group_ring_arithmetic():
    u = unipotent_u(3, 1)
    x = GroupRingElement.augmentation_generator(u)
    assert x.augmentation() == 0
    cube = x * x * x
    assert cube.divisible_by(3)
    assert not (x * x).divisible_by(3)
    assert GroupRingElement.augmentation_generator(identity(3, 1)).is_zero()


@pytest.mark.parametrize("p", [2, 3, 5])
def test_nilpotency_of_cyclic_group(p):
    u = unipotent_u(p, 1)
    report = ideal_power_nilpotency(sorted(generate_subgroup([u], p, 1)), IdealData((u,)))
    assert report.index == p
    assert report.verified
    assert report.dimensions == tuple(range(p - 1, -1, -1))


def test_nilpotency_pi_containment():
    u = unipotent_u(3, 1)
    report = ideal_power_nilpotency(sorted(generate_subgroup([u], 3, 1)), IdealData((u,)), mode="pi_containment")
    assert report.index is not None
    assert report.verified


def test_nilpotency_rejects_non_normal():
    group = enumerate_group(2, 1)
    with pytest.raises(ValueError):
        ideal_power_nilpotency(group, IdealData((unipotent_u(2, 1),)))


def test_nilpotency_rejects_unknown_mode():
    u = unipotent_u(3, 1)
    with pytest.raises(ValueError):
        ideal_power_nilpotency(sorted(generate_subgroup([u], 3, 1)), IdealData((u,)), mode="other")


def test_nilpotency_of_reduction_kernel(k1_ideal):
    ambient = enumerate_group(2, 2)
    report = ideal_power_nilpotency(ambient, k1_ideal)
    assert report.index is not None
    assert report.verified
    assert random_product_check(ambient, k1_ideal, report.index, 10, random.Random(0))


def test_nakayama_on_regular_module():
    u = unipotent_u(3, 1)
    group = sorted(generate_subgroup([u], 3, 1))
    report = nakayama_dimension(regular_module(group, [u]), IdealData((u,)), 3)
    assert report.rank == 1
    assert report.torsion_divisors == ()
    assert report.consistent


def test_nakayama_without_generators():
    u = unipotent_u(3, 1)
    report = nakayama_dimension(regular_module([identity(3, 1), u], []), IdealData(()), 3)
    assert report.rank == 2
    assert report.consistent


def test_coset_representatives():
    assert len(coset_representatives(3, 1)) == 4
    assert len(coset_representatives(2, 2)) == 6


def test_induced_dimension_and_pairing(trivial_3):
    induced = build_induced(trivial_3, 1)
    assert induced.dimension == 4
    report = dual_pairing_check(induced)
    assert report.perfect
    assert report.checked_elements == 48


def test_induced_rejects_large_conductor(trivial_3):
    chi = TorusCharacter.from_exponents(trivial_3.ctx, 0, 1)
    with pytest.raises(ValueError):
        build_induced(chi, 1)


def test_bruhat_module_split(trivial_3):
    report = bruhat_module_split(trivial_3, 1)
    assert len(report.n_block) == 1
    assert len(report.n_minus_block) == 3
    assert report.w_maps_into_minus
    assert report.iwahori_preserves_blocks
    assert report.identity_preserves_blocks
    assert report.witness is not None
    assert not in_iwahori(report.witness)


def test_annihilation_check_on_cyclic_group():
    u = unipotent_u(3, 1)
    elements = sorted(generate_subgroup([u], 3, 1))
    assert _annihilated_by_generators([[1, 1, 1]], elements, [u], 3)
    assert not _annihilated_by_generators([[1, 0, 0]], elements, [u], 3)


def test_nakayama_on_regular_module_of_s3():
    h = GL2ModElement.of(2, 1, 0, 1, 1, 1)
    report = nakayama_dimension(regular_module(enumerate_group(2, 1), [h]), IdealData((h,)), 2)
    assert report.rank == 2
    assert report.dual_invariants_corank == 2
    assert report.torsion_divisors == ()
    assert report.consistent


def test_nakayama_counts_torsion():
    u = unipotent_u(3, 1)
    module = GroupModule(1, {u: ((4,),)})
    report = nakayama_dimension(module, IdealData((u,)), 3)
    assert report.rank == 0
    assert report.torsion_divisors == (3,)
    assert report.dual_invariants_corank == 0


@pytest.mark.parametrize(
    "module",
    [GroupModule(2, {}), GroupModule(3, {unipotent_u(3, 1): ((1, 0), (0, 1))})],
)
def test_nakayama_rejects_missing_or_malformed_action(module):
    with pytest.raises(ValueError):
        nakayama_dimension(module, IdealData((unipotent_u(3, 1),)), 3)


def test_largest_coset_representatives():
    smallest, largest = coset_representatives(2, 1), coset_representatives(2, 1, largest=True)
    assert len(largest) == len(smallest) == 3
    assert smallest != largest


def test_pairing_against_independent_model():
    induced = build_induced(TorusCharacter.trivial(PrecisionContext(2, 16, 16)), 1)
    report = dual_pairing_check(induced)
    assert report.model_dimension == 3
    assert report.nonsingular
    assert report.perfect
