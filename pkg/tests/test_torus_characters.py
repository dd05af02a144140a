import json
import random
from fractions import Fraction

import pytest

from src.padic_core import PrecisionContext, pexp, plog
from src.torus_characters import (
    CharacterDataError,
    TorusCharacter,
    c_of_chi,
    char_conductor,
    char_eval,
    character_from_dict,
    classify_c,
    conductor_text,
    decompose_unit,
    dump_character,
    load_character,
    principal_generator,
    torsion_generator,
    w_twist,
)


@pytest.fixture
def ctx():
    return PrecisionContext(3, 16, 64)


def test_decompose_unit(ctx):
    index, s = decompose_unit(ctx, 2)
    assert index == 1
    rebuilt = torsion_generator(ctx) * pexp(s * plog(principal_generator(ctx)))
    assert rebuilt.agrees_with(2, 3)


def test_decompose_rejects_non_unit(ctx):
    with pytest.raises(ValueError):
        decompose_unit(ctx, 6)


def test_char_eval_closed_form(ctx):
    chi = TorusCharacter.from_exponents(ctx, 2, -1)
    assert char_eval(chi, 7, 1).agrees_with(49, 3)
    assert char_eval(chi, 1, 5).agrees_with(Fraction(1, 5), 3)


@pytest.mark.parametrize(
    "m1, m2, expected",
    [(0, 0, 0), (0, 2, 2), (1, 0, -1), (1, -1, -2), (2, 5, 3)],
)
def test_c_of_closed_form(ctx, m1, m2, expected):
    assert c_of_chi(TorusCharacter.from_exponents(ctx, m1, m2)).c.agrees_with(expected, 3)


def test_c_of_from_c(ctx):
    assert c_of_chi(TorusCharacter.from_c(ctx, Fraction(1, 4))).c.agrees_with(Fraction(1, 4), 3)


def test_w_twist_negates_c(ctx):
    chi = TorusCharacter.from_exponents(ctx, 0, 2)
    assert c_of_chi(w_twist(chi)).c.agrees_with(-2, 3)
    assert w_twist(w_twist(chi)).agrees_with(chi)


def test_classify_trivial(ctx):
    classification = classify_c(c_of_chi(TorusCharacter.trivial(ctx)), ctx.M - 1)
    assert classification.in_n0 == 0
    assert classification.verdict == "in_N0"


def test_classify_negative_integer(ctx):
    classification = classify_c(c_of_chi(TorusCharacter.from_exponents(ctx, 1, 0)), ctx.M - 1)
    assert classification.in_n0 is None
    assert classification.in_neg_n0 == 1


def test_classify_non_integer(ctx):
    classification = classify_c(c_of_chi(TorusCharacter.from_c(ctx, Fraction(1, 4))), ctx.M - 1)
    assert classification.verdict == "not_in_N0_within_precision"
    assert classification.negative_verdict == "not_in_neg_N0_within_precision"


def test_product_and_inverse(ctx):
    chi = TorusCharacter.from_exponents(ctx, 1, 2)
    assert chi.product(chi.inverse()).is_trivial()


def test_conductor(ctx):
    assert char_conductor(TorusCharacter.trivial(ctx)) == 0
    assert char_conductor(TorusCharacter.from_torsion(ctx, 1, 0)) == 1
    one = ctx.one()
    deep = TorusCharacter(ctx, one, one, one, ctx.number(1 + 3**15))
    assert char_conductor(deep) == 2
    assert char_conductor(TorusCharacter.from_exponents(ctx, 0, 1)) is None
    assert conductor_text(ctx, None) == "> 16"


def test_rejects_bad_torsion_image(ctx):
    one = ctx.one()
    with pytest.raises(CharacterDataError):
        TorusCharacter(ctx, ctx.number(2), one, one, one)


def test_rejects_bad_principal_image(ctx):
    one = ctx.one()
    with pytest.raises(CharacterDataError):
        TorusCharacter(ctx, one, one, one, ctx.number(2))


def test_from_dict_closed_form(ctx):
    chi = character_from_dict(ctx, {"p": 3, "closed_form": "a d^-1"})
    assert chi.agrees_with(TorusCharacter.from_exponents(ctx, 1, -1))


def test_from_dict_images(ctx):
    chi = character_from_dict(
        ctx, {"torsion_1": "-1", "torsion_2": "1", "principal_1": "1", "principal_2": "exp(c*log) c=1/2"}
    )
    assert c_of_chi(chi).c.agrees_with(Fraction(1, 2), 3)


@pytest.mark.parametrize(
    "data",
    [
        {"closed_form": "b^2"},
        {"torsion_1": "1"},
        {"p": 5, "closed_form": "1"},
        {"torsion_1": "exp(c*log) c=1", "torsion_2": "1", "principal_1": "1", "principal_2": "1"},
        {"torsion_1": "1", "torsion_2": "1", "principal_1": "1", "principal_2": "2"},
    ],
)
def test_from_dict_rejects_malformed(ctx, data):
    with pytest.raises(CharacterDataError):
        character_from_dict(ctx, data)


def test_dump_and_load(ctx, tmp_path):
    chi = TorusCharacter.from_exponents(ctx, 1, 3)
    path = tmp_path / "chi.json"
    text = dump_character(chi, str(path))
    assert json.loads(text)["p"] == 3
    assert load_character(ctx, str(path)).agrees_with(chi)


def _unit(rng, p):
    while True:
        a = rng.randrange(1, p**6)
        if a % p:
            return a


@pytest.mark.parametrize(
    "make",
    [
        lambda ctx: TorusCharacter.from_exponents(ctx, 2, -1),
        lambda ctx: TorusCharacter.from_c(ctx, Fraction(1, 4)),
        lambda ctx: TorusCharacter.from_torsion(ctx, 1, 0),
    ],
)
def test_char_eval_is_multiplicative(ctx, make):
    chi = make(ctx)
    rng = random.Random(11)
    for _ in range(100):
        a1, d1, a2, d2 = (_unit(rng, 3) for _ in range(4))
        left = char_eval(chi, a1 * a2, d1 * d2)
        right = char_eval(chi, a1, d1) * char_eval(chi, a2, d2)
        assert left.agrees_with(right, 4)


def test_char_eval_on_principal_image():
    ctx = PrecisionContext(5, 16, 64)
    image = pexp(2 * plog(ctx.number(6)))
    one = ctx.one()
    chi = TorusCharacter(ctx, one, one, one, image)
    assert char_eval(chi, 1, 6).agrees_with(image, 3)


@pytest.mark.parametrize(
    "first, second",
    [
        (lambda ctx: TorusCharacter.from_c(ctx, Fraction(1, 4)), lambda ctx: TorusCharacter.from_exponents(ctx, 1, 3)),
        (lambda ctx: TorusCharacter.from_c(ctx, 5), lambda ctx: TorusCharacter.from_c(ctx, Fraction(-2, 7))),
        (lambda ctx: TorusCharacter.from_torsion(ctx, 1, 1), lambda ctx: TorusCharacter.from_exponents(ctx, 0, 2)),
    ],
)
def test_c_is_additive(ctx, first, second):
    chi, psi = first(ctx), second(ctx)
    total = c_of_chi(chi).c + c_of_chi(psi).c
    assert c_of_chi(chi.product(psi)).c.agrees_with(total, 3)
