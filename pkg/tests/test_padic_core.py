import random
from fractions import Fraction

import pytest

from src.padic_core import (
    PadicNumber,
    PrecisionContext,
    PrecisionError,
    arith,
    dot,
    from_int,
    from_text,
    ilog,
    pbinomial,
    pexp,
    plog,
    teichmuller,
)


@pytest.fixture
def ctx():
    return PrecisionContext(3, 16, 64)


def test_from_int_zero_is_exact(ctx):
    assert from_int(3, 16, 0).is_exact_zero
    assert ctx.zero().is_exact_zero


def test_number_splits_valuation_and_unit(ctx):
    x = ctx.number(12)
    assert x.valuation == 1
    assert x.unit == 4
    assert x.absolute_precision == 17


def test_text_round_trip(ctx):
    for value in (ctx.number(12), ctx.number(Fraction(1, 2)), ctx.number(Fraction(5, 9)), ctx.zero()):
        assert from_text(3, 16, value.to_text()) == value


def test_inexact_zero_text_round_trip():
    zero = PadicNumber(3, 16, 5, 0, 0)
    assert zero.to_text() == "O(3^5)"
    assert from_text(3, 16, "O(3^5)") == zero


@pytest.mark.parametrize("text", ["5^0 * (1) + O(5^1)", "3^0 * (1 + 3*3) + O(3^2)", "3^0 * (1) + O(3^2)", "junk"])
def test_from_text_rejects_malformed(text):
    with pytest.raises(ValueError):
        from_text(3, 16, text)


def test_subtraction_gives_inexact_zero(ctx):
    diff = ctx.number(7) - ctx.number(7)
    assert diff.is_zero
    assert not diff.is_exact_zero
    assert diff.absolute_precision == 16


def test_division_by_exact_zero(ctx):
    with pytest.raises(ZeroDivisionError):
        ctx.one() / ctx.zero()


def test_division_by_inexact_zero(ctx):
    with pytest.raises(PrecisionError):
        ctx.one() / PadicNumber(3, 16, 5, 0, 0)


def test_negative_valuation_after_division(ctx):
    x = ctx.one() / ctx.number(9)
    assert x.valuation == -2
    assert (x * 9).agrees_with(1)


def test_inverse_and_negative_power(ctx):
    two = ctx.number(2)
    assert (two * (1 / two)).agrees_with(1)
    assert (two ** -1).agrees_with(Fraction(1, 2))


def test_agrees_with_respects_precision(ctx):
    assert ctx.number(1).agrees_with(1 + 3**16)
    assert not ctx.number(1).agrees_with(2)


def test_arith_dispatch(ctx):
    assert arith(ctx.number(5), ctx.number(4), "add").agrees_with(9)
    assert arith(ctx.number(5), ctx.number(4), "mul").agrees_with(20)
    with pytest.raises(ValueError):
        arith(ctx.number(5), ctx.number(4), "pow")


def test_dot(ctx):
    assert dot([ctx.number(2), ctx.number(3)], [ctx.number(5), ctx.number(7)]).agrees_with(31)
    assert dot([ctx.zero()], [ctx.number(5)]).is_exact_zero


def test_teichmuller_is_root_of_unity():
    ctx = PrecisionContext(5, 12)
    t = teichmuller(ctx, 2)
    assert t.to_integer() % 5 == 2
    assert (t**4).agrees_with(1)


def test_log_exp_inverse(ctx):
    a = ctx.number(4)
    assert pexp(plog(a)).agrees_with(a, 2)


def test_log_is_multiplicative(ctx):
    a, b = ctx.number(4), ctx.number(7)
    assert plog(a * b).agrees_with(plog(a) + plog(b), 2)


@pytest.mark.parametrize("value", [2, 3])
def test_log_outside_domain(ctx, value):
    with pytest.raises(ValueError):
        plog(ctx.number(value))


def test_pbinomial(ctx):
    assert pbinomial(ctx.number(5), 2).agrees_with(10)
    assert pbinomial(ctx.number(Fraction(1, 2)), 2).agrees_with(Fraction(-1, 8))
    assert pbinomial(ctx.number(7), 0).agrees_with(1)


@pytest.mark.parametrize("n, expected", [(1, 0), (9, 2), (10, 2), (26, 2), (27, 3)])
def test_ilog(n, expected):
    assert ilog(n, 3) == expected


def test_context_validation():
    with pytest.raises(ValueError):
        PrecisionContext(4)
    with pytest.raises(ValueError):
        PrecisionContext(3, 0)
    assert PrecisionContext(2).q == 4
    assert PrecisionContext(7).q == 7


def _random_element(rng, ctx):
    p = ctx.p
    return ctx.number(Fraction(rng.randint(-p**6, p**6), rng.randint(1, p**4)))


@pytest.mark.parametrize("p", [2, 3, 5])
def test_field_axioms_on_random_triples(p):
    ctx = PrecisionContext(p, 16, 64)
    rng = random.Random(p)
    for _ in range(1000):
        a, b, c = (_random_element(rng, ctx) for _ in range(3))
        assert ((a + b) + c).agrees_with(a + (b + c), 1)
        assert ((a * b) * c).agrees_with(a * (b * c), 1)
        assert (a * (b + c)).agrees_with(a * b + a * c, 1)


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11])
def test_teichmuller_for_every_residue(p):
    ctx = PrecisionContext(p, 12)
    for r in range(1, p):
        t = teichmuller(ctx, r)
        assert t.to_integer() % p == r
        assert (t ** (p - 1)).agrees_with(1)


def test_teichmuller_of_minus_one():
    assert teichmuller(PrecisionContext(5, 12), 4).agrees_with(-1)


@pytest.mark.parametrize("p", [2, 3, 5])
def test_exp_turns_sums_into_products(p):
    ctx = PrecisionContext(p, 16, 64)
    rng = random.Random(p)
    step = ctx.q
    for _ in range(50):
        a = ctx.number(step * rng.randint(-p**4, p**4))
        b = ctx.number(step * rng.randint(-p**4, p**4))
        assert pexp(a + b).agrees_with(pexp(a) * pexp(b), 3)


def test_geometric_series_digits():
    ctx = PrecisionContext(5, 4)
    x = ctx.number(Fraction(1, 1 - 5))
    assert x.valuation == 0
    assert x.unit == 156
    assert x.digits() == [1, 1, 1, 1]


def test_pbinomial_of_non_integer_argument(ctx):
    value = pbinomial(ctx.number(Fraction(1, 4)), 2)
    assert value.valuation == 1
    assert value.agrees_with(Fraction(-3, 32))


@pytest.mark.parametrize("n", [1, 2, 5, 9, 27])
def test_pbinomial_of_minus_one(ctx, n):
    assert pbinomial(ctx.number(-1), n).agrees_with((-1) ** n)


def test_pbinomial_stays_integral(ctx):
    rng = random.Random(7)
    for _ in range(40):
        s = ctx.number(Fraction(rng.randint(-3**8, 3**8), rng.choice([1, 2, 4, 5, 7])))
        for n in range(0, 129, 8):
            value = pbinomial(s, n)
            assert value.is_exact_zero or value.valuation >= 0
