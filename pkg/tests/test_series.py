from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ising_exact.numerics import ctx
from ising_exact.series import LamPoly, RationalSeries, catalan, central_binomial, pochhammer

fracs = st.fractions(min_value=-5, max_value=5, max_denominator=9)


def _series(coeffs, order=8):
    return RationalSeries(list(coeffs), order)


@settings(max_examples=40, deadline=None)
@given(st.lists(fracs, min_size=8, max_size=8), st.lists(fracs, min_size=8, max_size=8))
def test_ring_laws(a, b):
    A, B = _series(a), _series(b)
    assert (A * B).coeffs == (B * A).coeffs
    assert ((A + B) - B).coeffs == A.coeffs


@settings(max_examples=40, deadline=None)
@given(st.lists(fracs, min_size=7, max_size=7), fracs.filter(lambda x: x != 0))
def test_inverse(tail, head):
    A = _series([head] + tail)
    one = A * A.inverse()
    assert one.coeffs == [1] + [0] * 7


@settings(max_examples=25, deadline=None)
@given(st.lists(fracs, min_size=7, max_size=7))
def test_exp_log_round_trip(tail):
    A = _series([Fraction(1)] + tail)
    assert A.log().exp().coeffs == A.coeffs


def test_binomial_and_hypergeometric():
    s = RationalSeries.binomial(Fraction(-1, 2), 6, scale=-4)
    assert s.coeffs == [central_binomial(k) for k in range(6)]
    h = RationalSeries.hypergeometric([Fraction(1, 2), Fraction(1, 2)], [1], 5)
    assert h.coeffs == [Fraction(central_binomial(k) ** 2, 16 ** k) for k in range(5)]
    assert [catalan(k) for k in range(6)] == [1, 1, 2, 5, 14, 42]
    assert pochhammer(Fraction(1, 2), 3) == Fraction(15, 8)


def test_half_integer_offsets_and_to_x():
    s = RationalSeries([1, 2, 3], Fraction(7, 2), Fraction(1, 2))
    x = s.to_x()
    assert x.variable == "x" and x.offset == 1
    assert [x.coefficient(k) for k in range(1, 7)] == [1, 0, 2, 0, 3, 0]
    assert s.valuation() == Fraction(1, 2)


def test_json_round_trip():
    s = RationalSeries([Fraction(1, 3), 0, Fraction(-7, 2)], Fraction(5, 2), Fraction(-1, 2))
    back = RationalSeries.from_json(s.dumps())
    assert back.coeffs == s.coeffs and back.offset == s.offset and back.order == s.order
    doc = s.to_json()
    assert doc["schema"] == "ising-exact/1" and doc["coeffs"] == ["1/3", "0", "-7/2"]


def test_evaluate_geometric():
    c = ctx(128)
    s = RationalSeries([1] * 200, 200)
    assert abs(s.evaluate(c.mpf("0.25"), c) - c.mpf(4) / 3) < c.ldexp(1, -120)


def test_lampoly():
    p = LamPoly.lam2(2, Fraction(3)) + LamPoly.lam2(1)
    assert p.coeff(2) == 3 and p.coeff(1) == 1
    assert p.evaluate(Fraction(1, 2)) == Fraction(3, 16) + Fraction(1, 4)


def test_truncate_rejects_negative():
    with pytest.raises(ValueError):
        RationalSeries([1, 2], 2, 3)
