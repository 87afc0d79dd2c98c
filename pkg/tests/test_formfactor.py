"""Form factors: exact series against quadrature, boundary data and closed forms."""
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from ising_exact.errors import ParameterError
from ising_exact.formfactor import (
    F_series, algebraic_cos_pi4, correlation_series, explicit_c2, factorization_fit,
    formfactor_quad, formfactor_series, genus_curve_residual, lambda_correlation,
    leading_exponent, specialize_lambda, theta_closed_forms,
)
from ising_exact.numerics import ctx
from ising_exact.series import RationalSeries, half_ratio
from ising_exact.toeplitz import correlation_det, diagonal_symbol


@pytest.mark.parametrize("N", range(5))
def test_f1_boundary_condition(N):
    s = formfactor_series(1, N, N + 6).series
    assert s.valuation() == Fraction(N, 2)
    assert s.coefficient(Fraction(N, 2)) == half_ratio(N)


@pytest.mark.parametrize("N", range(5))
def test_f1_is_hypergeometric(N):
    # t^(N/2) (1/2)_N/N! 2F1(1/2, N+1/2; N+1; t)
    s = formfactor_series(1, N, N + 12).series
    ref = F_series(N, 12) * half_ratio(N)
    assert [s.coefficient(Fraction(N, 2) + k) for k in range(12)] == ref.coeffs


def test_f0_is_one():
    assert formfactor_series(0, 3, 5).series.coeffs == [1, 0, 0, 0, 0]


def test_n0_identity_fixes_f2_sign():
    # <s00 s00> = 1 means 1 + sum f^(2n)_{0,0} = (1-t)^(-1/4) exactly
    body = correlation_series(0, "below", 20, lam=Fraction(1))
    assert body.coeffs == RationalSeries.binomial(Fraction(-1, 4), 20, scale=-1).coeffs
    f2 = formfactor_series(2, 0, 3).series
    assert f2.coefficient(1) == Fraction(1, 4) and f2.coefficient(2) == Fraction(5, 32)


# [DERIVED] frozen from the exact engine after agreement with formfactor_quad
FROZEN = {
    (2, 1): [Fraction(3, 64), Fraction(3, 64), Fraction(705, 16384)],
    (3, 0): None,
}


def test_frozen_f2_11():
    s = formfactor_series(2, 1, 5).series
    assert [s.coefficient(k) for k in (2, 3, 4)] == FROZEN[2, 1]


@pytest.mark.parametrize("n,N,t,tol", [(1, 0, 0.25, 1e-12), (2, 1, 0.1, 1e-10), (3, 0, 0.05, 1e-8),
                                       (1, 3, 0.4, 1e-12), (2, 0, 0.3, 1e-10), (3, 1, 0.2, 1e-8)])
def test_series_against_quadrature(n, N, t, tol):
    c = ctx(128)
    s = formfactor_series(n, N, 40).series
    val = float(s.evaluate(c.mpf(t), c))
    assert abs(val - formfactor_quad(n, N, t)) <= tol * max(1.0, abs(val))


@pytest.mark.parametrize("n,N", [(2, 0), (3, 1), (4, 2), (5, 0), (6, 1)])
def test_leading_exponent(n, N):
    s = formfactor_series(n, N, leading_exponent(n, N) + 2).series
    assert s.valuation() == leading_exponent(n, N)


def test_lambda_zero_and_one():
    s = lambda_correlation(0, "below", Fraction(0), 10)
    assert s.coeffs == RationalSeries.binomial(Fraction(1, 4), 10, scale=-1).coeffs
    one = lambda_correlation(0, "below", Fraction(1), 16)
    assert one.coeffs == [1] + [0] * 15


def test_lambda_one_matches_determinant():
    c = ctx(256)
    T = c.mpf("0.2")
    s = lambda_correlation(1, "below", Fraction(1), 40)
    assert abs(s.evaluate(T, c) - correlation_det(diagonal_symbol(T, "below"), 1)) < 1e-10


@settings(max_examples=10, deadline=None)
@given(st.fractions(min_value=0, max_value=1, max_denominator=12), st.sampled_from(["0.1", "0.3"]))
def test_theta_form_below(lam, t):
    c = ctx(192)
    T = c.mpf(t)
    L = c.mpf(lam.numerator) / lam.denominator
    body = specialize_lambda(lambda_correlation(0, "below", None, 40), L, c)
    assert abs(body.evaluate(T, c) - theta_closed_forms("Cm00", L, T, 192)) < 1e-12


@pytest.mark.parametrize("which,N", [("Cp00", 0), ("Cp11", 1), ("Cm11", 1)])
def test_theta_interchange_forms(which, N):
    c = ctx(192)
    T = c.mpf("0.3")
    side = "above" if which.startswith("Cp") else "below"
    for lam in ("0.5", "0.8"):
        L = c.mpf(lam)
        body = specialize_lambda(lambda_correlation(N, side, None, 40), L, c)
        weight = L if side == "above" else 1
        assert abs(weight * body.evaluate(T, c) - theta_closed_forms(which, L, T, 192)) < 1e-15


def test_theta_unit_lambda():
    assert theta_closed_forms("Cm00", 1, "0.4") == 1


def test_algebraic_cos_pi4_theta():
    c = ctx(256)
    T = c.mpf("0.3")
    assert abs(theta_closed_forms("Cm00", c.cos(c.pi / 4), T) - algebraic_cos_pi4(0, T)) < 1e-25


@pytest.mark.parametrize("N", [0, 1, 2])
def test_algebraic_cos_pi4_series(N):
    c = ctx(256)
    T = c.mpf("0.3")
    body = specialize_lambda(lambda_correlation(N, "below", None, 40), c.cos(c.pi / 4), c)
    assert abs(body.evaluate(T, c) - algebraic_cos_pi4(N, T)) < 1e-15


def test_genus_curves():
    c = ctx(256)
    for t in ("0.05", "0.3", "0.8"):
        assert abs(genus_curve_residual("genus1", c.mpf(t))) < 1e-25
        assert abs(genus_curve_residual("genus3", c.mpf(t))) < 1e-25
    # the printed genus-one relation leaves 8 at t = 0 and is kept only for comparison
    assert abs(genus_curve_residual("genus1", c.mpf("0.3"), literal=True)) > 1
    with pytest.raises(ParameterError):
        genus_curve_residual("genus2", "0.3")


@pytest.mark.parametrize("N", [1, 2, 3])
def test_k2_is_half_n(N):
    assert factorization_fit(2, N).K[0] == Fraction(N, 2)


@pytest.mark.parametrize("N", [1, 2, 3, 4])
def test_c2_closed_formula_reading(N):
    res = factorization_fit(2, N)
    assert res.explicit_match["corrected"] is True
    assert res.explicit_match["literal"] is False
    fitted = [p + [Fraction(0)] * (2 * N + 3 - len(p)) for p in res.C]
    closed = [p + [Fraction(0)] * (2 * N + 3 - len(p)) for p in explicit_c2(N)]
    assert fitted == closed


@pytest.mark.parametrize("N", [1, 2, 3])
def test_c2_middle_coefficient(N):
    res = factorization_fit(2, N)
    ratio = Fraction((2 * N + 1) ** 2, 4 * N * (N + 1))
    pre = Fraction(N, 2) * 2 * ratio
    H = sum(1 / (Fraction(1, 2) + k) for k in range(N))
    assert res.C[1][N + 1] / pre == half_ratio(N) ** 2 * (1 + 2 * N * H)


@pytest.mark.parametrize("n,N", [(2, 1), (3, 2), (4, 1), (4, 2)])
def test_palindromy(n, N):
    res = factorization_fit(n, N)
    assert res.palindromic and res.degree_ok


def test_factorization_bounds():
    with pytest.raises(ParameterError):
        factorization_fit(7, 0)
    with pytest.raises(ParameterError):
        explicit_c2(0)
