"""ODE search over GF(p), lifting and operator division."""
from fractions import Fraction

import pytest

from ising_exact.errors import InsufficientDataError, ParameterError
from ising_exact.formfactor import _ff
from ising_exact.odehunt import (
    DEFAULT_PRIME, PRIMES, LinearODE, NotFound, SeriesModP, fit_ode, hypergeometric_operator,
    lift_ode, right_divide, structure_check, verify_annihilation,
)
from ising_exact.series import RationalSeries

P = DEFAULT_PRIME


def _k():
    return RationalSeries.hypergeometric([Fraction(1, 2), Fraction(1, 2)], [1], 60)


def test_geometric_is_order_one():
    s = RationalSeries([1] * 40)
    ode = fit_ode(SeriesModP.from_rational(s, P), 3, 3)
    assert ode.order == 1 and ode.degree == 1
    assert verify_annihilation(ode, s) == (True, None)


@pytest.mark.parametrize("p", PRIMES)
def test_hypergeometric_operator_recovered(p):
    ode = fit_ode(SeriesModP.from_rational(_k(), p), 3, 3)
    assert (ode.order, ode.degree) == (2, 2)
    assert ode == hypergeometric_operator(Fraction(1, 2), Fraction(1, 2), 1, p).normalized()


def test_f1_fit_extends():
    short = _ff(1, 0, 30)
    ode = fit_ode(SeriesModP.from_rational(short, P), 2, 4)
    long = _ff(1, 0, 40)
    assert verify_annihilation(ode, long) == (True, None)


def test_perturbed_series_fails_at_its_coefficient():
    s = _k()
    ode = hypergeometric_operator(Fraction(1, 2), Fraction(1, 2), 1)
    assert verify_annihilation(ode, s) == (True, None)
    bumped = list(s.coeffs)
    bumped[20] += 1
    ok, k = verify_annihilation(ode, RationalSeries(bumped, s.order))
    assert not ok and k in (19, 20)
    modp = hypergeometric_operator(Fraction(1, 2), Fraction(1, 2), 1, P)
    okp, kp = verify_annihilation(modp, RationalSeries(bumped, s.order))
    assert not okp and kp == k


def test_lift_gives_exact_operator():
    ode = lift_ode(_k(), 3, 3)
    assert ode.p is None
    assert ode == hypergeometric_operator(Fraction(1, 2), Fraction(1, 2), 1).normalized()


def test_json_round_trip():
    for ode in (hypergeometric_operator(Fraction(1, 2), Fraction(1, 3), 2),
                hypergeometric_operator(Fraction(1, 2), Fraction(1, 3), 2, P)):
        back = LinearODE.from_json(ode.dumps())
        assert back.coeffs == ode.coeffs and back.p == ode.p
        assert back.to_json()["schema"] == "ising-exact/1"


def test_insufficient_data_and_not_found():
    with pytest.raises(InsufficientDataError):
        fit_ode(SeriesModP.from_rational(RationalSeries([1] * 10), P), 3, 3)
    # a scrambled sequence with no small operator
    s = RationalSeries([Fraction((-1) ** (k * k // 3), k * k + 1) + (k % 7) for k in range(60)])
    with pytest.raises(NotFound):
        fit_ode(SeriesModP.from_rational(s, P), 2, 2)


def test_bad_prime():
    with pytest.raises(ParameterError):
        SeriesModP.from_rational(_k(), 91)
    with pytest.raises(ParameterError):
        structure_check("russian_doll", p=1 << 64)
    with pytest.raises(ParameterError):
        structure_check("nonsense")


def test_right_divide():
    L1 = hypergeometric_operator(Fraction(1, 2), Fraction(1, 2), 1, P)
    # (d/dt) L1 is divisible on the right by L1
    D = LinearODE(((0,), (1,)), P)
    prod_coeffs = []
    c = L1.coeffs
    # d/dt (sum P_j d^j) = sum P_j' d^j + P_j d^(j+1)
    m = len(c)
    for j in range(m + 1):
        a = [0] * 3
        if j < m:
            for i in range(1, len(c[j])):
                a[i - 1] = (a[i - 1] + i * c[j][i]) % P
        if j >= 1:
            for i in range(len(c[j - 1])):
                a[i] = (a[i] + c[j - 1][i]) % P
        prod_coeffs.append(tuple(a))
    L = LinearODE(tuple(prod_coeffs), P)
    Q, R = right_divide(L, L1)
    assert R == []
    _, R2 = right_divide(L, LinearODE(((1, 2), (3, 0, 1), (0, 1, 5)), P))
    assert R2
    with pytest.raises(ParameterError):
        right_divide(L, LinearODE(((0,), (1,)), None))


def test_russian_doll():
    r = structure_check("russian_doll", N=0)
    assert r.passed and r.details["divides"] and not r.details["control_divides"]


def test_diag_chi3_factor():
    r = structure_check("diag_chi3_factor")
    assert r.passed
    assert r.details["chi32_operator"]["order"] == 2
    assert r.details["chi3_operator"]["order"] <= r.details["claimed_chi3_order"]
