"""Susceptibility terms, amplitudes and singularity data."""
from fractions import Fraction

import mpmath
import pytest

from ising_exact.chi import (
    CHI3_WEIGHTS, CHI4_WEIGHTS, amplitude_constants, amplitude_ratio, chi3_amplitude_exact,
    chi_bulk_closed, chi_bulk_integral, chi_diag_closed, chi_diag_integral, chi_diag_series,
    closed_form_series, diagonal_singularities, lambda_chi, nickel_singularities,
    q_identity_residual, singularity_exponent,
)
from ising_exact.errors import CapExceededError, DomainError, ParameterError, ParityError
from ising_exact.numerics import ctx
from ising_exact.params import CouplingPoint


def test_chi1_substitution():
    assert chi_bulk_closed(1, Fraction(1, 16)).value == 2


def test_chi2_small_t_is_linear():
    c = ctx(256)
    r1 = chi_bulk_closed(2, c.mpf("1e-6")).value / c.mpf("1e-6")
    r2 = chi_bulk_closed(2, c.mpf("1e-8")).value / c.mpf("1e-8")
    assert r1 > 0 and abs(r1 / r2 - 1) < 1e-3


@pytest.mark.parametrize("n,t,side,tol", [(1, 0.3, "above", 1e-12), (2, 0.3, "below", 1e-10),
                                          (2, 0.25, "below", 1e-10)])
def test_bulk_integral_vs_closed(n, t, side, tol):
    cp = CouplingPoint.isotropic_from_t(t, side)
    q = chi_bulk_integral(n, cp)
    ref = float(chi_bulk_closed(n, t).value)
    assert abs(q.value - ref) <= tol * abs(ref)
    assert q.to_json()["precision_bits"] == 53


@pytest.mark.parametrize("n", [1, 2, 3])
def test_bulk_swap_invariance(n):
    cp = CouplingPoint(0.3, 0.2) if n % 2 else CouplingPoint(0.7, 0.5)
    a = chi_bulk_integral(n, cp, rtol=1e-10).value
    b = chi_bulk_integral(n, cp.swapped(), rtol=1e-10).value
    assert abs(a - b) < 1e-9 * abs(a)


def test_bulk_domain():
    c = ctx(256)
    Kc = c.asinh(1) / 2
    with pytest.raises(DomainError):
        chi_bulk_integral(1, CouplingPoint(Kc, Kc))
    with pytest.raises(ParameterError):
        chi_bulk_closed(3, 0.2)


def test_amplitudes():
    c = ctx(256)
    C1, C2, C3, C4 = amplitude_constants()
    assert C1.value == 1
    assert abs(C2.value * 12 * c.pi - 1) < c.ldexp(1, -240)
    assert abs(amplitude_ratio(terms=2) - 12 * c.pi) < c.ldexp(1, -240)
    assert abs(amplitude_ratio(terms=4) / (12 * c.pi) - 1) < 5e-3
    # the higher constants are three orders of magnitude below C1
    assert C3.value < 1e-3 and C4.value < 1e-4


@pytest.mark.parametrize("n,expected", [(3, ["-1/2", "1"]), (4, ["-1/2", "1/2"]), (6, ["-1", "-1/3", "1/3", "1"])])
def test_nickel_rows(n, expected):
    c = ctx(256)
    got = sorted((r.location for r in nickel_singularities(n)), key=float)
    want = [c.mpf(Fraction(e).numerator) / Fraction(e).denominator for e in expected]
    assert len(got) == len(want) and all(abs(a - b) < 1e-20 for a, b in zip(got, want))


def test_nickel_row5_from_location_equation():
    # independent oracle: the chi^(5) singularity polynomial factors carrying the new points
    mp = mpmath.MPContext()
    mp.prec = 256
    got = [r.location for r in nickel_singularities(5)]
    # coefficients listed from the highest degree down
    roots = [w for poly in ([1, 1], [1, -3, 1], [-4, 2, 1])
             for w in mp.polyroots(poly, maxsteps=200, extraprec=256)]
    assert sorted(float(w) for w in got) == pytest.approx(sorted(float(mp.re(w)) for w in roots), abs=1e-15)
    assert all(any(abs(w - r) < 1e-20 for r in roots) for w in got)


@pytest.mark.xfail(strict=True, reason="printed table row 5 has (-1 +- sqrt5)/4; the location equation gives "
                                       "(1 +- sqrt5)/4, see the decisions ledger")
def test_nickel_row5_as_printed():
    c = ctx(256)
    s5 = c.sqrt(5)
    printed = sorted([c.mpf(-1), (-1 - s5) / 4, (-1 + s5) / 4, (3 - s5) / 2, (3 + s5) / 2], key=float)
    got = sorted((r.location for r in nickel_singularities(5)), key=float)
    assert all(abs(a - b) < 1e-20 for a, b in zip(got, printed))


def test_nickel_inherited_points():
    full = [float(r.location) for r in nickel_singularities(4, new_only=False)]
    assert -0.25 in [pytest.approx(w) for w in full] or any(abs(w + 0.25) < 1e-15 for w in full)
    assert all(r.residual < 1e-60 for r in nickel_singularities(6))


def test_singularity_exponents():
    assert singularity_exponent(3, "above") == (3, True)
    assert singularity_exponent(2, "below") == (Fraction(1, 2), False)
    assert singularity_exponent(4, "below", "diag") == (7, True)
    with pytest.raises(ParityError):
        singularity_exponent(3, "below")


def test_diagonal_singularities_roots_of_unity():
    locs = [complex(r.location) for r in diagonal_singularities(4)]
    assert all(abs(abs(z) - 1) < 1e-15 for z in locs)
    assert all(abs(z - 1) > 1e-6 for z in locs)


def test_diag_low_series():
    s1 = chi_diag_series(1, 10)
    assert s1.variable == "x" and s1.coeffs == [1] * 20
    s2 = chi_diag_series(2, 10)
    assert [s2.coefficient(k) for k in range(10)] == [0] + [Fraction(1, 4)] * 9
    s3 = chi_diag_series(3, 10)
    assert s3.valuation() == 4


def test_diag_caps():
    with pytest.raises(CapExceededError):
        chi_diag_series(4, 100)
    with pytest.raises(ParameterError):
        chi_diag_series(6, 10)


def test_q_identity():
    c = ctx(256)
    for x in ("0.1", "0.4", "0.8"):
        assert abs(q_identity_residual(c.mpf(x))) < c.ldexp(1, -240)


def test_closed_forms_low():
    c = ctx(256)
    t = c.mpf("0.3")
    assert abs(chi_diag_closed(1, t).value - 1 / (1 - c.sqrt(t))) < 1e-70
    assert abs(chi_diag_closed(2, t).value - t / (4 * (1 - t))) < 1e-70


def test_chi3_closed_vs_series():
    c = ctx(256)
    x = c.mpf("0.3")
    s = chi_diag_series(3, 40)
    assert abs(chi_diag_closed(3, x * x).value - s.evaluate(x, c)) < 1e-10


def test_chi4_closed_vs_series():
    c = ctx(256)
    t = c.mpf("0.2")
    s = chi_diag_series(4, 40)
    assert abs(chi_diag_closed(4, t).value - s.evaluate(t, c)) < 1e-10


def test_closed_form_series_exact():
    for n, order in ((3, 60), (4, 30)):
        eng = chi_diag_series(n, order // 2 if n == 3 else order)
        closed = closed_form_series(n, order)
        assert all(eng.coefficient(k) == closed.coefficient(k) for k in range(order))


def test_weights():
    assert CHI3_WEIGHTS == (Fraction(1, 3), Fraction(1, 2), Fraction(-1, 6))
    assert CHI4_WEIGHTS == (Fraction(1, 2), Fraction(1, 24), Fraction(-1, 8))


@pytest.mark.parametrize("n", [1, 2, 3])
def test_diag_integral_vs_series(n):
    c = ctx(128)
    t = 0.2
    s = chi_diag_series(n, 40)
    arg = c.sqrt(c.mpf(t)) if n % 2 else c.mpf(t)
    assert abs(chi_diag_integral(n, t).value - float(s.evaluate(arg, c))) < 1e-12


def test_chi3_amplitude_formula():
    assert abs(float(chi3_amplitude_exact()) - 0.016329) < 1e-5


def test_lambda_chi():
    c = ctx(256)
    t = c.mpf("0.2")
    # lambda = 0 above Tc keeps chi^(1) only
    only1 = lambda_chi("above", 0, 5, t)
    s1 = chi_diag_series(1, 40)
    assert abs(only1.value - (1 - t) ** (c.mpf(1) / 4) * s1.evaluate(c.sqrt(t), c)) < 1e-60
    lam = c.mpf(1) / 2
    below = lambda_chi("below", lam, 4, t).value
    s2, s4 = chi_diag_series(2, 40), chi_diag_series(4, 40)
    manual = (1 - t) ** (c.mpf(1) / 4) * (lam ** 2 * s2.evaluate(t, c) + lam ** 4 * s4.evaluate(t, c))
    assert abs(below - manual) < 1e-60
    plain = lambda_chi("above", 1, 3, t).value
    s3 = chi_diag_series(3, 40)
    x = c.sqrt(t)
    assert abs(plain - (1 - t) ** (c.mpf(1) / 4) * (s1.evaluate(x, c) + s3.evaluate(x, c))) < 1e-60
    with pytest.raises(DomainError):
        lambda_chi("at", 1, 3, t)
