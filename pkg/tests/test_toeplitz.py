from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ising_exact.errors import BranchError, CapExceededError, DomainError, InsufficientDataError
from ising_exact.formfactor import correlation_series
from ising_exact.numerics import ctx
from ising_exact.params import CouplingPoint
from ising_exact.series import RationalSeries
from ising_exact.toeplitz import (
    ToeplitzSymbol, correlation_det, critical_amplitude_exact, critical_amplitude_fit,
    diagonal_det_series, diagonal_symbol, fourier_coeffs, row_amplitude_ratio, row_symbol,
    spontaneous_magnetization,
)


def test_trivial_symbol():
    a = fourier_coeffs(ToeplitzSymbol(0, 0), 4)
    assert a[0] == 1 and all(a[n] == 0 for n in range(-4, 5) if n)
    assert correlation_det(ToeplitzSymbol(0, 0), 1) == 1
    assert correlation_det(diagonal_symbol("0.3", "below"), 0) == 1


def test_a0_against_quadrature():
    sym = ToeplitzSymbol(0, "0.5")
    mp = mpmath.MPContext()
    mp.prec = 200
    ref = mp.quad(lambda th: sym(th), [-mp.pi, 0, mp.pi]) / (2 * mp.pi)
    assert abs(fourier_coeffs(sym, 0)[0] - ref.real) < mp.mpf(10) ** -30


@settings(max_examples=15, deadline=None)
@given(st.floats(0, 0.9), st.floats(0, 0.9), st.integers(0, 6))
def test_inversion_symmetry(a1, a2, n):
    left = fourier_coeffs(ToeplitzSymbol(a1, a2, 128), n)[-n]
    right = fourier_coeffs(ToeplitzSymbol(a2, a1, 128), n)[n]
    assert abs(left - right) < ctx(128).ldexp(1, -100)


def test_symbol_branch_guards():
    with pytest.raises(BranchError):
        ToeplitzSymbol(1.0, 0.5)
    with pytest.raises(BranchError):
        ToeplitzSymbol(-0.1, 0.5)


@pytest.mark.parametrize("N", [1, 2, 3])
def test_det_matches_formfactor_sum(N):
    c = ctx(256)
    T = c.mpf("0.25")
    body = correlation_series(N, "below", 40, lam=Fraction(1))
    ref = (1 - T) ** (c.mpf(1) / 4) * body.evaluate(T, c)
    assert abs(correlation_det(diagonal_symbol(T, "below"), N) - ref) < 1e-10


def test_exact_det_series_below_f8():
    # D_N minus the three-term form-factor sum starts exactly where f^(8) does
    for N in (1, 2):
        first = 4 * (N + 4)
        D = diagonal_det_series(N, first + 1)
        S = correlation_series(N, "below", first + 1, lam=Fraction(1), drop=(8, 10, 12))
        S = S * RationalSeries.binomial(Fraction(1, 4), first + 1, scale=-1)
        assert (D - S).valuation() == first


def test_spontaneous_magnetization():
    assert spontaneous_magnetization(0) == 1
    assert spontaneous_magnetization(ctx(256).mpf(1) - ctx(256).ldexp(1, -200)) < 1e-12
    with pytest.raises(DomainError):
        spontaneous_magnetization(1)
    c = ctx(256)
    T = c.mpf("0.5")
    sym = diagonal_symbol(T, "below")
    fourier_coeffs(sym, 24)  # one quadrature cross-check, then reuse the cached series
    gaps = [correlation_det(sym, N, verify=False) - spontaneous_magnetization(T) for N in range(1, 25)]
    assert all(a > b for a, b in zip(gaps, gaps[1:]))
    assert gaps[-1] < 1e-3


def test_above_tc_decays():
    vals = [correlation_det(diagonal_symbol("0.5", "above"), N) for N in (2, 6, 12)]
    assert vals[0] > vals[1] > vals[2] > 0


def test_row_symbol_isotropic_low_t():
    cp = CouplingPoint.isotropic_from_t("0.3", "below")
    d = correlation_det(row_symbol(cp), 1)
    assert 0 < d < 1


def test_critical_fit():
    fit = critical_amplitude_fit(32, full=True)
    assert abs(fit.amplitude - critical_amplitude_exact()) < 1e-4
    assert abs(fit.slope + 0.25) < 1e-3
    with pytest.raises(InsufficientDataError):
        critical_amplitude_fit(4)
    with pytest.raises(CapExceededError):
        critical_amplitude_fit(1000)


def test_row_amplitude_ratio():
    fitted, predicted = row_amplitude_ratio()
    assert abs(fitted - predicted) < 1e-3


def test_det_cap():
    with pytest.raises(CapExceededError):
        correlation_det(diagonal_symbol("0.3", "below"), 10 ** 4)
