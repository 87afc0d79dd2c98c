import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from ising_exact.errors import AnisotropyError, DomainError
from ising_exact.numerics import ctx
from ising_exact.params import CouplingPoint, Side, derive_variables, t_high, t_low


def test_critical_point():
    c = ctx(256)
    Kc = c.asinh(1) / 2
    cp = CouplingPoint(Kc, Kc)
    assert cp.side is Side.AT
    v = derive_variables(cp)
    assert v.t == 1
    # s = 1 is the edge of the real-sinh region of w
    assert abs(v.w - c.mpf(1) / 4) < c.ldexp(1, -240)


def test_sides():
    assert CouplingPoint(0.1, 0.2).side is Side.ABOVE
    assert CouplingPoint(1.0, 0.8).side is Side.BELOW
    assert Side.parse("low") is Side.BELOW and Side.parse("+") is Side.ABOVE
    with pytest.raises(DomainError):
        Side.parse("sideways")


def test_nonpositive_coupling_rejected():
    with pytest.raises(DomainError):
        CouplingPoint(0, 1)


@settings(max_examples=30, deadline=None)
@given(st.floats(min_value=0.01, max_value=0.99), st.sampled_from(["below", "above"]))
def test_isotropic_round_trip(t, side):
    prec = 128
    cp = CouplingPoint.isotropic_from_t(t, side, prec)
    v = derive_variables(cp)
    assert v.side is Side.parse(side)
    # independent inversion: solve sinh(2K)^(+-4) = t by root finding
    mp = mpmath.MPContext()
    mp.prec = prec
    sign = -4 if side == "below" else 4
    K = mp.findroot(lambda k: mp.sinh(2 * k) ** sign - mp.mpf(t), cp.Kv)
    assert abs(K - cp.Kv) < mp.ldexp(1, 12 - prec)
    assert abs(v.t - ctx(prec).mpf(t)) < ctx(prec).ldexp(1, 12 - prec)


def test_t_variables_are_reciprocal():
    cp = CouplingPoint(0.3, 0.5)
    assert abs(t_low(cp) * t_high(cp) - 1) < ctx(256).ldexp(1, -240)


def test_w_requires_isotropy():
    with pytest.raises(AnisotropyError):
        derive_variables(CouplingPoint(0.3, 0.5), need_w=True)
    assert derive_variables(CouplingPoint(0.3, 0.5)).w is None


def test_swap_keeps_t():
    cp = CouplingPoint(0.6, 0.9)
    assert derive_variables(cp).t == derive_variables(cp.swapped()).t
