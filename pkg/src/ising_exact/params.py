"""Coupling constants and the derived temperature variables."""
from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .errors import AnisotropyError, DomainError
from .numerics import DEFAULT_PREC, ctx, to_mpf


class Side(str, Enum):
    BELOW = "below"
    ABOVE = "above"
    AT = "at"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        v = str(value).lower()
        aliases = {"below": cls.BELOW, "low": cls.BELOW, "minus": cls.BELOW, "-": cls.BELOW,
                   "above": cls.ABOVE, "high": cls.ABOVE, "plus": cls.ABOVE, "+": cls.ABOVE,
                   "at": cls.AT, "critical": cls.AT}
        if v not in aliases:
            raise DomainError(f"unknown side {value!r}")
        return aliases[v]


def _critical_tol(c):
    return c.ldexp(1, 32 - c.prec)


@dataclass(frozen=True)
class CouplingPoint:
    """Dimensionless couplings Kv = E^v/kT and Kh = E^h/kT (both > 0)."""

    Kv: object
    Kh: object
    precision_bits: int = DEFAULT_PREC

    def __post_init__(self):
        c = ctx(self.precision_bits)
        kv, kh = to_mpf(self.Kv, c), to_mpf(self.Kh, c)
        if not (kv > 0 and kh > 0):
            raise DomainError("couplings must be positive (ferromagnetic)")
        object.__setattr__(self, "Kv", kv)
        object.__setattr__(self, "Kh", kh)

    @property
    def ctx(self):
        return ctx(self.precision_bits)

    @property
    def s_v(self):
        return self.ctx.sinh(2 * self.Kv)

    @property
    def s_h(self):
        return self.ctx.sinh(2 * self.Kh)

    @property
    def side(self) -> Side:
        p = self.s_v * self.s_h
        if abs(p - 1) < _critical_tol(self.ctx):
            return Side.AT
        return Side.BELOW if p > 1 else Side.ABOVE

    @property
    def isotropic(self) -> bool:
        return self.Kv == self.Kh

    def swapped(self) -> "CouplingPoint":
        return CouplingPoint(self.Kh, self.Kv, self.precision_bits)

    @classmethod
    def isotropic_from_t(cls, t, side, prec=DEFAULT_PREC) -> "CouplingPoint":
        """Isotropic couplings whose side-appropriate t equals ``t``."""
        c = ctx(prec)
        t = to_mpf(t, c)
        side = Side.parse(side)
        if side is Side.AT:
            s = c.mpf(1)
        else:
            if not 0 < t < 1:
                raise DomainError("t must lie in (0,1) off criticality")
            s = t ** (c.mpf(-1) / 4) if side is Side.BELOW else t ** (c.mpf(1) / 4)
        K = c.asinh(s) / 2
        return cls(K, K, prec)


def t_low(cp: CouplingPoint):
    """(s_v s_h)^-2, the below-Tc variable."""
    return 1 / (cp.s_v * cp.s_h) ** 2


def t_high(cp: CouplingPoint):
    """(s_v s_h)^2, the above-Tc variable."""
    return (cp.s_v * cp.s_h) ** 2


@dataclass(frozen=True)
class VariablePack:
    t: object
    side: Side
    k: object
    alpha1: object
    alpha2: object
    row_alpha1: object
    row_alpha2: object
    s: object = None
    w: object = None


def derive_variables(cp: CouplingPoint, need_w: bool = False) -> VariablePack:
    """All derived variables for a coupling point.

    ``t`` is taken from the formula appropriate to the side, so it lies in
    (0,1) off criticality and equals 1 at Tc.  ``s`` and ``w`` are only filled
    for isotropic couplings; asking for ``w`` otherwise is an error.
    """
    c = cp.ctx
    side = cp.side
    if side is Side.BELOW:
        t = t_low(cp)
    elif side is Side.ABOVE:
        t = t_high(cp)
    else:
        t = c.mpf(1)
    s = w = None
    if cp.isotropic:
        s = cp.s_v
        w = 1 / (2 * (s + 1 / s))
    elif need_w:
        raise AnisotropyError("w is only defined for Kv = Kh")
    a2 = 1 / (cp.s_v * cp.s_h)
    ev = c.exp(-2 * cp.Kv)
    r1 = ev * c.tanh(cp.Kh)
    r2 = ev / c.tanh(cp.Kh)
    return VariablePack(t=t, side=side, k=c.sqrt(t), alpha1=c.mpf(0), alpha2=a2,
                        row_alpha1=r1, row_alpha2=r2, s=s, w=w)
