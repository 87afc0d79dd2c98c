"""Truncated power series with exact coefficients.

A :class:`RationalSeries` stores the coefficients of ``v**(offset + i)`` for
``i = 0 .. order - offset - 1`` where ``v`` is either ``t`` or ``x = t**(1/2)``.
Coefficients are :class:`fractions.Fraction` by default; any ring element
supporting ``+ - *`` and division by a Fraction works (see :class:`LamPoly`,
used for the symbolic lambda weight).
"""
from __future__ import annotations

import json
from fractions import Fraction
from math import comb, factorial

SCHEMA = "ising-exact/1"


def _frac(c):
    if isinstance(c, (int, Fraction)):
        return Fraction(c)
    return c


def _is_zero(c) -> bool:
    return c == 0


class LamPoly:
    """Polynomial in L = lambda**2 with Fraction coefficients.

    Only what the series arithmetic needs: ring operations, division by a
    scalar, comparison with zero.
    """

    __slots__ = ("c",)

    def __init__(self, coeffs=()):
        c = [Fraction(v) for v in coeffs]
        while c and c[-1] == 0:
            c.pop()
        self.c = tuple(c)

    @classmethod
    def lam2(cls, power: int = 1, coeff=1) -> "LamPoly":
        return cls([0] * power + [coeff])

    def _coerce(self, other):
        if isinstance(other, LamPoly):
            return other
        return LamPoly([other])

    def __add__(self, other):
        o = self._coerce(other)
        n = max(len(self.c), len(o.c))
        a = self.c + (Fraction(0),) * (n - len(self.c))
        b = o.c + (Fraction(0),) * (n - len(o.c))
        return LamPoly([x + y for x, y in zip(a, b)])

    __radd__ = __add__

    def __neg__(self):
        return LamPoly([-x for x in self.c])

    def __sub__(self, other):
        return self + (-self._coerce(other))

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __mul__(self, other):
        if not isinstance(other, LamPoly):
            other = Fraction(other)
            return LamPoly([x * other for x in self.c])
        if not self.c or not other.c:
            return LamPoly()
        out = [Fraction(0)] * (len(self.c) + len(other.c) - 1)
        for i, x in enumerate(self.c):
            if x:
                for j, y in enumerate(other.c):
                    out[i + j] += x * y
        return LamPoly(out)

    __rmul__ = __mul__

    def __truediv__(self, other):
        other = Fraction(other)
        return LamPoly([x / other for x in self.c])

    def __eq__(self, other):
        return self.c == self._coerce(other).c

    def __hash__(self):
        return hash(self.c)

    def __repr__(self):
        return f"LamPoly({[str(v) for v in self.c]})"

    def evaluate(self, lam):
        """Numeric value at lambda = ``lam`` (any numeric type)."""
        L = lam * lam
        acc = 0
        for v in reversed(self.c):
            acc = acc * L + (v.numerator / v.denominator if isinstance(lam, float) else v)
        return acc

    def coeff(self, k: int) -> Fraction:
        return self.c[k] if k < len(self.c) else Fraction(0)


class RationalSeries:
    """Truncated series ``sum_i coeffs[i] * v**(offset + i) + O(v**order)``."""

    __slots__ = ("variable", "offset", "coeffs")

    def __init__(self, coeffs, order=None, offset=0, variable="t"):
        if variable not in ("t", "x", "q"):
            raise ValueError(f"unknown series variable {variable!r}")
        offset = Fraction(offset)
        coeffs = [_frac(c) for c in coeffs]
        if order is not None:
            n = Fraction(order) - offset
            if n.denominator != 1:
                raise ValueError("order - offset must be an integer")
            n = int(n)
            if n < 0:
                raise ValueError("order below offset")
            coeffs = coeffs[:n] + [Fraction(0)] * (n - len(coeffs))
        self.variable = variable
        self.offset = offset
        self.coeffs = coeffs

    # construction helpers -------------------------------------------------
    @classmethod
    def one(cls, order, variable="t"):
        return cls([1], order, 0, variable)

    @classmethod
    def monomial(cls, exponent, order, coeff=1, variable="t"):
        return cls([coeff], order, exponent, variable)

    @classmethod
    def binomial(cls, a, order, scale=1, variable="t"):
        """Series of ``(1 + scale*v)**a`` for rational ``a``."""
        a = Fraction(a)
        scale = Fraction(scale)
        c = [Fraction(1)]
        for k in range(1, int(order)):
            c.append(c[-1] * (a - k + 1) / k * scale)
        return cls(c, order, 0, variable)

    @classmethod
    def hypergeometric(cls, upper, lower, order, argument_power=1, variable="t"):
        """Exact series of pFq(upper; lower; v**argument_power)."""
        upper = [Fraction(a) for a in upper]
        lower = [Fraction(b) for b in lower]
        coeffs = [Fraction(0)] * int(order)
        term = Fraction(1)
        k = 0
        while k * argument_power < order:
            coeffs[k * argument_power] = term
            for a in upper:
                term *= a + k
            for b in lower:
                term /= b + k
            term /= k + 1
            k += 1
        return cls(coeffs, order, 0, variable)

    # basic properties -----------------------------------------------------
    @property
    def order(self) -> Fraction:
        return self.offset + len(self.coeffs)

    def coefficient(self, exponent) -> Fraction:
        k = Fraction(exponent) - self.offset
        if k.denominator != 1 or k < 0:
            return Fraction(0)
        k = int(k)
        if k >= len(self.coeffs):
            raise IndexError(f"exponent {exponent} beyond truncation order {self.order}")
        return self.coeffs[k]

    def valuation(self):
        for i, c in enumerate(self.coeffs):
            if not _is_zero(c):
                return self.offset + i
        return None

    def is_zero(self) -> bool:
        return all(_is_zero(c) for c in self.coeffs)

    def __repr__(self):
        head = ", ".join(str(c) for c in self.coeffs[:6])
        return (f"RationalSeries({self.variable}, offset={self.offset}, "
                f"order={self.order}, [{head}{', ...' if len(self.coeffs) > 6 else ''}])")

    def __eq__(self, other):
        if not isinstance(other, RationalSeries):
            return NotImplemented
        d = self - other
        return d.is_zero()

    # alignment ------------------------------------------------------------
    def _check_var(self, other):
        if self.variable != other.variable:
            raise ValueError(f"series variables differ: {self.variable} vs {other.variable}")

    def truncate(self, order) -> "RationalSeries":
        order = min(Fraction(order), self.order)
        return RationalSeries(self.coeffs, order, self.offset, self.variable)

    def shift(self, exponent) -> "RationalSeries":
        """Multiply by ``v**exponent``."""
        return RationalSeries(self.coeffs, None, self.offset + Fraction(exponent), self.variable)

    def rebase(self, offset) -> "RationalSeries":
        """Same series, coefficient list starting at exponent ``offset`` (<= valuation)."""
        offset = Fraction(offset)
        k = self.offset - offset
        if k.denominator != 1:
            raise ValueError("offset must differ by an integer")
        k = int(k)
        if k >= 0:
            return RationalSeries([Fraction(0)] * k + self.coeffs, None, offset, self.variable)
        if any(not _is_zero(c) for c in self.coeffs[:-k]):
            raise ValueError("cannot rebase above the valuation")
        return RationalSeries(self.coeffs[-k:], None, offset, self.variable)

    def normalized(self) -> "RationalSeries":
        v = self.valuation()
        if v is None:
            return self
        return self.rebase(v)

    # arithmetic -----------------------------------------------------------
    def __add__(self, other):
        if not isinstance(other, RationalSeries):
            other = RationalSeries([other], self.order, 0, self.variable)
        self._check_var(other)
        off = min(self.offset, other.offset)
        order = min(self.order, other.order)
        a = self.rebase(off).truncate(order).coeffs
        b = other.rebase(off).truncate(order).coeffs
        return RationalSeries([x + y for x, y in zip(a, b)], order, off, self.variable)

    __radd__ = __add__

    def __neg__(self):
        return RationalSeries([-c for c in self.coeffs], None, self.offset, self.variable)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if not isinstance(other, RationalSeries):
            return RationalSeries([c * other for c in self.coeffs], None, self.offset, self.variable)
        self._check_var(other)
        a, b = self.normalized(), other.normalized()
        off = a.offset + b.offset
        order = min(a.order + b.offset, b.order + a.offset)
        n = int(order - off)
        if n <= 0:
            return RationalSeries([], order, order, self.variable)
        ac, bc = a.coeffs[:n], b.coeffs[:n]
        out = [Fraction(0)] * n
        for i, x in enumerate(ac):
            if _is_zero(x):
                continue
            for j in range(min(len(bc), n - i)):
                y = bc[j]
                if not _is_zero(y):
                    out[i + j] = out[i + j] + x * y
        return RationalSeries(out, order, off, self.variable)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, RationalSeries):
            other = Fraction(other)
            return RationalSeries([c / other for c in self.coeffs], None, self.offset, self.variable)
        return self * other.inverse()

    def inverse(self) -> "RationalSeries":
        s = self.normalized()
        c0 = s.coeffs[0] if s.coeffs else 0
        if _is_zero(c0):
            raise ZeroDivisionError("series is zero to its truncation order")
        if isinstance(c0, LamPoly) and len(c0.c) == 1:
            c0 = c0.c[0]
        if not isinstance(c0, Fraction):
            raise TypeError("leading coefficient must be a scalar rational to invert")
        n = len(s.coeffs)
        inv = [Fraction(0)] * n
        inv[0] = 1 / c0
        for k in range(1, n):
            acc = 0
            for j in range(1, k + 1):
                if not _is_zero(s.coeffs[j]):
                    acc = acc + s.coeffs[j] * inv[k - j]
            inv[k] = -acc / c0
        return RationalSeries(inv, None, -s.offset, self.variable)

    def __pow__(self, k):
        k = Fraction(k)
        if k.denominator == 1 and k >= 0:
            base = self
            e = int(k)
            result = None
            while e:
                if e & 1:
                    result = base if result is None else result * base
                e >>= 1
                if e:
                    base = base * base
            return result if result is not None else RationalSeries.one(self.order, self.variable)
        s = self.normalized()
        if s.offset != 0 or s.coeffs[0] != 1:
            raise ValueError("non-integer power needs a series starting with 1")
        return (s.log() * k).exp()

    def derivative(self) -> "RationalSeries":
        out = [c * (self.offset + i) for i, c in enumerate(self.coeffs)]
        if self.offset == 0:
            return RationalSeries(out[1:], self.order - 1, 0, self.variable)
        return RationalSeries(out, None, self.offset - 1, self.variable)

    def integral(self) -> "RationalSeries":
        """Antiderivative with zero constant (offset must be >= 0)."""
        out = []
        for i, c in enumerate(self.coeffs):
            e = self.offset + i + 1
            out.append(c / e)
        return RationalSeries(out, None, self.offset + 1, self.variable)

    def log(self) -> "RationalSeries":
        s = self.normalized()
        if s.offset != 0 or s.coeffs[0] != 1:
            raise ValueError("log needs a series starting with 1")
        return (s.derivative() * s.inverse()).integral().truncate(s.order)

    def exp(self) -> "RationalSeries":
        s = self.rebase(0) if self.offset > 0 else self
        if s.offset < 0 or (s.coeffs and not _is_zero(s.coeffs[0])):
            raise ValueError("exp needs a series with zero constant term")
        n = len(s.coeffs)
        ds = [s.coeffs[i] * i for i in range(n)]
        e = [Fraction(0)] * n
        if n:
            e[0] = Fraction(1)
        for k in range(1, n):
            acc = None
            for j in range(1, k + 1):
                if not _is_zero(ds[j]):
                    term = ds[j] * e[k - j]
                    acc = term if acc is None else acc + term
            e[k] = Fraction(0) if acc is None else acc / k
        return RationalSeries(e, None, 0, self.variable)

    def map_coeffs(self, fn) -> "RationalSeries":
        return RationalSeries([fn(c) for c in self.coeffs], None, self.offset, self.variable)

    # variable changes -----------------------------------------------------
    def to_x(self) -> "RationalSeries":
        """Rewrite a t-series as a series in x = t**(1/2)."""
        if self.variable == "x":
            return self
        if self.variable != "t":
            raise ValueError("only t-series convert to x")
        off = 2 * self.offset
        if off.denominator != 1:
            raise ValueError("offset not a multiple of 1/2")
        out = []
        for c in self.coeffs:
            out.append(c)
            out.append(Fraction(0))
        # known mod t^order means known mod x^(2 order)
        return RationalSeries(out, off + 2 * len(self.coeffs), off, "x")

    # evaluation -----------------------------------------------------------
    def evaluate(self, v, ctx=None):
        """Numeric value at the variable value ``v`` (mpmath or float)."""
        if ctx is not None:
            v = ctx.mpf(v)

            def conv(c):
                if isinstance(c, Fraction):
                    return ctx.mpf(c.numerator) / c.denominator
                return ctx.mpf(c)
        else:
            v = float(v)
            conv = float
        acc = 0
        for c in reversed(self.coeffs):
            acc = acc * v + conv(c)
        if self.offset:
            acc = acc * v ** (float(self.offset) if ctx is None
                              else ctx.mpf(self.offset.numerator) / self.offset.denominator)
        return acc

    # interchange format -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "schema": SCHEMA,
            "variable": self.variable,
            "offset": str(self.offset),
            "order": str(self.order),
            "coeffs": [str(c) for c in self.coeffs],
        }

    def dumps(self) -> str:
        return json.dumps(self.to_json())

    @classmethod
    def from_json(cls, doc) -> "RationalSeries":
        if isinstance(doc, str):
            doc = json.loads(doc)
        coeffs = [Fraction(c) for c in doc["coeffs"]]
        return cls(coeffs, Fraction(doc["order"]), Fraction(doc.get("offset", "0")),
                   doc.get("variable", "t"))


def pochhammer(a, n: int) -> Fraction:
    a = Fraction(a)
    out = Fraction(1)
    for k in range(n):
        out *= a + k
    return out


def central_binomial(n: int) -> int:
    return comb(2 * n, n)


def catalan(n: int) -> int:
    return comb(2 * n, n) // (n + 1)


def half_ratio(n: int) -> Fraction:
    """(1/2)_n / n!"""
    return Fraction(comb(2 * n, n), 4 ** n)


__all__ = ["RationalSeries", "LamPoly", "pochhammer", "half_ratio", "catalan",
           "central_binomial", "factorial", "SCHEMA"]
