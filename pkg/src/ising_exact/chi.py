"""Bulk and diagonal susceptibilities.

Bulk n-particle terms come from the Nickel-type angular integrals (n <= 3,
periodic trapezoid rule) and the two closed forms for n = 1, 2.  Diagonal
terms come as exact series (summing diagonal form factors over N, which is
the geometric expansion of the (1 + q prod x)/(1 - q prod x) factor), as
direct integrals for n <= 3 and as hypergeometric closed forms for n <= 4.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import product

import numpy as np

from .errors import (CapExceededError, ConvergenceError, DomainError, ParameterError,
                     ParityError)
from .formfactor import _ff, leading_exponent
from .numerics import DEFAULT_PREC, PrecReal, clausen_Cl2, ctx, elliptic_E, elliptic_K, to_mpf
from .params import CouplingPoint, Side
from .series import RationalSeries

__all__ = ["ChiTerm", "SingularityRecord", "QuadResult", "chi_bulk_closed", "chi_bulk_integral",
           "amplitude_constants", "amplitude_ratio", "nickel_singularities",
           "diagonal_singularities", "singularity_exponent", "chi_diag_series",
           "chi_diag_integral", "chi_diag_closed", "chi_diag_components",
           "diag_component_series", "q_identity_residual", "chi_diag_asymptotics",
           "lambda_chi", "CHI4_WEIGHTS"]


@dataclass(frozen=True)
class ChiTerm:
    kind: str          # "bulk" | "diagonal"
    n: int
    representation: str  # "closed_form" | "integral" | "series"
    payload: object

    def __post_init__(self):
        if self.kind not in ("bulk", "diagonal"):
            raise ParameterError(f"unknown kind {self.kind!r}")
        if self.representation == "integral" and self.n > 3:
            raise CapExceededError("integral representations are limited to n <= 3")
        if self.kind == "diagonal" and self.representation == "series" and self.n > 5:
            raise CapExceededError("diagonal series are limited to n <= 5")


@dataclass(frozen=True)
class SingularityRecord:
    location: object
    variable: str
    exponent: Fraction
    has_log: bool
    n: int
    residual: float = 0.0

    def to_json(self):
        loc = complex(self.location)
        out = {"n": self.n, "variable": self.variable, "exponent": str(self.exponent),
               "has_log": self.has_log, "residual": float(self.residual)}
        if loc.imag == 0:
            out["location"] = repr(loc.real)
        else:
            out["location"] = [repr(loc.real), repr(loc.imag)]
        return out


@dataclass(frozen=True)
class QuadResult:
    """Double-precision quadrature value with its last-doubling error estimate."""

    value: float
    error: float
    nodes: int

    def __float__(self):
        return self.value

    def to_json(self):
        return {"value": repr(self.value), "error": repr(self.error), "nodes": self.nodes,
                "precision_bits": 53}


# --- bulk closed forms --------------------------------------------------------

def _open_unit(t, c, what="t"):
    t = to_mpf(t, c)
    if not 0 < t < 1:
        raise DomainError(f"{what} must lie in (0,1), got {c.nstr(t, 8)}")
    return t


def chi_bulk_closed(n: int, t, prec: int = DEFAULT_PREC) -> PrecReal:
    """Isotropic chi^(1) (high-temperature t) or chi^(2) (low-temperature t)."""
    c = ctx(prec)
    t = _open_unit(t, c)
    if n == 1:
        q = c.root(t, 4)
        return PrecReal(q / (1 - q) ** 2, prec)
    if n == 2:
        k = c.sqrt(t)
        K, E = elliptic_K(t, prec), elliptic_E(t, prec)
        return PrecReal(((1 + t) * E - (1 - t) * K) / (3 * c.pi * (1 - k) * (1 - t)), prec)
    raise ParameterError("closed forms exist for n = 1, 2 only")


# --- bulk integrals -----------------------------------------------------------

def _bulk_grid(n, cot, xi, M):
    th = 2 * np.pi * np.arange(M) / M
    if n == 2:
        oms = [th, -th]
    else:
        a, b = np.meshgrid(th, th, indexing="ij")
        oms = [a, b, -a - b]
    xs, sg, gam = [], [], []
    for om in oms:
        d = xi - np.cos(om)
        r = np.sqrt(d * d - cot ** -4)
        xs.append(cot ** 2 * (d - r))
        sg.append(cot ** 2 * r)
        gam.append(np.arcsinh(cot ** 2 * r))
    H = 1.0
    for i in range(n):
        for k in range(i + 1, n):
            # sinh of the half-sum of the gammas; the half-difference vanishes
            # identically on the n = 2 diagonal and cannot be intended
            H = H * (cot * np.sin((oms[i] - oms[k]) / 2) / np.sinh((gam[i] + gam[k]) / 2)) ** 2
    P = np.prod(xs, axis=0)
    f = H * (1 + P) / (1 - P) / np.prod(sg, axis=0)
    return cot ** n / math.factorial(n) * float(np.mean(f))


def chi_bulk_integral(n: int, cp: CouplingPoint, rtol: float = None,
                      max_nodes: int = None) -> QuadResult:
    """chi^(n) for arbitrary couplings from the (n-1)-fold angular integral.

    The integrand is analytic and periodic in each angle, so the trapezoid
    rule converges geometrically; the grid doubles until two successive
    values agree to ``rtol`` (default 1e-12 for n <= 2, 1e-10 for n = 3).
    """
    if n not in (1, 2, 3):
        raise ParameterError("bulk integrals are available for n = 1, 2, 3")
    if cp.side is Side.AT:
        raise DomainError("the bulk integrals diverge at T = Tc")
    sv, sh = float(cp.s_v), float(cp.s_h)
    cot = math.sqrt(sh / sv)
    xi = math.sqrt(1 + sh ** -2) * math.sqrt(1 + sv ** 2)
    if n == 1:
        d = xi - 1
        r = math.sqrt(d * d - cot ** -4)
        x, sg = cot ** 2 * (d - r), cot ** 2 * r
        return QuadResult(cot / sg * (1 + x) / (1 - x), 0.0, 1)
    if rtol is None:
        rtol = 1e-12 if n == 2 else 1e-10
    if max_nodes is None:
        max_nodes = 1 << 16 if n == 2 else 1024
    M = 32
    prev = _bulk_grid(n, cot, xi, M)
    while True:
        M *= 2
        if M > max_nodes:
            raise ConvergenceError(
                f"chi^({n}) trapezoid rule not converged at {M // 2} nodes per angle "
                "(too close to |s| = 1)")
        cur = _bulk_grid(n, cot, xi, M)
        err = abs(cur - prev)
        if err <= rtol * abs(cur):
            return QuadResult(cur, err, M ** (n - 1))
        prev = cur


# --- amplitudes ---------------------------------------------------------------

def amplitude_constants(prec: int = DEFAULT_PREC):
    """(C1, C2, C3, C4) of the n-particle critical amplitudes."""
    c = ctx(prec)
    g = ctx(prec + 32)
    pi = g.pi
    C1 = g.mpf(1)
    C2 = 1 / (12 * pi)
    C3 = (pi ** 2 / 3 + 2 - 3 * g.sqrt(3) * clausen_Cl2(pi / 3, prec + 32)) / (2 * pi ** 2)
    C4 = (4 * pi ** 2 / 9 - g.mpf(1) / 6 - g.mpf(7) / 2 * g.zeta(3)) / (16 * pi ** 3)
    return tuple(PrecReal(c.mpf(v), prec) for v in (C1, C2, C3, C4))


def amplitude_ratio(prec: int = DEFAULT_PREC, terms: int = 4):
    """C+/C- from the first ``terms`` (2 or 4) n-particle amplitudes."""
    C1, C2, C3, C4 = (a.value for a in amplitude_constants(prec))
    if terms == 2:
        return C1 / C2
    if terms == 4:
        return (C1 + C3) / (C2 + C4)
    raise ParameterError("terms must be 2 or 4")


# --- singularities ------------------------------------------------------------

def singularity_exponent(n: int, side, kind: str = "bulk"):
    """(exponent, has_log) of the n-particle singularity on |s| = 1 or |t| = 1."""
    side = Side.parse(side)
    if n < 1:
        raise ParameterError("n must be positive")
    want = Side.ABOVE if n % 2 else Side.BELOW
    if side is not want:
        raise ParityError(f"n = {n} contributes only {want.value} Tc")
    if kind == "bulk":
        if n % 2:
            j = (n - 1) // 2
            return Fraction(2 * j * (j + 1) - 1), True
        j = n // 2
        return Fraction(2 * j * j) - Fraction(3, 2), False
    if kind in ("diag", "diagonal"):
        if n % 2 == 0:
            m = n // 2
            return Fraction(2 * m * m - 1), True
        m = (n - 1) // 2
        return Fraction((m + 1) ** 2) - Fraction(1, 2), False
    raise ParameterError(f"unknown kind {kind!r}")


def _nickel_pairs(n):
    half = n // 2
    for j, k in product(range(half + 1), repeat=2):
        if j == k == 0:
            continue
        if n % 2 == 0 and j + k == half:
            continue
        yield j, k


def _nickel_w(n, c):
    """All isotropic w values from the admissible (j, k), deduplicated."""
    tol = c.ldexp(1, 16 - c.prec)
    out = []
    for j, k in _nickel_pairs(n):
        sc = c.cos(2 * c.pi * j / n) + c.cos(2 * c.pi * k / n)
        if abs(sc) < tol:
            continue  # w = infinity
        w = 1 / (2 * sc)
        if all(abs(w - v) > tol for v in out):
            out.append(w)
    return out


def _location_residual(w, n, c):
    """Smallest |location equation| over (j, k) at the isotropic point given by w."""
    # s + 1/s = 1/(2w); take either root, the equation is symmetric under s -> 1/s
    a = 1 / (2 * w)
    s = (a + c.sqrt(c.mpc(a * a - 4))) / 2
    best = None
    for j, k in _nickel_pairs(n):
        cj, ck = c.cos(2 * c.pi * j / n), c.cos(2 * c.pi * k / n)
        # cosh^2 2K = 1 + s^2 on the isotropic lattice
        r = abs(1 + s * s - s * cj - s * ck)
        best = r if best is None else min(best, r)
    return best


def nickel_singularities(n: int, new_only: bool = True, prec: int = DEFAULT_PREC):
    """Nickel singularities of chi^(n) in the isotropic variable w.

    With ``new_only`` the locations already present for a smaller n of the
    same parity are removed, which is how the standard table lists them.
    """
    if not 2 <= n <= 6:
        raise ParameterError("n must lie in 2..6")
    c = ctx(prec)
    tol = c.ldexp(1, 16 - prec)
    ws = _nickel_w(n, c)
    if new_only:
        older = [w for m in range(n - 2, 1, -2) for w in _nickel_w(m, c)]
        ws = [w for w in ws if all(abs(w - v) > tol for v in older)]
    side = Side.ABOVE if n % 2 else Side.BELOW
    exponent, has_log = singularity_exponent(n, side, "bulk")
    return [SingularityRecord(w, "w", exponent, has_log, n, float(_location_residual(w, n, c)))
            for w in sorted(ws)]


def diagonal_singularities(n: int, prec: int = DEFAULT_PREC):
    """Root-of-unity singularities of chi_d^(n) in t, excluding t = 1."""
    if n < 2:
        raise ParameterError("n must be at least 2")
    c = ctx(prec)
    side = Side.ABOVE if n % 2 else Side.BELOW
    exponent, has_log = singularity_exponent(n, side, "diagonal")
    # even n = 2m: t^m = 1; odd n = 2m+1: t^(m+1/2) = 1, i.e. x^(2m+1) = 1 with t = x^2
    m = n // 2
    k_max = m if n % 2 == 0 else 2 * m + 1
    step = 2 * c.pi / m if n % 2 == 0 else 4 * c.pi / (2 * m + 1)
    out = []
    for k in range(1, k_max):
        z = c.expjpi(0) * c.exp(c.mpc(0, 1) * step * k)
        if abs(z.imag) < c.ldexp(1, 16 - prec):
            z = c.mpf(z.real)
        power = (c.sqrt(z) ** (2 * m + 1)) if n % 2 else z ** m
        out.append(SingularityRecord(z, "t", exponent, has_log, n, float(abs(abs(power) - 1))))
    return out


# --- diagonal series ----------------------------------------------------------

def _diag_cap(n):
    return 60 if n <= 3 else 40


def chi_diag_series(n: int, order: int, cap: int = None) -> RationalSeries:
    """Exact series of chi_d^(n), even n in t, odd n in x = t^(1/2).

    ``order`` counts powers of t; odd-n series are returned through
    x^(2 order) (exclusive).
    """
    if not 1 <= n <= 5:
        raise ParameterError("n must lie in 1..5")
    cap = _diag_cap(n) if cap is None else cap
    if order > cap:
        raise CapExceededError(f"order {order} exceeds the cap {cap} for n = {n}")
    return _chi_diag_series(n, int(order))


@lru_cache(maxsize=32)
def _chi_diag_series(n, order):
    odd = n % 2 == 1
    xo = 2 * order

    def term(N):
        if odd:
            # one extra t power so the last odd x power is known, not padded
            return _ff(n, N, order + 1).to_x().truncate(xo)
        return _ff(n, N, order).truncate(order)

    acc = term(0)
    N = 1
    while leading_exponent(n, N) < order:
        acc = acc + term(N) * 2
        N += 1
    return acc.truncate(xo if odd else order)


# --- diagonal integrals -------------------------------------------------------

def _gl(m):
    x, w = np.polynomial.legendre.leggauss(m)
    # map to phi in (0, pi/2)
    return (x + 1) * np.pi / 4, w * np.pi / 4


def _diag_quad_once(n, t, m):
    phi, wts = _gl(m)
    s2, c2 = np.sin(phi) ** 2, np.cos(phi) ** 2
    if n % 2 == 0:
        k = n // 2
        # y = sin^2 phi: sqrt(y/(1-y)) dy = 2 sin^2 phi dphi
        # z = sin^2 psi: sqrt((1-z)/z) dz = 2 cos^2 psi dpsi
        ywt, zwt = 2 * s2 * wts, 2 * c2 * wts
        ny, nz = k, k
        pref = t ** (k * k) / (math.factorial(k) ** 2 * np.pi ** n)
        q = t ** k
    else:
        k = (n - 1) // 2
        # y: dy / sqrt(y(1-y)) = 2 dphi;  z: sqrt(z(1-z)) dz = 2 sin^2 cos^2 dpsi
        ywt, zwt = 2 * wts, 2 * s2 * c2 * wts
        ny, nz = k + 1, k
        pref = t ** (k * (k + 1)) / (np.pi ** n * math.factorial(k) * math.factorial(k + 1))
        q = t ** (k + 0.5)
    dims = ny + nz
    grids = np.meshgrid(*([s2] * dims), indexing="ij")
    wgrid = np.ones_like(grids[0]) if dims else np.ones(())
    mesh_w = np.meshgrid(*([ywt] * ny + [zwt] * nz), indexing="ij")
    for w in mesh_w:
        wgrid = wgrid * w
    ys, zs = grids[:ny], grids[ny:]
    f = np.ones_like(wgrid)
    for y in ys:
        f = f / np.sqrt(1 - t * y)
    for z in zs:
        f = f * np.sqrt(1 - t * z)
    for y in ys:
        for z in zs:
            f = f / (1 - t * y * z) ** 2
    for group in (ys, zs):
        for i in range(len(group)):
            for j in range(i + 1, len(group)):
                f = f * (group[i] - group[j]) ** 2
    P = np.ones_like(f)
    for g in grids:
        P = P * g
    f = f * (1 + q * P) / (1 - q * P)
    return pref * float(np.sum(f * wgrid))


def chi_diag_integral(n: int, t: float, rtol: float = 1e-12) -> QuadResult:
    """chi_d^(n)(t) for n <= 3 by tensor Gauss-Legendre after x = sin^2 phi."""
    if n not in (1, 2, 3):
        raise ParameterError("diagonal integrals are available for n = 1, 2, 3")
    t = float(t)
    if not 0 < t < 1:
        raise DomainError("t must lie in (0,1)")
    m = 16
    prev = _diag_quad_once(n, t, m)
    limit = 256 if n < 3 else 96
    while True:
        m *= 2
        cur = _diag_quad_once(n, t, m)
        err = abs(cur - prev)
        if err <= rtol * abs(cur) or m >= limit:
            if err > 1e3 * rtol * abs(cur):
                raise ConvergenceError(f"chi_d^({n}) quadrature stalled at {m} nodes")
            return QuadResult(cur, err, m ** n)
        prev = cur


# --- diagonal closed forms ----------------------------------------------------

# weights of (chi^(2)_d, the E/K quadratic, A_3 4F3) in chi^(4)_d, fixed by the
# exact series; the first weight differs from the printed 1/8
CHI4_WEIGHTS = (Fraction(1, 2), Fraction(1, 24), Fraction(-1, 8))
CHI3_WEIGHTS = (Fraction(1, 3), Fraction(1, 2), Fraction(-1, 6))


def _Q(x):
    return 27 * (1 + x) ** 2 * x ** 2 / (4 * (x * x + x + 1) ** 3)


def q_identity_residual(x, prec: int = DEFAULT_PREC):
    """|(1 - Q) - (1-x)^2 (1+2x)^2 (2+x)^2 / (4 (1+x+x^2)^3)| at x."""
    c = ctx(prec)
    x = to_mpf(x, c)
    rhs = (1 - x) ** 2 * (1 + 2 * x) ** 2 * (2 + x) ** 2 / (4 * (1 + x + x * x) ** 3)
    return abs((1 - _Q(x)) - rhs)


def _a3_4f3(t, c):
    """A_3 applied to 4F3(1/2,1/2,1/2,1/2; 1,1,1; t^2), D_t = d/dt."""
    h = c.mpf(1) / 2
    z = t * t
    # z-derivatives by parameter shifts: d^k/dz^k pFq = prod (a)_k / prod (b)_k pFq(a+k; b+k)
    H = [c.hyper([h + k] * 4, [1 + k] * 3, z) * c.rf(h, k) ** 4 / c.rf(1, k) ** 3
         for k in range(4)]
    d0 = H[0]
    d1 = 2 * t * H[1]
    d2 = 2 * H[1] + 4 * z * H[2]
    d3 = 12 * t * H[2] + 8 * t ** 3 * H[3]
    return (2 * (1 + t) * t ** 3 * d3
            + c.mpf(2) / 3 * (16 * t * t - t - 11) / (t - 1) * t * t * d2
            + c.mpf(1) / 3 * (31 * t * t - 4 * t - 11) / (t - 1) * t * d1
            + t * d0)


def chi_diag_components(n: int, t, prec: int = DEFAULT_PREC):
    """Named pieces of the n = 3 (argument x = t^(1/2)) or n = 4 closed form."""
    g = ctx(prec + 32)
    t = _open_unit(t, g)
    h = g.mpf(1) / 2
    if n == 3:
        x = g.sqrt(t)
        c1 = 1 / (1 - x)
        c2 = g.hyp2f1(h, -h, 1, x * x) / (1 - x) ** 2 - g.hyp2f1(h, h, 1, x * x) / (1 - x)
        Q = _Q(x)
        f = g.hyp2f1(g.mpf(1) / 6, g.mpf(1) / 3, 1, Q)
        # second factor read as 2F1(7/6, 4/3; 2; Q)
        f2 = g.hyp2f1(g.mpf(7) / 6, g.mpf(4) / 3, 2, Q)
        c3 = (1 + 2 * x) * (x + 2) / ((1 - x) * (x * x + x + 1)) * (f * f + 2 * Q / 9 * f * f2)
        return {"chi3_1": c1, "chi3_2": c2, "chi3_3": c3}
    if n == 4:
        K = g.hyp2f1(h, h, 1, t)
        E = g.hyp2f1(h, -h, 1, t)
        c1 = t / (4 * (1 - t))
        c2 = (1 + t) / (1 - t) ** 2 * E ** 2 - K ** 2 - 2 * t / (1 - t) * K * E
        c3 = _a3_4f3(t, g)
        return {"chi4_1": c1, "chi4_2": c2, "chi4_3": c3}
    raise ParameterError("components exist for n = 3, 4")


def _weighted(parts, weights, g):
    return sum((g.mpf(w.numerator) / w.denominator * v for w, v in zip(weights, parts.values())),
               g.mpf(0))


def chi_diag_closed(n: int, t, prec: int = DEFAULT_PREC) -> PrecReal:
    """Closed form of chi_d^(n)(t) for n = 1..4."""
    c = ctx(prec)
    g = ctx(prec + 32)
    tt = _open_unit(t, g)
    if n == 1:
        return PrecReal(c.mpf(1 / (1 - g.sqrt(tt))), prec)
    if n == 2:
        return PrecReal(c.mpf(tt / (4 * (1 - tt))), prec)
    if n == 3:
        return PrecReal(c.mpf(_weighted(chi_diag_components(3, tt, prec), CHI3_WEIGHTS, g)), prec)
    if n == 4:
        return PrecReal(c.mpf(_weighted(chi_diag_components(4, tt, prec), CHI4_WEIGHTS, g)), prec)
    raise ParameterError("closed forms exist for n = 1..4")


# exact series of the closed-form pieces

def _hyp(upper, lower, order, power, var):
    return RationalSeries.hypergeometric(upper, lower, order, power, var)


def _geometric(order, var):
    return RationalSeries([1] * int(order), order, 0, var)


@lru_cache(maxsize=32)
def diag_component_series(name: str, order: int) -> RationalSeries:
    """Exact series of a closed-form piece: chi3_* in x, chi4_* in t."""
    h = Fraction(1, 2)
    if name.startswith("chi3_"):
        v = "x"
        one = RationalSeries.one(order, v)
        x = RationalSeries.monomial(1, order, 1, v)
        geo = _geometric(order, v)
        if name == "chi3_1":
            return geo
        if name == "chi3_2":
            return (_hyp([h, -h], [1], order, 2, v) * geo * geo
                    - _hyp([h, h], [1], order, 2, v) * geo)
        if name == "chi3_3":
            base = one + x + x * x
            Q = (one + x) ** 2 * x * x * (base ** 3).inverse() * Fraction(27, 4)
            f = _compose_hyp([Fraction(1, 6), Fraction(1, 3)], [1], Q, order)
            f2 = _compose_hyp([Fraction(7, 6), Fraction(4, 3)], [2], Q, order)
            pre = (one + x * 2) * (x + 2) * geo * base.inverse()
            return pre * (f * f + Q * f * f2 * Fraction(2, 9))
    if name.startswith("chi4_"):
        v = "t"
        one = RationalSeries.one(order, v)
        t = RationalSeries.monomial(1, order, 1, v)
        geo = _geometric(order, v)
        if name == "chi4_1":
            return t * geo * Fraction(1, 4)
        if name == "chi4_2":
            K = _hyp([h, h], [1], order, 1, v)
            E = _hyp([h, -h], [1], order, 1, v)
            return (one + t) * geo * geo * E * E - K * K - t * geo * K * E * 2
        if name == "chi4_3":
            H = _hyp([h] * 4, [1] * 3, order + 4, 2, v)
            d1 = H.derivative()
            d2 = d1.derivative()
            d3 = d2.derivative()
            inv = -geo  # 1/(t-1)
            out = ((one + t) * t ** 3 * d3 * 2
                   + (t * t * 16 - t - 11) * inv * t * t * d2 * Fraction(2, 3)
                   + (t * t * 31 - t * 4 - 11) * inv * t * d1 * Fraction(1, 3)
                   + t * H)
            return out.truncate(order)
    raise ParameterError(f"unknown component {name!r}")


def _compose_hyp(upper, lower, Q, order):
    """2F1-type series sum_k a_k Q^k for a series Q with positive valuation."""
    v = Q.variable
    acc = RationalSeries.one(order, v)
    term = Fraction(1)
    power = RationalSeries.one(order, v)
    k = 0
    while True:
        for a in upper:
            term *= a + k
        for b in lower:
            term /= b + k
        term /= k + 1
        k += 1
        power = (power * Q).truncate(order)
        if power.valuation() is None or power.valuation() >= order:
            break
        acc = acc + power * term
    return acc


def closed_form_series(n: int, order: int) -> RationalSeries:
    """chi_d^(3) (in x) or chi_d^(4) (in t) assembled from the closed-form pieces."""
    if n == 3:
        names, weights = ("chi3_1", "chi3_2", "chi3_3"), CHI3_WEIGHTS
    elif n == 4:
        names, weights = ("chi4_1", "chi4_2", "chi4_3"), CHI4_WEIGHTS
    else:
        raise ParameterError("n must be 3 or 4")
    acc = None
    for nm, w in zip(names, weights):
        s = diag_component_series(nm, order) * w
        acc = s if acc is None else acc + s
    return acc


# --- asymptotics --------------------------------------------------------------

def _lstsq(rows, vals, g):
    A = g.matrix(rows)
    y = g.matrix(vals)
    sol, res = g.qr_solve(A, y)
    return [sol[i] for i in range(len(rows[0]))], res


def chi3_amplitude_exact(prec: int = DEFAULT_PREC):
    """Gamma-function value of lim (1-x) chi_d^(3)(x) as x -> 1."""
    g = ctx(prec + 32)
    G = g.gamma
    v = (g.mpf(1) / 3 - 5 * g.pi / (18 * G(g.mpf(5) / 6) ** 2 * G(g.mpf(2) / 3) ** 2)
         + 4 * g.pi / (G(g.mpf(1) / 6) ** 2 * G(g.mpf(1) / 3) ** 2))
    return ctx(prec).mpf(v)


def _geo_grid(g, hi, lo, points):
    hi, lo = g.mpf(hi), g.mpf(lo)
    return [hi * (lo / hi) ** (g.mpf(i) / (points - 1)) for i in range(points)]


def _chi3_fit(prec, eps_hi="0.05", eps_lo="0.0005", points=16, K=4):
    g = ctx(prec)
    grid = _geo_grid(g, eps_hi, eps_lo, points)
    rows, vals = [], []
    for e in grid:
        x = 1 - e
        vals.append(e * chi_diag_closed(3, x * x, prec).value)
        r = [g.mpf(1)]
        for k in range(1, K + 1):
            r += [e ** k * g.log(e), e ** k]
        rows.append(r)
    sol, res = _lstsq(rows, vals, g)
    return sol[0], {"variable": "x", "window": [float(grid[0]), float(grid[-1])],
                    "points": points, "model_powers": K, "residual": float(res)}


def _chi4_fit(prec, eps_hi="0.1", eps_lo="0.005", points=24, K=4):
    g = ctx(prec)
    grid = _geo_grid(g, eps_hi, eps_lo, points)
    rows, vals = [], []
    for e in grid:
        vals.append(chi_diag_closed(4, 1 - e, prec).value)
        L = g.log(16 / e)
        r = [1 / e]
        for k in range(K + 1):
            r += [e ** k * L * L, e ** k * L, e ** k]
        rows.append(r)
    sol, res = _lstsq(rows, vals, g)
    return sol, {"variable": "t", "window": [float(grid[0]), float(grid[-1])],
                 "points": points, "model_powers": K, "residual": float(res)}


def _minus_one_amplitude(order=300, passes=16, richardson=4):
    """Amplitude A of A (1+t)^7 ln(1+t) in chi_d^(4) from its series coefficients.

    The t = 1 singularity gives coefficients smooth in n; t = -1 gives
    (-1)^n A 7! (n-8)!/n! (1 + O(1/n)).  After flipping signs, repeated
    averaging of neighbours suppresses the (now alternating) t = 1 part;
    the ratio to the same operation on the model sequence is extrapolated
    in 1/n.
    """
    s = closed_form_series(4, order)
    d = [(-1) ** k * s.coefficient(k) for k in range(order)]
    m = [Fraction(5040 * math.factorial(k - 8), math.factorial(k)) if k > 8 else Fraction(0)
         for k in range(order)]
    for _ in range(passes):
        d = [(d[i] + d[i + 1]) / 2 for i in range(len(d) - 1)]
        m = [(m[i] + m[i + 1]) / 2 for i in range(len(m) - 1)]
    g = ctx(128)
    last = len(d) - 1
    ns = [last - 8 * i for i in range(richardson + 1)][::-1]
    est = [g.mpf(d[k].numerator) / d[k].denominator / (g.mpf(m[k].numerator) / m[k].denominator)
           for k in ns]
    A = g.matrix([[g.mpf(1) / k ** p for p in range(richardson + 1)] for k in ns])
    sol = g.lu_solve(A, g.matrix(est))
    return sol[0], {"order": order, "passes": passes, "n_used": ns,
                    "raw_last": float(est[-1])}


def chi_diag_asymptotics(n: int, prec: int = 160, minus_one: bool = True):
    """Singular behaviour of chi_d^(3) at x -> 1 or chi_d^(4) at t -> 1 and t -> -1."""
    g = ctx(prec)
    if n == 3:
        exact = chi3_amplitude_exact(prec)
        fitted, diag = _chi3_fit(prec)
        return {"n": 3, "amplitude_exact": float(exact), "amplitude_fit": float(fitted),
                "reference": 0.016329, "fit": diag}
    if n == 4:
        sol, diag = _chi4_fit(prec)
        a, L2, L1 = sol[0], sol[1], sol[2]
        # a = (1/8)(1 - [64 + 16 S]/(3 pi^2)) with S = 3 I1 - 4 I2
        S = ((1 - 8 * a) * 3 * g.pi ** 2 - 64) / 16
        out = {"n": 4, "inverse_coefficient": float(a),
               "inverse_coefficient_reference":
                   float((1 - (64 + 16 * g.mpf("-2.2128121")) / (3 * g.pi ** 2)) / 8),
               "log2_coefficient": float(L2), "log2_reference": float(-1 / (16 * g.pi ** 2)),
               "log_coefficient": float(L1), "log_reference": float(7 / (16 * g.pi ** 2)),
               "implied_3I1_minus_4I2": float(S), "fit": diag}
        if minus_one:
            A, info = _minus_one_amplitude()
            out["minus_one_amplitude"] = float(A)
            out["minus_one_amplitude_times_pi2"] = float(A * g.pi ** 2)
            out["minus_one_printed"] = 1 / 26880
            out["minus_one_fit"] = info
        return out
    raise ParameterError("asymptotics are available for n = 3, 4")


# --- lambda extension ---------------------------------------------------------

def lambda_chi(side, lam, n_max: int, t, kind: str = "diag", order: int = 40,
               prec: int = DEFAULT_PREC):
    """Partial sum of the lambda-extended susceptibility through n_max particles.

    Odd terms (above Tc) carry lambda^(n-1), even terms (below Tc) lambda^n.
    The bulk sum uses isotropic couplings and includes the t^(-1/4) factor;
    the diagonal sum does not.
    """
    side = Side.parse(side)
    if side is Side.AT:
        raise DomainError("the susceptibility diverges at Tc")
    c = ctx(prec)
    t = _open_unit(t, c)
    lam = to_mpf(lam, c)
    ns = range(1, n_max + 1, 2) if side is Side.ABOVE else range(2, n_max + 1, 2)
    total = c.mpf(0)
    if kind in ("diag", "diagonal"):
        if n_max > 5:
            raise CapExceededError("diagonal lambda sums use series with n <= 5")
        for n in ns:
            s = chi_diag_series(n, order, cap=max(order, _diag_cap(n)))
            arg = c.sqrt(t) if n % 2 else t
            w = lam ** (n - 1) if n % 2 else lam ** n
            total += w * s.evaluate(arg, c)
        return PrecReal((1 - t) ** (c.mpf(1) / 4) * total, prec)
    if kind == "bulk":
        if n_max > 3:
            raise CapExceededError("bulk lambda sums use integrals with n <= 3")
        cp = CouplingPoint.isotropic_from_t(t, side, prec)
        for n in ns:
            w = lam ** (n - 1) if n % 2 else lam ** n
            total += w * c.mpf(chi_bulk_integral(n, cp).value)
        pre = (1 - t) ** (c.mpf(1) / 4)
        if side is Side.ABOVE:
            pre *= t ** (-c.mpf(1) / 4)
        return PrecReal(pre * total, prec)
    raise ParameterError(f"unknown kind {kind!r}")
