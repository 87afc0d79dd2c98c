"""Diagonal form factors f^(n)_{N,N}(t).

Exact t-series come from :mod:`ising_exact._engine`; a tensor Gauss-Legendre
quadrature of the defining integrals (n <= 3) serves as an independent
numerical path.  Also here: the lambda-extended correlations, their
theta-function closed forms and the factorization fit in terms of
F_N = 2F1(1/2, N+1/2; N+1; t).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import numpy as np

from . import _engine
from .errors import (CapExceededError, ConvergenceError, DomainError, IsingExactError,
                     ParameterError)
from .exact_linalg import solve_unique
from .numerics import DEFAULT_PREC, ctx, nome, theta_funcs, theta_prime_over_sin, to_mpf
from .params import Side
from .series import LamPoly, RationalSeries, half_ratio, pochhammer

__all__ = ["Caps", "DEFAULT_CAPS", "FormFactor", "leading_exponent", "formfactor_series",
           "formfactor_quad", "lambda_correlation", "correlation_series", "theta_closed_forms",
           "genus_curve_residual", "factorization_fit", "FactorizationResult", "F_series",
           "explicit_c2", "specialize_lambda"]


class InternalError(IsingExactError):
    kind = "internal"


@dataclass(frozen=True)
class Caps:
    n_max: int = 6
    N_max: int = 8
    order_max: int = 40


DEFAULT_CAPS = Caps()


def leading_exponent(n: int, N: int) -> Fraction:
    """Exponent of the lowest power of t in f^(n)_{N,N}."""
    if n % 2 == 0:
        m = n // 2
        return Fraction(m * (N + m))
    m = (n - 1) // 2
    return Fraction(2 * m + 1, 2) * N + m * (m + 1)


@dataclass(frozen=True)
class FormFactor:
    n: int
    N: int
    series: RationalSeries
    ode: object = None

    def __post_init__(self):
        v = self.series.valuation()
        lead = leading_exponent(self.n, self.N)
        if v is not None and v != lead:
            raise InternalError(f"f^({self.n})_{self.N},{self.N} starts at t^{v}, expected t^{lead}")

    @property
    def leading_exponent(self) -> Fraction:
        return leading_exponent(self.n, self.N)

    def to_json(self):
        d = self.series.to_json()
        d.update({"n": self.n, "N": self.N})
        return d


def _u_series(coeffs, M):
    """Integer series in u = t/16 as an exact t-series."""
    return RationalSeries([Fraction(v, 16 ** k) for k, v in enumerate(coeffs[:M])], M)


@lru_cache(maxsize=256)
def _raw(n: int, N: int, M: int) -> RationalSeries:
    """f^(n)_{N,N} with M exact terms past its leading power."""
    try:
        if n == 0:
            return RationalSeries.one(M)
        if n % 2 == 0:
            m = n // 2
            E, scale = _engine.even_kernel(m, N, M)
            ser = _u_series(E, M) * scale
        else:
            m = (n - 1) // 2
            E, scale, y0 = _engine.odd_kernel(m, N, M)
            ser = _u_series(E, M) * scale
            Y = _u_series(y0, M)
            if m == 0:
                ser = ser * Y
            elif m >= 2:
                ser = ser * (Y.inverse() ** (m - 1))
    except ArithmeticError as exc:
        # exact divisibility in Newton's identities plays the role of the
        # pi-cancellation check: failure means a bug, not a property
        raise InternalError(str(exc)) from exc
    return ser.shift(leading_exponent(n, N))


def _terms_needed(n, N, order):
    return max(math.ceil(Fraction(order) - leading_exponent(n, N)), 0)


def _ff(n: int, N: int, order) -> RationalSeries:
    """Uncapped f^(n)_{N,N} known modulo t^order (order may be exceeded)."""
    M = _terms_needed(n, N, order)
    lead = leading_exponent(n, N)
    if M == 0:
        return RationalSeries([], lead, lead)
    return _raw(n, N, M)


def formfactor_series(n: int, N: int, order, caps: Caps = DEFAULT_CAPS) -> FormFactor:
    """Exact series of f^(n)_{N,N}(t) through t^order (exclusive).

    For odd n and odd N the powers are half-integers; the returned series
    is exact up to the first exponent >= ``order``.
    """
    if n < 0 or N < 0:
        raise ParameterError("n and N must be non-negative")
    if n > caps.n_max or N > caps.N_max or order > caps.order_max:
        raise CapExceededError(
            f"(n={n}, N={N}, order={order}) exceeds caps "
            f"(n<={caps.n_max}, N<={caps.N_max}, order<={caps.order_max})")
    return FormFactor(n, N, _ff(n, N, order))


# --- quadrature -----------------------------------------------------------

def _gl(m):
    x, w = np.polynomial.legendre.leggauss(m)
    phi = (x + 1) * (np.pi / 4)
    return np.sin(phi) ** 2, np.cos(phi) ** 2, w * (np.pi / 4)


def _quad_once(n, N, t, m):
    s, c, w = _gl(m)
    r = np.sqrt(1 - t * s)
    xN = s ** N
    if n == 1:
        # x^{-1}[(1-tx)(1/x-1)]^{-1/2} dx = 2 dphi / sqrt(1-tx)
        return float(np.sum(w * 2 * xN / r)) / np.pi
    if n == 2:
        wb = w * 2 * s / r * xN          # [(1-tx)(1/x-1)]^{-1/2} dx
        wa = w * 2 * c * r * xN          # [(1-tx)(1/x-1)]^{1/2} dx
        ker = 1 / (1 - t * np.outer(s, s)) ** 2
        return float(wb @ ker @ wa) / np.pi ** 2
    if n == 3:
        wo = w * 2 / r * xN              # odd-type variables x1, x3
        we = w * 2 * s * c * r * xN      # even-type variable x2
        ker = 1 / (1 - t * np.outer(s, s)) ** 2      # [x_odd, x2]
        diff2 = (s[:, None] - s[None, :]) ** 2       # [x1, x3]
        # sum_{1,2,3} wo1 wo3 we2 ker[1,2] ker[3,2] diff2[1,3]
        inner = np.einsum("i,k,ij,kj,ik->j", wo, wo, ker, ker, diff2, optimize=True)
        return float(inner @ we) / (2 * np.pi ** 3)
    raise ParameterError("quadrature available for n = 1, 2, 3 only")


def formfactor_quad(n: int, N: int, t: float, rtol: float = 1e-12, t_max: float = 0.95) -> float:
    """f^(n)_{N,N}(t) by tensor Gauss-Legendre quadrature after x = sin^2(phi).

    The substitution absorbs the inverse square-root endpoint weights, leaving
    smooth periodic-like integrands; the rule is doubled until two successive
    values agree to ``rtol``.
    """
    t = float(t)
    if not 0 < t < 1:
        raise DomainError("t must lie in (0,1)")
    if t > t_max:
        raise DomainError(f"t={t} too close to 1 for quadrature (limit {t_max})")
    pref = t ** float(leading_exponent(n, N))
    prev = None
    m = 16
    top = 512 if n < 3 else 192
    while m <= top:
        val = _quad_once(n, N, t, m)
        if prev is not None and abs(val - prev) <= rtol * abs(val):
            return pref * val
        prev = val
        m *= 2
    raise ConvergenceError(f"quadrature for f^({n}) did not reach rtol={rtol}")


# --- lambda extension -----------------------------------------------------

def correlation_terms(N: int, side, order):
    """The form factors contributing below t^order: list of (power of lambda^2, series)."""
    side = Side.parse(side)
    out = []
    if side is Side.BELOW:
        out.append((0, RationalSeries.one(order)))
        j = 1
        while leading_exponent(2 * j, N) < order:
            out.append((j, _ff(2 * j, N, order)))
            j += 1
    elif side is Side.ABOVE:
        j = 0
        while leading_exponent(2 * j + 1, N) < order:
            out.append((j, _ff(2 * j + 1, N, order)))
            j += 1
    else:
        raise DomainError("series expansion needs a side off criticality")
    return out


def _weight(lam, j):
    if lam is None:
        return LamPoly.lam2(j)
    return Fraction(lam) ** (2 * j)


def correlation_series(N: int, side, order, lam=None, drop=()):
    """1 + sum lambda^{2n} f^(2n) (below) or sum lambda^{2n} f^(2n+1) (above).

    Without the (1-t)^(1/4) prefactor.  ``lam=None`` keeps lambda symbolic
    (coefficients are LamPoly in lambda^2).  Particle numbers listed in
    ``drop`` are left out (used for negative controls).
    """
    side = Side.parse(side)
    terms = correlation_terms(N, side, order)
    offset = Fraction(0) if side is Side.BELOW else Fraction(N, 2)
    size = max(math.ceil(Fraction(order) - offset), 0)
    total = RationalSeries([0] * size, offset + size, offset)
    for j, ser in terms:
        n = 2 * j if side is Side.BELOW else 2 * j + 1
        if n in drop:
            continue
        total = total + ser.truncate(total.order) * _weight(lam, j)
    return total


def lambda_correlation(N: int, side, lam=None, order=20) -> RationalSeries:
    """C_-(N,N;lambda) or C_+(N,N;lambda) as an exact t-series.

    ``lam`` may be an exact rational or None for a symbolic lambda.
    """
    body = correlation_series(N, side, order, lam)
    pre = RationalSeries.binomial(Fraction(1, 4), int(math.ceil(body.order)) + 1, scale=-1)
    return body * pre


def specialize_lambda(series: RationalSeries, lam, c=None) -> RationalSeries:
    """Replace LamPoly coefficients by their values at ``lam``."""
    if c is not None:
        lam = to_mpf(lam, c)
    return series.map_coeffs(lambda v: v.evaluate(lam) if isinstance(v, LamPoly) else v)


# --- theta closed forms -----------------------------------------------------

def theta_closed_forms(which: str, lam, t, prec: int = DEFAULT_PREC):
    """Theta-function expressions for C_-(0,0), C_+(0,0), C_-(1,1), C_+(1,1).

    The C_+ forms (theta2 and theta3 interchanged) equal lambda times the
    lambda^(2n)-weighted sum returned by :func:`lambda_correlation`.
    """
    c = ctx(prec)
    lam = to_mpf(lam, c)
    if abs(lam) > 1:
        raise DomainError("|lambda| must not exceed 1")
    nm = nome(t, prec)
    q = nm.q
    u = c.acos(lam)
    th2_0, th3_0, _, _ = theta_funcs(0, q, prec)
    if which == "Cm00":
        return theta_funcs(u, q, prec)[1] / th3_0
    if which == "Cp00":
        return theta_funcs(u, q, prec)[0] / th2_0
    d2, d3 = theta_prime_over_sin(lam, q, prec)
    if which == "Cm11":
        return -d2 / (th2_0 * th3_0 ** 2)
    if which == "Cp11":
        return -d3 / (th3_0 * th2_0 ** 2)
    raise ParameterError(f"unknown closed form {which!r}")


def genus_curve_residual(curve: str, t, prec: int = DEFAULT_PREC, literal: bool = False):
    """Residual of the algebraic relation between tau = C_-(0,0;lambda) and t.

    ``curve`` is "genus1" (lambda = cos pi/3) or "genus3" (lambda = cos pi/4).
    The genus-one relation was recovered from the exact lambda = 1/2 series;
    ``literal=True`` evaluates the commonly printed variant with tau^8 and
    -8(t-1)tau^3, which already fails at t = 0 where tau = 1.
    """
    c = ctx(prec)
    t = to_mpf(t, c)
    if curve == "genus1":
        tau = theta_closed_forms("Cm00", c.cos(c.pi / 3), t, prec)
        if literal:
            return 16 * tau ** 12 - 16 * tau ** 8 - 8 * (t - 1) * tau ** 3 + t * (1 - t)
        return 16 * tau ** 12 - 16 * tau ** 9 + 8 * t * (1 - t) * tau ** 3 + t * (1 - t)
    if curve == "genus3":
        tau = theta_closed_forms("Cm00", c.cos(c.pi / 4), t, prec)
        return 16 * tau ** 16 + 16 * (t - 1) * tau ** 8 + t ** 2 * (t - 1)
    raise ParameterError(f"unknown curve {curve!r}")


def algebraic_cos_pi4(N: int, t, prec: int = DEFAULT_PREC):
    """The closed algebraic forms of C_-(N,N;cos pi/4) for N = 0, 1, 2."""
    c = ctx(prec)
    t = to_mpf(t, c)
    r = c.sqrt(1 - t)
    base = (1 - t) ** (c.mpf(1) / 16)
    if N == 0:
        return 2 ** (c.mpf(-1) / 4) * base * (1 + r) ** (c.mpf(1) / 4)
    if N == 1:
        return 2 ** (c.mpf(-3) / 4) * base * (1 + r) ** (c.mpf(3) / 4)
    if N == 2:
        return 2 ** (c.mpf(-5) / 4) * base * (1 + r) ** (c.mpf(5) / 4) * (5 - r) / 4
    raise ParameterError("algebraic form known for N = 0, 1, 2")


# --- factorization ------------------------------------------------------------

def F_series(N: int, order: int) -> RationalSeries:
    """F_N = 2F1(1/2, N+1/2; N+1; t) as an exact series."""
    return RationalSeries.hypergeometric([Fraction(1, 2), Fraction(2 * N + 1, 2)], [N + 1], order)


@dataclass
class FactorizationResult:
    n: int
    N: int
    K: list
    C: list                      # C[m] = coefficient list of C^(n)_m(N;t), index = power of t
    degree: int                  # expected n'(2N+1)
    degrees: list = field(default_factory=list)
    valuations: list = field(default_factory=list)
    palindromic: bool = False
    degree_ok: bool = False
    explicit_match: object = None   # n = 2 only: comparison with the closed C^(2) formula

    def to_json(self):
        return {"n": self.n, "N": self.N, "K": [str(k) for k in self.K],
                "C": [[str(v) for v in poly] for poly in self.C], "degree": self.degree,
                "degrees": self.degrees, "valuations": self.valuations,
                "palindromic": self.palindromic, "degree_ok": self.degree_ok,
                "explicit_match": self.explicit_match}


def _poly_trim(p):
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return p


def _palindromic(poly, total):
    """poly(t) == t^total poly(1/t)."""
    p = list(poly) + [Fraction(0)] * max(0, total + 1 - len(poly))
    if len(_poly_trim(p)) > total + 1:
        return False
    return all(p[i] == p[total - i] for i in range(total + 1))


def factorization_fit(n: int, N: int, margin: int = 8) -> FactorizationResult:
    """Fit f^(n)_{N,N} = sum K_m f^(lower) + sum_m C_m(t) F_N^{n-m} F_{N+1}^m exactly.

    Odd n are divided by t^(N/2) first.  Every C_m is allowed the full degree
    range 0..n'(2N+1) with n' = floor(n/2); valuations, degrees and palindromy
    are then read off the solution rather than imposed.
    """
    if not 2 <= n <= 6:
        raise ParameterError("factorization fit covers 2 <= n <= 6")
    if not 0 <= N <= 4:
        raise ParameterError("factorization fit covers 0 <= N <= 4")
    half = n // 2
    D = half * (2 * N + 1)
    nK = half
    nC = (n + 1) * (D + 1)
    order = nK + nC + margin
    odd = n % 2 == 1
    shift = Fraction(N, 2) if odd else Fraction(0)

    def target(k):
        s = _ff(k, N, order + shift)
        if odd:
            s = s.shift(-shift)
        return s.truncate(order).rebase(0)

    lower = [target(2 * m + 1 if odd else 2 * m) for m in range(half)]
    FN, FN1 = F_series(N, order), F_series(N + 1, order)
    products = []
    for m in range(n + 1):
        products.append((FN ** (n - m)) * (FN1 ** m) if n - m or m else RationalSeries.one(order))
    columns = [s.coeffs for s in lower]
    for m in range(n + 1):
        base = products[m].truncate(order).rebase(0).coeffs
        for j in range(D + 1):
            columns.append([Fraction(0)] * j + base[:order - j])
    rhs = target(n).coeffs
    A = [[col[i] for col in columns] for i in range(order)]
    sol = solve_unique(A, rhs)
    K = sol[:nK]
    C = [sol[nK + m * (D + 1): nK + (m + 1) * (D + 1)] for m in range(n + 1)]
    degrees, vals = [], []
    pal = True
    for m, poly in enumerate(C):
        tp = _poly_trim(poly)
        degrees.append(len(tp) - 1 if tp else None)
        nz = [i for i, v in enumerate(poly) if v != 0]
        vals.append(nz[0] if nz else None)
        if tp and not _palindromic(poly, D + m):
            pal = False
    deg_ok = all(d is None or d == D for d in degrees) and any(d is not None for d in degrees)
    res = FactorizationResult(n, N, K, [list(p) for p in C], D, degrees, vals, pal, deg_ok)
    if n == 2 and N >= 1:
        res.explicit_match = _compare_explicit(res)
    return res


def _a_coeff(k, N, literal=False):
    lead = pochhammer(Fraction(1, 2), N if literal else k)
    return lead * pochhammer(Fraction(1, 2) - N, k) / (pochhammer(1 - N, k) * math.factorial(k))


def _c2_inner(m, N, literal=False):
    """Palindromic coefficient lists c^(2)_{m;n}(N), n = 0..2N+1-m."""
    a = lambda k, M: _a_coeff(k, M, literal)  # noqa: E731
    length = 2 * N + 2 - m
    c = [None] * length
    if m == 2:
        for k in range(N):
            v = sum(a(j, N) * a(k - j, N) for j in range(k + 1))
            c[k] = c[2 * N - 1 - k] = v
    elif m == 1:
        for k in range(N):
            v = sum(a(j, N) * a(k - j, N + 1) for j in range(k + 1))
            c[k] = c[2 * N - k] = v
        H = sum(Fraction(1) / (Fraction(1, 2) + j) for j in range(N))
        c[N] = half_ratio(N) ** 2 * (1 + 2 * N * H)
    else:
        inner = _c2_inner(2, N + 1, literal)
        for k in range(N + 1):
            c[k] = c[2 * N + 1 - k] = inner[k]
    return c


def explicit_c2(N: int, literal: bool = False):
    """C^(2)_m(N;t), m = 0,1,2, from the closed formula.

    As printed the prefactor carries binom(m,2) (zero for m = 0, 1) and
    a_n(N) starts with (1/2)_N.  The default reading uses binom(2,m) and
    (1/2)_n, which is what the exact fit reproduces; ``literal=True``
    evaluates the printed version for comparison.
    """
    if N < 1:
        raise ParameterError("closed C^(2) formula needs N >= 1")
    ratio = Fraction((2 * N + 1) ** 2, 4 * N * (N + 1))
    out = []
    for m in range(3):
        binom = math.comb(m, 2) if literal else math.comb(2, m)
        pre = (-1) ** (m + 1) * Fraction(N, 2) * binom * ratio ** m
        out.append([Fraction(0)] * m + [pre * v for v in _c2_inner(m, N, literal)])
    return out


def _compare_explicit(res: FactorizationResult):
    report = {}
    for name, literal in (("corrected", False), ("literal", True)):
        polys = explicit_c2(res.N, literal)
        report[name] = all(_poly_trim(p) == _poly_trim(q) for p, q in zip(polys, res.C))
    report["K0_is_N/2"] = res.K[0] == Fraction(res.N, 2)
    return report
