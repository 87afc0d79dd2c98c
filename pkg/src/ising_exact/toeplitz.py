"""Toeplitz determinants for the diagonal and row correlations.

The symbol is

    phi(z) = [(1 - a1 z)(1 - a2/z) / ((1 - a1/z)(1 - a2 z))]^(1/2),   z = e^{i theta},

with square roots positive at z = -1.  Its Laurent coefficients are built from
the binomial series of the four factors; a periodic trapezoid rule (which is
spectrally accurate for this analytic periodic integrand) provides the second,
independent path.
"""
from __future__ import annotations

import math
from fractions import Fraction
import warnings
from dataclasses import dataclass
from functools import lru_cache

from .errors import BranchError, CapExceededError, DomainError, InsufficientDataError
from .numerics import DEFAULT_PREC, ctx, to_mpf, zeta_prime_neg1
from .params import CouplingPoint, Side, derive_variables
from .series import RationalSeries

__all__ = ["ToeplitzSymbol", "diagonal_symbol", "row_symbol", "fourier_coeff",
           "fourier_coeffs", "correlation_det", "spontaneous_magnetization",
           "critical_amplitude_fit", "critical_amplitude_exact", "row_amplitude_ratio",
           "DEFAULT_N_CAP", "CriticalFit", "diagonal_det_series"]

DEFAULT_N_CAP = 64


class CriticalAccuracyWarning(UserWarning):
    """Issued when the symbol sits exactly at criticality (alpha2 = 1)."""


@dataclass(frozen=True)
class ToeplitzSymbol:
    alpha1: object
    alpha2: object
    precision_bits: int = DEFAULT_PREC

    def __post_init__(self):
        c = ctx(self.precision_bits)
        a1, a2 = to_mpf(self.alpha1, c), to_mpf(self.alpha2, c)
        if a1 < 0 or a2 < 0:
            raise BranchError("symbol parameters must be non-negative")
        if a1 >= 1:
            raise BranchError("alpha1 >= 1 makes the symbol vanish or blow up on the unit circle")
        if abs(a2 - 1) < c.ldexp(1, 16 - c.prec) and a2 != 1:
            raise BranchError("alpha2 within rounding of 1; pass exactly 1 for the critical symbol")
        object.__setattr__(self, "alpha1", a1)
        object.__setattr__(self, "alpha2", a2)

    @property
    def critical(self) -> bool:
        return self.alpha2 == 1

    def __call__(self, theta):
        """phi(theta) by direct evaluation with the stated branch."""
        c = ctx(self.precision_bits)
        z = c.expj(theta)
        a1, a2 = self.alpha1, self.alpha2
        # each factor (1 - a e^{+-i theta}) has positive real part when a < 1;
        # for a2 > 1 pair the two a2 factors before taking the root
        val = c.sqrt(1 - a1 * z) / c.sqrt(1 - a1 / z)
        if a2 < 1:
            val *= c.sqrt(1 - a2 / z) / c.sqrt(1 - a2 * z)
        else:
            val *= -(1 / z) * c.sqrt(1 - z / a2) / c.sqrt(1 - 1 / (a2 * z))
        return val

    def key(self):
        return (self.precision_bits, str(self.alpha1), str(self.alpha2))


def diagonal_symbol(t, side, prec=DEFAULT_PREC) -> ToeplitzSymbol:
    """Diagonal symbol in terms of the side-appropriate t (alpha1 = 0)."""
    c = ctx(prec)
    side = Side.parse(side)
    t = to_mpf(t, c)
    if side is Side.AT:
        return ToeplitzSymbol(0, 1, prec)
    if not 0 <= t < 1:
        raise DomainError("t must lie in [0,1)")
    if side is Side.BELOW:
        return ToeplitzSymbol(0, c.sqrt(t), prec)
    if t == 0:
        raise DomainError("t = 0 above Tc is infinite temperature; alpha2 diverges")
    return ToeplitzSymbol(0, 1 / c.sqrt(t), prec)


def row_symbol(cp: CouplingPoint) -> ToeplitzSymbol:
    v = derive_variables(cp)
    a2 = v.row_alpha2
    if cp.side is Side.AT:
        a2 = 1
    return ToeplitzSymbol(v.row_alpha1, a2, cp.precision_bits)


def _binom_series(a, alpha, K, c):
    """Coefficients of (1 - alpha w)^a, w^0..w^(K-1)."""
    out = [c.mpf(1)]
    for k in range(1, K):
        out.append(out[-1] * (k - 1 - a) / k * alpha)
    return out


def _mul(a, b, K):
    out = [0] * K
    for i, x in enumerate(a[:K]):
        if x:
            for j, y in enumerate(b[:K - i]):
                out[i + j] += x * y
    return out


def _terms_for(alpha, c):
    """Number of binomial terms needed for |alpha|^K below the working epsilon."""
    if alpha == 0:
        return 2
    bits = c.prec + 16
    return int(bits * math.log(2) / -math.log(float(alpha))) + 8


@lru_cache(maxsize=64)
def _series_table(key, nmax):
    prec, a1s, a2s = key
    c = ctx(prec)
    a1, a2 = c.mpf(a1s), c.mpf(a2s)
    half = c.mpf(1) / 2
    if a2 == 1:
        # exact coefficients 1/(pi(n + 1/2)) of the critical factor, convolved
        # with the two-sided alpha1 factor
        K1 = _terms_for(a1, c)
        P = _binom_series(half, a1, K1, c)
        Q = _binom_series(-half, a1, K1, c)
        b = {}
        for n in range(-(K1 - 1), K1):
            lo = max(0, -n)
            b[n] = c.fsum(P[n + k] * Q[k] for k in range(lo, K1 - max(n, 0)))
        out = {}
        for n in range(-nmax, nmax + 1):
            out[n] = c.fsum(v / (c.pi * (n - m + half)) for m, v in b.items())
        return out
    if a2 < 1:
        K = max(_terms_for(a1, c), _terms_for(a2, c)) + nmax
        P = _mul(_binom_series(half, a1, K, c), _binom_series(-half, a2, K, c), K)
        Q = _mul(_binom_series(-half, a1, K, c), _binom_series(half, a2, K, c), K)
        shift = 0
        sign = 1
    else:
        K = max(_terms_for(a1, c), _terms_for(1 / a2, c)) + nmax + 1
        P = _mul(_binom_series(half, a1, K, c), _binom_series(half, 1 / a2, K, c), K)
        Q = _mul(_binom_series(-half, a1, K, c), _binom_series(-half, 1 / a2, K, c), K)
        shift = 1
        sign = -1
    out = {}
    for n in range(-nmax, nmax + 1):
        m = n + shift  # coefficient of z^m in P(z) Q(1/z)
        if m >= 0:
            out[n] = sign * c.fsum(P[m + k] * Q[k] for k in range(K - m))
        else:
            out[n] = sign * c.fsum(P[k] * Q[k - m] for k in range(K + m))
    return out


@lru_cache(maxsize=64)
def _quad_table(key, nmax):
    """Trapezoid-rule coefficients, doubling the node count until stable."""
    prec, a1s, a2s = key
    sym = ToeplitzSymbol(a1s, a2s, prec)
    c = ctx(prec)
    tol = c.ldexp(1, 24 - prec)
    M = 64
    prev = None
    while True:
        # midpoint-shifted nodes avoid theta = 0, where the critical symbol jumps
        thetas = [2 * c.pi * (j + c.mpf(1) / 2) / M for j in range(M)]
        vals = [sym(th) for th in thetas]
        cur = {}
        for n in range(-nmax, nmax + 1):
            cur[n] = c.re(c.fsum(v * c.expj(-n * th) for v, th in zip(vals, thetas))) / M
        if prev is not None and max(abs(cur[n] - prev[n]) for n in cur) < tol:
            return cur
        prev = cur
        M *= 2
        if M > 2 ** 16:
            return cur


def fourier_coeffs(sym: ToeplitzSymbol, nmax: int, verify: bool = True):
    """Dict n -> a_n for |n| <= nmax (series path, optionally checked by quadrature)."""
    table = _series_table(sym.key(), nmax)
    if verify:
        c = ctx(sym.precision_bits)
        if sym.critical:
            warnings.warn("critical symbol: quadrature cross-check skipped (jump at theta=0)",
                          CriticalAccuracyWarning, stacklevel=2)
        else:
            quad = _quad_table(sym.key(), nmax)
            tol = c.ldexp(1, 24 - sym.precision_bits)
            bad = [n for n in table if abs(table[n] - quad[n]) > tol * max(1, abs(table[n]))]
            if bad:
                raise BranchError(f"series and quadrature coefficients disagree at n={bad[:5]}")
    return table


def fourier_coeff(sym: ToeplitzSymbol, n: int, verify: bool = True):
    return fourier_coeffs(sym, abs(n), verify)[n]


def correlation_det(sym: ToeplitzSymbol, N: int, cap: int = DEFAULT_N_CAP, verify: bool = True):
    """D_N = det[a_{i-j}], i,j = 0..N-1, by pivoted LU at working precision."""
    if N < 0:
        raise DomainError("N must be non-negative")
    if N > cap:
        raise CapExceededError(f"N={N} exceeds the determinant cap {cap}")
    c = ctx(sym.precision_bits)
    if N == 0:
        return c.mpf(1)
    a = fourier_coeffs(sym, N - 1, verify)
    M = c.matrix(N, N)
    for i in range(N):
        for j in range(N):
            M[i, j] = a[i - j]
    return c.det(M)


def spontaneous_magnetization(t, prec=DEFAULT_PREC):
    """(1 - t)^(1/4) for 0 <= t < 1."""
    c = ctx(prec)
    t = to_mpf(t, c)
    if not 0 <= t < 1:
        raise DomainError("spontaneous magnetization needs 0 <= t < 1")
    return (1 - t) ** (c.mpf(1) / 4)


def critical_amplitude_exact(prec=DEFAULT_PREC):
    """2^(1/12) exp(3 zeta'(-1))."""
    c = ctx(prec)
    return c.mpf(2) ** (c.mpf(1) / 12) * c.exp(3 * zeta_prime_neg1(prec))


@dataclass(frozen=True)
class CriticalFit:
    amplitude: object
    correction: object
    slope: object
    values: tuple


def _critical_sequence(sym, N_max):
    c = ctx(sym.precision_bits)
    a = fourier_coeffs(sym, N_max - 1, verify=False)
    out = []
    for N in range(1, N_max + 1):
        M = c.matrix(N, N)
        for i in range(N):
            for j in range(N):
                M[i, j] = a[i - j]
        out.append(c.det(M))
    return out


def critical_amplitude_fit(N_max: int = 32, sym: ToeplitzSymbol = None, prec=DEFAULT_PREC,
                           full: bool = False):
    """Extrapolated amplitude A of D_N ~ A N^(-1/4) at criticality.

    Uses the ansatz D_N N^(1/4) = A (1 + c/N) on the last two determinants
    (a first-order Richardson step).  With ``full=True`` a :class:`CriticalFit`
    also carrying the log-log slope is returned.
    """
    if N_max < 8:
        raise InsufficientDataError("critical fit needs N_max >= 8")
    if N_max > DEFAULT_N_CAP:
        raise CapExceededError(f"N_max={N_max} exceeds the determinant cap")
    sym = sym or ToeplitzSymbol(0, 1, prec)
    c = ctx(sym.precision_bits)
    D = _critical_sequence(sym, N_max)
    n1, n0 = N_max, N_max - 1
    g1 = D[n1 - 1] * c.mpf(n1) ** (c.mpf(1) / 4)
    g0 = D[n0 - 1] * c.mpf(n0) ** (c.mpf(1) / 4)
    A = (n1 * g1 - n0 * g0) / (n1 - n0)
    corr = (g1 / A - 1) * n1
    slope = (c.log(D[n1 - 1]) - c.log(D[n0 - 1])) / (c.log(n1) - c.log(n0))
    if full:
        return CriticalFit(A, corr, slope, tuple(D))
    return A


def row_amplitude_ratio(Kh=None, N_max: int = 32, prec=DEFAULT_PREC):
    """Fitted A_row / A_Tc at criticality and the predicted (cosh 2Kh)^(1/4).

    ``Kh`` defaults to the isotropic critical coupling; Kv is fixed by
    sinh 2Kv sinh 2Kh = 1.
    """
    c = ctx(prec)
    if Kh is None:
        Kh = c.asinh(1) / 2
    Kh = to_mpf(Kh, c)
    a1 = c.tanh(Kh) ** 2
    row = critical_amplitude_fit(N_max, ToeplitzSymbol(a1, 1, prec))
    diag = critical_amplitude_fit(N_max, ToeplitzSymbol(0, 1, prec))
    return row / diag, c.cosh(2 * Kh) ** (c.mpf(1) / 4)


def diagonal_det_series(N: int, order: int) -> RationalSeries:
    """Exact t-series of the below-Tc diagonal determinant D_N through t^order.

    With s = t^(1/2) the symbol is (1 - s/z)^(1/2) (1 - s z)^(-1/2), so every
    Laurent coefficient is an exact series in s.  Elimination without pivoting
    is safe because each leading minor is 1 + O(s).
    """
    if N < 0:
        raise DomainError("N must be non-negative")
    if N > DEFAULT_N_CAP:
        raise CapExceededError(f"N={N} exceeds the determinant cap")
    order = int(order)
    L = 2 * order
    P = RationalSeries.binomial(Fraction(1, 2), L, scale=-1).coeffs
    Q = RationalSeries.binomial(Fraction(-1, 2), L, scale=-1).coeffs

    def coeff(n):
        # a_n = sum over j - i = n of P_i Q_j s^(i+j)
        c = [Fraction(0)] * L
        for i in range(L):
            j = i + n
            if j < 0:
                continue
            if i + j >= L:
                break
            c[i + j] += P[i] * Q[j]
        return RationalSeries(c, L, 0, "x")

    M = [[coeff(i - j) for j in range(N)] for i in range(N)]
    det = RationalSeries.one(L, "x")
    for k in range(N):
        piv = M[k][k]
        det = det * piv
        inv = piv.inverse()
        for i in range(k + 1, N):
            f = M[i][k] * inv
            for j in range(k + 1, N):
                M[i][j] = M[i][j] - f * M[k][j]
    odd = [det.coefficient(k) for k in range(1, L, 2)]
    if any(odd):
        raise BranchError("odd powers of t^(1/2) survived in the determinant")
    return RationalSeries([det.coefficient(k) for k in range(0, L, 2)], order)
