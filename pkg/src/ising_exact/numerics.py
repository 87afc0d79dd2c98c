"""Configurable-precision scalars and the special functions used elsewhere.

Every function takes ``prec`` (mantissa bits, default 256) and returns an
``mpf`` belonging to a private :class:`mpmath.MPContext` of that precision,
so no global mpmath state is touched.
"""
from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath

from .errors import DivergenceError, DomainError, ParameterError, PrecisionLossError

DEFAULT_PREC = 256
MIN_PREC = 64

__all__ = [
    "DEFAULT_PREC", "PrecReal", "Nome", "ctx", "to_mpf", "elliptic_K", "elliptic_E",
    "hyp_pFq", "theta_funcs", "theta_prime_over_sin", "nome", "bessel_K0",
    "bessel_K1", "clausen_Cl2", "zeta_prime_neg1", "glaisher_log",
]

_lock = threading.Lock()
_contexts = {}


def ctx(prec=DEFAULT_PREC):
    """Cached private mpmath context working at ``prec`` bits."""
    prec = int(prec)
    if prec < MIN_PREC:
        raise ParameterError(f"precision must be at least {MIN_PREC} bits, got {prec}")
    c = _contexts.get(prec)
    if c is None:
        with _lock:
            c = _contexts.get(prec)
            if c is None:
                c = mpmath.MPContext()
                c.prec = prec
                _contexts[prec] = c
    return c


def to_mpf(x, c):
    """Convert ints, Fractions, floats, strings and foreign mpf values into context ``c``."""
    if isinstance(x, Fraction):
        return c.mpf(x.numerator) / x.denominator
    if isinstance(x, PrecReal):
        x = x.value
    if isinstance(x, str) and "/" in x:
        return to_mpf(Fraction(x), c)
    return c.mpf(x)


@dataclass(frozen=True)
class PrecReal:
    """A real number tagged with the precision it was computed at."""

    value: object
    precision_bits: int = DEFAULT_PREC

    def __post_init__(self):
        if self.precision_bits < MIN_PREC:
            raise ParameterError("precision_bits must be >= 64")

    def __float__(self):
        return float(self.value)

    def digits(self):
        """Decimal digits carried by the precision."""
        return int(self.precision_bits * 0.30103)

    def to_json(self):
        c = ctx(self.precision_bits)
        return {"value": c.nstr(self.value, self.digits()), "precision_bits": self.precision_bits}


def _guard(prec, extra=32):
    return ctx(prec + extra)


def _agm_parts(m, c):
    a, b = c.mpf(1), c.sqrt(1 - m)
    csum = m / 2  # 2^(n-1) c_n^2 with c_0^2 = m
    power = c.mpf(1) / 2
    eps = c.ldexp(1, 8 - c.prec)
    for _ in range(200):
        if abs(a - b) <= eps * a:
            break
        cn = (a - b) / 2
        a, b = (a + b) / 2, c.sqrt(a * b)
        power *= 2
        csum += power * cn * cn
    return a, csum


def _check_m(m, c, prec, upper_closed):
    if m < 0 or m > 1 or (m == 1 and not upper_closed):
        raise DomainError(f"parameter m={c.nstr(m, 10)} outside the allowed range")
    if not upper_closed and 1 - m < c.ldexp(1, -(prec // 2)):
        raise PrecisionLossError("m lies within 2^(-prec/2) of 1")


def elliptic_K(m, prec=DEFAULT_PREC):
    """K(m) = (pi/2) 2F1(1/2,1/2;1;m) by the arithmetic-geometric mean; m is the parameter k^2."""
    g = _guard(prec)
    m = to_mpf(m, g)
    _check_m(m, g, prec, upper_closed=False)
    a, _ = _agm_parts(m, g)
    return ctx(prec).mpf(g.pi / (2 * a))


def elliptic_E(m, prec=DEFAULT_PREC):
    """E(m) = (pi/2) 2F1(-1/2,1/2;1;m) via the AGM sum of c_n^2."""
    g = _guard(prec)
    m = to_mpf(m, g)
    _check_m(m, g, prec, upper_closed=True)
    if m == 1:
        return ctx(prec).mpf(1)
    a, csum = _agm_parts(m, g)
    return ctx(prec).mpf(g.pi / (2 * a) * (1 - csum))


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, int):
        return Fraction(x)
    return None


def _nonpositive_int(x):
    f = _as_fraction(x)
    return f is not None and f.denominator == 1 and f <= 0


def hyp_pFq(upper, lower, z, prec=DEFAULT_PREC):
    """Generalized hypergeometric series pFq(upper; lower; z) by direct summation.

    Summation stops when two consecutive terms fall below 2^-(prec+8)
    relative to the running sum.
    """
    for b in lower:
        if _nonpositive_int(b):
            raise ParameterError(f"lower parameter {b} is a nonpositive integer")
    g = _guard(prec)
    z = to_mpf(z, g)
    ups = [to_mpf(a, g) for a in upper]
    los = [to_mpf(b, g) for b in lower]
    terminating = any(_nonpositive_int(a) for a in upper)
    p, q = len(upper), len(lower)
    if not terminating and z != 0:
        if p > q + 1:
            raise DivergenceError(f"{p}F{q} series diverges for z != 0")
        if p == q + 1 and abs(z) >= 1:
            raise DivergenceError(f"{p}F{q} series requires |z| < 1")
    total = g.mpf(1)
    term = g.mpf(1)
    eps = g.ldexp(1, -(prec + 8))
    small = 0
    k = 0
    limit = 10 ** 7
    while True:
        num = g.mpf(1)
        for a in ups:
            num *= a + k
        den = g.mpf(k + 1)
        for b in los:
            den *= b + k
        term = term * num / den * z
        k += 1
        if term == 0:
            break
        total += term
        if abs(term) <= eps * abs(total):
            small += 1
            if small >= 2:
                break
        else:
            small = 0
        if k > limit:
            raise DivergenceError("pFq summation did not converge")
    return ctx(prec).mpf(total)


def _theta_sums(u, q, g, eps):
    """Real series for theta_2, theta_3 and their u-derivatives at argument u."""
    q14 = g.root(q, 4)
    t2 = t3 = d2 = d3 = g.mpf(0)
    t3 = g.mpf(1)
    n = 0
    quiet = 0
    while True:
        w2 = q ** (n * (n + 1))
        a2 = (2 * n + 1) * u
        t2 += w2 * g.cos(a2)
        d2 -= (2 * n + 1) * w2 * g.sin(a2)
        if n >= 1:
            w3 = q ** (n * n)
            t3 += 2 * w3 * g.cos(2 * n * u)
            d3 -= 4 * n * w3 * g.sin(2 * n * u)
        else:
            w3 = g.mpf(1)
        n += 1
        if (2 * n + 1) * max(w2, w3) < eps:
            quiet += 1
            if quiet >= 2:
                break
    return 2 * q14 * t2, t3, 2 * q14 * d2, d3


def _check_q(q, g):
    if not 0 < q < 1:
        raise DomainError("nome q must lie in (0,1)")


def theta_funcs(u, q, prec=DEFAULT_PREC):
    """(theta2, theta3, theta2', theta3') at real u, derivatives taken in u."""
    g = _guard(prec)
    u = to_mpf(u, g)
    q = to_mpf(q, g)
    _check_q(q, g)
    vals = _theta_sums(u, q, g, g.ldexp(1, -(prec + 8)))
    c = ctx(prec)
    return tuple(c.mpf(v) for v in vals)


def theta_prime_over_sin(lam, q, prec=DEFAULT_PREC):
    """theta2'(u)/sin u and theta3'(u)/sin u as functions of lam = cos u.

    Uses Chebyshev U polynomials so the values stay regular at lam = +-1,
    where sin u vanishes.
    """
    g = _guard(prec)
    lam = to_mpf(lam, g)
    q = to_mpf(q, g)
    _check_q(q, g)
    eps = g.ldexp(1, -(prec + 8))
    q14 = g.root(q, 4)
    u_prev, u_cur = g.mpf(0), g.mpf(1)  # U_{-1}, U_0
    s2 = g.mpf(1)  # n = 0 term of sum (2n+1) q^{n(n+1)} U_{2n}
    s3 = g.mpf(0)
    k = 0
    quiet = 0
    while True:
        u_prev, u_cur = u_cur, 2 * lam * u_cur - u_prev
        k += 1
        if k % 2:
            n = (k + 1) // 2
            w = q ** (n * n)
            s3 += n * w * u_cur
        else:
            n = k // 2
            w = q ** (n * (n + 1))
            s2 += (2 * n + 1) * w * u_cur
        if (k + 1) ** 2 * w < eps:
            quiet += 1
            if quiet >= 2:
                break
    c = ctx(prec)
    return c.mpf(-2 * q14 * s2), c.mpf(-4 * s3)


@dataclass(frozen=True)
class Nome:
    """Nome q = exp(-pi K'/K) for the parameter t = k^2."""

    t: object
    q: object
    K: object
    Kprime: object
    precision_bits: int = DEFAULT_PREC


def nome(t, prec=DEFAULT_PREC):
    c = ctx(prec)
    t = to_mpf(t, c)
    if not 0 < t < 1:
        raise DomainError("nome requires 0 < t < 1")
    K = elliptic_K(t, prec)
    Kp = elliptic_K(1 - t, prec)
    return Nome(t=t, q=c.exp(-c.pi * Kp / K), K=K, Kprime=Kp, precision_bits=prec)


def _bessel_series(z, g):
    """Return (I0, K0, I1, K1) at z > 0 from the ascending series."""
    eps = g.ldexp(1, -g.prec)
    y = z * z / 4
    lg = g.log(z / 2) + g.euler
    i0 = g.mpf(1)
    s0 = g.mpf(0)
    term = g.mpf(1)
    harm = g.mpf(0)
    # I1 = (z/2) sum y^k/(k!(k+1)!) ; K1 = 1/z + ln(z/2) I1 - (z/4) sum (psi(k+1)+psi(k+2)) y^k/(k!(k+1)!)
    i1 = g.mpf(0)
    s1 = g.mpf(0)
    k = 0
    while True:
        t1 = term / (k + 1)
        psi_k1 = harm - g.euler
        psi_k2 = harm + g.mpf(1) / (k + 1) - g.euler
        i1 += t1
        s1 += (psi_k1 + psi_k2) * t1
        if k:
            i0 += term
            s0 += harm * term
        k += 1
        harm += g.mpf(1) / k
        term = term * y / (k * k)
        if term < eps * i0 and k > 2:
            break
    K0 = -lg * i0 + s0
    I1 = z / 2 * i1
    K1 = 1 / z + g.log(z / 2) * I1 - z / 4 * s1
    return i0, K0, I1, K1


def _bessel_prec(z, prec):
    # cancellation in the ascending series costs about 2 z log2(e) bits
    return prec + 32 + int(3 * float(z))


def bessel_K0(z, prec=DEFAULT_PREC):
    """Modified Bessel function K_0(z) for z > 0."""
    if float(z) <= 0:
        raise DomainError("K0 requires z > 0")
    g = ctx(_bessel_prec(z, prec))
    return ctx(prec).mpf(_bessel_series(to_mpf(z, g), g)[1])


def bessel_K1(z, prec=DEFAULT_PREC):
    """Modified Bessel function K_1(z) for z > 0."""
    if float(z) <= 0:
        raise DomainError("K1 requires z > 0")
    g = ctx(_bessel_prec(z, prec))
    return ctx(prec).mpf(_bessel_series(to_mpf(z, g), g)[3])


def clausen_Cl2(theta, prec=DEFAULT_PREC):
    """Clausen function sum sin(n theta)/n^2.

    Reduced to |theta| <= pi and summed from the expansion
    theta - theta ln|theta| + sum_k zeta(2k) theta (theta/2pi)^(2k) / (k(2k+1)),
    which converges geometrically there.
    """
    g = _guard(prec)
    th = to_mpf(theta, g)
    twopi = 2 * g.pi
    th = th - twopi * g.floor(th / twopi + g.mpf(1) / 2)
    if th == 0 or abs(th) == g.pi:
        return ctx(prec).mpf(0)
    x = (th / twopi) ** 2
    eps = g.ldexp(1, -(prec + 8))
    total = th - th * g.log(abs(th))
    xp = g.mpf(1)
    k = 1
    quiet = 0
    while True:
        xp *= x
        term = g.zeta(2 * k) * th * xp / (k * (2 * k + 1))
        total += term
        if abs(term) < eps * abs(total):
            quiet += 1
            if quiet >= 2:
                break
        k += 1
    return ctx(prec).mpf(total)


def glaisher_log(prec=DEFAULT_PREC):
    """ln A for Glaisher's constant from 12 ln A = gamma + ln(2 pi) - 6 zeta'(2)/pi^2."""
    g = _guard(prec)
    zp2 = g.zeta(2, 1, 1)
    return ctx(prec).mpf((g.euler + g.log(2 * g.pi) - 6 * zp2 / g.pi ** 2) / 12)


@lru_cache(maxsize=8)
def zeta_prime_neg1(prec=DEFAULT_PREC):
    """zeta'(-1) = 1/12 - ln A."""
    g = _guard(prec)
    return ctx(prec).mpf(g.mpf(1) / 12 - glaisher_log(prec + 32))
