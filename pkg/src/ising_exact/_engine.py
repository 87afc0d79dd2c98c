"""Exact expansion engine for the diagonal form-factor integrals.

The n-fold integrals over [0,1] factor, after the Cauchy determinant
identity and two applications of the Andreief identity, into

    sum_{S,S'} det[mu_y(s_i + s'_j)] det[mu_z(s_i + s'_j)] t^{|S|+|S'|}
        = e_n(A B),   A[s,s'] = t^{s+s'} mu_y(s+s'),  B[s,s'] = mu_z(s+s'),

where mu_y, mu_z are single-variable moments of the endpoint weights and
e_n is the n-th elementary symmetric function of the eigenvalues.  Every
moment is a dyadic rational, so working in ``u = t/16`` keeps all series
integer valued.  Series here are plain lists of Python ints truncated to a
fixed length.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from math import comb

__all__ = ["imul", "iadd", "elementary_symmetric", "even_kernel", "odd_kernel",
           "y_moment", "z_moment"]


def imul(a, b, n):
    """Product of two integer series truncated to ``n`` terms."""
    out = [0] * n
    la = min(len(a), n)
    lb = len(b)
    for i in range(la):
        x = a[i]
        if not x:
            continue
        m = min(lb, n - i)
        for j in range(m):
            y = b[j]
            if y:
                out[i + j] += x * y
    return out


def iadd(a, b, n):
    out = [0] * n
    for i in range(min(len(a), n)):
        out[i] = a[i]
    for i in range(min(len(b), n)):
        out[i] += b[i]
    return out


@lru_cache(maxsize=None)
def _catalan(n):
    return comb(2 * n, n) // (n + 1)


@lru_cache(maxsize=None)
def _cb(n):
    return comb(2 * n, n)


def y_moment(a, c, n):
    """Integer series of sum_k C(2k,k) C(2j,j) u^k, j = a + k + c."""
    return [_cb(k) * _cb(a + k + c) for k in range(n)]


def _sqrt_coeff(k):
    return 1 if k == 0 else -2 * _catalan(k - 1)


def z_moment(b, d, n):
    """Integer series of sum_k s_k Cat(b + k + d) u^k with (1-4u)^(1/2) = sum s_k u^k."""
    return [_sqrt_coeff(k) * _catalan(b + k + d) for k in range(n)]


def _emul(a, b, limit):
    """Product of offset series ``(off, coeffs)`` truncated at absolute exponent ``limit``."""
    off = a[0] + b[0]
    n = limit - off
    if n <= 0:
        return None
    return off, imul(a[1], b[1], n)


def _eacc(acc, base, term):
    """Add offset series ``term`` into the absolute-indexed list ``acc`` starting at ``base``."""
    if term is None:
        return
    off, c = term
    j = off - base
    for i, v in enumerate(c):
        if v:
            acc[j + i] += v


def _power_sums(X, L, n):
    """p_l = tr(X^l), l = 1..n, for entries X[m][m'] = (off >= m, coeffs) known to L - m'.

    Diagonal entries are only needed to exponent L - m' except in p_1, which
    is passed separately by the caller through ``X`` itself (see _x_matrix).
    """
    size = len(X)
    p1 = [0] * L
    for m in range(size):
        _eacc(p1, 0, X[m][m])
    p = [p1]
    P = X
    for ell in range(2, n + 1):
        tr = [0] * L
        for i in range(size):
            for k in range(size - i):
                if P[i][k] is None or X[k][i] is None:
                    continue
                _eacc(tr, 0, _emul(P[i][k], X[k][i], L))
        p.append(tr)
        if ell == n:
            break
        Q = [[None] * size for _ in range(size)]
        for i in range(size):
            for j in range(size - i):
                limit = L - j
                acc = [0] * max(limit - i, 0)
                hit = False
                for k in range(size):
                    if i + k >= limit:
                        break
                    if P[i][k] is None or X[k][j] is None:
                        continue
                    _eacc(acc, i, _emul(P[i][k], X[k][j], limit))
                    hit = True
                Q[i][j] = (i, acc) if hit else None
        P = Q
    return p


def elementary_symmetric(p, n, L):
    """e_n from power sums via Newton's identities (exact integer division)."""
    e = [[1] + [0] * (L - 1)]
    for k in range(1, n + 1):
        acc = [0] * L
        for i in range(1, k + 1):
            term = imul(e[k - i], p[i - 1], L)
            if i % 2 == 0:
                term = [-v for v in term]
            acc = iadd(acc, term, L)
        q = []
        for v in acc:
            if v % k:
                raise ArithmeticError("Newton identity produced a non-integral coefficient")
            q.append(v // k)
        e.append(q)
    return e[n]


def _x_matrix(A, zfun, L, diagonal_only=False):
    """X = A B with B[k, m'] = Z_{k+m'}; A(m, k) = (off >= m + k, coeffs).

    Off-diagonal entries are truncated at exponent L - m' (the next factor in
    any trace cycle has valuation >= m'); diagonal entries are kept to L so
    that tr X is exact.
    """
    size = L
    X = [[None] * size for _ in range(size)]
    for m in range(size):
        for mp in range(size):
            if mp != m and (diagonal_only or m + mp >= L):
                continue
            limit = L if mp == m else L - mp
            acc = [0] * (limit - m)
            for k in range(size):
                if m + k >= limit:
                    break
                a = A(m, k)
                _eacc(acc, m, _emul(a, (0, zfun(k + mp)), limit))
            X[m][mp] = (m, acc)
    return X


def even_kernel(n, N, M):
    """Integer series E~(u) with f^(2n)_{N,N} = t^{n(N+n)} scale E~(t/16) + O(t^{n(N+n)+M}).

    Returns ``(coeffs, scale)``.
    """
    if n == 0:
        return [1] + [0] * (M - 1), Fraction(1)
    shift = n * (n - 1)
    L = M + shift
    c, d = N + 1, N
    ys = {}
    zs = {}

    def Y(a):
        if a not in ys:
            ys[a] = y_moment(a, c, max(L - a, 0))
        return ys[a]

    def Z(b):
        if b not in zs:
            zs[b] = z_moment(b, d, L)
        return zs[b]

    X = _x_matrix(lambda m, k: (m + k, Y(m + k)), Z, L, diagonal_only=(n == 1))
    p = _power_sums(X, L, n)
    E = elementary_symmetric(p, n, L)
    if any(E[:shift]):
        raise ArithmeticError("even kernel valuation below n(n-1)")
    scale = Fraction(1, 4 ** (n * (2 * N + 1)) * 2 ** n * 16 ** shift)
    return E[shift:], scale


def odd_kernel(n, N, M):
    """Integer series for f^(2n+1)_{N,N} = t^{(n+1/2)N + n(n+1)} scale Y0^{1-n} E~(t/16).

    Returns ``(coeffs, scale, y0)`` where ``y0`` is the integer series Y_0(u)
    that still has to be raised to the power ``1 - n``.
    """
    shift = n * (n - 1)
    L = M + shift
    c, d = N, N + 1
    ys = {}
    zs = {}

    def Y(a):
        if a not in ys:
            ys[a] = y_moment(a, c, L)
        return ys[a]

    def Z(b):
        if b not in zs:
            zs[b] = z_moment(b, d, L)
        return zs[b]

    y0 = Y(0)
    if n == 0:
        return [1] + [0] * (M - 1), Fraction(1, 4 ** N), y0[:M]
    cache = {}

    def A(r, rp):
        if (r, rp) not in cache:
            n_ = L - r - rp
            body = iadd(imul(y0, Y(r + rp + 2), n_),
                        [-v for v in imul(Y(r + 1), Y(rp + 1), n_)], n_)
            cache[r, rp] = (r + rp, body)
        return cache[r, rp]

    X = _x_matrix(A, Z, L, diagonal_only=(n == 1))
    p = _power_sums(X, L, n)
    E = elementary_symmetric(p, n, L)
    if any(E[:shift]):
        raise ArithmeticError("odd kernel valuation below n(n-1)")
    scale = Fraction(1, 4 ** (3 * n + (2 * n + 1) * N) * 2 ** n * 16 ** shift)
    return E[shift:], scale, y0[:M]
