# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled modular kernels: 128-bit intermediate products, p < 2^63."""

from libc.stdlib cimport malloc, free

cdef extern from *:
    """
    static inline unsigned long long ie_mulmod(unsigned long long a, unsigned long long b,
                                               unsigned long long p) {
        return (unsigned long long)(((unsigned __int128)a * b) % p);
    }
    """
    unsigned long long ie_mulmod(unsigned long long a, unsigned long long b,
                                 unsigned long long p) nogil

ctypedef unsigned long long u64


cdef u64 powmod(u64 a, u64 e, u64 p) nogil:
    cdef u64 r = 1
    while e:
        if e & 1:
            r = ie_mulmod(r, a, p)
        a = ie_mulmod(a, a, p)
        e >>= 1
    return r


def nullspace_mod(rows, Py_ssize_t ncols, p):
    """Basis of the right nullspace over GF(p); same contract as the Python version."""
    cdef u64 P = p
    cdef Py_ssize_t nrows = len(rows)
    cdef Py_ssize_t i, j, col, r = 0, piv
    cdef u64 f, inv, v
    cdef u64 *m = <u64 *> malloc(max(nrows * ncols, 1) * sizeof(u64))
    cdef Py_ssize_t *pivots = <Py_ssize_t *> malloc(max(ncols, 1) * sizeof(Py_ssize_t))
    cdef Py_ssize_t npiv = 0
    cdef u64 *ri
    cdef u64 *pr
    if m == NULL or pivots == NULL:
        free(m)
        free(pivots)
        raise MemoryError()
    try:
        for i in range(nrows):
            row = rows[i]
            for j in range(ncols):
                m[i * ncols + j] = row[j] % p
        with nogil:
            for col in range(ncols):
                if r == nrows:
                    break
                piv = -1
                for i in range(r, nrows):
                    if m[i * ncols + col]:
                        piv = i
                        break
                if piv < 0:
                    continue
                if piv != r:
                    for j in range(ncols):
                        v = m[r * ncols + j]
                        m[r * ncols + j] = m[piv * ncols + j]
                        m[piv * ncols + j] = v
                pr = m + r * ncols
                inv = powmod(pr[col], P - 2, P)
                for j in range(col, ncols):
                    pr[j] = ie_mulmod(pr[j], inv, P)
                for i in range(nrows):
                    if i == r:
                        continue
                    ri = m + i * ncols
                    f = ri[col]
                    if f:
                        f = P - f
                        for j in range(col, ncols):
                            if pr[j]:
                                ri[j] = (ri[j] + ie_mulmod(f, pr[j], P)) % P
                pivots[npiv] = col
                npiv += 1
                r += 1
        pivset = set(pivots[k] for k in range(npiv))
        basis = []
        for fr in range(ncols):
            if fr in pivset:
                continue
            vec = [0] * ncols
            vec[fr] = 1
            for k in range(npiv):
                vec[pivots[k]] = int((P - m[k * ncols + fr]) % P)
            basis.append(vec)
        return basis
    finally:
        free(m)
        free(pivots)


def series_mul_mod(a, b, Py_ssize_t n, p):
    """First n coefficients of a*b mod p."""
    cdef u64 P = p
    cdef Py_ssize_t la = min(len(a), n), lb = min(len(b), n), i, j
    cdef u64 *A = <u64 *> malloc(max(la, 1) * sizeof(u64))
    cdef u64 *B = <u64 *> malloc(max(lb, 1) * sizeof(u64))
    cdef u64 *C = <u64 *> malloc(max(n, 1) * sizeof(u64))
    cdef u64 x
    if A == NULL or B == NULL or C == NULL:
        free(A)
        free(B)
        free(C)
        raise MemoryError()
    try:
        for i in range(la):
            A[i] = a[i] % p
        for i in range(lb):
            B[i] = b[i] % p
        with nogil:
            for i in range(n):
                C[i] = 0
            for i in range(la):
                x = A[i]
                if x:
                    for j in range(min(lb, n - i)):
                        C[i + j] = (C[i + j] + ie_mulmod(x, B[j], P)) % P
        return [int(C[i]) for i in range(n)]
    finally:
        free(A)
        free(B)
        free(C)
