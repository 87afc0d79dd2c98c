"""Pure-Python versions of the modular hot loops (reference and fallback)."""


def nullspace_mod(rows, ncols, p):
    """Basis of the right nullspace of an integer matrix over GF(p).

    ``rows`` is a list of lists of ints (not modified).  Each basis vector
    has a 1 in its own free column and 0 in the other free columns.
    """
    m = [[v % p for v in r] for r in rows]
    nrows = len(m)
    pivots = []
    r = 0
    for col in range(ncols):
        if r == nrows:
            break
        piv = -1
        for i in range(r, nrows):
            if m[i][col]:
                piv = i
                break
        if piv < 0:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][col], p - 2, p)
        pr = [(v * inv) % p for v in m[r]]
        m[r] = pr
        for i in range(nrows):
            if i != r:
                f = m[i][col]
                if f:
                    ri = m[i]
                    m[i] = [(a - f * b) % p for a, b in zip(ri, pr)]
        pivots.append(col)
        r += 1
    pivset = set(pivots)
    basis = []
    for free in range(ncols):
        if free in pivset:
            continue
        v = [0] * ncols
        v[free] = 1
        for i, pc in enumerate(pivots):
            v[pc] = (-m[i][free]) % p
        basis.append(v)
    return basis


def series_mul_mod(a, b, n, p):
    """First n coefficients of the product of two coefficient lists mod p."""
    out = [0] * n
    la, lb = min(len(a), n), min(len(b), n)
    for i in range(la):
        x = a[i]
        if x:
            for j in range(min(lb, n - i)):
                out[i + j] += x * b[j]
    return [v % p for v in out]
