"""Exact linear algebra over the rationals and the integer lattice.

Everything here works with ``fractions.Fraction`` / ``int`` and is used by the
polytope layer, where determinant and feasibility questions must be decided
exactly.  Floats never enter.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd


def vec_gcd(v):
    g = 0
    for x in v:
        g = gcd(g, abs(int(x)))
    return g


def primitivize(v):
    """Divide an integer vector by the gcd of its entries.

    Returns ``(primitive_vector, factor)`` with ``factor > 0``; raises on the
    zero vector.
    """
    g = vec_gcd(v)
    if g == 0:
        raise ValueError("zero vector has no primitive representative")
    return tuple(int(x) // g for x in v), g


def dot(a, b):
    return sum(x * y for x, y in zip(a, b))


def mat_vec(m, v):
    return tuple(dot(row, v) for row in m)


def det(m):
    """Exact determinant by fraction-free Gaussian elimination."""
    n = len(m)
    a = [[Fraction(x) for x in row] for row in m]
    sign = 1
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
            sign = -sign
        for r in range(col + 1, n):
            f = a[r][col] / a[col][col]
            if f:
                for c in range(col, n):
                    a[r][c] -= f * a[col][c]
    result = Fraction(sign)
    for i in range(n):
        result *= a[i][i]
    return result


def solve(m, rhs):
    """Solve the square system ``m x = rhs`` exactly.

    Returns a tuple of Fractions, or None if the matrix is singular.
    """
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(rhs[i])] for i, row in enumerate(m)]
    for col in range(n):
        piv = next((r for r in range(col, n) if a[r][col] != 0), None)
        if piv is None:
            return None
        if piv != col:
            a[col], a[piv] = a[piv], a[col]
        inv = 1 / a[col][col]
        a[col] = [x * inv for x in a[col]]
        for r in range(n):
            if r != col and a[r][col]:
                f = a[r][col]
                a[r] = [x - f * y for x, y in zip(a[r], a[col])]
    return tuple(a[i][n] for i in range(n))


def invert_integer_matrix(m):
    """Inverse of an integer matrix with determinant +-1, as integer rows."""
    n = len(m)
    d = det(m)
    if abs(d) != 1:
        raise ValueError(f"matrix is not unimodular (det={d})")
    cols = []
    for j in range(n):
        rhs = [1 if i == j else 0 for i in range(n)]
        cols.append(solve(m, rhs))
    return tuple(tuple(int(cols[j][i]) for j in range(n)) for i in range(n))


def unimodular_complement(v):
    """Rows 2..n of a unimodular matrix U with ``U v = e1``.

    For a primitive integer vector ``v`` this produces a basis of the rank
    ``n-1`` sublattice ``{u in Z^n : <v, u> = 0}``, plus the first row ``z``
    of U which satisfies ``<v, z> = 1``.  Returns ``(z, kernel_basis)``.
    """
    v = [int(x) for x in v]
    n = len(v)
    u = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    w = list(v)
    # Integer row reduction of w to (g, 0, ..., 0), tracking the row ops in u.
    for i in range(1, n):
        while w[i]:
            if w[0] == 0 or (w[i] != 0 and abs(w[i]) < abs(w[0])):
                w[0], w[i] = w[i], w[0]
                u[0], u[i] = u[i], u[0]
            q = w[i] // w[0]
            w[i] -= q * w[0]
            u[i] = [a - q * b for a, b in zip(u[i], u[0])]
    if w[0] == -1:
        w[0] = 1
        u[0] = [-a for a in u[0]]
    if w[0] != 1:
        raise ValueError(f"vector {tuple(v)} is not primitive (content {abs(w[0])})")
    # Now sum_j u[i][j] v[j] = delta_{i0}.
    kernel = tuple(tuple(row) for row in u[1:])
    z = tuple(u[0])
    return z, kernel


def affine_rank(points):
    """Dimension of the affine span of a list of rational points."""
    if len(points) <= 1:
        return 0
    base = points[0]
    rows = [[Fraction(p[k]) - Fraction(base[k]) for k in range(len(base))]
            for p in points[1:]]
    # Row-reduce, counting pivots.
    rank = 0
    ncols = len(base)
    r = 0
    for col in range(ncols):
        piv = next((i for i in range(r, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            continue
        rows[r], rows[piv] = rows[piv], rows[r]
        for i in range(len(rows)):
            if i != r and rows[i][col]:
                f = rows[i][col] / rows[r][col]
                rows[i] = [x - f * y for x, y in zip(rows[i], rows[r])]
        rank += 1
        r += 1
        if r == len(rows):
            break
    return rank
