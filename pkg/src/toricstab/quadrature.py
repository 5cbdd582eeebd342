"""Numerical and exact integration over polytopes and their boundaries.

Interior integrals run Grundmann-Moller simplex cubature (exact to a
configurable polynomial degree) over an exact triangulation, with adaptive
longest-edge bisection driven by a coarse/fine error estimate for analytic
non-polynomial integrands.  Boundary integrals recurse through the
unimodular facet charts, so the lattice boundary measure is built in and
never reconstructed from Euclidean area.

``moments`` provides an independent closed-form path (rational arithmetic
for monomials, confluent divided differences for exponentials) used as an
oracle against the cubature backend.
"""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import count

import numpy as np
from scipy.linalg import expm

from . import _linalg as la


@dataclass(frozen=True)
class QuadratureRule:
    """Cubature configuration.

    ``degree`` is the polynomial exactness target on each simplex; the
    underlying Grundmann-Moller rule has odd degree 2s+1 >= degree.
    """

    degree: int = 12
    tol_abs: float = 1e-12
    tol_rel: float = 1e-10
    max_depth: int = 12

    @property
    def gm_order(self):
        return max(0, self.degree // 2)  # smallest s with 2s+1 >= degree


DEFAULT_RULE = QuadratureRule()


@dataclass(frozen=True)
class IntegrationResult:
    value: float
    error: float
    converged: bool

    def __float__(self):
        return self.value


def _compositions(total, parts):
    if parts == 1:
        yield (total,)
        return
    for head in range(total + 1):
        for rest in _compositions(total - head, parts - 1):
            yield (head,) + rest


@lru_cache(maxsize=None)
def gm_table(dim, s):
    """Grundmann-Moller nodes (barycentric) and weights for the dim-simplex.

    Weights are normalised to sum to 1, so a simplex integral is
    ``volume * sum(w_i * f(node_i))``.  The rule is exact on polynomials of
    total degree <= 2s+1.
    """
    n, d = dim, 2 * s + 1
    acc = {}
    for i in range(s + 1):
        w = (Fraction(-1) ** i * Fraction(2) ** (-2 * s)
             * Fraction((d + n - 2 * i) ** d,
                        math.factorial(i) * math.factorial(d + n - i)))
        for beta in _compositions(s - i, n + 1):
            pt = tuple(Fraction(2 * b + 1, d + n - 2 * i) for b in beta)
            acc[pt] = acc.get(pt, Fraction(0)) + w
    pts = sorted(acc)
    bary = np.array([[float(c) for c in p] for p in pts])
    wts = np.array([float(acc[p] * math.factorial(n)) for p in pts])
    return bary, wts


def _simplex_volume(verts):
    n = verts.shape[1]
    return abs(np.linalg.det(verts[1:] - verts[0])) / math.factorial(n)


def _gm_apply(f, verts, bary, wts):
    nodes = bary @ verts
    vals = np.asarray(f(nodes), dtype=float)
    return _simplex_volume(verts) * float(wts @ vals)


def _bisect(verts):
    n1 = verts.shape[0]
    best = (0, 1)
    best_d = -1.0
    for i in range(n1):
        for j in range(i + 1, n1):
            d = float(np.sum((verts[i] - verts[j]) ** 2))
            if d > best_d:
                best_d = d
                best = (i, j)
    i, j = best
    mid = (verts[i] + verts[j]) / 2
    a = verts.copy()
    a[i] = mid
    b = verts.copy()
    b[j] = mid
    return a, b


def integrate_simplices(f, simplices, rule=DEFAULT_RULE):
    """Adaptive integration of a vectorised integrand over float simplices."""
    bary, wts = gm_table(simplices.shape[2], rule.gm_order) if len(simplices) else (None, None)
    if len(simplices) == 0:
        return IntegrationResult(0.0, 0.0, True)

    counter = count()
    entries = {}
    heap = []

    def push(verts, depth):
        coarse = _gm_apply(f, verts, bary, wts)
        kids = _bisect(verts)
        fine = _gm_apply(f, kids[0], bary, wts) + _gm_apply(f, kids[1], bary, wts)
        err = abs(coarse - fine)
        key = next(counter)
        entries[key] = (fine, err)
        heapq.heappush(heap, (-err, key, verts, depth, kids))

    for s in simplices:
        push(np.asarray(s, dtype=float), 0)

    def totals():
        vals = [v for v, _ in entries.values()]
        errs = [e for _, e in entries.values()]
        return math.fsum(vals), math.fsum(errs)

    value, err = totals()
    while heap:
        tol = max(rule.tol_abs, rule.tol_rel * abs(value))
        if err <= tol:
            break
        _, key, verts, depth, kids = heapq.heappop(heap)
        if key not in entries:
            continue
        if depth >= rule.max_depth:
            continue  # leaf stays counted but cannot be refined further
        del entries[key]
        push(kids[0], depth + 1)
        push(kids[1], depth + 1)
        value, err = totals()
    value, err = totals()
    return IntegrationResult(value, err, err <= max(rule.tol_abs, rule.tol_rel * abs(value)))


def integrate(polytope, f, rule=DEFAULT_RULE):
    """Integrate a vectorised scalar function over the polytope."""
    tri = polytope.triangulation_floats()
    if tri.size == 0:
        return IntegrationResult(0.0, 0.0, True)
    return integrate_simplices(f, tri, rule)


def integrate_boundary(polytope, f, rule=DEFAULT_RULE):
    """Integrate over the boundary with the lattice measure.

    In dimension one the boundary consists of the two endpoints, each of
    measure one.  Otherwise each facet is pulled back through its unimodular
    chart and integrated as an (n-1)-dimensional interior integral.
    """
    if polytope.dim == 1:
        pts = polytope.vertices_floats()
        vals = np.asarray(f(pts), dtype=float)
        return IntegrationResult(float(np.sum(vals)), 0.0, True)
    total = 0.0
    err = 0.0
    ok = True
    for i in polytope.genuine_facet_indices():
        chart = polytope.facet_chart(i)
        res = integrate(chart.polytope, lambda y: f(chart.map_floats(y)), rule)
        total += res.value
        err += res.error
        ok = ok and res.converged
    return IntegrationResult(total, err, ok)


# -- closed-form oracles -------------------------------------------------------


def _poly_mul(p, q):
    out = {}
    for e1, c1 in p.items():
        for e2, c2 in q.items():
            e = tuple(a + b for a, b in zip(e1, e2))
            out[e] = out.get(e, Fraction(0)) + c1 * c2
    return out


def _monomial_moment_simplex(simplex, m):
    """Exact integral of x^m over one rational simplex."""
    n = len(m)
    v0 = simplex[0]
    edges = [[simplex[i + 1][k] - v0[k] for i in range(n)] for k in range(n)]
    detA = la.det([[simplex[i + 1][k] - v0[k] for k in range(n)]
                   for i in range(n)])
    if detA == 0:
        return Fraction(0)
    zero = tuple([0] * n)
    poly = {zero: Fraction(1)}
    for k in range(n):
        lin = {zero: Fraction(v0[k])}
        for i in range(n):
            if edges[k][i]:
                e = tuple(1 if j == i else 0 for j in range(n))
                lin[e] = Fraction(edges[k][i])
        for _ in range(m[k]):
            poly = _poly_mul(poly, lin)
    total = Fraction(0)
    for e, c in poly.items():
        num = Fraction(1)
        for a in e:
            num *= math.factorial(a)
        total += c * num / math.factorial(n + sum(e))
    return abs(detA) * total


def divided_difference_exp(nodes):
    """Confluent divided difference of exp over the node list.

    Computed as the corner entry of exp of the upper bidiagonal matrix with
    the nodes on the diagonal (Opitz); exact node repetitions are allowed.
    """
    m = len(nodes)
    z = np.zeros((m, m))
    for i, t in enumerate(nodes):
        z[i, i] = t
        if i + 1 < m:
            z[i, i + 1] = 1.0
    return float(expm(z)[0, -1])


def _exp_moment_simplex(simplex, m, xi):
    """Integral of x^m e^{<xi,x>} over one rational simplex (float)."""
    n = len(m)
    verts = simplex
    detA = la.det([[verts[i + 1][k] - verts[0][k] for k in range(n)]
                   for i in range(n)])
    if detA == 0:
        return 0.0
    xi_f = np.asarray(xi, dtype=float)
    svals = [float(xi_f @ np.array([float(c) for c in v])) for v in verts]
    # Expand x^m into barycentric monomials over the n+1 vertices.
    zero = tuple([0] * (n + 1))
    poly = {zero: Fraction(1)}
    for k in range(n):
        lin = {}
        for i in range(n + 1):
            if verts[i][k]:
                e = tuple(1 if j == i else 0 for j in range(n + 1))
                lin[e] = Fraction(verts[i][k])
        if not lin:
            if m[k] > 0:
                return 0.0
            continue
        for _ in range(m[k]):
            poly = _poly_mul(poly, lin)
    scale = float(abs(detA))
    total = 0.0
    for e, c in poly.items():
        nodes = []
        for i, mult in enumerate(e):
            nodes.extend([svals[i]] * (mult + 1))
        fact = 1
        for a in e:
            fact *= math.factorial(a)
        total += float(c) * fact * divided_difference_exp(nodes)
    return scale * total


def moments(polytope, m=None, xi=None, mode="monomial"):
    """Closed-form moments, independent of the cubature path.

    ``mode='monomial'`` returns the exact rational integral of x^m over the
    polytope; ``mode='exponential'`` returns the float integral of
    x^m e^{<xi, x>} via confluent divided differences of exp at the simplex
    vertex values.
    """
    if m is None:
        m = tuple([0] * polytope.dim)
    m = tuple(int(k) for k in m)
    if mode == "monomial":
        total = Fraction(0)
        for s in polytope.triangulate():
            total += _monomial_moment_simplex(s, m)
        return total
    if mode == "exponential":
        if xi is None:
            raise ValueError("exponential moments need xi")
        return math.fsum(_exp_moment_simplex(s, m, xi)
                         for s in polytope.triangulate())
    raise ValueError(f"unknown mode {mode!r}")
