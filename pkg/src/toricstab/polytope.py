"""Delzant polytopes as facet-inequality data with exact rational arithmetic.

A polytope is stored as ``P = {x : <n_F, x> + c_F >= 0 for all facets F}``
with primitive integer inward normals ``n_F`` and rational offsets ``c_F``.
Vertices, charts, triangulations and validity diagnostics are all derived
from the facet data; combinatorial questions (simplicity, unimodularity,
redundancy) are decided exactly over the rationals.  Floats appear only in
the cached arrays handed to the numerical integration layer.

All objects are immutable after construction and safe to share.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

import numpy as np

from . import _linalg as la


class PolytopeError(ValueError):
    pass


class NonSimpleVertexError(PolytopeError):
    """More than ``dim`` facets meet at a point."""

    def __init__(self, point, facet_indices):
        self.point = point
        self.facet_indices = tuple(facet_indices)
        super().__init__(
            f"non-simple vertex at {tuple(map(str, point))}: "
            f"facets {self.facet_indices} meet there"
        )


class ChopDepthError(PolytopeError):
    """Requested corner chop would cut beyond the admissible depth."""

    def __init__(self, requested, admissible):
        self.requested = requested
        self.admissible = admissible
        super().__init__(
            f"chop depth {requested} exceeds admissible bound {admissible}"
        )


def _as_fraction(x):
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    if isinstance(x, str):
        return Fraction(x)
    if isinstance(x, float):
        return Fraction(x)
    raise TypeError(f"cannot interpret {x!r} as an exact rational")


@dataclass(frozen=True)
class Facet:
    """One inequality ``<normal, x> + offset >= 0`` with primitive normal."""

    normal: tuple
    offset: Fraction

    @staticmethod
    def make(normal, offset):
        normal = tuple(_as_fraction(x) for x in normal)
        offset = _as_fraction(offset)
        scale = 1
        for x in normal:
            scale = scale * x.denominator // la.gcd(scale, x.denominator)
        ints = tuple(int(x * scale) for x in normal)
        prim, factor = la.primitivize(ints)
        return Facet(prim, offset * scale / factor)

    def value(self, point):
        return la.dot(self.normal, point) + self.offset


@dataclass(frozen=True)
class VertexData:
    """A simple unimodular vertex: coordinates, inward primitive edge
    generators spanning the tangent cone, and the indices of the facets
    meeting there."""

    coords: tuple
    inward_edges: tuple
    adjacent_facets: tuple


@dataclass(frozen=True)
class FacetChart:
    """Unimodular affine parametrisation of a facet.

    ``x = origin + sum_i y_i basis[i]`` maps the (n-1)-dimensional chart
    polytope onto the facet, and Lebesgue measure in ``y`` pushes forward to
    the lattice boundary measure on the facet (primitive normal together
    with the basis spans the integer lattice with determinant +-1).
    For 1-dimensional polytopes the chart is a single point of measure one.
    """

    facet_index: int
    origin: tuple
    basis: tuple
    polytope: "DelzantPolytope"

    def map_exact(self, y):
        return tuple(
            self.origin[k] + sum(Fraction(y[i]) * self.basis[i][k]
                                 for i in range(len(self.basis)))
            for k in range(len(self.origin))
        )

    def map_floats(self, pts):
        """Map an (N, n-1) float array of chart coordinates into ambient space."""
        origin = np.array([float(c) for c in self.origin])
        if len(self.basis) == 0:
            return np.broadcast_to(origin, (len(pts), len(origin))).copy()
        B = np.array(self.basis, dtype=float)
        return origin + np.asarray(pts, dtype=float) @ B


class DelzantPolytope:
    """Moment polytope in facet representation.

    The facet list is the source of truth; everything else (vertices, edge
    generators, charts, triangulations) is derived lazily and cached.
    Construction never validates the Delzant conditions -- use
    :meth:`validate_delzant` for diagnostics -- so the same class also serves
    for the auxiliary regions produced by halfspace intersections.
    """

    def __init__(self, dim, facets, name=None):
        if dim < 1:
            raise PolytopeError("dimension must be >= 1")
        self.dim = int(dim)
        normalized = []
        for f in facets:
            if isinstance(f, Facet):
                f = Facet.make(f.normal, f.offset)
            else:
                f = Facet.make(*f)
            if len(f.normal) != self.dim:
                raise PolytopeError("facet normal has wrong length")
            normalized.append(f)
        self.facets = tuple(sorted(set(normalized),
                                   key=lambda f: (f.normal, f.offset)))
        self.name = name
        self._cache = {}

    # -- identity ---------------------------------------------------------

    def __eq__(self, other):
        return (isinstance(other, DelzantPolytope)
                and self.dim == other.dim and self.facets == other.facets)

    def __hash__(self):
        return hash((self.dim, self.facets))

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return (f"<DelzantPolytope{label} dim={self.dim} "
                f"facets={len(self.facets)} vertices={len(self.vertices)}>")

    # -- core enumeration --------------------------------------------------

    def _enumerate(self):
        """Vertices and facet incidence, tolerating non-simple corners."""
        if "enum" in self._cache:
            return self._cache["enum"]
        n = self.dim
        points = {}
        for comb in combinations(range(len(self.facets)), n):
            m = [self.facets[i].normal for i in comb]
            if la.det(m) == 0:
                continue
            x = la.solve(m, [-self.facets[i].offset for i in comb])
            if x is None:
                continue
            if all(f.value(x) >= 0 for f in self.facets):
                points[x] = True
        vertices = sorted(points)
        active = [tuple(i for i, f in enumerate(self.facets) if f.value(v) == 0)
                  for v in vertices]
        self._cache["enum"] = (tuple(vertices), tuple(active))
        return self._cache["enum"]

    @property
    def vertices(self):
        """Sorted vertex coordinates as tuples of Fractions."""
        return self._enumerate()[0]

    @property
    def vertex_facets(self):
        """For each vertex, the indices of all facets through it."""
        return self._enumerate()[1]

    def vertex_data(self):
        """Full vertex data; requires every vertex simple and unimodular."""
        if "vertex_data" in self._cache:
            return self._cache["vertex_data"]
        out = []
        for v, act in zip(self.vertices, self.vertex_facets):
            if len(act) != self.dim:
                raise NonSimpleVertexError(v, act)
            m = [self.facets[i].normal for i in act]
            inv = la.invert_integer_matrix(m)  # raises if not unimodular
            edges = tuple(tuple(inv[r][c] for r in range(self.dim))
                          for c in range(self.dim))
            out.append(VertexData(v, edges, act))
        self._cache["vertex_data"] = tuple(out)
        return self._cache["vertex_data"]

    def genuine_facet_indices(self):
        """Indices of facets supporting an (n-1)-dimensional face."""
        if "genuine" in self._cache:
            return self._cache["genuine"]
        out = []
        for i in range(len(self.facets)):
            on_facet = [v for v, act in zip(self.vertices, self.vertex_facets)
                        if i in act]
            if len(on_facet) >= self.dim and la.affine_rank(on_facet) == self.dim - 1:
                out.append(i)
        self._cache["genuine"] = tuple(out)
        return self._cache["genuine"]

    def is_empty(self):
        return len(self.vertices) == 0

    def is_full_dimensional(self):
        return la.affine_rank(list(self.vertices)) == self.dim

    def is_bounded(self):
        """Exact recession-cone test: bounded iff no feasible ray exists."""
        normals = [f.normal for f in self.facets]
        n = self.dim
        for comb in combinations(range(len(normals)), n - 1):
            ray = _kernel_direction([normals[i] for i in comb], n)
            if ray is None:
                continue
            for cand in (ray, tuple(-x for x in ray)):
                if all(la.dot(nf, cand) >= 0 for nf in normals):
                    return False
        return True

    # -- validation ---------------------------------------------------------

    def validate_delzant(self):
        """Diagnostics list; empty iff this is a valid Delzant polytope."""
        diags = []
        if self.is_empty():
            return ["polytope is empty (no vertex satisfies all inequalities)"]
        if not self.is_bounded():
            diags.append("polytope is unbounded (recession ray exists)")
        if not self.is_full_dimensional():
            diags.append("polytope is not full-dimensional")
        for v, act in zip(self.vertices, self.vertex_facets):
            if len(act) != self.dim:
                diags.append(
                    f"non-simple vertex {tuple(map(str, v))}: facets {act} meet"
                )
                continue
            d = la.det([self.facets[i].normal for i in act])
            if abs(d) != 1:
                diags.append(
                    f"vertex {tuple(map(str, v))} is not unimodular: "
                    f"normal determinant {d}"
                )
        genuine = set(self.genuine_facet_indices())
        for i, f in enumerate(self.facets):
            if i not in genuine:
                diags.append(
                    f"facet {i} (normal {f.normal}, offset {f.offset}) is redundant"
                )
        return diags

    # -- geometry ------------------------------------------------------------

    def contains(self, point):
        return all(f.value([_as_fraction(c) for c in point]) >= 0
                   for f in self.facets)

    def interval(self, xi):
        """Exact range of <xi, x> over the polytope (min, max over vertices)."""
        xi = [_as_fraction(c) for c in xi]
        vals = [la.dot(xi, v) for v in self.vertices]
        return min(vals), max(vals)

    def facet_chart(self, facet_index):
        if isinstance(facet_index, Facet):
            facet_index = self.facets.index(facet_index)
        key = ("chart", facet_index)
        if key in self._cache:
            return self._cache[key]
        f = self.facets[facet_index]
        z, basis = la.unimodular_complement(f.normal)
        origin = tuple(-f.offset * zi for zi in z)
        if self.dim == 1:
            chart = FacetChart(facet_index, origin, (), None)
        else:
            rows = []
            for j, g in enumerate(self.facets):
                if j == facet_index:
                    continue
                ny = tuple(la.dot(g.normal, b) for b in basis)
                off = g.offset + la.dot(g.normal, origin)
                if all(c == 0 for c in ny):
                    if off < 0:
                        rows = None
                        break
                    continue
                rows.append((ny, off))
            if rows is None:
                raise PolytopeError(f"facet {facet_index} is infeasible")
            sub = DelzantPolytope(self.dim - 1, rows)
            chart = FacetChart(facet_index, origin, basis, sub)
        self._cache[key] = chart
        return chart

    def triangulate(self):
        """Partition into simplices (tuples of n+1 rational vertex tuples).

        Recursive pyramid construction: cone the lexicographically smallest
        vertex over triangulations of the facets it does not lie on.  The
        simplices cover the polytope up to measure zero.
        """
        if "triangulation" in self._cache:
            return self._cache["triangulation"]
        if self.is_empty() or not self.is_full_dimensional():
            self._cache["triangulation"] = ()
            return ()
        if self.dim == 1:
            sims = ((self.vertices[0], self.vertices[-1]),)
            self._cache["triangulation"] = sims
            return sims
        apex = self.vertices[0]
        apex_facets = set(self.vertex_facets[0])
        sims = []
        for i in self.genuine_facet_indices():
            if i in apex_facets:
                continue
            chart = self.facet_chart(i)
            for sub in chart.polytope.triangulate():
                sims.append((apex,) + tuple(chart.map_exact(y) for y in sub))
        self._cache["triangulation"] = tuple(sims)
        return self._cache["triangulation"]

    def triangulation_floats(self):
        """Triangulation as a float array of shape (k, n+1, n)."""
        if "tri_float" not in self._cache:
            tri = self.triangulate()
            arr = np.array([[[float(c) for c in v] for v in s] for s in tri],
                           dtype=float)
            self._cache["tri_float"] = arr
        return self._cache["tri_float"]

    def volume(self):
        """Exact Euclidean volume as a Fraction."""
        if "volume" not in self._cache:
            total = Fraction(0)
            nfact = 1
            for k in range(2, self.dim + 1):
                nfact *= k
            for s in self.triangulate():
                rows = [[s[i + 1][k] - s[0][k] for k in range(self.dim)]
                        for i in range(self.dim)]
                total += abs(la.det(rows)) / nfact
            self._cache["volume"] = total
        return self._cache["volume"]

    def vertices_floats(self):
        if "vert_float" not in self._cache:
            self._cache["vert_float"] = np.array(
                [[float(c) for c in v] for v in self.vertices], dtype=float)
        return self._cache["vert_float"]

    # -- transformations -----------------------------------------------------

    def translate(self, eta):
        """Translate by a rational vector: x -> x + eta."""
        eta = [_as_fraction(c) for c in eta]
        facets = [(f.normal, f.offset - la.dot(f.normal, eta))
                  for f in self.facets]
        return DelzantPolytope(self.dim, facets, name=self.name)

    def midpoint_normalize(self, xi):
        """Translate so the interval <P, xi> is symmetric about zero.

        Returns ``(translated_polytope, shift)`` where ``shift`` is the scalar
        added to ``<xi, x>`` for every point (the midpoint, negated).  The
        translation direction is ``xi`` itself, so the result is exact for
        rational ``xi`` (floats are taken at face value as exact rationals).
        """
        xi = [_as_fraction(c) for c in xi]
        lo, hi = self.interval(xi)
        shift = -(lo + hi) / 2
        if shift == 0:
            return self, Fraction(0)
        norm2 = la.dot(xi, xi)
        eta = [shift * c / norm2 for c in xi]
        return self.translate(eta), shift

    def unimodular_image(self, u, tau=None):
        """Image under x -> U x + tau for unimodular integer U."""
        uinv = la.invert_integer_matrix(u)
        if tau is None:
            tau = [0] * self.dim
        tau = [_as_fraction(c) for c in tau]
        facets = []
        for f in self.facets:
            normal = tuple(la.dot(f.normal, [uinv[r][c] for r in range(self.dim)])
                           for c in range(self.dim))
            facets.append((normal, f.offset - la.dot(normal, tau)))
        return DelzantPolytope(self.dim, facets, name=self.name)

    # -- corner chop -----------------------------------------------------------

    def _chop_data(self, vertex):
        if isinstance(vertex, VertexData):
            v = vertex
        else:
            v = self.vertex_data()[vertex]
        m = tuple(sum(self.facets[i].normal[k] for i in v.adjacent_facets)
                  for k in range(self.dim))
        prim, factor = la.primitivize(m)
        if factor != 1:
            raise PolytopeError("chop normal is not primitive; vertex not unimodular")
        return v, m

    def admissible_chop(self, vertex):
        """Largest safe chop depth: half the smallest lattice-affine distance
        from the chop hyperplane at the vertex to any other vertex."""
        v, m = self._chop_data(vertex)
        dists = [la.dot(m, q) - la.dot(m, v.coords)
                 for q in self.vertices if q != v.coords]
        return min(dists) / 2

    def corner_chop(self, vertex, eps):
        """Truncate the corner at ``vertex`` to lattice depth ``eps``.

        In vertex-adapted coordinates (vertex at the origin, inward edges the
        standard basis) the new facet is ``{y_1 + ... + y_n = eps}``.  The
        result is again Delzant and loses exactly the corner simplex of
        volume eps^n / n!.
        """
        if self.dim < 2:
            raise PolytopeError("corner chop needs dimension >= 2")
        eps = _as_fraction(eps)
        if eps <= 0:
            raise PolytopeError("chop depth must be positive")
        v, m = self._chop_data(vertex)
        bound = self.admissible_chop(vertex)
        if eps >= bound:
            raise ChopDepthError(eps, bound)
        new = (m, -la.dot(m, v.coords) - eps)
        name = f"{self.name}-chopped" if self.name else None
        return DelzantPolytope(self.dim, list(self.facets) + [new], name=name)

    # -- serialisation ----------------------------------------------------------

    def to_json(self):
        doc = {
            "dim": self.dim,
            "facets": [{"normal": list(f.normal), "offset": str(f.offset)}
                       for f in self.facets],
        }
        if self.name:
            doc["name"] = self.name
        return doc

    @staticmethod
    def from_json(doc):
        if isinstance(doc, str):
            doc = json.loads(doc)
        facets = [(f["normal"], Fraction(str(f["offset"])))
                  for f in doc["facets"]]
        return DelzantPolytope(doc["dim"], facets, name=doc.get("name"))


def _kernel_direction(rows, n):
    """A nonzero rational vector orthogonal to all rows, or None."""
    mat = [list(r) for r in rows]
    rank = 0
    pivots = []
    work = [row[:] for row in mat]
    work = [[Fraction(x) for x in row] for row in work]
    r = 0
    for col in range(n):
        piv = next((i for i in range(r, len(work)) if work[i][col] != 0), None)
        if piv is None:
            continue
        work[r], work[piv] = work[piv], work[r]
        inv = 1 / work[r][col]
        work[r] = [x * inv for x in work[r]]
        for i in range(len(work)):
            if i != r and work[i][col]:
                f = work[i][col]
                work[i] = [x - f * y for x, y in zip(work[i], work[r])]
        pivots.append(col)
        rank += 1
        r += 1
    if rank >= n:
        return None
    free = next(c for c in range(n) if c not in pivots)
    vec = [Fraction(0)] * n
    vec[free] = Fraction(1)
    for i, col in enumerate(pivots):
        vec[col] = -work[i][free]
    # Clear denominators for exact sign tests downstream.
    denom = 1
    for x in vec:
        denom = denom * x.denominator // la.gcd(denom, x.denominator)
    ints = tuple(int(x * denom) for x in vec)
    return ints
