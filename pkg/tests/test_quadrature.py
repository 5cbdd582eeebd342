import math
from fractions import Fraction as F
from itertools import product

import numpy as np
import pytest

from toricstab.polytope import DelzantPolytope
from toricstab.quadrature import (DEFAULT_RULE, QuadratureRule,
                                  divided_difference_exp, gm_table, integrate,
                                  integrate_boundary, moments)


class TestRuleExactness:
    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_weights_sum_to_one(self, dim):
        _, w = gm_table(dim, DEFAULT_RULE.gm_order)
        assert math.fsum(w) == pytest.approx(1.0, abs=1e-13)

    @pytest.mark.parametrize("dim", [1, 2, 3])
    def test_monomial_exactness_on_reference_simplex(self, dim):
        s = DEFAULT_RULE.gm_order
        degree = 2 * s + 1
        bary, w = gm_table(dim, s)
        verts = np.vstack([np.zeros(dim), np.eye(dim)])
        nodes = bary @ verts
        vol = 1.0 / math.factorial(dim)
        for m in product(range(degree + 1), repeat=dim):
            if sum(m) > degree:
                continue
            approx = vol * float(w @ np.prod(nodes ** np.array(m), axis=1))
            exact = (np.prod([math.factorial(k) for k in m])
                     / math.factorial(dim + sum(m)))
            assert approx == pytest.approx(exact, rel=5e-13, abs=1e-15), m


class TestIntegrate:
    def test_unit_square_constant(self, square):
        res = integrate(square, lambda x: np.ones(len(x)))
        assert res.value == pytest.approx(1.0, abs=1e-12)
        assert res.converged

    def test_interval_exponential(self, unit_interval):
        res = integrate(unit_interval, lambda x: np.exp(x[:, 0]))
        assert res.value == pytest.approx(math.e - 1, rel=1e-12)

    def test_simplex_xy_moment(self, simplex):
        res = integrate(simplex, lambda x: x[:, 0] * x[:, 1])
        assert res.value == pytest.approx(1 / 24, rel=1e-13)

    def test_agrees_with_exact_moments(self, trapezoid):
        rng = np.random.default_rng(7)
        for _ in range(50):
            m = (int(rng.integers(0, 7)), int(rng.integers(0, 6)))
            exact = float(moments(trapezoid, m))
            got = integrate(trapezoid, lambda x: x[:, 0] ** m[0] * x[:, 1] ** m[1]).value
            assert abs(got - exact) <= 1e-12 * (1 + abs(exact)), m

    def test_additivity_over_subdivision(self, square):
        # Integrating over the two chop cells reproduces the whole.
        left = DelzantPolytope(2, list(square.facets) + [((-1, -1), F(3, 4))])
        right = DelzantPolytope(2, list(square.facets) + [((1, 1), F(-3, 4))])
        f = lambda x: np.exp(0.3 * x[:, 0] - 0.7 * x[:, 1])
        total = integrate(square, f).value
        assert (integrate(left, f).value + integrate(right, f).value
                == pytest.approx(total, rel=1e-10))

    def test_nonconvergence_is_flagged(self, unit_interval):
        rule = QuadratureRule(degree=2, tol_abs=1e-30, tol_rel=1e-30,
                              max_depth=2)
        res = integrate(unit_interval, lambda x: np.exp(5 * x[:, 0]), rule)
        assert not res.converged


class TestBoundary:
    def test_simplex_lattice_perimeter(self, simplex):
        res = integrate_boundary(simplex, lambda x: np.ones(len(x)))
        assert res.value == pytest.approx(3.0, abs=1e-12)

    def test_interval_two_points(self, interval):
        res = integrate_boundary(interval, lambda x: np.ones(len(x)))
        assert res.value == 2.0 and res.error == 0.0

    def test_square_x_moment(self, square):
        res = integrate_boundary(square, lambda x: x[:, 0])
        assert res.value == pytest.approx(2.0, abs=1e-12)

    def test_unimodular_invariance_for_affine(self, trapezoid):
        u = [[1, 2], [0, 1]]
        image = trapezoid.unimodular_image(u)
        # phi(x) = <c, x> transforms with the inverse transpose.
        c = np.array([0.4, -1.1])
        uinv = np.linalg.inv(np.array(u, dtype=float))
        c_img = uinv.T @ c
        base = integrate_boundary(trapezoid, lambda x: x @ c).value
        img = integrate_boundary(image, lambda x: x @ c_img).value
        assert img == pytest.approx(base, rel=1e-11)


class TestMoments:
    def test_interval_mean(self, unit_interval):
        assert moments(unit_interval, (1,)) == F(1, 2)

    def test_interval_exponential(self, unit_interval):
        t = 0.8
        got = moments(unit_interval, (0,), [t], "exponential")
        assert got == pytest.approx((math.exp(t) - 1) / t, rel=1e-13)

    def test_simplex_exponential_against_vertex_formula(self, simplex):
        # Rational-exponential sum over the three corners.
        t1, t2 = 0.9, -0.4
        brion = (1.0 / (t1 * t2)
                 + math.exp(t1) / (t1 * (t1 - t2))
                 + math.exp(t2) / (t2 * (t2 - t1)))
        got = moments(simplex, (0, 0), [t1, t2], "exponential")
        assert got == pytest.approx(brion, rel=1e-12)

    def test_exponential_moment_with_monomial(self, unit_interval):
        t = 0.6
        exact = ((t - 1) * math.exp(t) + 1) / t ** 2  # int_0^1 x e^{tx}
        got = moments(unit_interval, (1,), [t], "exponential")
        assert got == pytest.approx(exact, rel=1e-12)

    def test_cube_factorizes(self, cube):
        got = moments(cube, (1, 2, 0))
        assert got == F(1, 2) * F(1, 3) * F(1)


def test_divided_difference_exp_repeated_nodes():
    # All nodes zero: f[0,...,0] (m+1 nodes) = 1/m!
    assert divided_difference_exp([0.0] * 5) == pytest.approx(1 / 24, rel=1e-13)
    # Two distinct nodes: (e^a - e^b)/(a - b)
    a, b = 0.3, -1.2
    assert divided_difference_exp([a, b]) == pytest.approx(
        (math.exp(a) - math.exp(b)) / (a - b), rel=1e-13)


class TestLatticeMeasureIdentity:
    @pytest.mark.parametrize("name", ["cp2-reflexive", "bl1cp2-reflexive",
                                      "bl3cp2-reflexive"])
    def test_divergence_identity_on_reflexive_polytopes(self, name):
        # For a polytope with all facet offsets one, the flux of h*x gives
        #   int_dP h dsigma = n int_P h dx + int_P <x, grad h> dx,
        # an identity tying the lattice boundary measure to interior
        # integrals with no shared code path.
        from toricstab import catalog
        P = catalog.load(name)
        xi = np.array([0.37, -0.21])
        lhs = integrate_boundary(P, lambda x: np.exp(x @ xi)).value
        rhs = (P.dim * integrate(P, lambda x: np.exp(x @ xi)).value
               + integrate(P, lambda x: (x @ xi) * np.exp(x @ xi)).value)
        assert lhs == pytest.approx(rhs, rel=1e-11)
