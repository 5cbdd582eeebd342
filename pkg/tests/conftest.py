from fractions import Fraction

import pytest

from toricstab import catalog
from toricstab.polytope import DelzantPolytope


@pytest.fixture
def interval():
    return catalog.load("cp1")


@pytest.fixture
def unit_interval():
    return DelzantPolytope(1, [((1,), 0), ((-1,), 1)], name="unit-interval")


@pytest.fixture
def simplex():
    return catalog.load("cp2")


@pytest.fixture
def square():
    return catalog.load("cp1xcp1")


@pytest.fixture
def trapezoid():
    return catalog.load("bl1cp2")


@pytest.fixture
def cube():
    return catalog.load("cube")


def vertex_index(P, coords):
    coords = tuple(Fraction(c) for c in coords)
    for i, v in enumerate(P.vertices):
        if v == coords:
            return i
    raise AssertionError(f"{coords} is not a vertex of {P}")
