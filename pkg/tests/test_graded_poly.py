"""Tests for the graded polynomial algebra, antibracket and BV Laplacian."""

import random

import pytest

from complexes import cochain_basis
from graded_poly import (
    FieldContent,
    GradedPolynomial,
    GradedVariable,
    Monomial,
    VariableKind,
    antibracket,
    bv_laplacian,
    left_derivative,
    right_derivative,
)


@pytest.fixture(scope="module")
def v2():
    return FieldContent(2)


def var(v, name):
    return GradedPolynomial.variable(v.lookup(name))


def random_products(variables, count, seed, length=3):
    rng = random.Random(seed)
    pool = variables.all()
    out = []
    while len(out) < count:
        poly = GradedPolynomial.product(rng.choice(pool) for _ in range(rng.randint(1, length)))
        if poly:
            out.append(poly)
    return out


def test_field_content_sizes():
    v = FieldContent(2)
    assert len(v.x) == 4 and len(v.C) == 3
    assert len(v.all()) == 14
    assert len(FieldContent(2, auxiliary=True).all()) == 26
    assert len(FieldContent(3).all()) == 2 * (9 + 8)


def test_degrees_and_partners(v2):
    assert v2.lookup("xs1").ghost_degree == -1
    assert v2.lookup("Cs2").ghost_degree == -2
    assert v2.lookup("C1").conjugate() == v2.lookup("Cs1")
    assert v2.lookup("x3").partner == "xs3"
    aux = FieldContent(2, auxiliary=True)
    assert aux.lookup("B1").ghost_degree == -1
    assert aux.lookup("h1").conjugate() == aux.lookup("hs1")
    assert aux.lookup("hs1").ghost_degree == -1
    assert aux.lookup("Bs1").ghost_degree == 0


def test_unknown_variable_raises(v2):
    with pytest.raises(KeyError):
        v2.lookup("B1")


def test_odd_variables_anticommute(v2):
    c1, c2 = v2.lookup("C1"), v2.lookup("C2")
    assert GradedPolynomial.product([c2, c1]) == -GradedPolynomial.product([c1, c2])
    assert GradedPolynomial.product([c1, c1]).is_zero()
    assert var(v2, "C1") * var(v2, "C1") == 0


def test_even_variables_commute(v2):
    x1, x2 = var(v2, "x1"), var(v2, "x2")
    assert x1 * x2 == x2 * x1
    assert (x1 * x1).poly_degree() == 2
    assert (x1 ** 2 * var(v2, "C1")).poly_degree() == 3


def test_ghost_degree_of_mixed_product(v2):
    assert (var(v2, "xs1") * var(v2, "C1")).ghost_degree == 0
    assert (var(v2, "Cs1") * var(v2, "C2") * var(v2, "C3")).ghost_degree == 0


def test_inhomogeneous_ghost_degree_raises(v2):
    with pytest.raises(ValueError):
        (var(v2, "x1") + var(v2, "C1")).ghost_degree


def test_left_and_right_derivatives(v2):
    c1, c2 = v2.lookup("C1"), v2.lookup("C2")
    p = GradedPolynomial.product([c1, c2])
    assert left_derivative(p, c1) == var(v2, "C2")
    assert left_derivative(p, c2) == -var(v2, "C1")
    assert right_derivative(p, c2) == var(v2, "C1")
    assert right_derivative(p, c1) == -var(v2, "C2")
    x1 = v2.lookup("x1")
    assert left_derivative(var(v2, "x1") ** 3, x1) == 3 * var(v2, "x1") ** 2
    assert left_derivative(var(v2, "x2"), x1).is_zero()


def test_antibracket_on_generators(v2):
    assert antibracket(var(v2, "xs1"), var(v2, "x1")) == 1
    assert antibracket(var(v2, "x1"), var(v2, "xs1")) == -1
    assert antibracket(var(v2, "Cs1"), var(v2, "C1")) == 1
    assert antibracket(var(v2, "C1"), var(v2, "Cs1")) == -1
    assert antibracket(var(v2, "xs1"), var(v2, "x2")).is_zero()


def test_antibracket_graded_antisymmetry(v2):
    samples = random_products(v2, 40, seed=3)
    for f, g in zip(samples[::2], samples[1::2]):
        if not (f.is_homogeneous() and g.is_homogeneous()):
            continue
        sign = -1 if (f.parity + 1) * (g.parity + 1) % 2 == 0 else 1
        assert antibracket(f, g) == antibracket(g, f) * sign


def test_seeded_master_equation_value(v2):
    s = var(v2, "x1") ** 2 + var(v2, "xs1") * var(v2, "C1")
    assert antibracket(s, s) == -4 * var(v2, "x1") * var(v2, "C1")


def test_laplacian_on_pairs(v2):
    x1, xs1 = var(v2, "x1"), var(v2, "xs1")
    assert bv_laplacian(x1 * xs1) == -1
    assert bv_laplacian(var(v2, "C1") * var(v2, "Cs1")) == 1
    assert bv_laplacian(x1 ** 2 * xs1) == -2 * x1
    assert bv_laplacian(x1 * var(v2, "xs2")).is_zero()


def test_laplacian_squares_to_zero(v2):
    for poly in random_products(v2, 150, seed=11, length=5):
        assert bv_laplacian(bv_laplacian(poly)).is_zero()


def test_laplacian_squares_to_zero_on_every_monomial_to_degree_four(v2):
    for k in range(-8, 5):
        for monomial in cochain_basis(v2.all(), k, 4):
            assert bv_laplacian(bv_laplacian(GradedPolynomial.monomial(monomial))).is_zero()


def test_laplacian_raises_ghost_degree(v2):
    for poly in random_products(v2, 60, seed=5, length=4):
        image = bv_laplacian(poly)
        if image:
            assert image.ghost_degree == poly.ghost_degree + 1


def test_simultaneous_substitution(v2):
    x1, x2 = v2.lookup("x1"), v2.lookup("x2")
    p = var(v2, "x1") * var(v2, "x2") ** 2
    swapped = p.substitute({x1: GradedPolynomial.variable(x2), x2: GradedPolynomial.variable(x1)})
    assert swapped == var(v2, "x2") * var(v2, "x1") ** 2


def test_substitution_keeps_grassmann_order(v2):
    c1, c2 = v2.lookup("C1"), v2.lookup("C2")
    p = GradedPolynomial.product([c1, c2])
    image = p.substitute({c1: var(v2, "C3")})
    assert image == GradedPolynomial.product([v2.lookup("C3"), c2])


def test_monomial_from_factors_sign():
    a = GradedVariable(VariableKind.GHOST, 1, 1)
    b = GradedVariable(VariableKind.GHOST, 2, 1)
    sign, monomial = Monomial.from_factors([(b, 1), (a, 1)])
    assert sign == -1
    assert monomial.degree == 2
    assert monomial.ghost_degree == 2
    assert Monomial.from_factors([(a, 1), (a, 1)])[1] is None


def test_json_round_trip(v2):
    p = 3 * var(v2, "x1") ** 2 * var(v2, "C1") - var(v2, "xs2") * var(v2, "Cs1")
    assert GradedPolynomial.from_json(p.to_json(), v2.table) == p
