"""Tests for exact radical arithmetic."""

from fractions import Fraction

import pytest

from exact_scalars import (
    ComplexRadical,
    ExtensionOverflow,
    RadicalScalar,
    ZeroInverse,
    radical_inverse,
    squarefree_decomposition,
)


def test_squarefree_decomposition():
    assert squarefree_decomposition(1) == (1, 1)
    assert squarefree_decomposition(12) == (2, 3)
    assert squarefree_decomposition(72) == (6, 2)
    with pytest.raises(ValueError):
        squarefree_decomposition(0)


def test_sqrt_is_canonical():
    assert RadicalScalar.sqrt(8).terms == {2: Fraction(2)}
    assert RadicalScalar.sqrt(4) == 2
    assert RadicalScalar.sqrt(Fraction(1, 2)).terms == {2: Fraction(1, 2)}
    assert RadicalScalar.sqrt(0).is_zero()
    with pytest.raises(ValueError):
        RadicalScalar.sqrt(-1)


def test_products_reduce_radicands():
    r2, r3, r6 = RadicalScalar.sqrt(2), RadicalScalar.sqrt(3), RadicalScalar.sqrt(6)
    assert r2 * r2 == 2
    assert r2 * r3 == r6
    assert r6 * r2 == RadicalScalar.from_terms({3: 2})
    assert (r2 + r3) * (r3 - r2) == 1


def test_sum_cancels_to_zero():
    r2 = RadicalScalar.sqrt(2)
    assert (r2 - r2).is_zero()
    assert not (r2 - r2)
    assert (r2 + 1 - 1) == r2


def test_inverse_in_quadratic_and_biquadratic_fields():
    one_plus = RadicalScalar(1) + RadicalScalar.sqrt(2)
    assert one_plus.inverse() == RadicalScalar.sqrt(2) - 1
    mixed = RadicalScalar.sqrt(2) + RadicalScalar.sqrt(3)
    assert mixed.inverse() == RadicalScalar.sqrt(3) - RadicalScalar.sqrt(2)
    assert mixed * mixed.inverse() == 1
    assert RadicalScalar(Fraction(2, 3)).inverse() == Fraction(3, 2)


def test_inverse_errors():
    with pytest.raises(ZeroInverse):
        RadicalScalar().inverse()
    with pytest.raises(ExtensionOverflow):
        radical_inverse(RadicalScalar.sqrt(2) + RadicalScalar.sqrt(3), max_dimension=2)
    with pytest.raises(ZeroInverse):
        RadicalScalar.sqrt(2) / 0


def test_division_by_radical():
    assert RadicalScalar(1) / RadicalScalar.sqrt(2) == RadicalScalar.sqrt(Fraction(1, 2))


def test_rational_values_hash_like_fractions():
    assert hash(RadicalScalar(Fraction(1, 2))) == hash(Fraction(1, 2))
    assert {RadicalScalar(3): "x"}[RadicalScalar(3)] == "x"


def test_float_and_string_forms():
    value = RadicalScalar(Fraction(1, 2)) - RadicalScalar.sqrt(3)
    assert value.to_float() == pytest.approx(0.5 - 3 ** 0.5)
    assert str(value) == "1/2 - √3"
    assert RadicalScalar.from_json(value.to_json()) == value


def test_complex_radical_arithmetic():
    i = ComplexRadical.i()
    assert i * i == -1
    assert (ComplexRadical(1, 1) * ComplexRadical(1, -1)) == 2
    assert ComplexRadical(1, 2).conjugate() == ComplexRadical(1, -2)
    assert ComplexRadical(3, 4).abs_squared() == 25
    assert ComplexRadical(1) / i == ComplexRadical(0, -1)
    assert ComplexRadical(2, 0).is_real()
    assert ComplexRadical(0, RadicalScalar.sqrt(2)).to_complex() == pytest.approx(1.4142135623730951j)
