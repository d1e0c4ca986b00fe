"""Tests for the configuration expression language."""

from fractions import Fraction

import pytest

from exact_scalars import ComplexRadical, RadicalScalar
from expressions import ExpressionError, parse_polynomial, parse_scalar, parse_univariate
from graded_poly import FieldContent, GradedPolynomial


@pytest.fixture(scope="module")
def v2():
    return FieldContent(2, auxiliary=True)


def test_scalars():
    assert parse_scalar("1/2 + sqrt(3)*i") == ComplexRadical(Fraction(1, 2), RadicalScalar.sqrt(3))
    assert parse_scalar("i*i") == -1
    assert parse_scalar("1/i") == ComplexRadical(0, -1)
    assert parse_scalar(5) == 5
    assert parse_scalar("-(2^3)") == -8


def test_univariate():
    assert parse_univariate("t^4 - 2*t^2") == [0, 0, -2, 0, 1]
    assert parse_univariate("(t + 1)**2") == [1, 2, 1]
    assert parse_univariate("t/2") == [0, Fraction(1, 2)]
    assert parse_univariate("3") == [3]
    assert parse_univariate("t - t") == []


def test_polynomials(v2):
    x1 = GradedPolynomial.variable(v2.lookup("x1"))
    c1 = GradedPolynomial.variable(v2.lookup("C1"))
    assert parse_polynomial("x1*C1", v2) == x1 * c1
    assert parse_polynomial("x1^2/2 - 1", v2) == (x1 * x1).scale(Fraction(1, 2)) - 1
    assert parse_polynomial("C1*C1", v2).is_zero()
    assert parse_polynomial("B1*x1 + B2*x2", v2).ghost_degree == -1
    assert parse_polynomial("xs1*Cs2", v2).has_starred()
    assert parse_polynomial("7", v2) == 7


def test_caret_binds_like_power(v2):
    x1 = GradedPolynomial.variable(v2.lookup("x1"))
    assert parse_polynomial("2*x1^2", v2) == 2 * x1 * x1
    assert parse_polynomial("-x1^2", v2) == -(x1 * x1)
    assert parse_univariate("2*t^2") == [0, 0, 2]
    assert parse_univariate("t^2*3 + t") == [0, 1, 3]
    assert parse_scalar("2^3^2") == 512
    assert parse_scalar("2^3^2") == parse_scalar("2**3**2")


def test_multiline_expressions(v2):
    b1x1 = GradedPolynomial.variable(v2.lookup("B1")) * GradedPolynomial.variable(v2.lookup("x1"))
    b2x2 = GradedPolynomial.variable(v2.lookup("B2")) * GradedPolynomial.variable(v2.lookup("x2"))
    assert parse_polynomial("B1*x1 +\n  B2*x2\n", v2) == b1x1 + b2x2


def test_multiline_error_positions(v2):
    with pytest.raises(ExpressionError) as info:
        parse_polynomial("B1*x1 +\n  foo", v2)
    assert (info.value.line, info.value.column) == (2, 3)


def test_error_columns_after_caret(v2):
    with pytest.raises(ExpressionError) as info:
        parse_polynomial("x1^2 + foo", v2)
    assert (info.value.line, info.value.column) == (1, 8)


def test_error_positions(v2):
    with pytest.raises(ExpressionError) as info:
        parse_polynomial("x1 + foo", v2)
    assert info.value.line == 1
    assert info.value.column == 6
    assert str(info.value).startswith("line 1, column 6:")


@pytest.mark.parametrize("text", [
    "x1 +",
    "x1/x2",
    "x1**-1",
    "x1**x2",
    "sqrt(x1)",
    "sqrt(-2)",
    "1.5*x1",
    "x1/0",
    "x9",
    "print(x1)",
    "",
])
def test_rejected_polynomials(text, v2):
    with pytest.raises(ExpressionError):
        parse_polynomial(text, v2)


def test_auxiliary_names_need_auxiliary_content():
    with pytest.raises(ExpressionError):
        parse_polynomial("B1*x1", FieldContent(2))


def test_scalar_rejects_fields():
    with pytest.raises(ExpressionError):
        parse_scalar("x1")


def test_univariate_rejects_other_names():
    with pytest.raises(ExpressionError):
        parse_univariate("x^2")
