"""
Small expression language for configuration files.

Expressions use Python syntax restricted to integer literals, + - * /,
powers (** or ^) with nonnegative integer exponents, sqrt() of a rational and
names. Three readings are supported:
- scalars (D_0 entries): the name i is the imaginary unit
- polynomials (S_0, Psi): x1, C1, B1, h1 and the starred forms xs1, Cs1, Bs1, hs1
- univariate polynomials in t (the spectral function f)
"""

import ast
import io
import re
import tokenize
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Tuple

from exact_scalars import ComplexRadical, RadicalScalar, as_radical
from graded_poly import FieldContent, GradedPolynomial


class ExpressionError(ValueError):
    """Parse or evaluation error with a 1-based source position."""

    def __init__(self, message: str, line: int = 1, column: int = 1):
        super().__init__(f"line {line}, column {column}: {message}")
        self.line = line
        self.column = column


class Univariate:
    """Polynomial in t with RadicalScalar coefficients, stored as power -> coefficient."""

    def __init__(self, coefficients: Optional[Dict[int, RadicalScalar]] = None):
        self.coefficients = {k: c for k, c in (coefficients or {}).items() if c}

    @classmethod
    def t(cls) -> "Univariate":
        return cls({1: RadicalScalar(1)})

    @staticmethod
    def _lift(value) -> "Univariate":
        if isinstance(value, Univariate):
            return value
        return Univariate({0: as_radical(value)})

    def __add__(self, other):
        other = Univariate._lift(other)
        out = dict(self.coefficients)
        for k, c in other.coefficients.items():
            out[k] = out.get(k, RadicalScalar()) + c
        return Univariate(out)

    __radd__ = __add__

    def __neg__(self):
        return Univariate({k: -c for k, c in self.coefficients.items()})

    def __sub__(self, other):
        return self + (-Univariate._lift(other))

    def __rsub__(self, other):
        return Univariate._lift(other) - self

    def __mul__(self, other):
        other = Univariate._lift(other)
        out: Dict[int, RadicalScalar] = {}
        for j, a in self.coefficients.items():
            for k, b in other.coefficients.items():
                out[j + k] = out.get(j + k, RadicalScalar()) + a * b
        return Univariate(out)

    __rmul__ = __mul__

    def scale(self, scalar: RadicalScalar) -> "Univariate":
        return Univariate({k: c * scalar for k, c in self.coefficients.items()})

    def coefficient_list(self) -> List[RadicalScalar]:
        """c_0, c_1, ..., c_deg (empty for the zero polynomial)."""
        if not self.coefficients:
            return []
        return [self.coefficients.get(k, RadicalScalar()) for k in range(max(self.coefficients) + 1)]


_VARIABLE_NAME = re.compile(r"^(x|C|B|h|xs|Cs|Bs|hs)(\d+)$")


class _SourceText:
    """
    Expression text prepared for ast.

    Every '^' token becomes '**' so it binds like a power, and the text is
    wrapped in parentheses so an expression may span several lines.
    Positions reported by ast are mapped back to the text as written.
    """

    def __init__(self, text: str):
        self.lines = str(text).splitlines() or [""]
        wrapped = "(" + "\n".join(self.lines) + "\n)"
        self.carets: Dict[int, List[int]] = {}
        try:
            for token in tokenize.generate_tokens(io.StringIO(wrapped).readline):
                if token.type == tokenize.OP and token.string == "^":
                    self.carets.setdefault(token.start[0], []).append(token.start[1])
        except (tokenize.TokenError, SyntaxError):
            # ast.parse reports the error with a position
            pass
        rows = wrapped.split("\n")
        for row, columns in self.carets.items():
            line = rows[row - 1]
            for column in reversed(columns):
                line = line[:column] + "**" + line[column + 1:]
            rows[row - 1] = line
        self.source = "\n".join(rows)

    def locate(self, line: int, offset: int) -> Tuple[int, int]:
        """1-based (line, column) in the written text for an ast line and 0-based offset."""
        if line > len(self.lines):
            return len(self.lines), len(self.lines[-1]) + 1
        line = max(line, 1)
        offset -= sum(1 for i, column in enumerate(self.carets.get(line, [])) if column + i < offset)
        if line == 1:
            offset -= 1
        return line, max(offset, 0) + 1


class _Evaluator:
    """Walks a restricted Python AST; names are resolved by a callback."""

    def __init__(self, resolve: Callable[[str, ast.AST], object]):
        self.resolve = resolve
        self.text: Optional[_SourceText] = None

    def fail(self, message: str, node: ast.AST):
        line, offset = getattr(node, "lineno", 1), getattr(node, "col_offset", 0)
        if self.text is None:
            raise ExpressionError(message, line, offset + 1)
        raise ExpressionError(message, *self.text.locate(line, offset))

    def read(self, text):
        """Parse and evaluate one expression."""
        if not str(text).strip():
            raise ExpressionError("empty expression")
        self.text = _SourceText(text)
        try:
            tree = ast.parse(self.text.source, mode="eval")
        except SyntaxError as exc:
            line, column = self.text.locate(exc.lineno or 1, (exc.offset or 1) - 1)
            raise ExpressionError(f"syntax error: {exc.msg}", line, column) from None
        return self.evaluate(tree)

    def evaluate(self, node: ast.AST):
        if isinstance(node, ast.Expression):
            return self.evaluate(node.body)
        if isinstance(node, ast.Constant):
            if isinstance(node.value, int) and not isinstance(node.value, bool):
                return RadicalScalar(node.value)
            self.fail(f"unsupported literal {node.value!r}", node)
        if isinstance(node, ast.Name):
            return self.resolve(node.id, node)
        if isinstance(node, ast.UnaryOp):
            operand = self.evaluate(node.operand)
            if isinstance(node.op, ast.USub):
                return -operand
            if isinstance(node.op, ast.UAdd):
                return operand
            self.fail("unsupported unary operator", node)
        if isinstance(node, ast.BinOp):
            return self.binary(node)
        if isinstance(node, ast.Call):
            return self.call(node)
        self.fail(f"unsupported syntax '{type(node).__name__}'", node)

    def binary(self, node: ast.BinOp):
        left = self.evaluate(node.left)
        right = self.evaluate(node.right)
        if isinstance(node.op, ast.Add):
            return left + right
        if isinstance(node.op, ast.Sub):
            return left - right
        if isinstance(node.op, ast.Mult):
            return left * right
        if isinstance(node.op, ast.Div):
            return self.divide(left, right, node)
        if isinstance(node.op, ast.Pow):
            return self.power(left, right, node)
        self.fail("unsupported binary operator", node)

    def divide(self, left, right, node: ast.AST):
        if isinstance(right, RadicalScalar):
            if right.is_zero():
                self.fail("division by zero", node)
            inverse = RadicalScalar(1) / right
            if isinstance(left, (GradedPolynomial, Univariate)):
                return left.scale(inverse)
            return left * inverse
        if isinstance(right, ComplexRadical) and isinstance(left, (RadicalScalar, ComplexRadical)):
            if right.is_zero():
                self.fail("division by zero", node)
            return ComplexRadical(left) / right if isinstance(left, RadicalScalar) else left / right
        self.fail("only division by a nonzero constant is supported", node)

    def power(self, base, exponent, node: ast.AST):
        if not isinstance(exponent, RadicalScalar) or not exponent.is_rational():
            self.fail("exponent must be an integer constant", node)
        value = exponent.rational_part
        if value.denominator != 1 or value < 0:
            self.fail("exponent must be a nonnegative integer", node)
        result = None
        for _ in range(int(value)):
            result = base if result is None else result * base
        return RadicalScalar(1) if result is None else result

    def call(self, node: ast.Call):
        if not isinstance(node.func, ast.Name) or node.func.id != "sqrt" or len(node.args) != 1 or node.keywords:
            self.fail("only sqrt(<rational>) calls are supported", node)
        argument = self.evaluate(node.args[0])
        if not isinstance(argument, RadicalScalar) or not argument.is_rational() or argument.rational_part < 0:
            self.fail("sqrt takes a nonnegative rational constant", node)
        return RadicalScalar.sqrt(argument.rational_part)


def parse_scalar(text) -> ComplexRadical:
    """Read a complex radical constant, e.g. '1/2 + sqrt(3)*i'."""
    if isinstance(text, (int, Fraction)):
        return ComplexRadical(text)

    def resolve(name: str, node: ast.AST):
        if name == "i":
            return ComplexRadical.i()
        evaluator.fail(f"unknown name '{name}' in a scalar", node)

    evaluator = _Evaluator(resolve)
    value = evaluator.read(text)
    if isinstance(value, RadicalScalar):
        return ComplexRadical(value)
    return value


def parse_polynomial(text: str, variables: FieldContent) -> GradedPolynomial:
    """Read a graded polynomial; names must exist in the given FieldContent."""

    def resolve(name: str, node: ast.AST):
        match = _VARIABLE_NAME.match(name)
        if not match:
            evaluator.fail(f"unknown name '{name}'", node)
        try:
            return GradedPolynomial.variable(variables.lookup(name))
        except KeyError:
            evaluator.fail(f"variable '{name}' does not exist for n={variables.n}", node)

    evaluator = _Evaluator(resolve)
    value = evaluator.read(text)
    if isinstance(value, RadicalScalar):
        return GradedPolynomial.constant(value)
    if not isinstance(value, GradedPolynomial):
        raise ExpressionError("expression is not a real polynomial")
    return value


def parse_univariate(text) -> List[RadicalScalar]:
    """Coefficients c_0..c_d of a polynomial in t, e.g. 't^4 - 2*t^2' -> [0, 0, -2, 0, 1]."""

    def resolve(name: str, node: ast.AST):
        if name == "t":
            return Univariate.t()
        evaluator.fail(f"unknown name '{name}'; the spectral function uses t", node)

    evaluator = _Evaluator(resolve)
    value = evaluator.read(text)
    return Univariate._lift(value).coefficient_list()
