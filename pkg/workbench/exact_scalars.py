"""
Exact scalar arithmetic over the rationals extended by square roots.

This module provides:
- RadicalScalar: values of the form sum(q_m * sqrt(m)) with rational q_m and squarefree m
- ComplexRadical: Gaussian pairs of RadicalScalars used for matrix entries
- Inversion inside the finite extension generated by the radicands of a value
"""

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations
from types import MappingProxyType
from typing import Dict, List, Mapping, Tuple, Union

import sympy
from sympy.ntheory import factorint, primefactors

from utils import logger

Rational = Union[int, Fraction]

DEFAULT_EXTENSION_BOUND = 64


class ZeroInverse(ZeroDivisionError):
    """Raised when inverting the zero scalar."""


class ExtensionOverflow(ArithmeticError):
    """Raised when an inversion needs an extension larger than the configured bound."""


@lru_cache(maxsize=4096)
def squarefree_decomposition(k: int) -> Tuple[int, int]:
    """
    Split a positive integer into an outer square and a squarefree core.

    Args:
        k: Positive integer

    Returns:
        Pair (c, m) with k = c**2 * m and m squarefree
    """
    if k < 1:
        raise ValueError(f"Radicand must be a positive integer, got {k}")
    outer, core = 1, 1
    for prime, exponent in factorint(k).items():
        outer *= prime ** (exponent // 2)
        if exponent % 2:
            core *= prime
    return outer, core


class RadicalScalar:
    """
    Exact real number sum(q_m * sqrt(m)) over squarefree radicands m.

    Instances are immutable. The canonical form stores only nonzero
    coefficients, keyed by squarefree radicands; key 1 is the rational part.
    """

    __slots__ = ("_terms",)

    def __init__(self, value: Rational = 0):
        q = Fraction(value)
        self._terms: Dict[int, Fraction] = {1: q} if q else {}

    @classmethod
    def _canonical(cls, terms: Dict[int, Fraction]) -> "RadicalScalar":
        scalar = cls.__new__(cls)
        scalar._terms = terms
        return scalar

    @classmethod
    def from_terms(cls, terms: Mapping[int, Rational]) -> "RadicalScalar":
        """
        Build a scalar from arbitrary positive radicands, reducing to canonical form.

        Args:
            terms: Map radicand -> rational coefficient

        Returns:
            Canonical RadicalScalar
        """
        out: Dict[int, Fraction] = {}
        for radicand, coefficient in terms.items():
            outer, core = squarefree_decomposition(int(radicand))
            value = out.get(core, Fraction(0)) + Fraction(coefficient) * outer
            if value:
                out[core] = value
            else:
                out.pop(core, None)
        return cls._canonical(out)

    @classmethod
    def sqrt(cls, value: Rational) -> "RadicalScalar":
        """Exact square root of a nonnegative rational, sqrt(p/q) = sqrt(p*q)/q."""
        q = Fraction(value)
        if q < 0:
            raise ValueError(f"Square root of negative rational {q} is not real")
        if q == 0:
            return cls()
        return cls.from_terms({q.numerator * q.denominator: Fraction(1, q.denominator)})

    @property
    def terms(self) -> Mapping[int, Fraction]:
        return MappingProxyType(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def is_rational(self) -> bool:
        return not self._terms or (len(self._terms) == 1 and 1 in self._terms)

    @property
    def rational_part(self) -> Fraction:
        return self._terms.get(1, Fraction(0))

    def radicands(self) -> List[int]:
        return sorted(self._terms)

    # Arithmetic

    def __add__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for radicand, coefficient in other._terms.items():
            value = out.get(radicand, Fraction(0)) + coefficient
            if value:
                out[radicand] = value
            else:
                out.pop(radicand, None)
        return RadicalScalar._canonical(out)

    __radd__ = __add__

    def __neg__(self):
        return RadicalScalar._canonical({m: -q for m, q in self._terms.items()})

    def __sub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return radical_mul(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            if other == 0:
                raise ZeroInverse("Division of a radical scalar by zero")
            inverse = Fraction(1) / Fraction(other)
            return RadicalScalar._canonical({m: q * inverse for m, q in self._terms.items()})
        if isinstance(other, RadicalScalar):
            return radical_mul(self, radical_inverse(other))
        return NotImplemented

    def inverse(self, max_dimension: int = DEFAULT_EXTENSION_BOUND) -> "RadicalScalar":
        return radical_inverse(self, max_dimension)

    # Comparison and hashing

    def __eq__(self, other):
        other = _coerce(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        if self.is_rational():
            return hash(self.rational_part)
        return hash(frozenset(self._terms.items()))

    def __bool__(self):
        return bool(self._terms)

    # Conversion

    def to_float(self) -> float:
        """Floating value of the scalar; only used by explicit float fallbacks."""
        return math.fsum(float(q) * math.sqrt(m) for m, q in self._terms.items())

    __float__ = to_float

    def to_json(self) -> Dict[str, list]:
        return {"terms": [[m, _fraction_text(q)] for m, q in sorted(self._terms.items())]}

    @classmethod
    def from_json(cls, payload: Mapping) -> "RadicalScalar":
        return cls.from_terms({int(m): Fraction(q) for m, q in payload["terms"]})

    def __repr__(self):
        return f"RadicalScalar({str(self)})"

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for radicand, coefficient in sorted(self._terms.items()):
            if radicand == 1:
                parts.append(_fraction_text(coefficient))
            elif coefficient == 1:
                parts.append(f"√{radicand}")
            elif coefficient == -1:
                parts.append(f"-√{radicand}")
            else:
                parts.append(f"{_fraction_text(coefficient)}√{radicand}")
        return " + ".join(parts).replace("+ -", "- ")


def _fraction_text(q: Fraction) -> str:
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _coerce(value) -> "RadicalScalar":
    if isinstance(value, RadicalScalar):
        return value
    if isinstance(value, (int, Fraction)) and not isinstance(value, bool):
        return RadicalScalar(value)
    return NotImplemented


def radical_mul(a: RadicalScalar, b: RadicalScalar) -> RadicalScalar:
    """
    Canonical product of two radical scalars.

    sqrt(m1) * sqrt(m2) = g * sqrt(m1 * m2 / g**2) with g = gcd(m1, m2); the
    quotient is squarefree because both radicands are.

    Args:
        a: Left factor
        b: Right factor

    Returns:
        Canonical product
    """
    if not a._terms or not b._terms:
        return RadicalScalar()
    out: Dict[int, Fraction] = {}
    for m1, q1 in a._terms.items():
        for m2, q2 in b._terms.items():
            g = math.gcd(m1, m2)
            core = (m1 // g) * (m2 // g)
            value = out.get(core, Fraction(0)) + q1 * q2 * g
            if value:
                out[core] = value
            else:
                out.pop(core, None)
    return RadicalScalar._canonical(out)


def radical_inverse(a: RadicalScalar, max_dimension: int = DEFAULT_EXTENSION_BOUND) -> RadicalScalar:
    """
    Exact inverse of a nonzero radical scalar.

    The inverse lies in Q(sqrt(p) : p prime dividing a radicand of a). The
    multiplication-by-a map on the basis of squarefree products of those primes
    is solved as a linear system over Q.

    Args:
        a: Nonzero scalar
        max_dimension: Largest extension degree accepted

    Returns:
        Scalar b with a * b = 1

    Raises:
        ZeroInverse: If a is zero
        ExtensionOverflow: If the extension degree exceeds max_dimension
    """
    if a.is_zero():
        raise ZeroInverse("Cannot invert the zero scalar")
    if a.is_rational():
        return RadicalScalar(1 / a.rational_part)

    primes = sorted({p for radicand in a._terms for p in primefactors(radicand)})
    dimension = 2 ** len(primes)
    if dimension > max_dimension:
        raise ExtensionOverflow(
            f"Inverting {a} needs an extension of degree {dimension} > bound {max_dimension}"
        )

    basis = sorted(
        math.prod(subset) for size in range(len(primes) + 1) for subset in combinations(primes, size)
    )
    position = {radicand: i for i, radicand in enumerate(basis)}

    system = sympy.zeros(dimension, dimension)
    for column, radicand in enumerate(basis):
        image = radical_mul(a, RadicalScalar._canonical({radicand: Fraction(1)}))
        for m, q in image._terms.items():
            system[position[m], column] = sympy.Rational(q.numerator, q.denominator)
    rhs = sympy.zeros(dimension, 1)
    rhs[position[1], 0] = 1

    solution = system.LUsolve(rhs)
    terms = {}
    for radicand, entry in zip(basis, solution):
        value = sympy.Rational(entry)
        if value != 0:
            terms[radicand] = Fraction(int(value.p), int(value.q))
    logger.debug(f"Inverted {a} inside an extension of degree {dimension}")
    return RadicalScalar._canonical(terms)


def as_radical(value) -> RadicalScalar:
    """Coerce ints, Fractions and RadicalScalars to RadicalScalar."""
    coerced = _coerce(value)
    if coerced is NotImplemented:
        raise TypeError(f"Cannot interpret {value!r} as an exact scalar")
    return coerced


@dataclass(frozen=True, eq=False)
class ComplexRadical:
    """Gaussian pair re + i*im of radical scalars."""

    re: RadicalScalar
    im: RadicalScalar

    def __init__(self, re=0, im=0):
        object.__setattr__(self, "re", as_radical(re))
        object.__setattr__(self, "im", as_radical(im))

    @classmethod
    def i(cls) -> "ComplexRadical":
        return cls(0, 1)

    def is_zero(self) -> bool:
        return self.re.is_zero() and self.im.is_zero()

    def is_real(self) -> bool:
        return self.im.is_zero()

    def conjugate(self) -> "ComplexRadical":
        return ComplexRadical(self.re, -self.im)

    def abs_squared(self) -> RadicalScalar:
        return self.re * self.re + self.im * self.im

    def __add__(self, other):
        other = _coerce_complex(other)
        if other is NotImplemented:
            return NotImplemented
        return ComplexRadical(self.re + other.re, self.im + other.im)

    __radd__ = __add__

    def __neg__(self):
        return ComplexRadical(-self.re, -self.im)

    def __sub__(self, other):
        other = _coerce_complex(other)
        if other is NotImplemented:
            return NotImplemented
        return ComplexRadical(self.re - other.re, self.im - other.im)

    def __rsub__(self, other):
        other = _coerce_complex(other)
        if other is NotImplemented:
            return NotImplemented
        return other - self

    def __mul__(self, other):
        other = _coerce_complex(other)
        if other is NotImplemented:
            return NotImplemented
        return ComplexRadical(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction, RadicalScalar)):
            return ComplexRadical(self.re / other, self.im / other)
        other = _coerce_complex(other)
        if other is NotImplemented:
            return NotImplemented
        norm = other.abs_squared()
        return (self * other.conjugate()) / norm

    def __eq__(self, other):
        other = _coerce_complex(other)
        if other is NotImplemented:
            return NotImplemented
        return self.re == other.re and self.im == other.im

    def __hash__(self):
        return hash((self.re, self.im))

    def __bool__(self):
        return not self.is_zero()

    def to_complex(self) -> complex:
        return complex(self.re.to_float(), self.im.to_float())

    def to_json(self) -> Dict[str, dict]:
        return {"re": self.re.to_json(), "im": self.im.to_json()}

    @classmethod
    def from_json(cls, payload: Mapping) -> "ComplexRadical":
        return cls(RadicalScalar.from_json(payload["re"]), RadicalScalar.from_json(payload["im"]))

    def __repr__(self):
        return f"ComplexRadical({self})"

    def __str__(self):
        if self.im.is_zero():
            return str(self.re)
        if self.re.is_zero():
            return f"({self.im})i"
        return f"{self.re} + ({self.im})i"


def _coerce_complex(value) -> ComplexRadical:
    if isinstance(value, ComplexRadical):
        return value
    real = _coerce(value)
    if real is NotImplemented:
        return NotImplemented
    return ComplexRadical(real, 0)
