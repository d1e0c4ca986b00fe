"""
Graded-commutative polynomial algebra over fields, ghosts and their antifields.

This module provides:
- GradedVariable and FieldContent: the generators of a BV theory with degrees and pairings
- Monomial normal ordering with Koszul signs
- GradedPolynomial arithmetic with exact RadicalScalar coefficients
- Left/right derivatives, the antibracket and the BV Laplacian

Sign conventions (fixed once, used everywhere):
- left derivative: move the variable to the leftmost slot, then strike it
- right derivative: move the variable to the rightmost slot, then strike it
- {F, G} = sum_i [ (F d_R/d phi*_i)(d_L/d phi_i G) - (F d_R/d phi_i)(d_L/d phi*_i G) ],
  so that {x*, x} = 1 and {x, x*} = -1
- Delta = sum_i (-1)^(eps_i + 1) d_L/d phi_i d_L/d phi*_i, so that Delta(x_1 x*_1) = -1
"""

from dataclasses import dataclass, field
from fractions import Fraction
from enum import IntEnum
from types import MappingProxyType
from typing import Callable, Dict, Iterable, Iterator, List, Mapping, Optional, Tuple, Union

from exact_scalars import RadicalScalar, as_radical
from utils import logger

Scalar = Union[int, Fraction, RadicalScalar]


class VariableKind(IntEnum):
    """Kinds of generators; the integer value is the block rank of the global variable order."""

    FIELD = 0
    GHOST = 1
    ANTIFIELD = 2
    ANTIGHOST = 3
    AUX_B = 4
    AUX_H = 5
    AUX_B_STAR = 6
    AUX_H_STAR = 7

    @property
    def prefix(self) -> str:
        return _PREFIXES[self]

    @property
    def is_starred(self) -> bool:
        return self in _STARRED

    @property
    def partner(self) -> "VariableKind":
        return _PARTNERS[self]


_PREFIXES = {
    VariableKind.FIELD: "x",
    VariableKind.GHOST: "C",
    VariableKind.ANTIFIELD: "xs",
    VariableKind.ANTIGHOST: "Cs",
    VariableKind.AUX_B: "B",
    VariableKind.AUX_H: "h",
    VariableKind.AUX_B_STAR: "Bs",
    VariableKind.AUX_H_STAR: "hs",
}

_STARRED = frozenset({
    VariableKind.ANTIFIELD,
    VariableKind.ANTIGHOST,
    VariableKind.AUX_B_STAR,
    VariableKind.AUX_H_STAR,
})

_PARTNERS = {
    VariableKind.FIELD: VariableKind.ANTIFIELD,
    VariableKind.ANTIFIELD: VariableKind.FIELD,
    VariableKind.GHOST: VariableKind.ANTIGHOST,
    VariableKind.ANTIGHOST: VariableKind.GHOST,
    VariableKind.AUX_B: VariableKind.AUX_B_STAR,
    VariableKind.AUX_B_STAR: VariableKind.AUX_B,
    VariableKind.AUX_H: VariableKind.AUX_H_STAR,
    VariableKind.AUX_H_STAR: VariableKind.AUX_H,
}


@dataclass(frozen=True)
class GradedVariable:
    """
    A graded generator: parity is ghost_degree mod 2.

    Equality and hashing use (kind, index, ghost_degree); ordering in monomials
    uses `key`, i.e. the kind block first and the index second.
    """

    kind: VariableKind
    index: int
    ghost_degree: int
    key: Tuple[int, int] = field(init=False, repr=False, compare=False)
    odd: bool = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "key", (int(self.kind), self.index))
        object.__setattr__(self, "odd", self.ghost_degree % 2 == 1)

    @property
    def id(self) -> str:
        return f"{self.kind.prefix}{self.index}"

    @property
    def parity(self) -> int:
        return self.ghost_degree % 2

    @property
    def is_starred(self) -> bool:
        return self.kind.is_starred

    @property
    def partner(self) -> str:
        return self.conjugate().id

    def conjugate(self) -> "GradedVariable":
        """The antibracket partner, with degree -deg - 1."""
        return GradedVariable(self.kind.partner, self.index, -self.ghost_degree - 1)

    def __str__(self):
        base = self.kind.prefix.rstrip("s") if self.is_starred else self.kind.prefix
        return f"{base}{self.index}*" if self.is_starred else f"{base}{self.index}"

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "kind": self.kind.name.lower(),
            "index": self.index,
            "ghost_degree": self.ghost_degree,
            "parity": self.parity,
            "partner": self.partner,
        }


Factors = Tuple[Tuple[GradedVariable, int], ...]


class Monomial:
    """
    Normal-ordered product of generators.

    Factors are sorted by variable key; odd variables carry exponent 1.
    Construct through `Monomial.from_factors` when the input is not known
    to be normal-ordered.
    """

    __slots__ = ("factors", "ghost_degree", "degree", "parity", "_hash")

    def __init__(self, factors: Factors = ()):
        self.factors = tuple(factors)
        self.ghost_degree = sum(var.ghost_degree * exp for var, exp in self.factors)
        self.degree = sum(exp for _, exp in self.factors)
        self.parity = sum(exp for var, exp in self.factors if var.odd) % 2
        self._hash = hash(self.factors)

    @classmethod
    def from_factors(cls, pairs: Iterable[Tuple[GradedVariable, int]]) -> Tuple[int, Optional["Monomial"]]:
        """
        Normal-order an arbitrary product, collecting the Koszul sign.

        Returns:
            (sign, monomial); monomial is None when an odd variable repeats
        """
        sign, monomial = 1, cls()
        for var, exp in pairs:
            if exp <= 0:
                continue
            if var.odd and exp > 1:
                return 1, None
            factor_sign, monomial = _merge(monomial, cls(((var, exp),)))
            if monomial is None:
                return 1, None
            sign *= factor_sign
        return sign, monomial

    def variables(self) -> List[GradedVariable]:
        return [var for var, _ in self.factors]

    def expanded(self) -> List[GradedVariable]:
        """Factors with exponents unrolled, e.g. x1^2 C1 -> [x1, x1, C1]."""
        return [var for var, exp in self.factors for _ in range(exp)]

    def exponent(self, var: GradedVariable) -> int:
        for candidate, exp in self.factors:
            if candidate == var:
                return exp
        return 0

    @property
    def sort_key(self):
        return (self.degree, tuple((var.key, exp) for var, exp in self.factors))

    def __eq__(self, other):
        return isinstance(other, Monomial) and self.factors == other.factors

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.sort_key < other.sort_key

    def __str__(self):
        if not self.factors:
            return "1"
        return "·".join(f"{var}^{exp}" if exp > 1 else str(var) for var, exp in self.factors)

    __repr__ = __str__

    def to_json(self) -> list:
        return [[var.id, exp] for var, exp in self.factors]


def _merge(a: Monomial, b: Monomial) -> Tuple[int, Optional[Monomial]]:
    """Product a*b of two normal-ordered monomials."""
    if not a.factors:
        return 1, b
    if not b.factors:
        return 1, a
    fa, fb = a.factors, b.factors
    odd_left = sum(1 for var, _ in fa if var.odd)
    out: List[Tuple[GradedVariable, int]] = []
    sign = 1
    i = j = 0
    while i < len(fa) and j < len(fb):
        va, ea = fa[i]
        vb, eb = fb[j]
        if va.key < vb.key:
            out.append(fa[i])
            if va.odd:
                odd_left -= 1
            i += 1
        elif vb.key < va.key:
            # vb passes every remaining odd factor of a
            if vb.odd and odd_left % 2:
                sign = -sign
            out.append(fb[j])
            j += 1
        else:
            if va.odd:
                return 1, None
            out.append((va, ea + eb))
            i += 1
            j += 1
    out.extend(fa[i:])
    out.extend(fb[j:])
    return sign, Monomial(tuple(out))


ONE = Monomial()


class GradedPolynomial:
    """
    Exact polynomial in graded variables with RadicalScalar coefficients.

    Instances are immutable; zero coefficients are never stored.
    """

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Monomial, Scalar]] = None):
        clean: Dict[Monomial, RadicalScalar] = {}
        for monomial, coefficient in (terms or {}).items():
            coefficient = as_radical(coefficient)
            if coefficient:
                clean[monomial] = coefficient
        self._terms = clean

    @classmethod
    def _wrap(cls, terms: Dict[Monomial, RadicalScalar]) -> "GradedPolynomial":
        poly = cls.__new__(cls)
        poly._terms = {m: c for m, c in terms.items() if c}
        return poly

    @classmethod
    def constant(cls, value: Scalar) -> "GradedPolynomial":
        return cls({ONE: value})

    @classmethod
    def variable(cls, var: GradedVariable) -> "GradedPolynomial":
        return cls({Monomial(((var, 1),)): 1})

    @classmethod
    def monomial(cls, monomial: Monomial, coefficient: Scalar = 1) -> "GradedPolynomial":
        return cls({monomial: coefficient})

    @classmethod
    def product(cls, variables: Iterable[GradedVariable], coefficient: Scalar = 1) -> "GradedPolynomial":
        """Ordered product of variables, normal-ordered with its Koszul sign."""
        sign, monomial = Monomial.from_factors((var, 1) for var in variables)
        if monomial is None:
            return cls()
        return cls({monomial: as_radical(coefficient) * sign})

    @classmethod
    def zero(cls) -> "GradedPolynomial":
        return cls()

    @property
    def terms(self) -> Mapping[Monomial, RadicalScalar]:
        return MappingProxyType(self._terms)

    def items(self) -> Iterator[Tuple[Monomial, RadicalScalar]]:
        return iter(self._terms.items())

    def sorted_items(self) -> List[Tuple[Monomial, RadicalScalar]]:
        return sorted(self._terms.items(), key=lambda item: item[0].sort_key)

    def __len__(self):
        return len(self._terms)

    def is_zero(self) -> bool:
        return not self._terms

    def __bool__(self):
        return bool(self._terms)

    # Arithmetic

    def __add__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        out = dict(self._terms)
        for monomial, coefficient in other._terms.items():
            out[monomial] = out[monomial] + coefficient if monomial in out else coefficient
        return GradedPolynomial._wrap(out)

    __radd__ = __add__

    def __neg__(self):
        return GradedPolynomial._wrap({m: -c for m, c in self._terms.items()})

    def __sub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self + (-other)

    def __rsub__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return other + (-self)

    def __mul__(self, other):
        if isinstance(other, GradedPolynomial):
            return multiply(self, other)
        try:
            scalar = as_radical(other)
        except TypeError:
            return NotImplemented
        return self.scale(scalar)

    def __rmul__(self, other):
        # scalars are even, so left and right scaling agree
        try:
            scalar = as_radical(other)
        except TypeError:
            return NotImplemented
        return self.scale(scalar)

    def __pow__(self, exponent: int):
        if not isinstance(exponent, int) or exponent < 0:
            raise ValueError(f"Polynomial exponent must be a nonnegative integer, got {exponent!r}")
        result = GradedPolynomial.constant(1)
        for _ in range(exponent):
            result = multiply(result, self)
        return result

    def scale(self, scalar: Scalar) -> "GradedPolynomial":
        scalar = as_radical(scalar)
        if not scalar:
            return GradedPolynomial()
        return GradedPolynomial._wrap({m: c * scalar for m, c in self._terms.items()})

    def __eq__(self, other):
        other = _coerce_poly(other)
        if other is NotImplemented:
            return NotImplemented
        return self._terms == other._terms

    def __hash__(self):
        return hash(frozenset(self._terms.items()))

    # Degree queries

    def ghost_degrees(self) -> List[int]:
        return sorted({m.ghost_degree for m in self._terms})

    def is_homogeneous(self) -> bool:
        return len(self.ghost_degrees()) <= 1

    @property
    def ghost_degree(self) -> int:
        """Ghost degree of a homogeneous polynomial (0 for the zero polynomial)."""
        degrees = self.ghost_degrees()
        if len(degrees) > 1:
            raise ValueError(f"Polynomial is not homogeneous: ghost degrees {degrees}")
        return degrees[0] if degrees else 0

    @property
    def parity(self) -> int:
        return self.ghost_degree % 2

    def homogeneous_part(self, k: int) -> "GradedPolynomial":
        return self.filter(lambda m: m.ghost_degree == k)

    def poly_degree(self) -> int:
        return max((m.degree for m in self._terms), default=0)

    def variables(self) -> List[GradedVariable]:
        found = {var for m in self._terms for var in m.variables()}
        return sorted(found, key=lambda var: var.key)

    def has_starred(self) -> bool:
        return any(var.is_starred for m in self._terms for var in m.variables())

    def filter(self, predicate: Callable[[Monomial], bool]) -> "GradedPolynomial":
        return GradedPolynomial._wrap({m: c for m, c in self._terms.items() if predicate(m)})

    def without_kinds(self, kinds: Iterable[VariableKind]) -> "GradedPolynomial":
        """Drop every term that contains a variable of one of the given kinds."""
        excluded = set(kinds)
        return self.filter(lambda m: not any(var.kind in excluded for var in m.variables()))

    def substitute(self, mapping: Mapping[GradedVariable, "GradedPolynomial"]) -> "GradedPolynomial":
        """
        Simultaneous substitution of variables by polynomials.

        Each substituted polynomial takes the position of its variable in the
        normal-ordered monomial, so Grassmann signs follow the original order.
        """
        result = GradedPolynomial()
        for monomial, coefficient in self._terms.items():
            term = GradedPolynomial.constant(coefficient)
            for var, exp in monomial.factors:
                image = mapping.get(var)
                if image is None:
                    image = GradedPolynomial.variable(var)
                for _ in range(exp):
                    term = multiply(term, image)
                if not term:
                    break
            result = result + term
        return result

    def to_json(self) -> list:
        return [
            {"coeff": coefficient.to_json(), "monomial": monomial.to_json()}
            for monomial, coefficient in self.sorted_items()
        ]

    @classmethod
    def from_json(cls, payload: list, table: Mapping[str, GradedVariable]) -> "GradedPolynomial":
        result = cls()
        for entry in payload:
            sign, monomial = Monomial.from_factors((table[var_id], exp) for var_id, exp in entry["monomial"])
            if monomial is not None:
                result = result + cls({monomial: RadicalScalar.from_json(entry["coeff"]) * sign})
        return result

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for monomial, coefficient in self.sorted_items():
            if not monomial.factors:
                parts.append(f"({coefficient})")
            elif coefficient == 1:
                parts.append(str(monomial))
            else:
                parts.append(f"({coefficient})·{monomial}")
        return " + ".join(parts)

    def __repr__(self):
        return f"GradedPolynomial({self})"


def _coerce_poly(value):
    if isinstance(value, GradedPolynomial):
        return value
    try:
        return GradedPolynomial.constant(as_radical(value))
    except TypeError:
        return NotImplemented


def multiply(a: GradedPolynomial, b: GradedPolynomial) -> GradedPolynomial:
    """
    Graded-commutative product with Koszul signs.

    Args:
        a: Left factor
        b: Right factor

    Returns:
        Normal-ordered product; squares of odd variables vanish
    """
    if not a._terms or not b._terms:
        return GradedPolynomial()
    out: Dict[Monomial, RadicalScalar] = {}
    for ma, ca in a._terms.items():
        for mb, cb in b._terms.items():
            sign, monomial = _merge(ma, mb)
            if monomial is None:
                continue
            value = ca * cb
            if sign < 0:
                value = -value
            out[monomial] = out[monomial] + value if monomial in out else value
    return GradedPolynomial._wrap(out)


def _strike(monomial: Monomial, position: int) -> Monomial:
    var, exp = monomial.factors[position]
    head = monomial.factors[:position]
    tail = monomial.factors[position + 1:]
    middle = ((var, exp - 1),) if exp > 1 else ()
    return Monomial(head + middle + tail)


def _derivative(p: GradedPolynomial, v: GradedVariable, from_left: bool) -> GradedPolynomial:
    out: Dict[Monomial, RadicalScalar] = {}
    for monomial, coefficient in p._terms.items():
        factors = monomial.factors
        for position, (var, exp) in enumerate(factors):
            if var != v:
                continue
            if var.odd:
                passed = factors[:position] if from_left else factors[position + 1:]
                odd_passed = sum(1 for other, _ in passed if other.odd)
                factor = -1 if odd_passed % 2 else 1
            else:
                factor = exp
            reduced = _strike(monomial, position)
            value = coefficient * factor
            out[reduced] = out[reduced] + value if reduced in out else value
            break
    return GradedPolynomial._wrap(out)


def left_derivative(p: GradedPolynomial, v: GradedVariable) -> GradedPolynomial:
    """
    Left derivative: anticommute v to the leftmost slot, then strike it.

    Args:
        p: Polynomial
        v: Variable

    Returns:
        d_L p / d v (zero if v is absent)
    """
    return _derivative(p, v, from_left=True)


def right_derivative(p: GradedPolynomial, v: GradedVariable) -> GradedPolynomial:
    """Right derivative: anticommute v to the rightmost slot, then strike it."""
    return _derivative(p, v, from_left=False)


def antibracket(f: GradedPolynomial, g: GradedPolynomial) -> GradedPolynomial:
    """
    The degree +1 antibracket of two polynomials.

    Reproduces {x*_i, x_j} = delta_ij on generators and is a graded biderivation.

    Args:
        f: Left argument
        g: Right argument

    Returns:
        {f, g}
    """
    if not f._terms or not g._terms:
        return GradedPolynomial()
    in_g = set(g.variables())
    result = GradedPolynomial()
    for var in f.variables():
        partner = var.conjugate()
        if partner not in in_g:
            continue
        term = multiply(right_derivative(f, var), left_derivative(g, partner))
        result = result + term if var.is_starred else result - term
    return result


def bv_laplacian(f: GradedPolynomial) -> GradedPolynomial:
    """
    BV Laplacian sum_i (-1)^(eps_i + 1) d_L/d phi_i d_L/d phi*_i.

    Only conjugate pairs present in f contribute. The operator is odd,
    raises ghost degree by one and squares to zero.
    """
    result = GradedPolynomial()
    present = set(f.variables())
    for starred in (var for var in present if var.is_starred):
        unstarred = starred.conjugate()
        if unstarred not in present:
            continue
        term = left_derivative(left_derivative(f, starred), unstarred)
        result = result - term if unstarred.parity == 0 else result + term
    return result


class FieldContent:
    """
    The generators of a U(n) BV theory.

    Fields x_1..x_{n^2} (degree 0), ghosts C_1..C_{n^2-1} (degree 1), their
    antifields, and optionally the auxiliary pairs (B_q, h_q) of degrees
    (-1, 0) with antifields.
    """

    def __init__(self, n: int, auxiliary: bool = False):
        self.n = n
        self.auxiliary = auxiliary
        dim, su_dim = n * n, n * n - 1

        def family(kind: VariableKind, size: int, degree: int) -> Dict[int, GradedVariable]:
            return {i: GradedVariable(kind, i, degree) for i in range(1, size + 1)}

        self.x = family(VariableKind.FIELD, dim, 0)
        self.xs = family(VariableKind.ANTIFIELD, dim, -1)
        self.C = family(VariableKind.GHOST, su_dim, 1)
        self.Cs = family(VariableKind.ANTIGHOST, su_dim, -2)
        size = su_dim if auxiliary else 0
        self.B = family(VariableKind.AUX_B, size, -1)
        self.h = family(VariableKind.AUX_H, size, 0)
        self.Bs = family(VariableKind.AUX_B_STAR, size, 0)
        self.hs = family(VariableKind.AUX_H_STAR, size, -1)
        self._by_id = {var.id: var for var in self.all()}
        logger.debug(f"Allocated {len(self._by_id)} generators for n={n} (auxiliary={auxiliary})")

    def with_auxiliary(self) -> "FieldContent":
        return FieldContent(self.n, auxiliary=True)

    def families(self) -> List[Dict[int, GradedVariable]]:
        return [self.x, self.C, self.xs, self.Cs, self.B, self.h, self.Bs, self.hs]

    def all(self) -> List[GradedVariable]:
        return [var for family in self.families() for _, var in sorted(family.items())]

    def unstarred(self) -> List[GradedVariable]:
        return [var for var in self.all() if not var.is_starred]

    def starred(self) -> List[GradedVariable]:
        return [var for var in self.all() if var.is_starred]

    def ghost_sector(self) -> List[GradedVariable]:
        """Fields, ghosts and auxiliary fields: the variables that survive gauge fixing."""
        return self.unstarred()

    def lookup(self, var_id: str) -> GradedVariable:
        try:
            return self._by_id[var_id]
        except KeyError:
            raise KeyError(f"Unknown variable '{var_id}' for n={self.n}") from None

    @property
    def table(self) -> Mapping[str, GradedVariable]:
        return MappingProxyType(self._by_id)

    def to_json(self) -> list:
        return [var.to_json() for var in self.all()]
