"""
Coalgebra form of the BV and BRST complexes.

The ghost-sector generators form a 1-shifted graded coalgebra B with
coproduct Delta(y) = {S, y}; polynomials in the fields x form the comodule M
with coaction omega(f) = {S, f}. Hochschild cochains live in M (x) T(B) and are
stored in normal form: a map from a word of B-letters (normal order, exponents
unrolled) to its x-polynomial coefficient. Phi sends a BV cochain to that
normal form and Phi^-1 multiplies the letters back together.
"""

import random
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

from bv_theory import ActionLike, GaugeFixingFermion, auxiliary_action, brst_differential
from complexes import (
    ArithmeticMode,
    TruncatedComplex,
    TruncationWindow,
    assemble_complex,
    cochain_basis,
    differential_increment,
)
from exact_scalars import DEFAULT_EXTENSION_BOUND
from graded_poly import (
    GradedPolynomial,
    GradedVariable,
    Monomial,
    VariableKind,
    antibracket,
    left_derivative,
)
from spectral_triples import TotalSpectralTriple
from utils import format_word_for_display, logger

Word = Tuple[GradedVariable, ...]


class PairKind(Enum):
    BV = "bv"
    TOTAL = "total"
    GAUGE_FIXED = "gauge_fixed"


@dataclass
class GradedCoalgebra:
    """Letters of B with the coproduct table Delta(y) = {S, y}."""

    generators: List[GradedVariable]
    coproduct: Dict[GradedVariable, GradedPolynomial]
    coefficient_bound: int

    def components(self) -> Dict[int, List[GradedVariable]]:
        """Generators grouped by degree B_m."""
        grouped: Dict[int, List[GradedVariable]] = {}
        for var in self.generators:
            grouped.setdefault(var.ghost_degree, []).append(var)
        return dict(sorted(grouped.items()))

    def split(self, y: GradedVariable) -> List[Tuple[str, str, str]]:
        """Delta(y) as tensor pairs (coefficient, z1, z2) with z1 the leading factor."""
        pairs = []
        for monomial, coefficient in self.coproduct[y].sorted_items():
            factors = monomial.expanded()
            head = str(factors[0]) if factors else "1"
            tail = format_word_for_display(str(var) for var in factors[1:])
            pairs.append((str(coefficient), head, tail))
        return pairs

    def to_json(self) -> dict:
        return {
            "generators": [var.to_json() for var in self.generators],
            "coefficient_bound": self.coefficient_bound,
            "coproduct": {var.id: self.coproduct[var].to_json() for var in self.generators},
        }


@dataclass
class Comodule:
    """Fields x_p with the coaction table omega(x_p) = {S, x_p}."""

    generators: List[GradedVariable]
    coaction: Dict[GradedVariable, GradedPolynomial]

    def act(self, f: GradedPolynomial) -> GradedPolynomial:
        """omega(f) = sum_p d_p f * omega(x_p)."""
        result = GradedPolynomial()
        for x in self.generators:
            derivative = left_derivative(f, x)
            if derivative:
                result = result + derivative * self.coaction[x]
        return result

    def to_json(self) -> dict:
        return {
            "generators": [var.to_json() for var in self.generators],
            "coaction": {var.id: self.coaction[var].to_json() for var in self.generators},
        }


@dataclass
class HochschildPair:
    kind: PairKind
    coalgebra: GradedCoalgebra
    comodule: Comodule
    reference: Callable[[GradedPolynomial], GradedPolynomial] = field(repr=False)
    increment: int = 1

    @property
    def variables(self) -> List[GradedVariable]:
        return list(self.comodule.generators) + list(self.coalgebra.generators)

    def to_json(self) -> dict:
        return {
            "kind": self.kind.value,
            "coalgebra": self.coalgebra.to_json(),
            "comodule": self.comodule.to_json(),
        }


class HochschildCochain:
    """Element of M (x) T(B) in normal form: word -> x-polynomial coefficient."""

    __slots__ = ("_terms",)

    def __init__(self, terms: Optional[Mapping[Word, GradedPolynomial]] = None):
        self._terms = {word: coefficient for word, coefficient in (terms or {}).items() if coefficient}

    @property
    def terms(self) -> Dict[Word, GradedPolynomial]:
        return dict(self._terms)

    def items(self):
        return self._terms.items()

    def is_zero(self) -> bool:
        return not self._terms

    def ghost_degrees(self) -> List[int]:
        return sorted({sum(var.ghost_degree for var in word) + c.ghost_degree for word, c in self._terms.items()})

    def __add__(self, other: "HochschildCochain") -> "HochschildCochain":
        out = dict(self._terms)
        for word, coefficient in other._terms.items():
            out[word] = out[word] + coefficient if word in out else coefficient
        return HochschildCochain(out)

    def __eq__(self, other):
        if not isinstance(other, HochschildCochain):
            return NotImplemented
        return self._terms == other._terms

    __hash__ = None

    def to_json(self) -> list:
        return [
            {"word": [var.id for var in word], "coefficient": self._terms[word].to_json()}
            for word in sorted(self._terms, key=lambda w: tuple(var.key for var in w))
        ]

    def __str__(self):
        if not self._terms:
            return "0"
        parts = []
        for word in sorted(self._terms, key=lambda w: tuple(var.key for var in w)):
            parts.append(f"({self._terms[word]}) ⊗ {format_word_for_display(str(var) for var in word)}")
        return " + ".join(parts)

    __repr__ = __str__


# Phi and its inverse

def _is_coefficient(var: GradedVariable) -> bool:
    return var.kind == VariableKind.FIELD


def phi(poly: GradedPolynomial) -> HochschildCochain:
    """
    Split every monomial into its x-part and its word of letters.

    Fields are even and come first in normal order, so no sign arises.
    """
    out: Dict[Word, GradedPolynomial] = {}
    for monomial, coefficient in poly.items():
        head = tuple((var, exp) for var, exp in monomial.factors if _is_coefficient(var))
        tail = Monomial(tuple((var, exp) for var, exp in monomial.factors if not _is_coefficient(var)))
        word = tuple(tail.expanded())
        part = GradedPolynomial.monomial(Monomial(head), coefficient)
        out[word] = out[word] + part if word in out else part
    return HochschildCochain(out)


def phi_inverse(cochain: HochschildCochain) -> GradedPolynomial:
    result = GradedPolynomial()
    for word, coefficient in cochain.items():
        result = result + coefficient * GradedPolynomial.product(word)
    return result


# Coboundary

def _word_coboundary(word: Word, coefficient: GradedPolynomial, pair: HochschildPair) -> GradedPolynomial:
    """omega(f) y_1..y_p + sum_j (-1)^(|y_1|+..+|y_{j-1}|) f y_1..Delta(y_j)..y_p."""
    result = pair.comodule.act(coefficient) * GradedPolynomial.product(word)
    prefix = 0
    for j, letter in enumerate(word):
        image = pair.coalgebra.coproduct[letter]
        if image:
            term = coefficient * GradedPolynomial.product(word[:j]) * image * GradedPolynomial.product(word[j + 1:])
            result = result - term if prefix % 2 else result + term
        prefix += letter.ghost_degree
    return result


def hochschild_coboundary(cochain: HochschildCochain, pair: HochschildPair) -> HochschildCochain:
    """
    Graded Hochschild coboundary d_H built from the coaction and coproduct tables.

    Args:
        cochain: Normal-form cochain
        pair: Coalgebra/comodule pair

    Returns:
        d_H(cochain) in normal form
    """
    result = GradedPolynomial()
    for word, coefficient in cochain.items():
        result = result + _word_coboundary(word, coefficient, pair)
    return phi(result)


def transported_coboundary(pair: HochschildPair) -> Callable[[GradedPolynomial], GradedPolynomial]:
    """Phi^-1 d_H Phi as a map on polynomials."""
    return lambda poly: phi_inverse(hochschild_coboundary(phi(poly), pair))


# Pair construction

def _bracket_table(action: GradedPolynomial, variables: Iterable[GradedVariable]) -> Dict[GradedVariable, GradedPolynomial]:
    return {var: antibracket(action, GradedPolynomial.variable(var)) for var in variables}


def build_pair(t, s: ActionLike, psi: Optional[GaugeFixingFermion] = None) -> HochschildPair:
    """
    Coalgebra B and comodule M of a BV, total or gauge-fixed theory.

    Args:
        t: BVSpectralTriple (with s = S~) or TotalSpectralTriple (with s = S_t)
        s: Matching action
        psi: Gauge-fixing fermion; selects the ghost-sector pair of the total theory

    Returns:
        HochschildPair with coproduct and coaction tables
    """
    body = s.body if hasattr(s, "body") else s
    v = t.variables
    fields = [var for _, var in sorted(v.x.items())]
    initial = body.filter(lambda m: all(_is_coefficient(var) for var in m.variables()))
    bound = max(initial.poly_degree() - 1, 1)

    if psi is not None:
        if not isinstance(t, TotalSpectralTriple):
            raise ValueError("Gauge-fixed pairs need the total triple")
        letters = [var for family in (v.C, v.B, v.h) for _, var in sorted(family.items())]
        differential = lambda c: brst_differential(body, psi, c)  # noqa: E731
        coproduct = {y: differential(GradedPolynomial.variable(y)) for y in letters}
        coaction = {x: differential(GradedPolynomial.variable(x)) for x in fields}
        kind = PairKind.GAUGE_FIXED
    else:
        kind = PairKind.TOTAL if isinstance(t, TotalSpectralTriple) else PairKind.BV
        letters = [var for var in v.all() if not _is_coefficient(var)]
        differential = lambda c: antibracket(body, c)  # noqa: E731
        if kind == PairKind.TOTAL:
            aux = auxiliary_action(v)
            bv_part = body - aux
            aux_letters = [var for family in (v.B, v.h, v.Bs, v.hs) for _, var in sorted(family.items())]
            coproduct = _bracket_table(aux, aux_letters)
            coproduct.update(_bracket_table(bv_part, [y for y in letters if y not in coproduct]))
        else:
            coproduct = _bracket_table(body, letters)
        coaction = _bracket_table(body, fields)

    pair = HochschildPair(
        kind,
        GradedCoalgebra(letters, coproduct, bound),
        Comodule(fields, coaction),
        differential,
        differential_increment(body),
    )
    logger.info(f"Built {kind.value} pair for n={t.n}: {len(letters)} letters, {len(fields)} fields")
    return pair


# Axiom checks

@dataclass
class CoalgebraReport:
    degree_violations: List[str] = field(default_factory=list)
    coassociativity: Dict[str, GradedPolynomial] = field(default_factory=dict)
    comodule: Dict[str, GradedPolynomial] = field(default_factory=dict)
    comodule_sign: str = "-"

    @property
    def passed(self) -> bool:
        return (
            not self.degree_violations
            and all(r.is_zero() for r in self.coassociativity.values())
            and all(r.is_zero() for r in self.comodule.values())
            and self.comodule_sign == "-"
        )

    def failures(self) -> Dict[str, str]:
        failing = {f"coassociativity[{k}]": str(r) for k, r in self.coassociativity.items() if r}
        failing.update({f"comodule[{k}]": str(r) for k, r in self.comodule.items() if r})
        return failing

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "degree_violations": self.degree_violations,
            "comodule_sign": self.comodule_sign,
            "failures": self.failures(),
        }


def _degree_violations(pair: HochschildPair) -> List[str]:
    problems = []
    for y in pair.coalgebra.generators:
        image = pair.coalgebra.coproduct[y]
        if image and image.ghost_degrees() != [y.ghost_degree + 1]:
            problems.append(f"Delta({y}) has degrees {image.ghost_degrees()}, expected {y.ghost_degree + 1}")
        for word, coefficient in phi(image).items():
            if len(word) > 2:
                problems.append(f"Delta({y}) has a term with {len(word)} letters")
            if coefficient.poly_degree() > pair.coalgebra.coefficient_bound:
                problems.append(f"Delta({y}) leaves the truncated coefficient ring")
    for x in pair.comodule.generators:
        for word, _ in phi(pair.comodule.coaction[x]).items():
            if len(word) != 1 or word[0].ghost_degree != 1:
                problems.append(f"omega({x}) does not land in M (x) B_1")
    return problems


def _coassociativity_residual(y: GradedVariable, pair: HochschildPair) -> GradedPolynomial:
    """sum [Delta(z1) z2 - (-1)^(|z1|+1) z1 Delta(z2)] over the terms z1 z2 of Delta(y)."""
    derive = transported_coboundary(pair)
    residual = GradedPolynomial()
    for monomial, coefficient in pair.coalgebra.coproduct[y].items():
        factors = monomial.expanded()
        if not factors:
            continue
        z1 = GradedPolynomial.variable(factors[0])
        z2 = GradedPolynomial.product(factors[1:])
        left = derive(z1) * z2
        right = z1 * derive(z2)
        term = left - right if factors[0].odd else left + right
        residual = residual + term.scale(coefficient)
    return residual


def _comodule_sides(x: GradedVariable, pair: HochschildPair) -> Tuple[GradedPolynomial, GradedPolynomial]:
    """((omega (x) id) omega(x), (id (x) Delta) omega(x)) multiplied out."""
    left = GradedPolynomial()
    right = GradedPolynomial()
    for word, coefficient in phi(pair.comodule.coaction[x]).items():
        left = left + pair.comodule.act(coefficient) * GradedPolynomial.product(word)
        right = right + _word_coboundary(word, coefficient, pair) - pair.comodule.act(coefficient) * GradedPolynomial.product(word)
    return left, right


def check_coalgebra_axioms(pair: HochschildPair) -> CoalgebraReport:
    """
    Degree rule, graded coassociativity and comodule compatibility on every generator.

    The compatibility sign is observed, not assumed: it is "-" when
    (omega (x) id) omega = -(id (x) Delta) omega on every field.
    """
    report = CoalgebraReport(degree_violations=_degree_violations(pair))
    for y in pair.coalgebra.generators:
        report.coassociativity[y.id] = _coassociativity_residual(y, pair)
    signs = set()
    for x in pair.comodule.generators:
        left, right = _comodule_sides(x, pair)
        if (left + right).is_zero():
            signs.add("-")
            report.comodule[x.id] = GradedPolynomial()
        elif (left - right).is_zero():
            signs.add("+")
            report.comodule[x.id] = left + right
        else:
            signs.add("mismatch")
            report.comodule[x.id] = left + right
    report.comodule_sign = signs.pop() if len(signs) == 1 else ("-" if not signs else "mixed")
    if report.passed:
        logger.info(f"{pair.kind.value} pair satisfies the coalgebra and comodule axioms")
    else:
        logger.warning(f"{pair.kind.value} pair fails coalgebra checks: {sorted(report.failures())}")
    return report


@dataclass
class SquareReport:
    """Phi(d phi) against d_H(Phi(phi)) for a sample of cochains."""

    checked: int = 0
    failures: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_dict(self) -> dict:
        return {"passed": self.passed, "checked": self.checked, "failures": self.failures[:20]}


def check_phi_square(pair: HochschildPair, sample: Iterable[GradedPolynomial]) -> SquareReport:
    """
    Verify d_H o Phi = Phi o d on each sample element.

    Args:
        pair: Coalgebra pair; its reference differential is {S, -} or the BRST differential
        sample: Cochains to test

    Returns:
        SquareReport
    """
    report = SquareReport()
    for cochain in sample:
        report.checked += 1
        expected = phi(pair.reference(cochain))
        actual = hochschild_coboundary(phi(cochain), pair)
        if expected != actual:
            report.failures.append(f"{cochain}: Phi(d) = {expected} but d_H(Phi) = {actual}")
    if report.failures:
        logger.warning(f"Commuting square fails on {len(report.failures)} of {report.checked} cochains")
    return report


def generator_sample(pair: HochschildPair) -> List[GradedPolynomial]:
    return [GradedPolynomial.variable(var) for var in pair.variables]


def sample_cochains(variables: Sequence[GradedVariable], count: int, seed: int = 0,
                    ghost_degrees: Sequence[int] = range(-2, 3), max_degree: int = 3) -> List[GradedPolynomial]:
    """Random homogeneous cochains: one to three basis monomials with small integer coefficients."""
    rng = random.Random(seed)
    bases = {k: cochain_basis(variables, k, max_degree) for k in ghost_degrees}
    available = [k for k, basis in bases.items() if basis]
    sample = []
    for _ in range(count):
        basis = bases[rng.choice(available)]
        cochain = GradedPolynomial()
        for monomial in rng.sample(basis, min(len(basis), rng.randint(1, 3))):
            cochain = cochain + GradedPolynomial.monomial(monomial, rng.choice([-3, -2, -1, 1, 2, 3]))
        sample.append(cochain)
    return sample


def check_coboundary_square(pair: HochschildPair, window: TruncationWindow) -> List[str]:
    """Basis monomials of the window on which d_H o d_H is nonzero."""
    failures = []
    for k in window.degrees:
        for monomial in cochain_basis(pair.variables, k, window.poly_max):
            once = hochschild_coboundary(phi(GradedPolynomial.monomial(monomial)), pair)
            twice = hochschild_coboundary(once, pair)
            if not twice.is_zero():
                failures.append(str(monomial))
    if failures:
        logger.warning(f"d_H^2 is nonzero on {len(failures)} basis monomials")
    return failures


def hochschild_complex(pair: HochschildPair, window: TruncationWindow,
                       mode: ArithmeticMode = ArithmeticMode.EXACT,
                       extension_bound: int = DEFAULT_EXTENSION_BOUND,
                       threads: Optional[int] = None) -> TruncatedComplex:
    """Truncated Hochschild complex, written in the monomial basis through Phi."""
    return assemble_complex("hochschild", transported_coboundary(pair), pair.variables, window,
                            pair.increment, mode, extension_bound, threads)
