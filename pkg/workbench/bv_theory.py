"""
Action functionals and the BV/BRST pipeline.

This module provides:
- Spectral and Casimir initial actions S_0
- The extended action S~ (fermionic path and closed form) and the total action S_t
- Classical and quantum master equation residuals
- Auxiliary-field degree bookkeeping for every reducibility level
- Gauge fixing by a fermion Psi and the BRST differential
- The on-shell test: is a residual in the truncated Jacobian ideal of S_t|Psi?
"""

from dataclasses import dataclass, field
from enum import Enum
from fractions import Fraction
from typing import Dict, List, Mapping, Optional, Sequence, Union

import numpy as np

from complexes import ArithmeticMode, SparseMatrix, cochain_basis, matrix_rank
from exact_scalars import ComplexRadical, as_radical
from graded_poly import (
    FieldContent,
    GradedPolynomial,
    GradedVariable,
    Monomial,
    VariableKind,
    antibracket,
    bv_laplacian,
    left_derivative,
)
from lie_structure import gellmann_basis, trace
from spectral_triples import (
    BVSpectralTriple,
    ComplexPolynomial,
    FiniteSpectralTriple,
    NonRealAction,
    TotalSpectralTriple,
    fermionic_action,
    polynomial_matrix,
)
from utils import logger


class NotInvariant(ValueError):
    """Raised when S_0 is not invariant under the adjoint action."""


class MalformedFermion(ValueError):
    """Raised when a gauge-fixing fermion has the wrong degree or contains starred variables."""


class ActionKind(Enum):
    INITIAL = "S_0"
    EXTENDED = "S~"
    TOTAL = "S_t"
    GAUGE_FIXED = "S_t|Psi"


@dataclass(frozen=True, eq=False)
class ActionFunctional:
    """A ghost-degree-0 polynomial labelled by its stage in the pipeline."""

    body: GradedPolynomial
    kind: ActionKind = ActionKind.INITIAL

    def __post_init__(self):
        wrong = [d for d in self.body.ghost_degrees() if d != 0]
        if wrong:
            raise ValueError(f"Action {self.kind.value} has terms of ghost degree {wrong}")

    def __eq__(self, other):
        if isinstance(other, ActionFunctional):
            return self.body == other.body
        return self.body == other

    __hash__ = None

    def to_json(self) -> dict:
        return {"kind": self.kind.value, "body": self.body.to_json()}


ActionLike = Union[ActionFunctional, GradedPolynomial]


def _body(s: ActionLike) -> GradedPolynomial:
    return s.body if isinstance(s, ActionFunctional) else s


# Initial actions

def field_matrix(n: int, variables: FieldContent) -> np.ndarray:
    """phi = sum_{a <= n^2} x_a sigma_a with sigma_{n^2} = Id."""
    basis = gellmann_basis(n)
    phi = polynomial_matrix(n)
    for a, var in variables.x.items():
        phi = phi + basis[a] * ComplexPolynomial.lift(GradedPolynomial.variable(var))
    return phi


def spectral_action(base: FiniteSpectralTriple, f: Sequence, variables: Optional[FieldContent] = None) -> ActionFunctional:
    """
    Expand S_0[phi] = tr f(D_0 + phi) exactly.

    Args:
        base: Initial triple providing n and D_0
        f: Coefficients c_0, c_1, ... of f(t) = sum_k c_k t^k
        variables: Generators to use (default: a fresh FieldContent for n)

    Returns:
        Bosonic ActionFunctional in x_1..x_{n^2}
    """
    variables = variables or FieldContent(base.n)
    coefficients = [as_radical(c) if not isinstance(c, ComplexRadical) else c for c in f]
    if not any(coefficients):
        return ActionFunctional(GradedPolynomial(), ActionKind.INITIAL)

    lifted_d0 = np.vectorize(ComplexPolynomial.lift, otypes=[object])(base.d0)
    shifted = lifted_d0 + field_matrix(base.n, variables)
    power = np.vectorize(ComplexPolynomial.lift, otypes=[object])(np.eye(base.n, dtype=int).astype(object))
    total = ComplexPolynomial()
    for k, c in enumerate(coefficients):
        if k > 0:
            power = power @ shifted
        if c:
            total = total + ComplexPolynomial.lift(trace(power, zero=ComplexPolynomial())) * ComplexPolynomial.lift(c)
    if not total.im.is_zero():
        raise NonRealAction(f"Spectral action has an imaginary part: {total.im}")
    logger.info(f"Spectral action for n={base.n}, deg f={len(coefficients) - 1}: {len(total.re)} terms")
    return ActionFunctional(total.re, ActionKind.INITIAL)


def casimir_action(n: int, g: Mapping[int, Sequence], variables: Optional[FieldContent] = None) -> ActionFunctional:
    """
    Build sum_k (x_1^2 + ... + x_{n^2-1}^2)^k g_k(x_{n^2}).

    Args:
        n: Matrix size
        g: Map k -> coefficients of g_k in x_{n^2} (constant term first)
        variables: Generators to use

    Returns:
        Bosonic ActionFunctional
    """
    variables = variables or FieldContent(n)
    casimir = GradedPolynomial()
    for a in range(1, n * n):
        x_a = GradedPolynomial.variable(variables.x[a])
        casimir = casimir + x_a * x_a
    center = GradedPolynomial.variable(variables.x[n * n])
    body = GradedPolynomial()
    for k, coefficients in sorted(g.items()):
        g_k = GradedPolynomial()
        for power, c in enumerate(coefficients):
            g_k = g_k + (center ** power).scale(as_radical(c))
        body = body + (casimir ** int(k)) * g_k
    return ActionFunctional(body, ActionKind.INITIAL)


# Extended and total actions

def gauge_invariance_residual(s0: ActionLike, t: BVSpectralTriple) -> GradedPolynomial:
    """
    sum_r (sum_pq f_pqr d_p S_0 x_q) C_r; zero iff S_0 is invariant under the adjoint action.

    Args:
        s0: Bosonic initial action
        t: BV triple supplying f and the generators

    Returns:
        Residual polynomial of ghost degree 1
    """
    body = _body(s0)
    if body.has_starred():
        raise ValueError("gauge_invariance_residual expects a bosonic action")
    v = t.variables
    derivatives = {p: left_derivative(body, var) for p, var in v.x.items()}
    residual = GradedPolynomial()
    for (p, q, r), value in t.f.table.items():
        if derivatives[p].is_zero():
            continue
        term = derivatives[p] * GradedPolynomial.variable(v.x[q]) * GradedPolynomial.variable(v.C[r])
        residual = residual + term.scale(value)
    return residual


def closed_form_extended_action(t: BVSpectralTriple, s0: ActionLike,
                                ghost_weight: Fraction = Fraction(1, 2)) -> ActionFunctional:
    """
    S_0 + sum_pqr f_pqr (x*_p x_q C_r + ghost_weight * C*_p C_q C_r).

    ghost_weight other than 1/2 is only meaningful for seeded-fault experiments.
    """
    v = t.variables
    body = _body(s0)
    for (p, q, r), value in t.f.table.items():
        body = body + GradedPolynomial.product([v.xs[p], v.x[q], v.C[r]], value)
        body = body + GradedPolynomial.product([v.Cs[p], v.C[q], v.C[r]], value * ghost_weight)
    return ActionFunctional(body, ActionKind.EXTENDED)


def extended_action(t: BVSpectralTriple, s0: ActionLike, check_invariance: bool = True) -> ActionFunctional:
    """
    Build S~ = S_0 + 1/2 S_ferm through the fermionic action of the generic effective vector.

    Args:
        t: BV spectral triple
        s0: Initial action
        check_invariance: Reject non-invariant S_0

    Returns:
        Extended ActionFunctional

    Raises:
        NotInvariant: If the gauge-invariance residual is nonzero
    """
    if check_invariance:
        residual = gauge_invariance_residual(s0, t)
        if residual:
            logger.warning(f"S_0 is not gauge invariant; residual has {len(residual)} terms")
            raise NotInvariant(f"S_0 is not invariant under the adjoint action: residual {residual}")
    ferm = fermionic_action(t, t.generic_effective_vector())
    body = _body(s0) + ferm.scale(Fraction(1, 2))
    logger.info(f"Extended action for n={t.n}: {len(body)} terms")
    return ActionFunctional(body, ActionKind.EXTENDED)


def auxiliary_action(variables: FieldContent) -> GradedPolynomial:
    """S_aux = sum_q B*_q h_q."""
    return sum(
        (GradedPolynomial.product([variables.Bs[q], variables.h[q]]) for q in sorted(variables.Bs)),
        GradedPolynomial(),
    )


def total_action(s_ext: ActionLike, t: TotalSpectralTriple) -> ActionFunctional:
    """S_t = S~ + sum_q B*_q h_q."""
    return ActionFunctional(_body(s_ext) + auxiliary_action(t.variables), ActionKind.TOTAL)


def total_action_from_triple(t: TotalSpectralTriple, s0: ActionLike) -> ActionFunctional:
    """S_0 + 1/2 S_ferm evaluated on the total triple; must agree with total_action."""
    ferm = fermionic_action(t, t.generic_effective_vector())
    return ActionFunctional(_body(s0) + ferm.scale(Fraction(1, 2)), ActionKind.TOTAL)


def restrict_to_initial(s: ActionLike) -> GradedPolynomial:
    """Terms free of starred variables and of auxiliary variables."""
    return _body(s).filter(lambda m: all(var.kind == VariableKind.FIELD for var in m.variables()))


# Master equations

def check_cme(s: ActionLike) -> GradedPolynomial:
    """Return {s, s}; the zero polynomial means the classical master equation holds."""
    body = _body(s)
    residual = antibracket(body, body)
    if residual:
        logger.warning(f"Classical master equation fails: {len(residual)} residual terms")
    else:
        logger.info("Classical master equation holds exactly")
    return residual


@dataclass
class QMEReport:
    """Residual of 1/2 {S_q, S_q} - i hbar Delta(S_q) per power of lambda = -i hbar."""

    orders: List[GradedPolynomial] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(order.is_zero() for order in self.orders)

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "orders": [{"order": m, "residual": str(r), "terms": len(r)} for m, r in enumerate(self.orders)],
        }


def check_qme(s_q: Sequence[ActionLike]) -> QMEReport:
    """
    Order-by-order quantum master equation residuals.

    With S_q = sum_k lambda^k S_k and lambda = -i hbar, the coefficient of
    lambda^m is 1/2 sum_{j+k=m} {S_j, S_k} + Delta(S_{m-1}).

    Args:
        s_q: Coefficients S_0, S_1, ... (each of ghost degree 0)

    Returns:
        QMEReport with residuals for m = 0 .. max(2K, K + 1), where s_q holds
        the K + 1 coefficients S_0 .. S_K, so Delta(S_K) is always included
    """
    coefficients = [_body(s) for s in s_q]
    for k, c in enumerate(coefficients):
        if any(d != 0 for d in c.ghost_degrees()):
            raise ValueError(f"QME coefficient {k} is not of ghost degree 0")
    top = max(2 * (len(coefficients) - 1), len(coefficients))
    laplacians = [bv_laplacian(c) for c in coefficients]
    brackets: Dict[tuple, GradedPolynomial] = {}
    report = QMEReport()
    for m in range(top + 1):
        residual = GradedPolynomial()
        for j in range(len(coefficients)):
            k = m - j
            if 0 <= k < len(coefficients):
                key = (min(j, k), max(j, k))
                if key not in brackets:
                    brackets[key] = antibracket(coefficients[key[0]], coefficients[key[1]])
                residual = residual + brackets[key].scale(Fraction(1, 2))
        if 1 <= m <= len(coefficients):
            residual = residual + laplacians[m - 1]
        report.orders.append(residual)
    logger.info(f"QME residuals computed for {len(report.orders)} orders; passed={report.passed}")
    return report


# Auxiliary fields

@dataclass(frozen=True)
class AuxiliaryFamily:
    i: int
    j: int
    deg_B: int
    deg_h: int

    @property
    def parity_flip(self) -> bool:
        return (self.deg_h - self.deg_B) % 2 == 1


@dataclass(frozen=True)
class AuxiliarySpectrum:
    level: int
    families: tuple

    def to_dict(self) -> dict:
        return {
            "level": self.level,
            "families": [{"i": a.i, "j": a.j, "deg_B": a.deg_B, "deg_h": a.deg_h} for a in self.families],
        }


def auxiliary_spectrum(level: int) -> AuxiliarySpectrum:
    """
    Degrees of the auxiliary pairs (B_i^j, h_i^j) needed at reducibility level L.

    deg B = j - i - 2 for odd j, i - j + 1 for even j; deg h = deg B + 1.

    Args:
        level: Reducibility level L >= 0

    Returns:
        AuxiliarySpectrum for i = 0..L, j = 1..i+1
    """
    if level < 0:
        raise ValueError(f"Reducibility level must be nonnegative, got {level}")
    families = []
    for i in range(level + 1):
        for j in range(1, i + 2):
            deg_b = j - i - 2 if j % 2 == 1 else i - j + 1
            families.append(AuxiliaryFamily(i, j, deg_b, deg_b + 1))
    return AuxiliarySpectrum(level, tuple(families))


# Gauge fixing and BRST

@dataclass(frozen=True, eq=False)
class GaugeFixingFermion:
    """Psi of ghost degree -1 in fields, ghosts and auxiliary fields only."""

    body: GradedPolynomial

    def __post_init__(self):
        starred = sorted({str(var) for m, _ in self.body.items() for var in m.variables() if var.is_starred})
        if starred:
            raise MalformedFermion(f"Gauge-fixing fermion contains starred variables: {starred}")
        wrong = [d for d in self.body.ghost_degrees() if d != -1]
        if wrong:
            raise MalformedFermion(f"Gauge-fixing fermion must have ghost degree -1, found {wrong}")

    @classmethod
    def standard(cls, variables: FieldContent) -> "GaugeFixingFermion":
        """Psi = sum_q B_q x_q."""
        body = GradedPolynomial()
        for q, b in sorted(variables.B.items()):
            body = body + GradedPolynomial.product([b, variables.x[q]])
        return cls(body)


def gauge_substitution(s: GradedPolynomial, psi: GaugeFixingFermion) -> Dict[GradedVariable, GradedPolynomial]:
    """phi* -> d_L Psi / d phi for every starred variable of s, computed before any substitution."""
    return {
        var: left_derivative(psi.body, var.conjugate())
        for var in s.variables()
        if var.is_starred
    }


def gauge_fix(s_t: ActionLike, psi: GaugeFixingFermion) -> ActionFunctional:
    """
    Substitute every antifield by the derivative of Psi along its partner.

    Args:
        s_t: Total action
        psi: Gauge-fixing fermion

    Returns:
        Gauge-fixed action without starred variables
    """
    if not isinstance(psi, GaugeFixingFermion):
        raise MalformedFermion("gauge_fix expects a GaugeFixingFermion")
    body = _body(s_t)
    fixed = body.substitute(gauge_substitution(body, psi))
    if fixed.has_starred():
        raise MalformedFermion("Gauge-fixed action still contains starred variables")
    logger.info(f"Gauge-fixed action: {len(fixed)} terms")
    return ActionFunctional(fixed, ActionKind.GAUGE_FIXED)


def brst_differential(s_t: ActionLike, psi: GaugeFixingFermion, c: GradedPolynomial) -> GradedPolynomial:
    """
    d(c) = {S_t, c} restricted by the gauge-fixing substitution.

    Args:
        s_t: Total action
        psi: Gauge-fixing fermion
        c: Cochain in fields, ghosts and auxiliary fields

    Returns:
        BRST image of c (ghost degree raised by one)
    """
    if c.has_starred():
        raise ValueError("BRST cochains must not contain starred variables")
    bracket = antibracket(_body(s_t), c)
    return bracket.substitute(gauge_substitution(bracket, psi))


def differential_table(s: ActionLike, variables: FieldContent) -> Dict[str, GradedPolynomial]:
    """{s, y} for every generator y, keyed by generator id."""
    body = _body(s)
    return {var.id: antibracket(body, GradedPolynomial.variable(var)) for var in variables.all()}


def equations_of_motion(s: ActionLike) -> Dict[GradedVariable, GradedPolynomial]:
    """Nonzero left derivatives of an action along each of its variables."""
    body = _body(s)
    equations = {}
    for var in body.variables():
        derivative = left_derivative(body, var)
        if derivative:
            equations[var] = derivative
    return equations


@dataclass
class MembershipResult:
    """Outcome of the Jacobian-ideal membership solve."""

    residual: GradedPolynomial
    in_span: bool
    generators: int
    rank: int
    augmented_rank: int
    notes: List[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "residual": str(self.residual),
            "in_span": self.in_span,
            "generators": self.generators,
            "rank": self.rank,
            "augmented_rank": self.augmented_rank,
            "notes": self.notes,
        }


def on_shell_membership(residual: GradedPolynomial, s_gf: ActionLike, variables: Sequence[GradedVariable],
                        cutoff: Optional[int] = None,
                        mode: ArithmeticMode = ArithmeticMode.EXACT) -> MembershipResult:
    """
    Decide whether residual lies in span{ d_i S_gf * m : deg m <= cutoff }.

    Args:
        residual: Homogeneous polynomial to test
        s_gf: Gauge-fixed action generating the equations of motion
        variables: Variables allowed in the multipliers m
        cutoff: Polynomial-degree bound on m (default: deg(residual) - 1)
        mode: Arithmetic for the rank comparison

    Returns:
        MembershipResult (rank(A) == rank(A | residual) means membership)
    """
    if residual.is_zero():
        return MembershipResult(residual, True, 0, 0, 0, ["residual is exactly zero"])
    target_degree = residual.ghost_degree
    cutoff = max(residual.poly_degree() - 1, 0) if cutoff is None else cutoff

    columns: List[GradedPolynomial] = []
    for var, equation in equations_of_motion(s_gf).items():
        for k in set(equation.ghost_degrees()):
            for multiplier in cochain_basis(variables, target_degree - k, cutoff):
                column = equation * GradedPolynomial.monomial(multiplier)
                if column:
                    columns.append(column.homogeneous_part(target_degree))

    rows: Dict[Monomial, int] = {}
    for poly in columns + [residual]:
        for monomial in sorted(poly.terms, key=lambda m: m.sort_key):
            rows.setdefault(monomial, len(rows))
    plain = SparseMatrix.from_columns(columns, rows)
    augmented = SparseMatrix.from_columns(columns + [residual], rows)
    rank, notes = matrix_rank(plain, mode)
    augmented_rank, more_notes = matrix_rank(augmented, mode)
    return MembershipResult(residual, rank == augmented_rank, len(columns), rank, augmented_rank, notes + more_notes)
