"""Tests for actions, master equations, auxiliary fields, gauge fixing and BRST."""

from fractions import Fraction

import pytest

from bv_theory import (
    ActionFunctional,
    ActionKind,
    GaugeFixingFermion,
    MalformedFermion,
    NotInvariant,
    auxiliary_action,
    auxiliary_spectrum,
    brst_differential,
    casimir_action,
    check_cme,
    check_qme,
    closed_form_extended_action,
    differential_table,
    equations_of_motion,
    extended_action,
    gauge_fix,
    gauge_invariance_residual,
    on_shell_membership,
    restrict_to_initial,
    spectral_action,
    total_action_from_triple,
)
from exact_scalars import ComplexRadical
from graded_poly import GradedPolynomial, bv_laplacian
from lie_structure import zero_matrix
from spectral_triples import FiniteSpectralTriple, build_bv_triple


def p(variables, name):
    return GradedPolynomial.variable(variables.lookup(name))


@pytest.fixture(scope="module")
def psi2(total2):
    return GaugeFixingFermion.standard(total2.variables)


@pytest.fixture(scope="module")
def s_gf2(s_t2, psi2):
    return gauge_fix(s_t2, psi2)


def test_spectral_action_quadratic(bv2, s0_quadratic):
    v = bv2.variables
    expected = sum((p(v, f"x{a}") ** 2 for a in range(1, 5)), GradedPolynomial()) * 2
    assert s0_quadratic == expected
    assert s0_quadratic.kind == ActionKind.INITIAL


def test_spectral_action_constant_and_linear_terms(bv2):
    v = bv2.variables
    assert spectral_action(bv2.base, [3], v) == 6
    assert spectral_action(bv2.base, [0, 1], v) == 2 * p(v, "x4")
    assert spectral_action(bv2.base, [0, 0, 0], v).body.is_zero()


def test_non_central_dirac_breaks_invariance():
    d0 = zero_matrix(2)
    d0[0, 0] = ComplexRadical(1)
    d0[1, 1] = ComplexRadical(-1)
    t = build_bv_triple(FiniteSpectralTriple(2, d0))
    s0 = spectral_action(t.base, [0, 0, 1], t.variables)
    assert gauge_invariance_residual(s0, t)
    with pytest.raises(NotInvariant):
        extended_action(t, s0)


def test_central_dirac_keeps_invariance():
    d0 = zero_matrix(2)
    d0[0, 0] = ComplexRadical(5)
    d0[1, 1] = ComplexRadical(5)
    t = build_bv_triple(FiniteSpectralTriple(2, d0))
    s0 = spectral_action(t.base, [0, 0, 0, 1], t.variables)
    assert gauge_invariance_residual(s0, t).is_zero()


def test_casimir_action(bv2):
    v = bv2.variables
    s0 = casimir_action(2, {1: [0, 1]}, v)
    casimir = p(v, "x1") ** 2 + p(v, "x2") ** 2 + p(v, "x3") ** 2
    assert s0 == casimir * p(v, "x4")
    assert gauge_invariance_residual(s0, bv2).is_zero()


def test_non_invariant_action_is_rejected(bv2):
    with pytest.raises(NotInvariant):
        extended_action(bv2, p(bv2.variables, "x1"))


def test_extended_action_matches_closed_form(bv2, s0_quadratic, s_ext2):
    assert s_ext2 == closed_form_extended_action(bv2, s0_quadratic)
    assert s_ext2.kind == ActionKind.EXTENDED


def test_extended_action_n3_matches_closed_form(bv3):
    s0 = casimir_action(3, {1: [1], 2: [1]}, bv3.variables)
    assert extended_action(bv3, s0) == closed_form_extended_action(bv3, s0)


def test_classical_master_equation_n2(s_ext2, s_t2):
    assert check_cme(s_ext2).is_zero()
    assert check_cme(s_t2).is_zero()


def test_classical_master_equation_n3(bv3):
    s0 = spectral_action(bv3.base, [0, 0, 1, 0, 1], bv3.variables)
    assert check_cme(extended_action(bv3, s0)).is_zero()


def test_classical_master_equation_central_dirac():
    d0 = zero_matrix(2)
    d0[0, 0] = ComplexRadical(5)
    d0[1, 1] = ComplexRadical(5)
    t = build_bv_triple(FiniteSpectralTriple(2, d0))
    s0 = spectral_action(t.base, [0, 0, 1, 0, 1], t.variables)
    assert check_cme(extended_action(t, s0)).is_zero()


def test_classical_master_equation_casimir_n3(bv3):
    s0 = casimir_action(3, {1: [1], 2: [1]}, bv3.variables)
    assert check_cme(extended_action(bv3, s0)).is_zero()


def test_seeded_ghost_weight_breaks_cme(bv2, s0_quadratic):
    broken = closed_form_extended_action(bv2, s0_quadratic, ghost_weight=Fraction(1))
    assert check_cme(broken)


def test_action_must_have_ghost_degree_zero(bv2):
    with pytest.raises(ValueError):
        ActionFunctional(p(bv2.variables, "C1"))


def test_quantum_master_equation(s_ext2, s_t2):
    assert check_qme([s_ext2]).passed
    assert check_qme([s_t2]).passed


def test_quantum_master_equation_order_range(s_ext2):
    assert len(check_qme([s_ext2]).orders) == 2
    assert len(check_qme([s_ext2, GradedPolynomial()]).orders) == 3
    assert len(check_qme([s_ext2, GradedPolynomial(), GradedPolynomial()]).orders) == 5


def test_quantum_master_equation_catches_laplacian(bv2):
    v = bv2.variables
    seed = p(v, "x1") * p(v, "xs1") * p(v, "C1")
    report = check_qme([seed])
    assert len(report.orders) == 2
    assert report.orders[0].is_zero()
    assert report.orders[1] == bv_laplacian(seed)
    assert report.orders[1] == -p(v, "C1")
    assert not report.passed


def test_quantum_master_equation_rejects_wrong_ghost_degree(bv2):
    v = bv2.variables
    with pytest.raises(ValueError):
        check_qme([p(v, "x1") * p(v, "xs1")])


def test_total_action_matches_triple(total2, s0_quadratic, s_t2):
    assert total_action_from_triple(total2, s0_quadratic) == s_t2
    assert s_t2.kind == ActionKind.TOTAL


def test_auxiliary_action(total2):
    v = total2.variables
    expected = sum((p(v, f"Bs{q}") * p(v, f"h{q}") for q in range(1, 4)), GradedPolynomial())
    assert auxiliary_action(v) == expected


def test_restrict_to_initial(s_t2, s0_quadratic):
    assert restrict_to_initial(s_t2) == s0_quadratic.body


def test_auxiliary_spectrum_levels():
    level0 = auxiliary_spectrum(0)
    assert [(a.i, a.j, a.deg_B, a.deg_h) for a in level0.families] == [(0, 1, -1, 0)]
    level1 = auxiliary_spectrum(1)
    assert [(a.deg_B, a.deg_h) for a in level1.families] == [(-1, 0), (-2, -1), (0, 1)]
    level2 = auxiliary_spectrum(2)
    assert len(level2.families) == 6
    assert [(a.deg_B, a.deg_h) for a in level2.families if a.i == 2] == [(-3, -2), (1, 2), (-1, 0)]
    assert all(a.parity_flip for a in level2.families)


def test_auxiliary_spectrum_rejects_negative_level():
    with pytest.raises(ValueError):
        auxiliary_spectrum(-1)


def test_differential_table(s_ext2, bv2):
    v = bv2.variables
    table = differential_table(s_ext2, v)
    assert table["x1"] == p(v, "x3") * p(v, "C2") - p(v, "x2") * p(v, "C3")
    assert table["C1"] == p(v, "C2") * p(v, "C3")
    assert table["x4"].is_zero()


def test_malformed_fermions(total2):
    v = total2.variables
    with pytest.raises(MalformedFermion):
        GaugeFixingFermion(p(v, "x1"))
    with pytest.raises(MalformedFermion):
        GaugeFixingFermion(p(v, "xs1"))
    with pytest.raises(MalformedFermion):
        gauge_fix(GradedPolynomial(), p(v, "B1") * p(v, "x1"))


def test_gauge_fixed_action(total2, s0_quadratic, s_gf2):
    v = total2.variables
    expected = s0_quadratic.body
    for (a, b, c), value in total2.f.table.items():
        expected = expected + GradedPolynomial.product([v.B[a], v.x[b], v.C[c]], value)
    for q in range(1, 4):
        expected = expected + p(v, f"x{q}") * p(v, f"h{q}")
    assert not s_gf2.body.has_starred()
    assert s_gf2 == expected
    assert s_gf2.kind == ActionKind.GAUGE_FIXED


def test_brst_differential_on_generators(total2, s_t2, psi2):
    v = total2.variables
    assert brst_differential(s_t2, psi2, p(v, "B1")) == p(v, "h1")
    assert brst_differential(s_t2, psi2, p(v, "h1")).is_zero()
    assert brst_differential(s_t2, psi2, p(v, "x1")) == p(v, "x3") * p(v, "C2") - p(v, "x2") * p(v, "C3")
    assert brst_differential(s_t2, psi2, p(v, "C1")) == p(v, "C2") * p(v, "C3")


def test_brst_differential_squares_to_zero(total2, s_t2, psi2):
    v = total2.variables
    samples = [p(v, "x1"), p(v, "C1"), p(v, "B2"), p(v, "x1") * p(v, "B2"), p(v, "x2") ** 2 * p(v, "C3")]
    for cochain in samples:
        once = brst_differential(s_t2, psi2, cochain)
        assert brst_differential(s_t2, psi2, once).is_zero()


def test_brst_rejects_starred_cochains(total2, s_t2, psi2):
    with pytest.raises(ValueError):
        brst_differential(s_t2, psi2, p(total2.variables, "xs1"))


def test_equations_of_motion(total2, s_gf2):
    v = total2.variables
    equations = equations_of_motion(s_gf2)
    assert equations[v.lookup("h1")] == p(v, "x1")
    assert v.lookup("xs1") not in equations


def test_on_shell_membership(total2, s_gf2):
    v = total2.variables
    variables = v.ghost_sector()
    inside = on_shell_membership(p(v, "x1"), s_gf2, variables)
    assert inside.in_span
    assert inside.rank == inside.augmented_rank
    outside = on_shell_membership(p(v, "C1"), s_gf2, variables)
    assert not outside.in_span
    assert on_shell_membership(GradedPolynomial(), s_gf2, variables).in_span
