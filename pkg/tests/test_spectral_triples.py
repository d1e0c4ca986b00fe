"""Tests for the finite, BV and total spectral triples."""

import pytest

import spectral_triples
from exact_scalars import ComplexRadical
from lie_structure import dagger, zero_matrix
from spectral_triples import (
    ComplexPolynomial,
    EffectiveVector,
    FiniteSpectralTriple,
    NotEffective,
    NotHermitian,
    check_real_structure,
    fermionic_action,
    polynomial_matrix,
)


def test_initial_triple_rejects_non_hermitian_dirac():
    d0 = zero_matrix(2)
    d0[0, 1] = ComplexRadical(1)
    with pytest.raises(NotHermitian):
        FiniteSpectralTriple(2, d0)


def test_initial_triple_rejects_wrong_shape():
    with pytest.raises(NotHermitian):
        FiniteSpectralTriple(2, zero_matrix(3))


def test_hermitian_dirac_is_accepted():
    d0 = zero_matrix(2)
    d0[0, 1] = ComplexRadical(0, 1)
    d0[1, 0] = ComplexRadical(0, -1)
    assert FiniteSpectralTriple(2, d0).n == 2


def test_bv_triple_shape(bv2):
    assert bv2.labels == ("C*", "X*", "X", "C")
    assert bv2.basis.dim == 4
    assert len(bv2.variables.all()) == 14
    assert bv2.dirac.equals(bv2.dirac.adjoint())


def test_total_triple_shape(total2):
    assert total2.labels[4:] == ("h*", "B*", "B", "h")
    assert len(total2.variables.B) == 3
    assert total2.dirac.equals(total2.dirac.adjoint())


def test_generic_vectors_are_effective(bv2, total2):
    assert bv2.effective_violations(bv2.generic_effective_vector()) == []
    assert total2.effective_violations(total2.generic_effective_vector()) == []
    assert total2.effective_violations(total2.auxiliary_vector()) == []


def test_non_traceless_vector_is_not_effective(bv2):
    identity = polynomial_matrix(2)
    identity[0, 0] = ComplexPolynomial.lift(1)
    identity[1, 1] = ComplexPolynomial.lift(1)
    components = (identity,) + tuple(polynomial_matrix(2) for _ in range(3))
    vector = EffectiveVector(bv2.labels, components)
    assert bv2.effective_violations(vector)
    with pytest.raises(NotEffective):
        fermionic_action(bv2, vector)


def test_fermionic_action_is_real_and_ghost_neutral(bv2):
    action = fermionic_action(bv2, bv2.generic_effective_vector())
    assert action
    assert action.ghost_degree == 0
    assert all(any(var.is_starred for var in m.variables()) for m, _ in action.items())


def test_zero_vector_has_zero_action(bv2):
    assert fermionic_action(bv2, bv2.zero_vector()).is_zero()


def test_real_structure_bv(bv2):
    report = check_real_structure(bv2)
    assert report.passed, report.to_dict()
    assert report.kind == "bv"
    assert set(report.checks) >= {"j_squared", "dirac_self_adjoint", "ko_dimension_anticommutation",
                                  "ad_derivation", "commutant", "first_order"}


def test_real_structure_total(total2):
    report = check_real_structure(total2)
    assert report.passed, report.to_dict()
    assert "aux_commutation" in report.checks
    assert report.notes


def test_j_squared_on_generic_vector(total2, monkeypatch):
    assert check_real_structure(total2).checks["j_squared"] == []
    monkeypatch.setattr(spectral_triples, "apply_j", lambda m: dagger(m) * ComplexRadical(0, 2))
    flagged = check_real_structure(total2).checks["j_squared"]
    assert flagged[:len(total2.labels)] == list(total2.labels)
    assert "E_11" in flagged


def test_real_structure_n3_uses_diagonal_units(bv3):
    report = check_real_structure(bv3)
    assert report.passed, report.to_dict()
    assert any("diagonal" in note for note in report.notes)


def test_triple_json(bv2, total2):
    payload = bv2.to_json()
    assert payload["kind"] == "bv"
    assert payload["n"] == 2
    assert total2.to_json()["kind"] == "total"
