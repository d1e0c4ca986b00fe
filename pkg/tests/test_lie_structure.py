"""Tests for the Gell-Mann basis and exact su(n) structure constants."""

from fractions import Fraction

import pytest

from exact_scalars import ComplexRadical, RadicalScalar
from lie_structure import (
    BadSize,
    NonOrthonormal,
    StructureConstants,
    gellmann_basis,
    matrices_equal,
    structure_constants,
    trace,
    verify_lie_axioms,
)


@pytest.fixture(scope="module")
def su3():
    basis = gellmann_basis(3)
    return basis, structure_constants(basis)


def test_basis_sizes():
    assert len(gellmann_basis(2).sigma) == 4
    assert len(gellmann_basis(3).sigma) == 9
    assert gellmann_basis(4).dim == 16


def test_basis_rejects_small_n():
    with pytest.raises(BadSize):
        gellmann_basis(1)


def test_basis_is_orthonormal():
    for n in (2, 3, 4):
        assert gellmann_basis(n).orthonormality_violations() == []


def test_last_generator_is_identity():
    basis = gellmann_basis(3)
    assert trace(basis[9]) == ComplexRadical(3)


def test_su2_structure_constants_are_levi_civita():
    f = structure_constants(gellmann_basis(2))
    assert f(1, 2, 3) == 1
    assert f(2, 3, 1) == 1
    assert f(2, 1, 3) == -1
    assert f(1, 1, 2) == 0
    assert len(f.table) == 6


def test_su3_known_values(su3):
    _, f = su3
    half_root3 = RadicalScalar.sqrt(3) / 2
    assert f(1, 2, 3) == 1
    assert f(1, 4, 7) == Fraction(1, 2)
    assert f(1, 5, 6) == Fraction(-1, 2)
    assert f(3, 6, 7) == Fraction(-1, 2)
    assert f(4, 5, 8) == half_root3
    assert f(6, 7, 8) == half_root3
    assert f(8, 7, 6) == -half_root3


def test_su3_axioms_hold(su3):
    basis, f = su3
    report = verify_lie_axioms(f, basis)
    assert report.passed
    assert report.to_dict()["max_jacobi_residual"] == 0.0


def test_corrupted_entry_is_reported(su3):
    _, f = su3
    broken = f.with_entry((4, 5, 8), RadicalScalar(1))
    report = verify_lie_axioms(broken)
    assert not report.passed
    assert report.antisymmetry_violations
    assert report.jacobi_violations
    assert report.max_antisymmetry_residual > 0


def test_structure_constants_reject_non_orthonormal_basis():
    basis = gellmann_basis(2)
    sigma = list(basis.sigma)
    sigma[0] = sigma[0] * ComplexRadical(2)
    broken = type(basis)(n=2, sigma=tuple(sigma))
    with pytest.raises(NonOrthonormal):
        structure_constants(broken)


def test_commutator_reconstruction():
    basis = gellmann_basis(2)
    f = structure_constants(basis)
    bracket = basis[1] @ basis[2] - basis[2] @ basis[1]
    expected = basis[3] * ComplexRadical(0, f(1, 2, 3) * 2)
    assert matrices_equal(bracket, expected)


def test_json_round_trip(su3):
    _, f = su3
    again = StructureConstants.from_json(f.to_json())
    assert again.items() == f.items()
