"""Tests for the coalgebra/comodule pairs and the Hochschild coboundary."""

from fractions import Fraction

import pytest

from bv_theory import GaugeFixingFermion, brst_differential, closed_form_extended_action
from complexes import TruncationWindow, brst_complex, bv_complex, cohomology_dims, hochschild_conjugacy
from graded_poly import GradedPolynomial
from hochschild import (
    HochschildCochain,
    PairKind,
    build_pair,
    check_coalgebra_axioms,
    check_coboundary_square,
    check_phi_square,
    generator_sample,
    hochschild_coboundary,
    hochschild_complex,
    phi,
    phi_inverse,
    sample_cochains,
)

WINDOW = TruncationWindow(-1, 1, 2)


@pytest.fixture(scope="module")
def bv_pair(bv2, s_ext2):
    return build_pair(bv2, s_ext2)


@pytest.fixture(scope="module")
def total_pair(total2, s_t2):
    return build_pair(total2, s_t2)


@pytest.fixture(scope="module")
def psi2(total2):
    return GaugeFixingFermion.standard(total2.variables)


@pytest.fixture(scope="module")
def gauge_pair(total2, s_t2, psi2):
    return build_pair(total2, s_t2, psi2)


def test_pair_kinds(bv_pair, total_pair, gauge_pair):
    assert bv_pair.kind == PairKind.BV
    assert total_pair.kind == PairKind.TOTAL
    assert gauge_pair.kind == PairKind.GAUGE_FIXED
    assert len(bv_pair.coalgebra.generators) == 10
    assert len(gauge_pair.coalgebra.generators) == 9
    assert len(bv_pair.comodule.generators) == 4


def test_coalgebra_components(bv_pair):
    components = bv_pair.coalgebra.components()
    assert sorted(components) == [-2, -1, 1]
    assert len(components[1]) == 3


def test_gauge_fixed_pair_needs_total_triple(bv2, s_ext2, psi2):
    with pytest.raises(ValueError):
        build_pair(bv2, s_ext2, psi2)


@pytest.mark.parametrize("name", ["bv_pair", "total_pair", "gauge_pair"])
def test_axioms_hold(name, request):
    report = check_coalgebra_axioms(request.getfixturevalue(name))
    assert report.passed, report.to_dict()
    assert report.comodule_sign == "-"


def test_seeded_ghost_weight_breaks_axioms(bv2, s0_quadratic):
    broken = closed_form_extended_action(bv2, s0_quadratic, ghost_weight=Fraction(1))
    report = check_coalgebra_axioms(build_pair(bv2, broken))
    assert not report.passed
    assert report.failures()


def test_auxiliary_coproduct(total_pair, total2):
    v = total2.variables
    coproduct = total_pair.coalgebra.coproduct
    assert coproduct[v.B[1]] == GradedPolynomial.variable(v.h[1])
    assert coproduct[v.hs[1]] == -GradedPolynomial.variable(v.Bs[1])
    assert coproduct[v.h[1]].is_zero()


def test_coproduct_split(bv_pair, bv2):
    pairs = bv_pair.coalgebra.split(bv2.variables.C[1])
    assert pairs == [("1", "C2", "C3")]


def test_phi_separates_fields_from_letters(bv2):
    v = bv2.variables
    poly = GradedPolynomial.product([v.x[1], v.x[2], v.C[1], v.xs[3]], 2)
    cochain = phi(poly)
    assert list(cochain.terms) == [(v.C[1], v.xs[3])]
    assert phi_inverse(cochain) == poly


def test_phi_inverse_on_samples(bv_pair):
    for cochain in sample_cochains(bv_pair.variables, 30, seed=4):
        assert phi_inverse(phi(cochain)) == cochain


def test_commuting_square_on_generators(bv_pair, total_pair, gauge_pair):
    for pair in (bv_pair, total_pair, gauge_pair):
        report = check_phi_square(pair, generator_sample(pair))
        assert report.passed, report.to_dict()
        assert report.checked == len(pair.variables)


def test_commuting_square_on_random_cochains(bv_pair):
    report = check_phi_square(bv_pair, sample_cochains(bv_pair.variables, 100, seed=0))
    assert report.passed, report.to_dict()
    assert report.checked == 100


def test_commuting_square_on_random_gauge_fixed_cochains(gauge_pair):
    report = check_phi_square(gauge_pair, sample_cochains(gauge_pair.variables, 50, seed=1, ghost_degrees=range(-1, 3)))
    assert report.passed, report.to_dict()


def test_sample_cochains_are_deterministic(bv_pair):
    first = sample_cochains(bv_pair.variables, 10, seed=9)
    second = sample_cochains(bv_pair.variables, 10, seed=9)
    assert first == second
    assert all(c.is_homogeneous() for c in first)


def test_hochschild_coboundary_squares_to_zero(bv_pair, gauge_pair):
    assert check_coboundary_square(bv_pair, WINDOW) == []
    assert check_coboundary_square(gauge_pair, TruncationWindow(-1, 1, 1)) == []


def test_hochschild_coboundary_squares_to_zero_at_cutoff_three(bv_pair):
    assert check_coboundary_square(bv_pair, TruncationWindow(-2, 2, 3)) == []


def test_zero_cochain(bv_pair):
    assert hochschild_coboundary(HochschildCochain(), bv_pair).is_zero()


def test_bv_and_hochschild_complexes_are_conjugate(bv_pair, s_ext2, bv2):
    bv = bv_complex(s_ext2.body, bv2.variables.all(), WINDOW)
    hoch = hochschild_complex(bv_pair, WINDOW)
    report = hochschild_conjugacy(bv, hoch)
    assert report.passed, report.to_dict()
    assert [e.dimension for e in cohomology_dims(bv).entries] == [e.dimension for e in cohomology_dims(hoch).entries]


def test_brst_and_gauge_fixed_hochschild_are_conjugate(gauge_pair, total2, s_t2, psi2):
    window = TruncationWindow(-1, 1, 1)
    brst = brst_complex(lambda c: brst_differential(s_t2, psi2, c), total2.variables.ghost_sector(),
                        window, gauge_pair.increment)
    hoch = hochschild_complex(gauge_pair, window)
    assert hochschild_conjugacy(brst, hoch).passed


def test_pair_json(bv_pair):
    payload = bv_pair.to_json()
    assert payload["kind"] == "bv"
    assert set(payload["coalgebra"]["coproduct"]) == {var.id for var in bv_pair.coalgebra.generators}
