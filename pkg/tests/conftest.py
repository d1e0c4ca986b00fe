"""
Shared fixtures for the workbench test suite.

The workbench modules import each other as siblings, so the package
directory is put on sys.path before anything is imported.
"""

import os
import sys

import pytest

sys.path.insert(0, os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "workbench"))

from bv_theory import extended_action, spectral_action, total_action  # noqa: E402
from spectral_triples import FiniteSpectralTriple, build_bv_triple, build_total_triple  # noqa: E402


@pytest.fixture(scope="session")
def bv2():
    """BV triple for n=2 with D_0 = 0."""
    return build_bv_triple(FiniteSpectralTriple.with_zero_dirac(2))


@pytest.fixture(scope="session")
def bv3():
    return build_bv_triple(FiniteSpectralTriple.with_zero_dirac(3))


@pytest.fixture(scope="session")
def total2(bv2):
    return build_total_triple(bv2)


@pytest.fixture(scope="session")
def s0_quadratic(bv2):
    """S_0 = tr(phi^2) for n=2, i.e. f(t) = t^2."""
    return spectral_action(bv2.base, [0, 0, 1], bv2.variables)


@pytest.fixture(scope="session")
def s_ext2(bv2, s0_quadratic):
    return extended_action(bv2, s0_quadratic)


@pytest.fixture(scope="session")
def s_t2(s_ext2, total2):
    return total_action(s_ext2, total2)
