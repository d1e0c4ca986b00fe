"""
Generalized Gell-Mann generators of su(n) and their structure constants.

This module provides:
- Exact n x n matrices as numpy object arrays of ComplexRadical entries
- The Gell-Mann basis with normalization tr(sigma_a sigma_b) = 2 delta_ab
- Structure constants f_pqr = -(i/4) tr([sigma_p, sigma_q] sigma_r)
- Verification of antisymmetry and the Jacobi identity
"""

from dataclasses import dataclass, field
from fractions import Fraction
from types import MappingProxyType
from typing import Dict, List, Mapping, Optional, Tuple

import numpy as np

from exact_scalars import ComplexRadical, RadicalScalar
from utils import logger


class BadSize(ValueError):
    """Raised for matrix sizes below 2."""


class NonOrthonormal(ValueError):
    """Raised when a generator family fails the hermitian orthonormality checks."""


# Exact matrix helpers

def zero_matrix(rows: int, cols: Optional[int] = None, zero=None) -> np.ndarray:
    cols = rows if cols is None else cols
    matrix = np.empty((rows, cols), dtype=object)
    for i in range(rows):
        for j in range(cols):
            matrix[i, j] = ComplexRadical() if zero is None else zero
    return matrix


def identity_matrix(n: int) -> np.ndarray:
    matrix = zero_matrix(n)
    for i in range(n):
        matrix[i, i] = ComplexRadical(1)
    return matrix


def matrix_unit(n: int, j: int, k: int, value=None) -> np.ndarray:
    """E_jk (1-based indices), optionally scaled by value."""
    matrix = zero_matrix(n)
    matrix[j - 1, k - 1] = ComplexRadical(1) if value is None else value
    return matrix


def dagger(matrix: np.ndarray) -> np.ndarray:
    """Conjugate transpose; entries must provide conjugate()."""
    rows, cols = matrix.shape
    result = np.empty((cols, rows), dtype=object)
    for i in range(rows):
        for j in range(cols):
            result[j, i] = matrix[i, j].conjugate()
    return result


def trace(matrix: np.ndarray, zero=None):
    total = ComplexRadical() if zero is None else zero
    for i in range(matrix.shape[0]):
        total = total + matrix[i, i]
    return total


def commutator(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return a @ b - b @ a


def matrices_equal(a: np.ndarray, b: np.ndarray) -> bool:
    return a.shape == b.shape and all(x == y for x, y in zip(a.flat, b.flat))


def is_zero_matrix(matrix: np.ndarray) -> bool:
    return all(entry.is_zero() for entry in matrix.flat)


def matrix_to_json(matrix: np.ndarray) -> list:
    """Row-major ComplexRadical array."""
    return [[entry.to_json() for entry in row] for row in matrix]


@dataclass(frozen=True, eq=False)
class GeneratorBasis:
    """
    Generalized Gell-Mann generators sigma_1..sigma_{n^2-1} plus sigma_{n^2} = Id.

    Indices are 1-based throughout, matching the physics notation.
    """

    n: int
    sigma: Tuple[np.ndarray, ...]

    def __getitem__(self, a: int) -> np.ndarray:
        return self.sigma[a - 1]

    @property
    def dim(self) -> int:
        return self.n * self.n

    @property
    def su_indices(self) -> range:
        return range(1, self.dim)

    def orthonormality_violations(self) -> List[str]:
        """Return a description of every failed hermitian/traceless/trace-form check."""
        problems = []
        for a in self.su_indices:
            sigma_a = self[a]
            if not matrices_equal(sigma_a, dagger(sigma_a)):
                problems.append(f"sigma_{a} is not hermitian")
            if not trace(sigma_a).is_zero():
                problems.append(f"sigma_{a} is not traceless")
            for b in self.su_indices:
                expected = ComplexRadical(2 if a == b else 0)
                if trace(sigma_a @ self[b]) != expected:
                    problems.append(f"tr(sigma_{a} sigma_{b}) != {expected}")
        return problems

    def expand(self, coefficients: Mapping[int, ComplexRadical]) -> np.ndarray:
        """Matrix sum_a c_a sigma_a."""
        result = zero_matrix(self.n)
        for a, c in coefficients.items():
            result = result + self[a] * c
        return result

    def to_json(self) -> dict:
        return {"n": self.n, "sigma": [matrix_to_json(s) for s in self.sigma]}


def gellmann_basis(n: int) -> GeneratorBasis:
    """
    Build the generalized Gell-Mann basis of size n.

    For every column k = 2..n the symmetric and antisymmetric members for
    rows j < k come first, followed by the diagonal member with l = k - 1.
    For n = 3 this reproduces the standard numbering lambda_1..lambda_8.

    Args:
        n: Matrix size (>= 2)

    Returns:
        GeneratorBasis with n^2 - 1 traceless generators and the identity last

    Raises:
        BadSize: If n < 2
    """
    if not isinstance(n, int) or n < 2:
        raise BadSize(f"Gell-Mann basis needs n >= 2, got {n!r}")

    i_unit = ComplexRadical.i()
    sigma: List[np.ndarray] = []
    for k in range(2, n + 1):
        for j in range(1, k):
            symmetric = matrix_unit(n, j, k) + matrix_unit(n, k, j)
            antisymmetric = matrix_unit(n, j, k, -i_unit) + matrix_unit(n, k, j, i_unit)
            sigma.extend([symmetric, antisymmetric])
        level = k - 1
        scale = RadicalScalar.sqrt(Fraction(2, level * (level + 1)))
        diagonal = zero_matrix(n)
        for m in range(level):
            diagonal[m, m] = ComplexRadical(scale)
        diagonal[level, level] = ComplexRadical(scale * (-level))
        sigma.append(diagonal)
    sigma.append(identity_matrix(n))

    logger.info(f"Built Gell-Mann basis for n={n}: {len(sigma) - 1} generators plus identity")
    return GeneratorBasis(n=n, sigma=tuple(sigma))


TripleIndex = Tuple[int, int, int]


@dataclass(frozen=True, eq=False)
class StructureConstants:
    """Sparse, totally antisymmetric table f_pqr for 1 <= p, q, r <= n^2 - 1."""

    n: int
    table: Mapping[TripleIndex, RadicalScalar] = field(default_factory=dict)

    def __post_init__(self):
        clean = {key: value for key, value in self.table.items() if value}
        object.__setattr__(self, "table", MappingProxyType(clean))

    @property
    def dim(self) -> int:
        """Dimension of su(n)."""
        return self.n * self.n - 1

    def __call__(self, p: int, q: int, r: int) -> RadicalScalar:
        return self.table.get((p, q, r), RadicalScalar())

    def items(self) -> List[Tuple[TripleIndex, RadicalScalar]]:
        return sorted(self.table.items())

    def with_entry(self, key: TripleIndex, value: RadicalScalar) -> "StructureConstants":
        """Copy of the table with one slot overwritten."""
        table = dict(self.table)
        table[key] = value
        return StructureConstants(self.n, table)

    def to_json(self) -> dict:
        return {"n": self.n, "entries": [[p, q, r, value.to_json()] for (p, q, r), value in self.items()]}

    @classmethod
    def from_json(cls, payload: Mapping) -> "StructureConstants":
        table = {(p, q, r): RadicalScalar.from_json(value) for p, q, r, value in payload["entries"]}
        return cls(int(payload["n"]), table)


def structure_constants(basis: GeneratorBasis) -> StructureConstants:
    """
    Extract f_pqr = -(i/4) tr([sigma_p, sigma_q] sigma_r) exactly.

    Args:
        basis: Orthonormal Gell-Mann basis

    Returns:
        StructureConstants over the su(n) indices

    Raises:
        NonOrthonormal: If the basis fails its invariants or a constant is not real
    """
    problems = basis.orthonormality_violations()
    if problems:
        logger.error(f"Generator basis rejected: {problems[:3]}")
        raise NonOrthonormal("; ".join(problems))

    factor = ComplexRadical(0, RadicalScalar(-1) / 4)
    table: Dict[TripleIndex, RadicalScalar] = {}
    for p in basis.su_indices:
        for q in basis.su_indices:
            if p == q:
                continue
            bracket = commutator(basis[p], basis[q])
            for r in basis.su_indices:
                value = factor * trace(bracket @ basis[r])
                if not value.is_real():
                    raise NonOrthonormal(f"f_{p}{q}{r} has imaginary part {value.im}")
                if value.re:
                    table[(p, q, r)] = value.re

    logger.info(f"Computed {len(table)} nonzero structure constants for su({basis.n})")
    return StructureConstants(basis.n, table)


@dataclass
class LieAxiomReport:
    """Exact residuals of the Lie-algebra axioms; empty violation lists mean success."""

    n: int
    antisymmetry_violations: List[Tuple[TripleIndex, TripleIndex, RadicalScalar]] = field(default_factory=list)
    jacobi_violations: List[Tuple[Tuple[int, int, int, int], RadicalScalar]] = field(default_factory=list)
    reconstruction_violations: List[Tuple[int, int]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not (self.antisymmetry_violations or self.jacobi_violations or self.reconstruction_violations)

    @property
    def max_antisymmetry_residual(self) -> float:
        return max((abs(r.to_float()) for _, _, r in self.antisymmetry_violations), default=0.0)

    @property
    def max_jacobi_residual(self) -> float:
        return max((abs(r.to_float()) for _, r in self.jacobi_violations), default=0.0)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "passed": self.passed,
            "max_antisymmetry_residual": self.max_antisymmetry_residual,
            "max_jacobi_residual": self.max_jacobi_residual,
            "antisymmetry_violations": [
                {"slots": [list(a), list(b)], "residual": str(r)} for a, b, r in self.antisymmetry_violations
            ],
            "jacobi_violations": [{"indices": list(k), "residual": str(r)} for k, r in self.jacobi_violations],
            "reconstruction_violations": [list(pq) for pq in self.reconstruction_violations],
        }


def verify_lie_axioms(f: StructureConstants, basis: Optional[GeneratorBasis] = None) -> LieAxiomReport:
    """
    Check total antisymmetry and the quadratic Jacobi combinations.

    Jacobi residual for (p, q, r, s):
        sum_a (f_apr f_aqs - f_aps f_aqr - f_apq f_ars)

    Args:
        f: Structure constants to audit
        basis: When given, also compare [sigma_p, sigma_q] with 2i sum_r f_pqr sigma_r

    Returns:
        LieAxiomReport with every nonzero residual
    """
    report = LieAxiomReport(n=f.n)
    indices = range(1, f.dim + 1)

    seen = set()
    for p, q, r in ((p, q, r) for p in indices for q in indices for r in indices):
        for swapped in ((q, p, r), (p, r, q), (r, q, p)):
            pair = tuple(sorted([(p, q, r), swapped]))
            if pair in seen:
                continue
            seen.add(pair)
            residual = f(p, q, r) + f(*swapped)
            if residual:
                report.antisymmetry_violations.append(((p, q, r), swapped, residual))

    # f_a(x, y) as per-a sparse rows
    rows: Dict[int, Dict[Tuple[int, int], RadicalScalar]] = {a: {} for a in indices}
    for (a, x, y), value in f.table.items():
        rows[a][(x, y)] = value

    def contract(i: Tuple[int, int], j: Tuple[int, int]) -> RadicalScalar:
        total = RadicalScalar()
        for row in rows.values():
            left = row.get(i)
            if left is None:
                continue
            right = row.get(j)
            if right is not None:
                total = total + left * right
        return total

    for p in indices:
        for q in indices:
            for r in indices:
                for s in indices:
                    residual = contract((p, r), (q, s)) - contract((p, s), (q, r)) - contract((p, q), (r, s))
                    if residual:
                        report.jacobi_violations.append(((p, q, r, s), residual))

    if basis is not None:
        two_i = ComplexRadical(0, 2)
        for p in basis.su_indices:
            for q in basis.su_indices:
                rebuilt = basis.expand({r: two_i * ComplexRadical(f(p, q, r)) for r in basis.su_indices})
                if not matrices_equal(rebuilt, commutator(basis[p], basis[q])):
                    report.reconstruction_violations.append((p, q))

    if report.passed:
        logger.info(f"Lie axioms hold exactly for su({f.n})")
    else:
        logger.warning(
            f"Lie axioms violated for su({f.n}): {len(report.antisymmetry_violations)} antisymmetry, "
            f"{len(report.jacobi_violations)} Jacobi, {len(report.reconstruction_violations)} reconstruction"
        )
    return report

