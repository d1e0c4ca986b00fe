"""
Finite truncations of the BV, BRST and Hochschild complexes.

This module provides:
- Monomial bases of fixed ghost degree and bounded polynomial degree
- Sparse coboundary matrices assembled column by column
- Exact (rational and radical) and floating ranks
- Truncated cohomology dimensions with stability flags
"""

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Callable, Dict, List, Mapping, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
import sympy
from sympy import QQ
from sympy.ntheory import primefactors
from sympy.polys.matrices import DomainMatrix

from exact_scalars import DEFAULT_EXTENSION_BOUND, ExtensionOverflow, RadicalScalar
from graded_poly import GradedPolynomial, GradedVariable, Monomial, antibracket
from utils import logger, write_json

FLOAT_TOLERANCE = 1e-9

Differential = Callable[[GradedPolynomial], GradedPolynomial]


class ImageOverflow(ValueError):
    """Raised when a coboundary produces a monomial outside the codomain basis."""


class ArithmeticMode(str, Enum):
    EXACT = "exact"
    RADICAL = "radical"
    FLOAT = "float"


@dataclass(frozen=True)
class TruncationWindow:
    """Ghost degrees ghost_min..ghost_max and polynomial degree cutoff poly_max."""

    ghost_min: int
    ghost_max: int
    poly_max: int

    def __post_init__(self):
        if self.ghost_min > self.ghost_max:
            raise ValueError(f"Empty ghost window: {self.ghost_min} > {self.ghost_max}")
        if self.poly_max < 0:
            raise ValueError(f"Polynomial cutoff must be nonnegative, got {self.poly_max}")

    @classmethod
    def parse(cls, text: str) -> "TruncationWindow":
        """Parse 'kmin:kmax:D'."""
        parts = text.split(":")
        if len(parts) != 3:
            raise ValueError(f"Window must look like kmin:kmax:D, got '{text}'")
        try:
            ghost_min, ghost_max, poly_max = (int(part) for part in parts)
        except ValueError:
            raise ValueError(f"Window entries must be integers, got '{text}'") from None
        return cls(ghost_min, ghost_max, poly_max)

    @property
    def degrees(self) -> range:
        return range(self.ghost_min, self.ghost_max + 1)

    def lowered(self) -> "TruncationWindow":
        return TruncationWindow(self.ghost_min, self.ghost_max, self.poly_max - 1)

    def to_dict(self) -> dict:
        return {"ghost_min": self.ghost_min, "ghost_max": self.ghost_max, "poly_max": self.poly_max}


def cochain_basis(variables: Sequence[GradedVariable], ghost_degree: int, max_degree: int) -> List[Monomial]:
    """
    All normal-ordered monomials of a given ghost degree and polynomial degree <= max_degree.

    Args:
        variables: Generators to build from
        ghost_degree: Target ghost degree k
        max_degree: Polynomial degree cutoff D

    Returns:
        Monomials sorted by (degree, variable keys)
    """
    ordered = sorted(set(variables), key=lambda var: var.key)
    found: List[Monomial] = []

    def extend(position: int, factors: List[Tuple[GradedVariable, int]], degree: int, ghost: int):
        if position == len(ordered):
            if ghost == ghost_degree:
                found.append(Monomial(tuple(factors)))
            return
        var = ordered[position]
        extend(position + 1, factors, degree, ghost)
        top = 1 if var.odd else max_degree - degree
        for exp in range(1, min(top, max_degree - degree) + 1):
            factors.append((var, exp))
            extend(position + 1, factors, degree + exp, ghost + var.ghost_degree * exp)
            factors.pop()

    extend(0, [], 0, 0)
    return sorted(found, key=lambda m: m.sort_key)


class SparseMatrix:
    """Coordinate-format matrix with RadicalScalar entries; immutable after construction."""

    def __init__(self, rows: int, cols: int, entries: Optional[Mapping[Tuple[int, int], RadicalScalar]] = None):
        self.rows = rows
        self.cols = cols
        self._entries = {key: value for key, value in (entries or {}).items() if value}

    @classmethod
    def from_columns(cls, columns: Sequence[GradedPolynomial], row_index: Mapping[Monomial, int]) -> "SparseMatrix":
        """
        Expand each polynomial in the row basis.

        Raises:
            ImageOverflow: If a column contains a monomial absent from row_index
        """
        entries = {}
        for j, column in enumerate(columns):
            for monomial, coefficient in column.items():
                i = row_index.get(monomial)
                if i is None:
                    raise ImageOverflow(f"Monomial {monomial} of column {j} lies outside the codomain basis")
                entries[(i, j)] = coefficient
        return cls(len(row_index), len(columns), entries)

    @property
    def entries(self) -> Dict[Tuple[int, int], RadicalScalar]:
        return dict(self._entries)

    @property
    def nnz(self) -> int:
        return len(self._entries)

    def is_zero(self) -> bool:
        return not self._entries

    def is_rational(self) -> bool:
        return all(value.is_rational() for value in self._entries.values())

    def __matmul__(self, other: "SparseMatrix") -> "SparseMatrix":
        if self.cols != other.rows:
            raise ValueError(f"Shape mismatch: {self.rows}x{self.cols} @ {other.rows}x{other.cols}")
        by_row: Dict[int, List[Tuple[int, RadicalScalar]]] = {}
        for (k, j), value in other._entries.items():
            by_row.setdefault(k, []).append((j, value))
        out: Dict[Tuple[int, int], RadicalScalar] = {}
        for (i, k), left in self._entries.items():
            for j, right in by_row.get(k, ()):
                out[(i, j)] = out.get((i, j), RadicalScalar()) + left * right
        return SparseMatrix(self.rows, other.cols, out)

    def __eq__(self, other):
        if not isinstance(other, SparseMatrix):
            return NotImplemented
        return (self.rows, self.cols) == (other.rows, other.cols) and self._entries == other._entries

    __hash__ = None

    def select_rows(self, keep: Sequence[int]) -> "SparseMatrix":
        """Submatrix on the given rows, renumbered in the given order."""
        position = {row: i for i, row in enumerate(keep)}
        entries = {(position[i], j): v for (i, j), v in self._entries.items() if i in position}
        return SparseMatrix(len(keep), self.cols, entries)

    def with_column(self, column: Mapping[int, RadicalScalar]) -> "SparseMatrix":
        entries = dict(self._entries)
        for i, value in column.items():
            entries[(i, self.cols)] = value
        return SparseMatrix(self.rows, self.cols + 1, entries)

    def to_float(self) -> np.ndarray:
        dense = np.zeros((self.rows, self.cols), dtype=float)
        for (i, j), value in self._entries.items():
            dense[i, j] = value.to_float()
        return dense

    def to_frame(self) -> pd.DataFrame:
        records = [
            {"row": i, "col": j, "value": str(value)}
            for (i, j), value in sorted(self._entries.items())
        ]
        return pd.DataFrame(records, columns=["row", "col", "value"])

    def to_json(self) -> dict:
        return {
            "rows": self.rows,
            "cols": self.cols,
            "entries": [[i, j, value.to_json()] for (i, j), value in sorted(self._entries.items())],
        }


# Ranks

def _rational_rank(matrix: SparseMatrix) -> int:
    rows: Dict[int, Dict[int, object]] = {}
    for (i, j), value in matrix.entries.items():
        q = value.rational_part
        rows.setdefault(i, {})[j] = QQ(q.numerator, q.denominator)
    return DomainMatrix(rows, (matrix.rows, matrix.cols), QQ).rank()


def _radical_rank(matrix: SparseMatrix, extension_bound: int) -> int:
    """Rank over QQ(sqrt(p) for every prime p dividing a radicand), via a sympy DomainMatrix."""
    radicands = sorted({m for value in matrix.entries.values() for m in value.terms})
    primes = sorted({p for m in radicands for p in primefactors(m)})
    if not primes:
        return _rational_rank(matrix)
    degree = 2 ** len(primes)
    if degree > extension_bound:
        raise ExtensionOverflow(f"Rank needs an extension of degree {degree} > bound {extension_bound}")
    domain = QQ.algebraic_field(*[sympy.sqrt(p) for p in primes])
    roots = {m: domain.from_sympy(sympy.sqrt(m)) for m in radicands}
    rows: Dict[int, Dict[int, object]] = {}
    for (i, j), value in matrix.entries.items():
        element = domain.zero
        for m, q in value.terms.items():
            element += domain.from_sympy(sympy.Rational(q.numerator, q.denominator)) * roots[m]
        rows.setdefault(i, {})[j] = element
    return DomainMatrix(rows, (matrix.rows, matrix.cols), domain).rank()


def _float_rank(matrix: SparseMatrix) -> int:
    dense = matrix.to_float()
    singular = np.linalg.svd(dense, compute_uv=False)
    if singular.size == 0 or singular[0] == 0:
        return 0
    return int(np.sum(singular > FLOAT_TOLERANCE * singular[0]))


def matrix_rank(matrix: SparseMatrix, mode: ArithmeticMode = ArithmeticMode.EXACT,
                extension_bound: int = DEFAULT_EXTENSION_BOUND) -> Tuple[int, List[str]]:
    """
    Rank of a sparse matrix in the requested arithmetic.

    Args:
        matrix: Matrix to reduce
        mode: exact (rational elimination, radical when needed), radical, or float
        extension_bound: Largest field extension allowed in radical elimination

    Returns:
        (rank, notes) where notes record any fallback taken
    """
    mode = ArithmeticMode(mode)
    if matrix.is_zero():
        return 0, []
    notes: List[str] = []
    if mode == ArithmeticMode.FLOAT:
        return _float_rank(matrix), notes
    if mode == ArithmeticMode.EXACT and matrix.is_rational():
        return _rational_rank(matrix), notes
    if mode == ArithmeticMode.EXACT:
        notes.append("irrational entries: radical elimination")
    try:
        return _radical_rank(matrix, extension_bound), notes
    except ExtensionOverflow as exc:
        logger.warning(f"Radical elimination overflowed ({exc}); falling back to float rank")
        notes.append(f"float fallback: {exc}")
        return _float_rank(matrix), notes


# Coboundary matrices

def _thread_count(threads: Optional[int]) -> int:
    return max(1, threads or 1)


def coboundary_matrix(differential: Differential, basis_in: Sequence[Monomial], basis_out: Sequence[Monomial],
                      threads: Optional[int] = None) -> SparseMatrix:
    """
    Matrix of a differential between two monomial bases.

    Args:
        differential: Linear map on polynomials
        basis_in: Domain basis (columns)
        basis_out: Codomain basis (rows)
        threads: Worker threads for column evaluation

    Returns:
        SparseMatrix with one column per domain monomial

    Raises:
        ImageOverflow: If an image leaves the codomain basis
    """
    row_index = {m: i for i, m in enumerate(basis_out)}
    monomials = [GradedPolynomial.monomial(m) for m in basis_in]
    workers = _thread_count(threads)
    if workers > 1 and len(monomials) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            columns = list(pool.map(differential, monomials))
    else:
        columns = [differential(m) for m in monomials]
    return SparseMatrix.from_columns(columns, row_index)


@dataclass
class ComplexCell:
    """Degree-k piece: truncated domain, extended codomain and the matrix between them."""

    degree: int
    domain: List[Monomial]
    codomain: List[Monomial]
    matrix: SparseMatrix

    def to_json(self) -> dict:
        return {
            "degree": self.degree,
            "domain": [m.to_json() for m in self.domain],
            "codomain": [m.to_json() for m in self.codomain],
            "matrix": self.matrix.to_json(),
        }


@dataclass
class TruncatedComplex:
    name: str
    window: TruncationWindow
    variables: List[GradedVariable]
    differential: Differential = field(repr=False)
    increment: int = 1
    mode: ArithmeticMode = ArithmeticMode.EXACT
    extension_bound: int = DEFAULT_EXTENSION_BOUND
    threads: int = 1
    cells: Dict[int, ComplexCell] = field(default_factory=dict)

    def cell(self, k: int) -> ComplexCell:
        return self.cells[k]

    def retruncated(self, window: TruncationWindow) -> "TruncatedComplex":
        return assemble_complex(self.name, self.differential, self.variables, window, self.increment,
                                self.mode, self.extension_bound, self.threads)

    def to_json(self) -> dict:
        return {
            "name": self.name,
            "window": self.window.to_dict(),
            "increment": self.increment,
            "mode": self.mode.value,
            "cells": [self.cells[k].to_json() for k in sorted(self.cells)],
        }


def assemble_complex(name: str, differential: Differential, variables: Sequence[GradedVariable],
                     window: TruncationWindow, increment: int,
                     mode: ArithmeticMode = ArithmeticMode.EXACT,
                     extension_bound: int = DEFAULT_EXTENSION_BOUND,
                     threads: Optional[int] = None) -> TruncatedComplex:
    """
    Assemble d_k : V_k^{<=D} -> V_{k+1}^{<=D+increment} for k = ghost_min-1 .. ghost_max.

    Args:
        name: Label used in reports
        differential: Coboundary on polynomials
        variables: Generators spanning the cochains
        window: Ghost window and degree cutoff
        increment: Largest polynomial-degree increase of the differential
        mode: Arithmetic for later rank computations
        extension_bound: Radical elimination bound
        threads: Worker threads for assembly

    Returns:
        TruncatedComplex
    """
    variables = list(variables)
    cells = {}
    for k in range(window.ghost_min - 1, window.ghost_max + 1):
        domain = cochain_basis(variables, k, window.poly_max)
        codomain = cochain_basis(variables, k + 1, window.poly_max + increment)
        matrix = coboundary_matrix(differential, domain, codomain, threads)
        cells[k] = ComplexCell(k, domain, codomain, matrix)
    logger.info(
        f"Assembled {name} complex on degrees {window.ghost_min}..{window.ghost_max}, D={window.poly_max}: "
        + ", ".join(f"dim C^{k}={len(cells[k].domain)}" for k in window.degrees)
    )
    return TruncatedComplex(name, window, variables, differential, increment, ArithmeticMode(mode),
                            extension_bound, _thread_count(threads), cells)


def differential_increment(action: GradedPolynomial) -> int:
    """Largest increase of polynomial degree under {action, -}."""
    return max(action.poly_degree() - 2, 0)


def bv_complex(action: GradedPolynomial, variables: Sequence[GradedVariable], window: TruncationWindow,
               mode: ArithmeticMode = ArithmeticMode.EXACT, extension_bound: int = DEFAULT_EXTENSION_BOUND,
               threads: Optional[int] = None) -> TruncatedComplex:
    """Truncated complex of d = {action, -}."""
    return assemble_complex("bv", lambda c: antibracket(action, c), variables, window,
                            differential_increment(action), mode, extension_bound, threads)


def brst_complex(brst: Differential, ghost_variables: Sequence[GradedVariable], window: TruncationWindow,
                 increment: int, mode: ArithmeticMode = ArithmeticMode.EXACT,
                 extension_bound: int = DEFAULT_EXTENSION_BOUND, threads: Optional[int] = None) -> TruncatedComplex:
    """Truncated complex of a gauge-fixed BRST differential over fields, ghosts and auxiliary fields."""
    starred = [str(var) for var in ghost_variables if var.is_starred]
    if starred:
        raise ValueError(f"BRST cochains cannot contain starred variables: {starred}")
    return assemble_complex("brst", brst, ghost_variables, window, increment, mode, extension_bound, threads)


# Cohomology

@dataclass
class CohomologyEntry:
    degree: int
    cochains: int
    rank: int
    kernel: int
    image: int
    dimension: int
    stable: bool = False


@dataclass
class CohomologyReport:
    name: str
    window: TruncationWindow
    mode: ArithmeticMode
    entries: List[CohomologyEntry] = field(default_factory=list)
    notes: List[str] = field(default_factory=list)

    def dimension(self, k: int) -> int:
        return next(entry.dimension for entry in self.entries if entry.degree == k)

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame([vars(entry) for entry in self.entries])

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "window": self.window.to_dict(),
            "mode": self.mode.value,
            "degrees": [vars(entry).copy() for entry in self.entries],
            "notes": list(self.notes),
        }


def _rank_with_notes(matrix: SparseMatrix, complex_: TruncatedComplex, notes: List[str], label: str) -> int:
    rank, extra = matrix_rank(matrix, complex_.mode, complex_.extension_bound)
    notes.extend(f"{label}: {note}" for note in extra)
    return rank


def _truncated_image_dimension(complex_: TruncatedComplex, k: int, notes: List[str]) -> int:
    """dim(im d_{k-1} intersected with V_k^{<=D}) = rank(A) - rank(A on rows of degree > D)."""
    previous = complex_.cells[k - 1]
    outside = [i for i, m in enumerate(previous.codomain) if m.degree > complex_.window.poly_max]
    full = _rank_with_notes(previous.matrix, complex_, notes, f"d^{k - 1}")
    if not outside:
        return full
    return full - _rank_with_notes(previous.matrix.select_rows(outside), complex_, notes, f"d^{k - 1} overflow")


def _raw_dimensions(complex_: TruncatedComplex, notes: List[str]) -> List[CohomologyEntry]:
    entries = []
    for k in complex_.window.degrees:
        cell = complex_.cells[k]
        rank = _rank_with_notes(cell.matrix, complex_, notes, f"d^{k}")
        kernel = len(cell.domain) - rank
        image = _truncated_image_dimension(complex_, k, notes)
        entries.append(CohomologyEntry(k, len(cell.domain), rank, kernel, image, kernel - image))
    return entries


def cohomology_dims(complex_: TruncatedComplex) -> CohomologyReport:
    """
    Truncated cohomology H^k = ker(d_k on V_k^{<=D}) / (im d_{k-1} intersected with V_k^{<=D}).

    A degree is flagged stable when its dimension is unchanged at cutoff D-1;
    D = 0 is never stable.

    Args:
        complex_: Assembled TruncatedComplex

    Returns:
        CohomologyReport
    """
    notes: List[str] = []
    entries = _raw_dimensions(complex_, notes)
    if complex_.window.poly_max > 0:
        lower = complex_.retruncated(complex_.window.lowered())
        previous = {entry.degree: entry.dimension for entry in _raw_dimensions(lower, [])}
        for entry in entries:
            entry.stable = previous.get(entry.degree) == entry.dimension
    for entry in entries:
        if entry.dimension < 0:
            logger.warning(f"{complex_.name}: negative dimension at degree {entry.degree}; d^2 is not zero")
    report = CohomologyReport(complex_.name, complex_.window, complex_.mode, entries, sorted(set(notes)))
    logger.info(f"{complex_.name} cohomology: " + ", ".join(f"H^{e.degree}={e.dimension}" for e in entries))
    return report


def check_d_squared(complex_: TruncatedComplex) -> Dict[int, int]:
    """
    Nonzero entries of d_{k+1} d_k per degree, with d_{k+1} assembled on the codomain of d_k.

    Returns:
        Map k -> number of nonzero entries of the product (all zero when d^2 = 0)
    """
    residuals = {}
    for k in range(complex_.window.ghost_min - 1, complex_.window.ghost_max):
        cell = complex_.cells[k]
        extended = cochain_basis(complex_.variables, k + 2, complex_.window.poly_max + 2 * complex_.increment)
        following = coboundary_matrix(complex_.differential, cell.codomain, extended, complex_.threads)
        residuals[k] = (following @ cell.matrix).nnz
    return residuals


def rank_nullity_violations(complex_: TruncatedComplex) -> List[int]:
    """Degrees where dim ker + rank differs from the cochain count."""
    report = _raw_dimensions(complex_, [])
    return [e.degree for e in report if e.kernel + e.rank != e.cochains or e.dimension < 0]


def is_coboundary(complex_: TruncatedComplex, k: int, cochain: GradedPolynomial) -> bool:
    """
    Whether a degree-k cochain lies in the image of d_{k-1} on V_{k-1}^{<=D}.

    Raises:
        ValueError: If k is outside the assembled range or the cochain has the wrong degree
    """
    if k - 1 not in complex_.cells:
        raise ValueError(f"Degree {k} is outside the assembled window")
    if not cochain.is_zero() and cochain.ghost_degree != k:
        raise ValueError(f"Cochain has ghost degree {cochain.ghost_degree}, expected {k}")
    if cochain.is_zero():
        return True
    previous = complex_.cells[k - 1]
    row_index = {m: i for i, m in enumerate(previous.codomain)}
    target = SparseMatrix.from_columns([cochain], row_index)
    column = {i: value for (i, _), value in target.entries.items()}
    rank, _ = matrix_rank(previous.matrix, complex_.mode, complex_.extension_bound)
    augmented, _ = matrix_rank(previous.matrix.with_column(column), complex_.mode, complex_.extension_bound)
    return rank == augmented


@dataclass
class ConjugacyReport:
    """Degree-by-degree comparison of two complexes assembled in the same monomial bases."""

    matrices_equal: Dict[int, bool] = field(default_factory=dict)
    ranks: Dict[int, Tuple[int, int]] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(self.matrices_equal.values()) and all(a == b for a, b in self.ranks.values())

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "degrees": {str(k): {"matrices_equal": self.matrices_equal[k], "ranks": list(self.ranks[k])}
                        for k in sorted(self.ranks)},
        }


def hochschild_conjugacy(bv: TruncatedComplex, hochschild: TruncatedComplex) -> ConjugacyReport:
    """
    Compare the BV complex with the Hochschild complex transported through the monomial bijection.

    Both complexes must share variables and window.
    """
    if bv.window != hochschild.window:
        raise ValueError("Complexes were truncated differently")
    report = ConjugacyReport()
    for k in bv.window.degrees:
        left, right = bv.cells[k], hochschild.cells[k]
        same_bases = left.domain == right.domain and left.codomain == right.codomain
        report.matrices_equal[k] = same_bases and left.matrix == right.matrix
        report.ranks[k] = (
            matrix_rank(left.matrix, bv.mode, bv.extension_bound)[0],
            matrix_rank(right.matrix, hochschild.mode, hochschild.extension_bound)[0],
        )
    if not report.passed:
        logger.warning("BV and Hochschild truncated complexes are not conjugate")
    return report


def export_matrices(complex_: TruncatedComplex, directory: str,
                    metadata: Optional[Mapping[str, object]] = None) -> List[str]:
    """Write each d^k as coordinate JSON (stamped with metadata) plus row,col,value CSV; returns written paths."""
    written = []
    for k in sorted(complex_.cells):
        matrix = complex_.cells[k].matrix
        stem = os.path.join(directory, f"{complex_.name}_d{k}")
        write_json(f"{stem}.json", complex_.cells[k].to_json(), metadata)
        matrix.to_frame().to_csv(f"{stem}.csv", index=False)
        written.extend([f"{stem}.json", f"{stem}.csv"])
    logger.info(f"Exported {len(complex_.cells)} matrices of the {complex_.name} complex to {directory}")
    return written
