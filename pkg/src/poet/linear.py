"""Exact Gauss-Jordan elimination over the rationals."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .polynomial import Polynomial


@dataclass
class LinearSystem:
    matrix: list[list[Fraction]]
    constants: list[Fraction]
    variables: list[str]

    def __post_init__(self) -> None:
        if len(self.matrix) != len(self.constants):
            raise ValueError("row count must match constant vector length")
        for row in self.matrix:
            if len(row) != len(self.variables):
                raise ValueError("column count must match variable count")

    @property
    def rows(self) -> int:
        return len(self.matrix)

    @property
    def cols(self) -> int:
        return len(self.variables)


def from_polynomials(polys: list[Polynomial], variables: list[str]) -> LinearSystem:
    """Rows a.v = -c from degree <= 1 polynomials a.v + c."""
    matrix, constants = [], []
    for p in polys:
        row = [Fraction(0)] * len(variables)
        const = Fraction(0)
        for mono, coeff in p.terms.items():
            if mono == ():
                const = coeff
            else:
                (var, exp), = mono
                if exp != 1:
                    raise ValueError(f"nonlinear term {var}^{exp}")
                row[variables.index(var)] = coeff
        matrix.append(row)
        constants.append(-const)
    return LinearSystem(matrix, constants, list(variables))


def gaussian_eliminate(system: LinearSystem) -> LinearSystem:
    """Reduced row-echelon form; pivots by first row with a nonzero entry."""
    m = [row[:] for row in system.matrix]
    b = list(system.constants)
    rows, cols = system.rows, system.cols
    pivot_row = 0
    for col in range(cols):
        src = next((r for r in range(pivot_row, rows) if m[r][col]), None)
        if src is None:
            continue
        if src != pivot_row:
            m[pivot_row], m[src] = m[src], m[pivot_row]
            b[pivot_row], b[src] = b[src], b[pivot_row]
        pivot = m[pivot_row][col]
        m[pivot_row] = [x / pivot for x in m[pivot_row]]
        b[pivot_row] /= pivot
        for r in range(rows):
            if r != pivot_row and m[r][col]:
                factor = m[r][col]
                m[r] = [x - factor * y for x, y in zip(m[r], m[pivot_row])]
                b[r] -= factor * b[pivot_row]
        pivot_row += 1
        if pivot_row == rows:
            break
    return LinearSystem(m, b, list(system.variables))


def pivot_columns(rref: LinearSystem) -> list[int]:
    out = []
    for r, row in enumerate(rref.matrix):
        for c, x in enumerate(row):
            if x:
                out.append(c)
                break
    return out


def canonical_rows(rref: LinearSystem) -> tuple:
    """Hashable canonical form: RREF rows with zero rows dropped.

    Any inconsistent system collapses to the single marker row, so two
    inconsistent systems always compare equal (both have empty solution sets).
    """
    rows = []
    for row, c in zip(rref.matrix, rref.constants):
        if any(row):
            rows.append((tuple(row), c))
        elif c:
            return ((("inconsistent",), Fraction(1)),)
    return tuple(rows)
