"""Exact solving of linear and quadratic-reducible equation systems."""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .classify import Reduction, SystemClass, classify, is_linear, reduce_to_univariate
from .expr import EquationSet
from .linear import LinearSystem, from_polynomials, gaussian_eliminate, pivot_columns
from .polynomial import Polynomial, SideConditions, system_polynomials, to_polynomial
from .surd import QuadValue, split_square

Assignment = dict[str, QuadValue]


class UnsupportedClassError(ValueError):
    """The system is outside the natively solvable classes."""


@dataclass(frozen=True)
class Unique:
    assignment: Assignment


@dataclass(frozen=True)
class Finite:
    assignments: tuple[Assignment, ...]

    def __post_init__(self) -> None:
        if not self.assignments:
            raise ValueError("finite solution list must be nonempty")


@dataclass(frozen=True)
class Inconsistent:
    reason: str = ""


@dataclass(frozen=True)
class Underdetermined:
    rank: int
    free_variables: tuple[str, ...]


SolutionSet = Unique | Finite | Inconsistent | Underdetermined


def _conditions_hold(conditions: list[Polynomial], assignment: Assignment) -> bool:
    return all(bool(QuadValue.rational(0) + c.evaluate(assignment)) for c in conditions)


def _solve_linear(
    polys: list[Polynomial], variables: tuple[str, ...], conditions: SideConditions
) -> SolutionSet:
    system = from_polynomials(polys, list(variables))
    rref = gaussian_eliminate(system)
    for row, c in zip(rref.matrix, rref.constants):
        if not any(row) and c:
            return Inconsistent("zero row with nonzero constant")
    pivots = pivot_columns(rref)
    rank = len(pivots)
    if rank < len(variables):
        free = tuple(v for i, v in enumerate(variables) if i not in pivots)
        return Underdetermined(rank, free)
    values: Assignment = {}
    for r, col in enumerate(pivots):
        values[variables[col]] = QuadValue.rational(rref.constants[r])
    if not _conditions_hold(conditions.nonzero_constraints, values):
        return Inconsistent("solution violates a nonzero side condition")
    return Unique(values)


def _univariate_roots(poly: Polynomial, var: str) -> list[QuadValue] | None:
    """Real roots of a degree <= 2 univariate polynomial; None when inconsistent."""
    coeffs = {k: p.constant_value() for k, p in poly.coefficients_in(var).items()}
    a, b, c = coeffs.get(2, Fraction(0)), coeffs.get(1, Fraction(0)), coeffs.get(0, Fraction(0))
    if not a and not b:
        return None if c else []
    if not a:
        return [QuadValue.rational(-c / b)]
    disc = b * b - 4 * a * c
    if disc < 0:
        return None
    if disc == 0:
        return [QuadValue.rational(-b / (2 * a))]
    s, core = split_square(disc.numerator * disc.denominator)
    root_scale = Fraction(s, disc.denominator)  # sqrt(disc) = root_scale * sqrt(core)
    if core == 1:
        return [
            QuadValue.rational((-b - root_scale) / (2 * a)),
            QuadValue.rational((-b + root_scale) / (2 * a)),
        ]
    return [
        QuadValue(Fraction(-b, 2 * a), -root_scale / (2 * a), core),
        QuadValue(Fraction(-b, 2 * a), root_scale / (2 * a), core),
    ]


def _solve_quadratic(
    reduction: Reduction,
    polys: list[Polynomial],
    variables: tuple[str, ...],
    conditions: SideConditions,
) -> SolutionSet:
    all_conditions = conditions.nonzero_constraints + reduction.conditions
    if reduction.final_variable is None:
        # Constant residue: nonzero by construction, so nothing solves the system.
        return Inconsistent("reduction left a nonzero constant")
    roots = _univariate_roots(reduction.final_polynomial, reduction.final_variable)
    if roots is None:
        return Inconsistent("no real roots")
    assignments: list[Assignment] = []
    for root in roots:
        values: Assignment = {reduction.final_variable: root}
        ok = True
        for sub in reversed(reduction.substitutions):
            den = QuadValue.rational(0) + sub.denominator.evaluate(values)
            if not den:
                ok = False
                break
            num = QuadValue.rational(0) + sub.numerator.evaluate(values)
            values[sub.variable] = num / den
        if not ok or not _conditions_hold(all_conditions, values):
            continue
        # Clearing denominators can introduce spurious candidates; verify residuals.
        if any(bool(QuadValue.rational(0) + p.evaluate(values)) for p in polys):
            continue
        if values not in assignments:
            assignments.append(values)
    if not assignments:
        return Inconsistent("no admissible real solutions")
    assignments.sort(key=lambda asg: tuple(asg[v] for v in variables))
    if len(assignments) == 1:
        return Unique(assignments[0])
    return Finite(tuple(assignments))


def solve_system(eqs: EquationSet) -> SolutionSet:
    polys, conditions = system_polynomials(eqs)
    if is_linear(polys):
        return _solve_linear(polys, eqs.variables, conditions)
    reduction = reduce_to_univariate(polys, eqs.variables)
    if reduction is None:
        raise UnsupportedClassError(f"system is not linear or quadratic-reducible: {classify(eqs)}")
    return _solve_quadratic(reduction, polys, eqs.variables, conditions)


def check_solution(eqs: EquationSet, assignment: Assignment) -> bool:
    """Exact residual check in the relevant quadratic extension."""
    missing = set(eqs.variables) - set(assignment)
    if missing:
        raise ValueError(f"assignment missing variables: {sorted(missing)}")
    for eq in eqs:
        poly, conditions = to_polynomial(eq)
        residual = QuadValue.rational(0) + poly.evaluate(assignment)
        if residual:
            return False
        if not _conditions_hold(conditions.nonzero_constraints, assignment):
            return False
    return True


def solution_assignments(solution: SolutionSet) -> tuple[Assignment, ...] | None:
    """Finite list of assignments, or None when the set is not finite."""
    if isinstance(solution, Unique):
        return (solution.assignment,)
    if isinstance(solution, Finite):
        return solution.assignments
    if isinstance(solution, Inconsistent):
        return ()
    return None


__all__ = [
    "Assignment",
    "Finite",
    "Inconsistent",
    "SolutionSet",
    "Underdetermined",
    "Unique",
    "UnsupportedClassError",
    "check_solution",
    "solution_assignments",
    "solve_system",
]
