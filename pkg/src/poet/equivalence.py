"""Solution-set equivalence of equation systems.

Two systems over the same variable names are equivalent when their solution
sets are equal as sets of assignments; with different names, when the
multisets of canonically sorted value tuples agree.  Linear systems with a
common name set are compared by canonical reduced row-echelon form, which
also decides underdetermined pairs exactly.
"""

from __future__ import annotations

from collections import Counter

from .classify import SystemClass, classify, is_linear
from .expr import EquationSet
from .linear import canonical_rows, from_polynomials, gaussian_eliminate
from .polynomial import system_polynomials
from .solve import UnsupportedClassError, solution_assignments, solve_system


def _canonical_linear_form(eqs: EquationSet) -> tuple:
    polys, _ = system_polynomials(eqs)
    order = sorted(set(eqs.variables))
    rref = gaussian_eliminate(from_polynomials(polys, order))
    return canonical_rows(rref)


def equivalent(a: EquationSet, b: EquationSet) -> bool:
    for eqs in (a, b):
        if classify(eqs) is SystemClass.UNSUPPORTED:
            raise UnsupportedClassError("cannot compare an unsupported system")
    same_names = set(a.variables) == set(b.variables)
    polys_a, _ = system_polynomials(a)
    polys_b, _ = system_polynomials(b)
    if same_names and is_linear(polys_a) and is_linear(polys_b):
        return _canonical_linear_form(a) == _canonical_linear_form(b)
    sol_a = solve_system(a)
    sol_b = solve_system(b)
    finite_a = solution_assignments(sol_a)
    finite_b = solution_assignments(sol_b)
    if finite_a is None or finite_b is None:
        # At least one side is underdetermined and the sides are not a pair of
        # same-named linear systems: the infinite families are not comparable.
        return False
    if same_names:
        names = sorted(set(a.variables))
        key_a = Counter(tuple(asg[v] for v in names) for asg in finite_a)
        key_b = Counter(tuple(asg[v] for v in names) for asg in finite_b)
        return key_a == key_b
    tuples_a = Counter(tuple(sorted(asg.values())) for asg in finite_a)
    tuples_b = Counter(tuple(sorted(asg.values())) for asg in finite_b)
    return tuples_a == tuples_b
