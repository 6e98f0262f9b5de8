"""Routing classification: which solving strategy a system admits.

Linear systems go straight to elimination.  A system is quadratic-reducible
when substituting variables away, in reverse first-occurrence order and
always from the lowest-degree equation that is linear in the variable,
leaves a single univariate polynomial of degree at most two.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

from .expr import EquationSet
from .polynomial import Polynomial, SideConditions, system_polynomials


class SystemClass(enum.Enum):
    LINEAR = "linear"
    QUADRATIC_REDUCIBLE = "quadratic_reducible"
    UNSUPPORTED = "unsupported"


@dataclass
class Substitution:
    """variable = numerator / denominator, in terms of not-yet-eliminated variables."""

    variable: str
    numerator: Polynomial
    denominator: Polynomial


@dataclass
class Reduction:
    final_variable: str | None
    final_polynomial: Polynomial
    substitutions: list[Substitution] = field(default_factory=list)
    conditions: list[Polynomial] = field(default_factory=list)


def is_linear(polys: list[Polynomial]) -> bool:
    return all(p.total_degree() <= 1 for p in polys)


def _substitute(poly: Polynomial, sub: Substitution) -> Polynomial:
    """Replace ``sub.variable`` by num/den, clearing the denominator."""
    parts = poly.coefficients_in(sub.variable)
    top = max(parts)
    out = Polynomial.zero()
    for k, coeff in parts.items():
        out = out + coeff * sub.numerator.power(k) * sub.denominator.power(top - k)
    return out


def reduce_to_univariate(polys: list[Polynomial], variables: tuple[str, ...]) -> Reduction | None:
    """Eliminate all but the first variable; None when the scheme does not apply."""
    active = [p for p in polys if not p.is_zero()]
    if not variables or not active:
        return None
    subs: list[Substitution] = []
    conditions: list[Polynomial] = []
    for var in reversed(variables[1:]):
        present = [p for p in active if p.degree_in(var) > 0]
        if not present:
            # The variable vanished without a defining equation: it is free,
            # so the system cannot reduce to one univariate polynomial.
            return None
        linear_in_var = [p for p in present if p.degree_in(var) == 1]
        if not linear_in_var:
            return None
        chosen = min(linear_in_var, key=lambda p: (p.total_degree(), active.index(p)))
        parts = chosen.coefficients_in(var)
        denom = parts[1]
        numer = -parts.get(0, Polynomial.zero())
        sub = Substitution(var, numer, denom)
        if not denom.is_constant():
            conditions.append(denom)
        next_active = []
        for p in active:
            if p is chosen:
                continue
            q = _substitute(p, sub) if p.degree_in(var) > 0 else p
            if not q.is_zero():
                next_active.append(q)
        active = next_active
        subs.append(sub)
        if not active:
            return None
    final_var = variables[0]
    distinct = {p.monic_key(): p for p in active}
    if len(distinct) != 1:
        return None
    final = next(iter(distinct.values()))
    extra = final.variables() - {final_var}
    if extra or final.total_degree() > 2:
        return None
    return Reduction(final_var if final.degree_in(final_var) else None, final, subs, conditions)


def classify(eqs: EquationSet) -> SystemClass:
    polys, _ = system_polynomials(eqs)
    if is_linear(polys):
        return SystemClass.LINEAR
    if reduce_to_univariate(polys, eqs.variables) is not None:
        return SystemClass.QUADRATIC_REDUCIBLE
    return SystemClass.UNSUPPORTED


__all__ = [
    "SystemClass",
    "Substitution",
    "Reduction",
    "classify",
    "is_linear",
    "reduce_to_univariate",
    "system_polynomials",
    "SideConditions",
]
