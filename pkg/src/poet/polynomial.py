"""Sparse multivariate polynomials over the rationals.

A monomial is a sorted tuple of (variable, positive exponent) pairs; the
empty tuple is the constant monomial.  Zero coefficients are never stored,
and any operation that would push a monomial past total degree 16 fails
instead of allocating unbounded terms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction

from .expr import Add, Const, Div, Equation, Expr, Mul, Neg, Pow, Sub, Var

MAX_TOTAL_DEGREE = 16

Monomial = tuple[tuple[str, int], ...]


class DegreeOverflowError(ValueError):
    """A product would exceed the supported total degree."""


class DivisionByZeroConstantError(ZeroDivisionError):
    """Division by a subexpression that is identically zero."""


def _mono_degree(m: Monomial) -> int:
    return sum(e for _, e in m)


def _mono_mul(a: Monomial, b: Monomial) -> Monomial:
    merged = dict(a)
    for v, e in b:
        merged[v] = merged.get(v, 0) + e
    return tuple(sorted(merged.items()))


@dataclass
class Polynomial:
    terms: dict[Monomial, Fraction] = field(default_factory=dict)

    @staticmethod
    def zero() -> Polynomial:
        return Polynomial({})

    @staticmethod
    def const(value: Fraction | int) -> Polynomial:
        q = Fraction(value)
        return Polynomial({(): q} if q else {})

    @staticmethod
    def variable(name: str) -> Polynomial:
        return Polynomial({((name, 1),): Fraction(1)})

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(m == () for m in self.terms)

    def constant_value(self) -> Fraction:
        return self.terms.get((), Fraction(0))

    def total_degree(self) -> int:
        return max((_mono_degree(m) for m in self.terms), default=0)

    def degree_in(self, var: str) -> int:
        best = 0
        for m in self.terms:
            for v, e in m:
                if v == var and e > best:
                    best = e
        return best

    def variables(self) -> set[str]:
        return {v for m in self.terms for v, _ in m}

    def __add__(self, other: Polynomial) -> Polynomial:
        out = dict(self.terms)
        for m, c in other.terms.items():
            s = out.get(m, Fraction(0)) + c
            if s:
                out[m] = s
            else:
                out.pop(m, None)
        return Polynomial(out)

    def __neg__(self) -> Polynomial:
        return Polynomial({m: -c for m, c in self.terms.items()})

    def __sub__(self, other: Polynomial) -> Polynomial:
        return self + (-other)

    def __mul__(self, other: Polynomial) -> Polynomial:
        out: dict[Monomial, Fraction] = {}
        for ma, ca in self.terms.items():
            for mb, cb in other.terms.items():
                m = _mono_mul(ma, mb)
                if _mono_degree(m) > MAX_TOTAL_DEGREE:
                    raise DegreeOverflowError(
                        f"monomial degree {_mono_degree(m)} exceeds {MAX_TOTAL_DEGREE}"
                    )
                s = out.get(m, Fraction(0)) + ca * cb
                if s:
                    out[m] = s
                else:
                    out.pop(m, None)
        return Polynomial(out)

    def scaled(self, factor: Fraction) -> Polynomial:
        if not factor:
            return Polynomial.zero()
        return Polynomial({m: c * factor for m, c in self.terms.items()})

    def power(self, exponent: int) -> Polynomial:
        result = Polynomial.const(1)
        for _ in range(exponent):
            result = result * self
        return result

    def coefficients_in(self, var: str) -> dict[int, Polynomial]:
        """Group terms by the power of ``var``, with ``var`` removed."""
        out: dict[int, Polynomial] = {}
        for m, c in self.terms.items():
            k = 0
            rest = []
            for v, e in m:
                if v == var:
                    k = e
                else:
                    rest.append((v, e))
            bucket = out.setdefault(k, Polynomial.zero())
            out[k] = bucket + Polynomial({tuple(rest): c})
        return {k: p for k, p in out.items() if not p.is_zero()}

    def evaluate(self, point):
        """Evaluate at a point; values need +, * and integer ** support."""
        total = None
        for m, c in self.terms.items():
            term = c
            for v, e in m:
                term = term * point[v] ** e
            total = term if total is None else total + term
        return Fraction(0) if total is None else total

    def monic_key(self) -> tuple:
        """Scale-invariant identity key: terms divided by the leading coefficient."""
        if self.is_zero():
            return ()
        lead = self.terms[max(self.terms, key=lambda m: (_mono_degree(m), m))]
        return tuple(sorted((m, c / lead) for m, c in self.terms.items()))

    def __str__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for m, c in sorted(self.terms.items(), key=lambda kv: (-_mono_degree(kv[0]), kv[0])):
            mono = "*".join(v if e == 1 else f"{v}^{e}" for v, e in m)
            parts.append(f"{c}" if not mono else (f"{c}*{mono}" if c != 1 else mono))
        return " + ".join(parts)


@dataclass
class SideConditions:
    """Polynomials that must stay nonzero at any admissible solution."""

    nonzero_constraints: list[Polynomial] = field(default_factory=list)

    def extend(self, other: SideConditions) -> None:
        self.nonzero_constraints.extend(other.nonzero_constraints)


def _rational_form(e: Expr, conditions: list[Polynomial]) -> tuple[Polynomial, Polynomial]:
    """Rewrite ``e`` as numerator/denominator, collecting variable-bearing divisors."""
    match e:
        case Const(value):
            return Polynomial.const(value), Polynomial.const(1)
        case Var(name):
            return Polynomial.variable(name), Polynomial.const(1)
        case Neg(child):
            n, d = _rational_form(child, conditions)
            return -n, d
        case Add(l, r) | Sub(l, r):
            nl, dl = _rational_form(l, conditions)
            nr, dr = _rational_form(r, conditions)
            cross = nr * dl
            top = nl * dr + (-cross if isinstance(e, Sub) else cross)
            return top, dl * dr
        case Mul(l, r):
            nl, dl = _rational_form(l, conditions)
            nr, dr = _rational_form(r, conditions)
            return nl * nr, dl * dr
        case Div(l, r):
            nl, dl = _rational_form(l, conditions)
            nr, dr = _rational_form(r, conditions)
            if nr.is_zero():
                raise DivisionByZeroConstantError("division by an identically zero expression")
            if not nr.is_constant():
                conditions.append(nr)
            return nl * dr, dl * nr
        case Pow(base, exponent):
            nb, db = _rational_form(base, conditions)
            return nb.power(exponent), db.power(exponent)
    raise TypeError(f"not an expression node: {e!r}")


def to_polynomial(eq: Equation) -> tuple[Polynomial, SideConditions]:
    """Clear denominators in ``lhs - rhs`` by cross-multiplication.

    The returned polynomial has the same roots as the equation wherever the
    recorded nonzero constraints hold.
    """
    conditions: list[Polynomial] = []
    nl, dl = _rational_form(eq.lhs, conditions)
    nr, dr = _rational_form(eq.rhs, conditions)
    return nl * dr - nr * dl, SideConditions(conditions)


def system_polynomials(eqs) -> tuple[list[Polynomial], SideConditions]:
    polys = []
    conditions = SideConditions()
    for eq in eqs:
        p, c = to_polynomial(eq)
        polys.append(p)
        conditions.extend(c)
    return polys, conditions
