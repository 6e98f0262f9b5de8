"""Expression trees for the equation language.

Constants are exact rationals, powers carry small integer exponents, and
every node is immutable, so trees can be shared freely across threads.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction

MAX_EXPONENT = 8

_IDENT_RE = re.compile(r"[A-Za-z][A-Za-z0-9_]*\Z")


class ExprError(ValueError):
    """A node would violate a structural invariant."""


@dataclass(frozen=True)
class Expr:
    pass


@dataclass(frozen=True)
class Const(Expr):
    value: Fraction

    def __post_init__(self) -> None:
        # Fraction normalizes sign and gcd on construction.
        object.__setattr__(self, "value", Fraction(self.value))


@dataclass(frozen=True)
class Var(Expr):
    name: str

    def __post_init__(self) -> None:
        if not _IDENT_RE.match(self.name):
            raise ExprError(f"invalid variable identifier: {self.name!r}")


@dataclass(frozen=True)
class Neg(Expr):
    child: Expr


@dataclass(frozen=True)
class Add(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Sub(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Mul(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Div(Expr):
    left: Expr
    right: Expr


@dataclass(frozen=True)
class Pow(Expr):
    base: Expr
    exponent: int

    def __post_init__(self) -> None:
        if not isinstance(self.exponent, int) or isinstance(self.exponent, bool):
            raise ExprError(f"exponent must be an integer, got {self.exponent!r}")
        if not 0 <= self.exponent <= MAX_EXPONENT:
            raise ExprError(f"exponent out of range [0, {MAX_EXPONENT}]: {self.exponent}")


@dataclass(frozen=True)
class Equation:
    lhs: Expr
    rhs: Expr
    source_text: str = ""

    def __str__(self) -> str:
        return format_canonical(self)


@dataclass(frozen=True)
class EquationSet:
    """Ordered equations plus their variables in first-occurrence order."""

    equations: tuple[Equation, ...]
    variables: tuple[str, ...] = field(init=False)

    def __post_init__(self) -> None:
        equations = tuple(self.equations)
        if not equations:
            raise ExprError("equation set must be nonempty")
        object.__setattr__(self, "equations", equations)
        seen: list[str] = []
        for eq in equations:
            for name in variables_of(eq.lhs) + variables_of(eq.rhs):
                if name not in seen:
                    seen.append(name)
        object.__setattr__(self, "variables", tuple(seen))

    def __len__(self) -> int:
        return len(self.equations)

    def __iter__(self):
        return iter(self.equations)


def variables_of(expr: Expr) -> list[str]:
    """Identifiers in preorder, first occurrence only."""
    out: list[str] = []

    def walk(e: Expr) -> None:
        match e:
            case Var(name):
                if name not in out:
                    out.append(name)
            case Neg(child):
                walk(child)
            case Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r):
                walk(l)
                walk(r)
            case Pow(base, _):
                walk(base)
            case _:
                pass

    walk(expr)
    return out


# Precedence levels used by both the parser and the canonical renderer.
_PREC_ADD = 10
_PREC_NEG = 20
_PREC_MUL = 30
_PREC_POW = 40
_PREC_ATOM = 50


def _format_const(q: Fraction) -> tuple[str, int]:
    if q.denominator == 1:
        text = str(q.numerator)
        return text, (_PREC_NEG if q < 0 else _PREC_ATOM)
    # Exact decimal when the denominator divides a power of ten.
    den = q.denominator
    twos = fives = 0
    while den % 2 == 0:
        den //= 2
        twos += 1
    while den % 5 == 0:
        den //= 5
        fives += 1
    if den == 1:
        k = max(twos, fives)
        scaled = abs(q.numerator) * 10**k // q.denominator
        digits = str(scaled).rjust(k + 1, "0")
        text = f"{digits[:-k]}.{digits[-k:]}"
        if q < 0:
            return "-" + text, _PREC_NEG
        return text, _PREC_ATOM
    # Non-terminating decimal: explicit quotient (reparses as a division).
    return f"({q.numerator}/{q.denominator})", _PREC_ATOM


def _render(e: Expr) -> tuple[str, int]:
    def wrap(child: Expr, min_prec: int) -> str:
        text, prec = _render(child)
        return f"({text})" if prec < min_prec else text

    match e:
        case Const(value):
            return _format_const(value)
        case Var(name):
            return name, _PREC_ATOM
        case Neg(child):
            return "-" + wrap(child, _PREC_NEG), _PREC_NEG
        case Add(l, r):
            return f"{wrap(l, _PREC_ADD)} + {wrap(r, _PREC_ADD + 1)}", _PREC_ADD
        case Sub(l, r):
            return f"{wrap(l, _PREC_ADD)} - {wrap(r, _PREC_ADD + 1)}", _PREC_ADD
        case Mul(l, r):
            return f"{wrap(l, _PREC_MUL)} * {wrap(r, _PREC_MUL + 1)}", _PREC_MUL
        case Div(l, r):
            return f"{wrap(l, _PREC_MUL)} / {wrap(r, _PREC_MUL + 1)}", _PREC_MUL
        case Pow(base, exponent):
            return f"{wrap(base, _PREC_ATOM)}^{exponent}", _PREC_POW
    raise TypeError(f"not an expression node: {e!r}")


def format_expr(e: Expr) -> str:
    return _render(e)[0]


def format_canonical(eq: Equation) -> str:
    """Deterministic infix rendering.

    Reparsing the result reproduces the tree structurally for any tree the
    parser can itself produce (nonnegative constants whose denominators
    divide a power of ten).
    """
    return f"{format_expr(eq.lhs)} = {format_expr(eq.rhs)}"
