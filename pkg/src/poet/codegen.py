"""Deterministic transpilation of equation sets into solver scripts.

The emitted dialect is the sandbox's contract: an entry function named
``solution`` that declares symbols, builds ``Eq`` objects, calls ``solve``
over all equations and variables, and returns one value per variable in
declaration order.  Output is bit-stable so golden files can pin it.
"""

from __future__ import annotations

import keyword
import re
from dataclasses import dataclass
from typing import Literal

from .expr import Add, Const, Div, Equation, EquationSet, Expr, Mul, Neg, Pow, Sub, Var
from .prompts import load_prompt_assets


class InvalidIdentifierError(ValueError):
    """A variable name collides with a name the emitted script needs."""


STEP_COMMENTS = (
    "# Step 1: Extract the conditions given in the question",
    "# Step 2: Define unknown variables using symbols() function",
    "# Step 3: Formulate a set of equations using Eq() function.",
    "# Step 4: Solve the set of equations using solve() function",
    "# Step 5: Extract and return the final answer",
)

# Names the scaffold and its result-normalizing epilogue bind.
_RESERVED = frozenset(
    {
        "solution",
        "symbols",
        "Eq",
        "solve",
        "result",
        "variables",
        "candidates",
        "rows",
        "entry",
        "row",
        "getattr",
        "isinstance",
        "sorted",
        "float",
        "list",
        "dict",
        "tuple",
    }
    | set(keyword.kwlist)
)


@dataclass(frozen=True)
class GeneratedScript:
    source: str
    declared_variables: tuple[str, ...]
    equation_count: int
    has_step_comments: bool


_P_ADD, _P_NEG, _P_MUL, _P_ATOM = 10, 20, 30, 50


def _render(e: Expr) -> tuple[str, int]:
    def wrap(child: Expr, min_prec: int) -> str:
        text, prec = _render(child)
        return f"({text})" if prec < min_prec else text

    match e:
        case Const(value):
            if value.denominator == 1:
                text = str(value.numerator)
                return text, (_P_NEG if value < 0 else _P_ATOM)
            return f"({value.numerator} / {value.denominator})", _P_ATOM
        case Var(name):
            return name, _P_ATOM
        case Neg(child):
            return "-" + wrap(child, _P_NEG), _P_NEG
        case Add(l, r):
            return f"{wrap(l, _P_ADD)} + {wrap(r, _P_ADD + 1)}", _P_ADD
        case Sub(l, r):
            return f"{wrap(l, _P_ADD)} - {wrap(r, _P_ADD + 1)}", _P_ADD
        case Mul(l, r):
            return f"{wrap(l, _P_MUL)}*{wrap(r, _P_MUL + 1)}", _P_MUL
        case Div(l, r):
            # Division is always parenthesized in the dialect.
            return f"({wrap(l, _P_MUL)} / {wrap(r, _P_MUL + 1)})", _P_ATOM
        case Pow(base, exponent):
            return f"{wrap(base, _P_ATOM)}**{exponent}", _P_MUL + 5
    raise TypeError(f"not an expression node: {e!r}")


def render_dialect(e: Expr) -> str:
    return _render(e)[0]


def _render_equation(eq: Equation) -> str:
    return f"Eq({render_dialect(eq.lhs)}, {render_dialect(eq.rhs)})"


def transpile(eqs: EquationSet, include_step_comments: bool = True) -> GeneratedScript:
    names = eqs.variables
    for name in names:
        if name in _RESERVED or re.fullmatch(r"eq\d*", name):
            raise InvalidIdentifierError(f"variable name collides with the dialect: {name!r}")
    name_list = ", ".join(names)
    var_tuple = f"({name_list},)" if len(names) == 1 else f"({name_list})"
    eq_names = [f"eq{i + 1}" for i in range(len(eqs.equations))]
    eq_tuple = f"({eq_names[0]},)" if len(eq_names) == 1 else f"({', '.join(eq_names)})"

    lines = ["def solution():"]

    def emit(text: str) -> None:
        lines.append(f"    {text}")

    if include_step_comments:
        emit(STEP_COMMENTS[0])
        emit(STEP_COMMENTS[1])
    emit(f"{name_list} = symbols('{' '.join(names)}')")
    if include_step_comments:
        emit(STEP_COMMENTS[2])
    for eq_name, eq in zip(eq_names, eqs.equations):
        emit(f"{eq_name} = {_render_equation(eq)}")
    if include_step_comments:
        emit(STEP_COMMENTS[3])
    emit(f"result = solve({eq_tuple}, {var_tuple})")
    if include_step_comments:
        emit(STEP_COMMENTS[4])
    emit(f"variables = {var_tuple}")
    emit("candidates = result if isinstance(result, list) else [result]")
    emit("rows = []")
    emit("for entry in candidates:")
    emit("    if isinstance(entry, dict):")
    emit("        rows.append([entry[v] for v in variables])")
    emit("    elif isinstance(entry, (tuple, list)):")
    emit("        rows.append(list(entry))")
    emit("    else:")
    emit("        rows.append([entry])")
    emit("rows = [r for r in rows if all(getattr(v, 'is_real', True) is not False for v in r)]")
    emit("rows.sort(key=lambda r: [float(v) for v in r])")
    emit("return rows[0]")
    return GeneratedScript(
        source="\n".join(lines) + "\n",
        declared_variables=names,
        equation_count=len(eqs.equations),
        has_step_comments=include_step_comments,
    )


CodegenMode = Literal["templated", "direct"]


def format_equation_block(eqs: EquationSet) -> str:
    from .expr import format_canonical

    return "\n".join(f"$${format_canonical(eq)}$$" for eq in eqs.equations)


def build_codegen_instruction(eqs: EquationSet, mode: CodegenMode = "templated") -> str:
    assets = load_prompt_assets()
    block = format_equation_block(eqs)
    if mode == "templated":
        template = assets.get("figure3_template")
        return (
            assets.get("codegen.templated")
            .replace("{equations}", block)
            .replace("{template}", template)
        )
    if mode == "direct":
        return assets.get("codegen.direct").replace("{equations}", block)
    raise ValueError(f"unknown codegen mode: {mode!r}")
