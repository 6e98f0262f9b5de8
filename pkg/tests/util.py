"""Shared test helpers: independent oracles kept free of production code paths."""

from __future__ import annotations

import random
from fractions import Fraction

from poet.expr import Add, Const, Div, Equation, Expr, Mul, Neg, Pow, Sub, Var


def eval_expr(e: Expr, point: dict[str, Fraction]) -> Fraction:
    """Direct structural evaluation; raises ZeroDivisionError on vanishing divisors."""
    if isinstance(e, Const):
        return e.value
    if isinstance(e, Var):
        return point[e.name]
    if isinstance(e, Neg):
        return -eval_expr(e.child, point)
    if isinstance(e, Add):
        return eval_expr(e.left, point) + eval_expr(e.right, point)
    if isinstance(e, Sub):
        return eval_expr(e.left, point) - eval_expr(e.right, point)
    if isinstance(e, Mul):
        return eval_expr(e.left, point) * eval_expr(e.right, point)
    if isinstance(e, Div):
        return eval_expr(e.left, point) / eval_expr(e.right, point)
    if isinstance(e, Pow):
        return eval_expr(e.base, point) ** e.exponent
    raise TypeError(e)


# Constants limited to nonnegative rationals with terminating decimal form,
# the range the canonical renderer round-trips exactly.
_CONST_POOL = [
    Fraction(0),
    Fraction(1),
    Fraction(2),
    Fraction(3),
    Fraction(7),
    Fraction(24),
    Fraction(120),
    Fraction(1, 2),
    Fraction(1, 4),
    Fraction(3, 10),
    Fraction(7, 100),
    Fraction(13, 8),
    Fraction(1001, 1000),
]

_VAR_POOL = ["x", "y", "z", "a", "b2", "rate_c"]


def random_expr(rng: random.Random, depth: int = 0) -> Expr:
    if depth >= 4 or rng.random() < 0.3:
        if rng.random() < 0.5:
            return Const(rng.choice(_CONST_POOL))
        return Var(rng.choice(_VAR_POOL))
    kind = rng.randrange(7)
    if kind == 0:
        return Neg(random_expr(rng, depth + 1))
    if kind == 1:
        return Add(random_expr(rng, depth + 1), random_expr(rng, depth + 1))
    if kind == 2:
        return Sub(random_expr(rng, depth + 1), random_expr(rng, depth + 1))
    if kind == 3:
        return Mul(random_expr(rng, depth + 1), random_expr(rng, depth + 1))
    if kind == 4:
        return Div(random_expr(rng, depth + 1), random_expr(rng, depth + 1))
    if kind == 5:
        return Pow(random_expr(rng, depth + 1), rng.randrange(0, 4))
    return random_expr(rng, depth + 1)


def random_equation(rng: random.Random) -> Equation:
    return Equation(random_expr(rng), random_expr(rng))


def random_invertible_system(
    rng: random.Random, n: int, coeff_range: tuple[int, int] = (-9, 9)
) -> tuple[list[list[int]], list[int], list[int]]:
    """Random integer matrix with independent rows plus a planted solution.

    Returns (matrix, solution, rhs) with rhs = matrix @ solution.
    """
    lo, hi = coeff_range
    solution = [rng.randint(-9, 9) for _ in range(n)]
    while True:
        matrix = [[rng.randint(lo, hi) for _ in range(n)] for _ in range(n)]
        if _det(matrix) != 0:
            break
    rhs = [sum(row[j] * solution[j] for j in range(n)) for row in matrix]
    return matrix, solution, rhs


def _det(matrix: list[list[int]]) -> Fraction:
    n = len(matrix)
    m = [[Fraction(x) for x in row] for row in matrix]
    det = Fraction(1)
    for col in range(n):
        src = next((r for r in range(col, n) if m[r][col]), None)
        if src is None:
            return Fraction(0)
        if src != col:
            m[col], m[src] = m[src], m[col]
            det = -det
        det *= m[col][col]
        for r in range(col + 1, n):
            f = m[r][col] / m[col][col]
            m[r] = [x - f * y for x, y in zip(m[r], m[col])]
    return det


def system_to_texts(matrix, rhs, names) -> list[str]:
    """Render integer rows as equation strings the parser accepts."""
    texts = []
    for row, c in zip(matrix, rhs):
        terms = [f"{coeff}*{name}" for coeff, name in zip(row, names) if coeff]
        lhs = " + ".join(terms) if terms else "0"
        texts.append(f"{lhs} = {c}")
    return texts
