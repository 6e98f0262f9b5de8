"""Recursive-descent parser for the infix equation language.

Grammar, loosest binding first::

    equation := expr '=' expr
    expr     := unary (('+' | '-') unary)*
    unary    := '-' unary | product
    product  := factor (('*' | '/' | implicit) factor)*
    factor   := '-' factor | power
    power    := atom ['^' INT]
    atom     := NUMBER | IDENT | '(' expr ')'

Multiplication and division bind tighter than unary minus, which binds
tighter than addition: ``-2*x + 3`` reads as ``(-(2*x)) + 3``.  Implicit
multiplication is inserted between a numeric literal and a following
identifier or opening parenthesis (``2x``, ``3(x+1)``).

Surface conveniences: decimal literals become exact rationals, commas
inside digit runs are thousands separators, a ``%`` suffix divides by 100,
``**`` is accepted for ``^``, ``==`` for ``=``, and the unicode minus,
multiplication and division glyphs are treated as their ASCII operators.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .expr import MAX_EXPONENT, Const, Div, Equation, EquationSet, Expr, Add, Mul, Neg, Pow, Sub, Var


class EquationParseError(ValueError):
    """Parse failure with a character offset and an expectation hint."""

    def __init__(self, message: str, offset: int, hint: str = ""):
        super().__init__(f"{message} at offset {offset}" + (f" (expected {hint})" if hint else ""))
        self.offset = offset
        self.hint = hint


class EquationSyntaxError(EquationParseError):
    pass


class NoEqualsSignError(EquationParseError):
    def __init__(self, text: str):
        super().__init__("no '=' sign in equation", len(text))


class MultipleEqualsSignsError(EquationParseError):
    def __init__(self, offset: int):
        super().__init__("more than one '=' sign", offset)


@dataclass(frozen=True)
class _Token:
    kind: str  # NUMBER IDENT + - * / ^ ( ) =
    pos: int
    value: Fraction | str | None = None


_GLYPHS = {"−": "-", "×": "*", "÷": "/"}


def _is_digit(ch: str) -> bool:
    return "0" <= ch <= "9"


def _is_ident_start(ch: str) -> bool:
    return ("a" <= ch <= "z") or ("A" <= ch <= "Z")


def _lex(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    i, n = 0, len(text)
    while i < n:
        ch = _GLYPHS.get(text[i], text[i])
        if ch.isspace():
            i += 1
            continue
        start = i
        if _is_digit(ch) or (ch == "." and i + 1 < n and _is_digit(text[i + 1])):
            int_digits, frac_digits = [], []
            while i < n and _is_digit(text[i]):
                int_digits.append(text[i])
                i += 1
                # Thousands separator: comma flanked by digits.
                if i + 1 < n and text[i] == "," and _is_digit(text[i + 1]):
                    i += 1
            if i < n and text[i] == ".":
                i += 1
                while i < n and _is_digit(text[i]):
                    frac_digits.append(text[i])
                    i += 1
            value = Fraction(int("".join(int_digits) or "0"))
            if frac_digits:
                value += Fraction(int("".join(frac_digits)), 10 ** len(frac_digits))
            if i < n and text[i] == "%":
                value /= 100
                i += 1
            tokens.append(_Token("NUMBER", start, value))
            continue
        if _is_ident_start(ch):
            i += 1
            while i < n and (_is_ident_start(text[i]) or _is_digit(text[i]) or text[i] == "_"):
                i += 1
            tokens.append(_Token("IDENT", start, text[start:i]))
            continue
        if ch == "*":
            if i + 1 < n and text[i + 1] == "*":
                tokens.append(_Token("^", start))
                i += 2
            else:
                tokens.append(_Token("*", start))
                i += 1
            continue
        if ch == "=":
            i += 2 if i + 1 < n and text[i + 1] == "=" else 1
            tokens.append(_Token("=", start))
            continue
        if ch in "+-/^()":
            tokens.append(_Token(ch, start))
            i += 1
            continue
        raise EquationSyntaxError(f"unexpected character {text[i]!r}", i, "number, variable or operator")
    # Implicit multiplication after a numeric literal.
    with_implicit: list[_Token] = []
    for tok in tokens:
        if with_implicit and with_implicit[-1].kind == "NUMBER" and tok.kind in ("IDENT", "("):
            with_implicit.append(_Token("*", tok.pos))
        with_implicit.append(tok)
    return with_implicit


class _Parser:
    def __init__(self, tokens: list[_Token], end_pos: int):
        self.tokens = tokens
        self.end_pos = end_pos
        self.i = 0

    def peek(self) -> _Token | None:
        return self.tokens[self.i] if self.i < len(self.tokens) else None

    def next_pos(self) -> int:
        tok = self.peek()
        return tok.pos if tok else self.end_pos

    def take(self, kind: str) -> bool:
        tok = self.peek()
        if tok and tok.kind == kind:
            self.i += 1
            return True
        return False

    def expr(self) -> Expr:
        node = self.unary()
        while True:
            if self.take("+"):
                node = Add(node, self.unary())
            elif self.take("-"):
                node = Sub(node, self.unary())
            else:
                return node

    def unary(self) -> Expr:
        if self.take("-"):
            return Neg(self.unary())
        return self.product()

    def product(self) -> Expr:
        node = self.factor()
        while True:
            if self.take("*"):
                node = Mul(node, self.factor())
            elif self.take("/"):
                node = Div(node, self.factor())
            else:
                return node

    def factor(self) -> Expr:
        if self.take("-"):
            return Neg(self.factor())
        return self.power()

    def power(self) -> Expr:
        base = self.atom()
        if self.take("^"):
            tok = self.peek()
            if tok is None or tok.kind != "NUMBER":
                raise EquationSyntaxError("bad exponent", self.next_pos(), "integer literal")
            value = tok.value
            assert isinstance(value, Fraction)
            if value.denominator != 1:
                raise EquationSyntaxError("fractional exponent", tok.pos, "integer exponent")
            if not 0 <= value.numerator <= MAX_EXPONENT:
                raise EquationSyntaxError(
                    "exponent out of range", tok.pos, f"integer in [0, {MAX_EXPONENT}]"
                )
            self.i += 1
            return Pow(base, int(value))
        return base

    def atom(self) -> Expr:
        tok = self.peek()
        if tok is None:
            raise EquationSyntaxError("unexpected end of input", self.end_pos, "number, variable or '('")
        if tok.kind == "NUMBER":
            self.i += 1
            assert isinstance(tok.value, Fraction)
            return Const(tok.value)
        if tok.kind == "IDENT":
            self.i += 1
            assert isinstance(tok.value, str)
            return Var(tok.value)
        if tok.kind == "(":
            self.i += 1
            node = self.expr()
            if not self.take(")"):
                raise EquationSyntaxError("unbalanced parenthesis", self.next_pos(), "')'")
            return node
        raise EquationSyntaxError(f"unexpected token {tok.kind!r}", tok.pos, "number, variable or '('")

    def parse_full(self) -> Expr:
        node = self.expr()
        tok = self.peek()
        if tok is not None:
            raise EquationSyntaxError(f"trailing input {tok.kind!r}", tok.pos, "operator or end")
        return node


def parse_expression(text: str) -> Expr:
    """Parse a single expression with no equals sign."""
    tokens = _lex(text)
    return _Parser(tokens, len(text)).parse_full()


def parse_equation(text: str) -> Equation:
    tokens = _lex(text)
    splits = [k for k, tok in enumerate(tokens) if tok.kind == "="]
    if not splits:
        raise NoEqualsSignError(text)
    if len(splits) > 1:
        raise MultipleEqualsSignsError(tokens[splits[1]].pos)
    k = splits[0]
    eq_pos = tokens[k].pos
    if k == 0:
        raise EquationSyntaxError("empty left-hand side", eq_pos, "expression before '='")
    lhs = _Parser(tokens[:k], eq_pos).parse_full()
    if k + 1 == len(tokens):
        raise EquationSyntaxError("empty right-hand side", len(text), "expression after '='")
    rhs = _Parser(tokens[k + 1 :], len(text)).parse_full()
    return Equation(lhs, rhs, source_text=text)


def parse_equation_set(texts: list[str] | tuple[str, ...]) -> EquationSet:
    return EquationSet(tuple(parse_equation(t) for t in texts))
