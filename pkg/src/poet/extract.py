"""Pulling equations and numeric answers out of model completions."""

from __future__ import annotations

import logging
import re
from dataclasses import dataclass

from .consensus import AnswerVector
from .expr import EquationSet
from .parser import EquationParseError, parse_equation

log = logging.getLogger(__name__)

_DOUBLE_SPAN = re.compile(r"\$\$(.+?)\$\$", re.DOTALL)
_SINGLE_SPAN = re.compile(r"\$([^$]+?)\$")


class ExtractionEmptyError(ValueError):
    """No delimited equation span in the completion."""


class NoNumericAnswerError(ValueError):
    pass


@dataclass
class ExtractionOutcome:
    equations: EquationSet | None
    delimiter: str  # "$$", "$" or "" when no span was found
    spans: list[str]
    skipped: list[tuple[str, EquationParseError]]


def extract_equations_detailed(text: str) -> ExtractionOutcome:
    spans = [m.group(1).strip() for m in _DOUBLE_SPAN.finditer(text)]
    delimiter = "$$"
    if not spans:
        spans = [m.group(1).strip() for m in _SINGLE_SPAN.finditer(text)]
        delimiter = "$" if spans else ""
    parsed = []
    skipped: list[tuple[str, EquationParseError]] = []
    for span in spans:
        try:
            parsed.append(parse_equation(span))
        except EquationParseError as err:
            log.debug("skipping unparsable span %r: %s", span, err)
            skipped.append((span, err))
    equations = EquationSet(tuple(parsed)) if parsed else None
    return ExtractionOutcome(equations, delimiter, spans, skipped)


def extract_equations(text: str) -> EquationSet:
    """All delimited spans parsed in order; duplicates kept.

    ``$$`` spans are authoritative; single-``$`` spans are the fallback when
    no double span exists.  Spans that fail to parse are skipped; the call
    fails only when no span parses at all.
    """
    outcome = extract_equations_detailed(text)
    if outcome.equations is not None:
        return outcome.equations
    if not outcome.spans:
        raise ExtractionEmptyError("no $$-delimited span in completion")
    raise outcome.skipped[0][1]


_EQ_CONSTRUCTOR = re.compile(r"^\s*\w+\s*=\s*Eq\((.*)\)\s*$")


def _split_top_level_comma(text: str) -> tuple[str, str] | None:
    depth = 0
    for i, ch in enumerate(text):
        if ch in "([{":
            depth += 1
        elif ch in ")]}":
            depth -= 1
        elif ch == "," and depth == 0:
            return text[:i], text[i + 1 :]
    return None


def recover_equations_from_code(code: str) -> EquationSet | None:
    """Best-effort recovery of equations from Eq(lhs, rhs) constructor lines."""
    parsed = []
    for line in code.splitlines():
        m = _EQ_CONSTRUCTOR.match(line)
        if not m:
            continue
        parts = _split_top_level_comma(m.group(1))
        if parts is None:
            continue
        try:
            parsed.append(parse_equation(f"{parts[0].strip()} = {parts[1].strip()}"))
        except EquationParseError as err:
            log.debug("cannot recover equation from %r: %s", line.strip(), err)
    return EquationSet(tuple(parsed)) if parsed else None


_NUMBER = re.compile(r"-?(?:\d[\d,]*(?:\.\d+)?|\.\d+)(?:\s*/\s*\d[\d,]*(?:\.\d+)?)?")
_ANSWER_CUE = re.compile(r"\banswers?\s+(?:is|are)\b[:\s]*", re.IGNORECASE)


def _parse_number(token: str) -> float:
    token = token.replace(",", "").replace(" ", "")
    if "/" in token:
        num, den = token.split("/", 1)
        return float(num) / float(den)
    return float(token)


def extract_answer_from_text(text: str) -> AnswerVector:
    """Numbers following the first "answer is/are" cue, else the last number."""
    cue = _ANSWER_CUE.search(text)
    if cue:
        segment = text[cue.end() :].split("\n", 1)[0]
        numbers = [_parse_number(m.group(0)) for m in _NUMBER.finditer(segment)]
        if numbers:
            return AnswerVector(tuple(numbers))
    all_numbers = [_parse_number(m.group(0)) for m in _NUMBER.finditer(text)]
    if not all_numbers:
        raise NoNumericAnswerError("completion contains no numeric answer")
    return AnswerVector((all_numbers[-1],))
