"""Problem records: normalized dataset loading and synthetic generation.

Dataset files are line-delimited JSON objects with fields ``id``,
``question``, ``answers``, optional ``equations`` and optional ``source``.
Loaded records are invariant-checked: gold equations must parse, and when
they fall in a natively solvable class they must solve back to values that
include the gold answers within 1e-9.
"""

from __future__ import annotations

import json
import logging
import random
from dataclasses import dataclass
from pathlib import Path

from .classify import SystemClass, classify
from .consensus import AnswerVector
from .matching import match_answers
from .parser import EquationParseError, parse_equation_set
from .solve import Finite, Unique, solve_system

log = logging.getLogger(__name__)

GOLD_SOLVE_TOLERANCE = 1e-9


class DatasetSchemaError(ValueError):
    def __init__(self, line: int, field: str, message: str):
        super().__init__(f"line {line}, field {field!r}: {message}")
        self.line = line
        self.field = field


class DuplicateIdError(ValueError):
    pass


@dataclass(frozen=True)
class ProblemRecord:
    id: str
    question: str
    gold_answers: tuple[float, ...]
    gold_equations: tuple[str, ...] | None = None
    source: str | None = None
    warning: str | None = None


def _validate_gold(record: ProblemRecord, line: int) -> ProblemRecord:
    if not record.gold_equations:
        return record
    try:
        eqs = parse_equation_set(record.gold_equations)
    except EquationParseError as err:
        raise DatasetSchemaError(line, "equations", f"gold equation does not parse: {err}")
    if classify(eqs) is SystemClass.UNSUPPORTED:
        log.warning("problem %s: gold equations are outside the solvable class", record.id)
        return ProblemRecord(
            record.id,
            record.question,
            record.gold_answers,
            record.gold_equations,
            record.source,
            warning="unsupported gold equations",
        )
    solution = solve_system(eqs)
    assignments = (
        (solution.assignment,)
        if isinstance(solution, Unique)
        else solution.assignments
        if isinstance(solution, Finite)
        else ()
    )
    for assignment in assignments:
        vector = AnswerVector(tuple(float(v) for v in assignment.values()))
        if match_answers(vector, record.gold_answers, GOLD_SOLVE_TOLERANCE):
            return record
    raise DatasetSchemaError(
        line, "equations", f"gold equations do not solve to the gold answers for {record.id!r}"
    )


def _record_from_obj(obj: dict, line: int) -> ProblemRecord:
    if not isinstance(obj, dict):
        raise DatasetSchemaError(line, "<record>", "each line must hold a JSON object")
    for name, kind in (("id", str), ("question", str)):
        if name not in obj:
            raise DatasetSchemaError(line, name, "missing required field")
        if not isinstance(obj[name], kind):
            raise DatasetSchemaError(line, name, f"expected {kind.__name__}")
    answers = obj.get("answers")
    if not isinstance(answers, list) or not answers:
        raise DatasetSchemaError(line, "answers", "must be a nonempty array of numbers")
    if not all(isinstance(a, (int, float)) and not isinstance(a, bool) for a in answers):
        raise DatasetSchemaError(line, "answers", "must contain only numbers")
    equations = obj.get("equations")
    if equations is not None:
        if not isinstance(equations, list) or not all(isinstance(e, str) for e in equations):
            raise DatasetSchemaError(line, "equations", "must be an array of strings")
    source = obj.get("source")
    if source is not None and not isinstance(source, str):
        raise DatasetSchemaError(line, "source", "must be a string")
    record = ProblemRecord(
        id=obj["id"],
        question=obj["question"],
        gold_answers=tuple(float(a) for a in answers),
        gold_equations=tuple(equations) if equations else None,
        source=source,
    )
    return _validate_gold(record, line)


def load_problems(path: str | Path) -> list[ProblemRecord]:
    records: list[ProblemRecord] = []
    seen: set[str] = set()
    with open(path, encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            raw = raw.strip()
            if not raw:
                continue
            try:
                obj = json.loads(raw)
            except json.JSONDecodeError as err:
                raise DatasetSchemaError(line_no, "<json>", str(err))
            record = _record_from_obj(obj, line_no)
            if record.id in seen:
                raise DuplicateIdError(f"duplicate problem id {record.id!r} at line {line_no}")
            seen.add(record.id)
            records.append(record)
    return records


def save_problems(path: str | Path, records: list[ProblemRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for r in records:
            obj = {"id": r.id, "question": r.question, "answers": list(r.gold_answers)}
            if r.gold_equations:
                obj["equations"] = list(r.gold_equations)
            if r.source:
                obj["source"] = r.source
            fh.write(json.dumps(obj, ensure_ascii=False) + "\n")


FAMILIES = ("sum_difference", "rate_current", "denomination")


def _sum_difference(rng: random.Random) -> tuple[str, list[float], list[str]]:
    y = rng.randint(1, 20)
    x = y + rng.randint(1, 30)
    s, d = x + y, x - y
    question = f"The sum of two numbers is {s} and their difference is {d}. What are the two numbers?"
    return question, [float(x), float(y)], [f"x + y = {s}", f"x - y = {d}"]


def _rate_current(rng: random.Random) -> tuple[str, list[float], list[str]]:
    while True:
        y = rng.randint(1, 4)
        x = y + rng.randint(2, 9)
        a = rng.randint(2, 6)
        m = a * (x + y)
        if m % (x - y) == 0:
            b = m // (x - y)
            break
    question = (
        f"It takes a boat {a} hours to travel {m} miles down a river and {b} hours to return "
        f"upstream to its starting point. What is the rate of the current?"
    )
    return question, [float(y)], [f"{a} * (x + y) = {m}", f"{b} * (x - y) = {m}"]


def _denomination(rng: random.Random) -> tuple[str, list[float], list[str]]:
    p_adult = rng.randint(6, 12)
    p_child = rng.randint(2, p_adult - 1)
    x = rng.randint(5, 40)
    y = rng.randint(5, 40)
    n, t = x + y, p_adult * x + p_child * y
    question = (
        f"A theater sold {n} tickets. Adult tickets cost {p_adult} dollars and child tickets "
        f"cost {p_child} dollars, and the total receipts were {t} dollars. How many adult and "
        f"how many child tickets were sold?"
    )
    return question, [float(x), float(y)], [f"x + y = {n}", f"{p_adult} * x + {p_child} * y = {t}"]


_BUILDERS = {
    "sum_difference": _sum_difference,
    "rate_current": _rate_current,
    "denomination": _denomination,
}


def generate_synthetic(
    n: int, seed: int, families: tuple[str, ...] = FAMILIES
) -> list[ProblemRecord]:
    """Deterministic synthetic problems with planted integer answers."""
    if n < 0:
        raise ValueError("n must be nonnegative")
    unknown = set(families) - set(_BUILDERS)
    if unknown:
        raise ValueError(f"unknown families: {sorted(unknown)}")
    rng = random.Random(seed)
    records = []
    for i in range(n):
        family = families[i % len(families)]
        question, answers, equations = _BUILDERS[family](rng)
        records.append(
            ProblemRecord(
                id=f"syn-{seed}-{i:04d}",
                question=question,
                gold_answers=tuple(answers),
                gold_equations=tuple(equations),
                source=f"synthetic:{family}",
            )
        )
    return records
