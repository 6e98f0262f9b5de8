"""Tolerance matching of predicted answers against gold answers."""

from __future__ import annotations

from itertools import permutations
from typing import Sequence

from .consensus import AnswerVector


def match_answers(predicted: AnswerVector, gold: Sequence[float], tol: float) -> bool:
    """True when every gold value maps injectively to a distinct predicted value.

    Extra predicted values are allowed: a program may return every unknown
    while the question asks for one of them.
    """
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    values = predicted.values
    gold = list(gold)
    if len(gold) > len(values):
        return False
    for assignment in permutations(range(len(values)), len(gold)):
        if all(abs(values[j] - g) <= tol for j, g in zip(assignment, gold)):
            return True
    return False
