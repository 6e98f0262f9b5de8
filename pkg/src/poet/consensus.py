"""Self-consistency voting over per-path answer vectors.

Two vectors match when they have the same arity and agree componentwise
within the tolerance.  Clustering is greedy in path order: each vector
joins the first cluster whose representative it matches, else founds a new
cluster.  Matching at tolerance is not transitive, so the greedy rule is
what makes the outcome well defined.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Protocol, Sequence


@dataclass(frozen=True)
class AnswerVector:
    values: tuple[float, ...]
    labels: tuple[str, ...] | None = None
    exact: tuple[bool, ...] = ()

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        object.__setattr__(self, "values", values)
        for v in values:
            if not math.isfinite(v):
                raise ValueError(f"answer values must be finite, got {v!r}")
        if self.labels is not None:
            labels = tuple(self.labels)
            if len(labels) != len(values):
                raise ValueError("labels must parallel values")
            object.__setattr__(self, "labels", labels)
        exact = tuple(self.exact) if self.exact else (False,) * len(values)
        if len(exact) != len(values):
            raise ValueError("exactness flags must parallel values")
        object.__setattr__(self, "exact", exact)


def vectors_match(a: AnswerVector, b: AnswerVector, tol: float) -> bool:
    if len(a.values) != len(b.values):
        return False
    return all(abs(x - y) <= tol for x, y in zip(a.values, b.values))


@dataclass(frozen=True)
class Cluster:
    representative_index: int
    member_indices: tuple[int, ...]


def cluster(vectors: Sequence[AnswerVector], tol: float) -> list[Cluster]:
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    reps: list[tuple[int, AnswerVector, list[int]]] = []
    for i, vec in enumerate(vectors):
        for rep_i, rep_vec, members in reps:
            if vectors_match(vec, rep_vec, tol):
                members.append(i)
                break
        else:
            reps.append((i, vec, [i]))
    return [Cluster(rep_i, tuple(members)) for rep_i, _, members in reps]


class VotableTrace(Protocol):
    path_index: int
    final_answers: AnswerVector | None


@dataclass(frozen=True)
class ClusterSummary:
    representative: AnswerVector
    path_index: int
    count: int


@dataclass(frozen=True)
class VoteOutcome:
    winner: AnswerVector | None
    cluster_sizes: tuple[ClusterSummary, ...]
    excluded_error_paths: int

    @property
    def total_paths(self) -> int:
        return sum(c.count for c in self.cluster_sizes) + self.excluded_error_paths


def vote(traces: Sequence[VotableTrace], tol: float) -> VoteOutcome:
    """Majority outcome after excluding error paths; ties break to the earliest path."""
    if tol <= 0:
        raise ValueError("tolerance must be positive")
    ordered = sorted(traces, key=lambda t: t.path_index)
    valid = [(t.path_index, t.final_answers) for t in ordered if t.final_answers is not None]
    excluded = len(ordered) - len(valid)
    clusters = cluster([vec for _, vec in valid], tol)
    summaries = [
        ClusterSummary(
            representative=valid[c.representative_index][1],
            path_index=valid[c.representative_index][0],
            count=len(c.member_indices),
        )
        for c in clusters
    ]
    summaries.sort(key=lambda s: (-s.count, s.path_index))
    winner = summaries[0].representative if summaries else None
    return VoteOutcome(winner, tuple(summaries), excluded)
