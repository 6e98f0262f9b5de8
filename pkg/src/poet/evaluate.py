"""Dataset evaluation: run a strategy, vote, score, persist, report."""

from __future__ import annotations

import hashlib
import json
import time
from collections import Counter
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .consensus import AnswerVector, VoteOutcome, vote
from .equivalence import equivalent
from .expr import EquationSet
from .gateway import Gateway
from .gateway_types import SamplingConfig
from .matching import match_answers
from .parser import parse_equation_set
from .pipeline import Routing, StrategyConfig, Trace, canonical_equation_texts, run_strategy
from .records import ProblemRecord
from .sandbox import SandboxClient
from .solve import UnsupportedClassError


@dataclass
class EvalConfig:
    strategy: StrategyConfig
    sampling: SamplingConfig = field(default_factory=SamplingConfig)
    tolerance: float = 0.01
    routing: Routing = "native_first"
    seed: int = 0
    parallelism: int = 1

    def __post_init__(self) -> None:
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")


@dataclass
class ProblemOutcome:
    problem_id: str
    winner: list[float] | None
    correct: bool
    excluded_error_paths: int
    failure_histogram: dict[str, int]
    equation_set_correct: bool | None
    per_path_equation_correct: int
    paths_with_equations: int


@dataclass
class Report:
    outcomes: list[ProblemOutcome]
    accuracy: float
    equation_prediction_accuracy: float | None
    per_path_equation_accuracy: float | None
    config: dict
    config_hash: str
    runtime: dict


def config_echo(config: EvalConfig) -> tuple[dict, str]:
    blob = asdict(config)
    blob["strategy"]["demonstrations"] = (
        None
        if config.strategy.demonstrations is None
        else [[d.problem_text, d.reasoning] for d in config.strategy.demonstrations]
    )
    canonical = json.dumps(blob, sort_keys=True, ensure_ascii=False)
    return blob, hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _gold_equation_set(problem: ProblemRecord) -> EquationSet | None:
    if not problem.gold_equations or problem.warning:
        return None
    return parse_equation_set(problem.gold_equations)


def _majority_equation_set(traces: list[Trace]) -> tuple[EquationSet | None, int]:
    """Vote extracted equation sets by canonical text; ties go to the earliest path."""
    counts: Counter[tuple[str, ...]] = Counter()
    first_seen: dict[tuple[str, ...], int] = {}
    sample: dict[tuple[str, ...], EquationSet] = {}
    for position, trace in enumerate(traces):
        if trace.extracted_equations is None:
            continue
        key = canonical_equation_texts(trace.extracted_equations)
        counts[key] += 1
        if key not in first_seen:
            first_seen[key] = position
            sample[key] = trace.extracted_equations
    if not counts:
        return None, 0
    top = max(counts, key=lambda k: (counts[k], -first_seen[k]))
    return sample[top], sum(counts.values())


def _equation_metrics(
    problem: ProblemRecord, traces: list[Trace]
) -> tuple[bool | None, int, int]:
    """Majority-voted equation correctness; None when the metric does not apply.

    The metric needs both gold equations and at least one path that
    extracted equations (strategies like the CoT baseline never do).
    """
    gold = _gold_equation_set(problem)
    if gold is None:
        return None, 0, 0
    per_path_correct = 0
    with_equations = 0
    for t in traces:
        if t.extracted_equations is None:
            continue
        with_equations += 1
        try:
            if equivalent(t.extracted_equations, gold):
                per_path_correct += 1
        except (UnsupportedClassError, ValueError):
            continue
    majority, _ = _majority_equation_set(traces)
    if majority is None:
        return None, per_path_correct, with_equations
    try:
        return equivalent(majority, gold), per_path_correct, with_equations
    except (UnsupportedClassError, ValueError):
        return False, per_path_correct, with_equations


def evaluate_problem(
    problem: ProblemRecord,
    config: EvalConfig,
    gateway: Gateway,
    executor: SandboxClient | None = None,
) -> tuple[ProblemOutcome, list[Trace], VoteOutcome]:
    traces = run_strategy(
        problem, config.strategy, config.sampling, gateway, executor, config.routing
    )
    outcome = vote(traces, config.tolerance)
    correct = outcome.winner is not None and match_answers(
        outcome.winner, problem.gold_answers, config.tolerance
    )
    histogram = Counter(t.failure.tag for t in traces if t.failure is not None)
    eq_correct, per_path_eq, with_eqs = _equation_metrics(problem, traces)
    return (
        ProblemOutcome(
            problem_id=problem.id,
            winner=list(outcome.winner.values) if outcome.winner else None,
            correct=correct,
            excluded_error_paths=outcome.excluded_error_paths,
            failure_histogram=dict(histogram),
            equation_set_correct=eq_correct,
            per_path_equation_correct=per_path_eq,
            paths_with_equations=with_eqs,
        ),
        traces,
        outcome,
    )


def evaluate(
    problems: list[ProblemRecord],
    config: EvalConfig,
    gateway: Gateway,
    executor: SandboxClient | None = None,
    trace_path: str | Path | None = None,
) -> Report:
    start = time.perf_counter()
    writer = TraceWriter(trace_path) if trace_path else None

    def one(problem: ProblemRecord):
        outcome, traces, _ = evaluate_problem(problem, config, gateway, executor)
        if writer:
            writer.write(problem, traces)
        return outcome

    if config.parallelism > 1:
        with ThreadPoolExecutor(max_workers=config.parallelism) as pool:
            outcomes = list(pool.map(one, problems))
    else:
        outcomes = [one(p) for p in problems]
    if writer:
        writer.close()
    accuracy = sum(o.correct for o in outcomes) / len(outcomes) if outcomes else 0.0
    judged = [o for o in outcomes if o.equation_set_correct is not None]
    eq_accuracy = (
        sum(bool(o.equation_set_correct) for o in judged) / len(judged) if judged else None
    )
    path_total = sum(o.paths_with_equations for o in judged)
    per_path_eq = (
        sum(o.per_path_equation_correct for o in judged) / path_total if path_total else None
    )
    blob, blob_hash = config_echo(config)
    return Report(
        outcomes=outcomes,
        accuracy=accuracy,
        equation_prediction_accuracy=eq_accuracy,
        per_path_equation_accuracy=per_path_eq,
        config=blob,
        config_hash=blob_hash,
        runtime={
            "seconds": round(time.perf_counter() - start, 3),
            "problems": len(outcomes),
            "paths_per_problem": config.sampling.n_paths,
        },
    )


def trace_to_obj(problem: ProblemRecord, trace: Trace) -> dict:
    return {
        "problem_id": trace.problem_id,
        "path_index": trace.path_index,
        "gold_answers": list(problem.gold_answers),
        "gold_equations": list(problem.gold_equations or []),
        "prompt_sha256": trace.prompt_sha256,
        "asset_hash": trace.asset_hash,
        "completions": trace.completions,
        "extracted_equations": (
            list(canonical_equation_texts(trace.extracted_equations))
            if trace.extracted_equations is not None
            else None
        ),
        "extraction_delimiter": trace.extraction_delimiter,
        "script": trace.script,
        "execution": (
            {
                "status": trace.execution.status,
                "answers": [
                    {"name": a.name, "value": a.value} for a in trace.execution.answers
                ],
                "stderr": trace.execution.stderr_excerpt,
                "wall_ms": trace.execution.wall_ms,
            }
            if trace.execution
            else None
        ),
        "final_answers": (
            {
                "values": list(trace.final_answers.values),
                "labels": list(trace.final_answers.labels) if trace.final_answers.labels else None,
                "exact": list(trace.final_answers.exact),
            }
            if trace.final_answers
            else None
        ),
        "failure": (
            {"stage": trace.failure.stage, "tag": trace.failure.tag, "detail": trace.failure.detail}
            if trace.failure
            else None
        ),
    }


class TraceWriter:
    """Append-only JSONL trace store; one atomic line per decoding path."""

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self.path.parent.mkdir(parents=True, exist_ok=True)
        self._fh = open(self.path, "a", encoding="utf-8")
        import threading

        self._lock = threading.Lock()

    def write(self, problem: ProblemRecord, traces: list[Trace]) -> None:
        lines = [
            json.dumps(trace_to_obj(problem, t), ensure_ascii=False, sort_keys=True) + "\n"
            for t in traces
        ]
        with self._lock:
            self._fh.writelines(lines)
            self._fh.flush()

    def close(self) -> None:
        self._fh.close()


@dataclass
class _ReplayedTrace:
    path_index: int
    final_answers: AnswerVector | None


def recompute_from_traces(path: str | Path, tolerance: float = 0.01) -> dict:
    """Rebuild accuracy metrics from a persisted trace file."""
    by_problem: dict[str, list[dict]] = {}
    with open(path, encoding="utf-8") as fh:
        for raw in fh:
            raw = raw.strip()
            if not raw:
                continue
            obj = json.loads(raw)
            by_problem.setdefault(obj["problem_id"], []).append(obj)
    per_problem = {}
    correct_count = 0
    eq_correct = 0
    eq_judged = 0
    for problem_id, rows in sorted(by_problem.items()):
        votable = [
            _ReplayedTrace(
                r["path_index"],
                AnswerVector(tuple(r["final_answers"]["values"]))
                if r["final_answers"]
                else None,
            )
            for r in rows
        ]
        outcome = vote(votable, tolerance)
        gold = rows[0]["gold_answers"]
        correct = outcome.winner is not None and match_answers(outcome.winner, gold, tolerance)
        correct_count += correct
        gold_equations = rows[0].get("gold_equations") or []
        eq_flag = None
        if gold_equations:
            extracted = Counter(
                tuple(r["extracted_equations"]) for r in rows if r.get("extracted_equations")
            )
            if extracted:
                top = max(extracted.items(), key=lambda kv: kv[1])[0]
                try:
                    eq_flag = equivalent(
                        parse_equation_set(list(top)), parse_equation_set(gold_equations)
                    )
                except (UnsupportedClassError, ValueError):
                    eq_flag = False
                eq_judged += 1
                eq_correct += bool(eq_flag)
        per_problem[problem_id] = {
            "correct": correct,
            "winner": list(outcome.winner.values) if outcome.winner else None,
            "excluded_error_paths": outcome.excluded_error_paths,
            "equation_set_correct": eq_flag,
        }
    return {
        "problems": len(per_problem),
        "accuracy": correct_count / len(per_problem) if per_problem else 0.0,
        "equation_prediction_accuracy": eq_correct / eq_judged if eq_judged else None,
        "per_problem": per_problem,
    }


def render_table(rows: list[tuple[str, Report]]) -> str:
    """Rows-by-strategy accuracy table."""
    header = f"{'Method':<18} {'Accuracy':>9} {'EqAcc':>7} {'Excluded':>9} {'Problems':>9}"
    out = [header, "-" * len(header)]
    for label, report in rows:
        eq = (
            f"{100 * report.equation_prediction_accuracy:.1f}"
            if report.equation_prediction_accuracy is not None
            else "-"
        )
        excluded = sum(o.excluded_error_paths for o in report.outcomes)
        out.append(
            f"{label:<18} {100 * report.accuracy:>8.1f}% {eq:>7} {excluded:>9} "
            f"{len(report.outcomes):>9}"
        )
    return "\n".join(out)
