"""Per-path strategy pipelines: prompt, sample, extract, route, answer.

A batch never throws because one path went wrong: every decoding path ends
in a Trace that carries either final answers or a failure tag naming the
stage that broke.
"""

from __future__ import annotations

import hashlib
import logging
import re
from dataclasses import dataclass, field
from typing import Literal

from .classify import SystemClass, classify
from .codegen import InvalidIdentifierError, build_codegen_instruction, transpile
from .consensus import AnswerVector
from .expr import EquationSet, format_canonical
from .extract import (
    ExtractionOutcome,
    NoNumericAnswerError,
    extract_answer_from_text,
    extract_equations_detailed,
    recover_equations_from_code,
)
from .gateway import Gateway, stage_two_sampling
from .gateway_types import Completion, SamplingConfig
from .polynomial import DegreeOverflowError, DivisionByZeroConstantError
from .prompts import (
    Demonstration,
    PromptBundle,
    StrategyId,
    Variant,
    build_baseline,
    build_few_shot_poet,
    build_zero_shot_poet,
    packaged_demonstrations,
)
from .sandbox import ExecutionRequest, ExecutionResult, SandboxClient
from .solve import Finite, Inconsistent, Underdetermined, Unique, solve_system

log = logging.getLogger(__name__)

Routing = Literal["native_first", "sandbox_only", "native_only"]
StageTwo = Literal["transpile", "model"]


@dataclass
class StrategyConfig:
    strategy_id: StrategyId
    variant: Variant = "full"
    demonstrations: tuple[Demonstration, ...] | None = None  # None: packaged set
    codegen_mode: Literal["templated", "direct"] = "templated"
    stage_two: StageTwo = "transpile"
    stage_two_temperature: float = 0.0
    single_unknown: bool = False


@dataclass(frozen=True)
class Failure:
    stage: str
    tag: str
    detail: str = ""


@dataclass
class Trace:
    problem_id: str
    path_index: int
    completions: dict[str, str] = field(default_factory=dict)
    prompt_sha256: str = ""
    asset_hash: str = ""
    extracted_equations: EquationSet | None = None
    extraction_delimiter: str = ""
    script: str | None = None
    execution: ExecutionResult | None = None
    final_answers: AnswerVector | None = None
    failure: Failure | None = None

    def __post_init__(self) -> None:
        if (self.final_answers is None) == (self.failure is None):
            raise ValueError("exactly one of final_answers/failure must be set")


_CODE_FENCE = re.compile(r"^```[a-zA-Z0-9_+-]*\n|```\s*$", re.MULTILINE)


def strip_code_fences(text: str) -> str:
    return _CODE_FENCE.sub("", text).strip("\n")


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def answers_from_solution(solution, variables: tuple[str, ...]) -> AnswerVector | Failure:
    if isinstance(solution, Unique):
        assignment = solution.assignment
    elif isinstance(solution, Finite):
        assignment = solution.assignments[0]  # assignments arrive sorted
    elif isinstance(solution, Inconsistent):
        return Failure("solve", "Inconsistent", solution.reason)
    elif isinstance(solution, Underdetermined):
        return Failure("solve", "Underdetermined", f"rank {solution.rank}")
    else:
        return Failure("solve", "UnknownSolutionShape", repr(solution))
    return AnswerVector(
        values=tuple(float(assignment[v]) for v in variables),
        labels=variables,
        exact=(True,) * len(variables),
    )


def answers_from_execution(result: ExecutionResult) -> AnswerVector:
    return AnswerVector(
        values=tuple(a.value for a in result.answers),
        labels=tuple(a.name for a in result.answers) if all(a.name for a in result.answers) else None,
    )


def build_stage_one_prompt(problem, strategy: StrategyConfig) -> PromptBundle:
    if strategy.strategy_id == "few_shot_poet":
        demos = strategy.demonstrations or packaged_demonstrations()
        return build_few_shot_poet(
            demos, problem.question, problem_id=problem.id, single_unknown=strategy.single_unknown
        )
    if strategy.strategy_id == "zero_shot_poet":
        return build_zero_shot_poet(
            problem.question,
            variant=strategy.variant,
            problem_id=problem.id,
            single_unknown=strategy.single_unknown,
        )
    if strategy.strategy_id in ("zero_shot_cot", "zero_shot_pot"):
        return build_baseline(problem.question, strategy.strategy_id, problem_id=problem.id)
    raise ValueError(f"not a runnable strategy: {strategy.strategy_id!r}")


def _classify_safe(eqs: EquationSet) -> SystemClass | Failure:
    try:
        return classify(eqs)
    except (DegreeOverflowError, DivisionByZeroConstantError, ValueError) as err:
        return Failure("classify", "ConversionError", str(err))


def _execute(executor: SandboxClient | None, script: str, trace: Trace) -> AnswerVector | Failure:
    if executor is None or not executor.available:
        return Failure("routing", "ExecutorUnavailable")
    result = executor.execute(ExecutionRequest(script=script))
    trace.execution = result
    if result.status == "ok":
        return answers_from_execution(result)
    tag = {"script_error": "ScriptError", "timeout": "Timeout", "protocol_error": "ProtocolError"}[
        result.status
    ]
    return Failure("execution", tag, result.stderr_excerpt[:200])


def _solve_native(eqs: EquationSet, trace: Trace) -> AnswerVector | Failure:
    try:
        solution = solve_system(eqs)
    except (DegreeOverflowError, DivisionByZeroConstantError, ValueError) as err:
        return Failure("solve", "SolveError", str(err))
    return answers_from_solution(solution, eqs.variables)


def _stage_two_script(
    eqs: EquationSet,
    strategy: StrategyConfig,
    sampling: SamplingConfig,
    gateway: Gateway,
    problem_id: str,
    trace: Trace,
) -> str | Failure:
    if strategy.stage_two == "transpile":
        try:
            return transpile(eqs, include_step_comments=False).source
        except InvalidIdentifierError as err:
            return Failure("codegen", "InvalidIdentifier", str(err))
    instruction = build_codegen_instruction(eqs, strategy.codegen_mode)
    prompt = PromptBundle(
        text=instruction,
        strategy_id="codegen_stage",
        stage="code",
        problem_id=problem_id,
        asset_hash=trace.asset_hash,
    )
    completions = gateway.complete(
        prompt, stage_two_sampling(sampling, strategy.stage_two_temperature)
    )
    completion = completions[0]
    trace.completions["code_instruction"] = instruction
    trace.completions["code"] = completion.text
    if completion.finish_reason == "error":
        return Failure("gateway", "GatewayError", "stage-two completion failed")
    return strip_code_fences(completion.text)


def _poet_path(
    problem,
    strategy: StrategyConfig,
    sampling: SamplingConfig,
    gateway: Gateway,
    executor: SandboxClient | None,
    routing: Routing,
    completion: Completion,
    trace: Trace,
) -> AnswerVector | Failure:
    outcome: ExtractionOutcome = extract_equations_detailed(completion.text)
    if outcome.equations is None:
        tag = "ExtractionEmpty" if not outcome.spans else "ParseFailure"
        return Failure("extraction", tag, f"{len(outcome.skipped)} span(s) failed")
    trace.extracted_equations = outcome.equations
    trace.extraction_delimiter = outcome.delimiter
    eqs = outcome.equations
    klass = _classify_safe(eqs)
    if isinstance(klass, Failure):
        return klass
    supported = klass is not SystemClass.UNSUPPORTED
    if routing in ("native_first", "native_only") and supported:
        return _solve_native(eqs, trace)
    if routing == "native_only":
        return Failure("routing", "NativeUnsupported", klass.value)
    script = _stage_two_script(eqs, strategy, sampling, gateway, problem.id, trace)
    if isinstance(script, Failure):
        return script
    trace.script = script
    return _execute(executor, script, trace)


def _zero_shot_poet_path(
    problem,
    executor: SandboxClient | None,
    routing: Routing,
    completion: Completion,
    trace: Trace,
) -> AnswerVector | Failure:
    script = strip_code_fences(completion.text)
    trace.script = script
    recovered = recover_equations_from_code(script)
    if recovered is not None:
        trace.extracted_equations = recovered
        trace.extraction_delimiter = "Eq()"
    if routing in ("native_first", "native_only") and recovered is not None:
        klass = _classify_safe(recovered)
        if not isinstance(klass, Failure) and klass is not SystemClass.UNSUPPORTED:
            return _solve_native(recovered, trace)
    if routing == "native_only":
        return Failure("routing", "NativeUnsupported", "no natively solvable equations in script")
    return _execute(executor, script, trace)


def run_strategy(
    problem,
    strategy: StrategyConfig,
    sampling: SamplingConfig,
    gateway: Gateway,
    executor: SandboxClient | None = None,
    routing: Routing = "native_first",
) -> list[Trace]:
    """One Trace per decoding path, ordered by path index; never raises per path."""
    prompt = build_stage_one_prompt(problem, strategy)
    completions = gateway.complete(prompt, sampling)
    if len(completions) != sampling.n_paths:
        raise RuntimeError(
            f"gateway returned {len(completions)} completions for n_paths={sampling.n_paths}"
        )
    stage_key = {"equations": "equations", "code": "code", "direct_answer": "direct_answer"}[
        prompt.stage
    ]
    traces: list[Trace] = []
    for completion in sorted(completions, key=lambda c: c.path_index):
        trace = Trace(
            problem_id=problem.id,
            path_index=completion.path_index,
            prompt_sha256=_sha256(prompt.text),
            asset_hash=prompt.asset_hash,
            failure=Failure("pending", "pending"),
        )
        trace.completions[stage_key] = completion.text
        try:
            if completion.finish_reason == "error":
                result: AnswerVector | Failure = Failure("gateway", "GatewayError")
            elif strategy.strategy_id == "few_shot_poet":
                result = _poet_path(
                    problem, strategy, sampling, gateway, executor, routing, completion, trace
                )
            elif strategy.strategy_id == "zero_shot_poet":
                result = _zero_shot_poet_path(problem, executor, routing, completion, trace)
            elif strategy.strategy_id == "zero_shot_cot":
                try:
                    result = extract_answer_from_text(completion.text)
                except NoNumericAnswerError:
                    result = Failure("extraction", "NoNumericAnswer")
            elif strategy.strategy_id == "zero_shot_pot":
                script = strip_code_fences(completion.text)
                trace.script = script
                result = _execute(executor, script, trace)
            else:
                result = Failure("strategy", "UnknownStrategy", strategy.strategy_id)
        except Exception as err:  # a path must never take down the batch
            log.exception("path %d failed unexpectedly", completion.path_index)
            result = Failure("internal", type(err).__name__, str(err))
        if isinstance(result, Failure):
            trace.failure = result
            trace.final_answers = None
        else:
            trace.final_answers = result
            trace.failure = None
        traces.append(trace)
    return traces


def canonical_equation_texts(eqs: EquationSet) -> tuple[str, ...]:
    return tuple(format_canonical(eq) for eq in eqs.equations)
