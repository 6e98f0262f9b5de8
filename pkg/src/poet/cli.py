"""Command-line interface.

Exit codes: 0 success, 1 usage error, 2 backend unavailable, 3 dataset
schema error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import replace
from pathlib import Path

from .cache import CompletionCache
from .codegen import transpile
from .consensus import vote
from .evaluate import EvalConfig, evaluate, recompute_from_traces, render_table
from .gateway import CacheMissError, LiveGateway, MockGateway, RecordingGateway, ReplayGateway, TransportError
from .gateway_types import SamplingConfig
from .matching import match_answers
from .parser import EquationParseError, parse_equation_set
from .pipeline import StrategyConfig, run_strategy
from .records import (
    DatasetSchemaError,
    DuplicateIdError,
    FAMILIES,
    ProblemRecord,
    generate_synthetic,
    load_problems,
    save_problems,
)
from .sandbox import SandboxClient

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_BACKEND = 2
EXIT_SCHEMA = 3

STRATEGY_ALIASES = {
    "poet": "few_shot_poet",
    "zero-poet": "zero_shot_poet",
    "zs-cot": "zero_shot_cot",
    "zs-pot": "zero_shot_pot",
}
VARIANT_ALIASES = {"full": "full", "no-steps": "no_steps", "no-code": "no_code"}
ROUTING_ALIASES = {
    "native-first": "native_first",
    "sandbox-only": "sandbox_only",
    "native-only": "native_only",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # argparse would exit(2); the contract wants 1
        raise UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="poet", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_strategy_args(p):
        p.add_argument("--strategy", choices=sorted(STRATEGY_ALIASES), default="poet")
        p.add_argument("--variant", choices=sorted(VARIANT_ALIASES), default="full")
        p.add_argument("--paths", type=int, default=40)
        p.add_argument("--temp", type=float, default=0.8)
        p.add_argument("--max-tokens", type=int, default=1024)
        p.add_argument("--model", default="gpt-3.5-turbo")
        p.add_argument("--routing", choices=sorted(ROUTING_ALIASES), default="native-first")
        p.add_argument("--tol", type=float, default=0.01)
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--mode", choices=["live", "replay", "mock"], default=None)
        p.add_argument("--mock-policy", choices=["perfect", "noisy", "always_error"],
                       default="perfect")
        p.add_argument("--noise-rate", type=float, default=0.2)
        p.add_argument("--cache", type=Path, default=None, help="completion cache file")
        p.add_argument("--record", action="store_true", help="record completions into --cache")
        p.add_argument("--stage-two", choices=["transpile", "model"], default="transpile")
        p.add_argument("--codegen-mode", choices=["templated", "direct"], default="templated")

    solve = sub.add_parser("solve", help="solve one problem")
    solve.add_argument("--question", required=True, help="problem text or a path to a text file")
    solve.add_argument("--gold-equations", nargs="*", default=None,
                       help="gold equations (required for --mode mock)")
    solve.add_argument("--gold-answers", nargs="*", type=float, default=None)
    add_strategy_args(solve)

    ev = sub.add_parser("eval", help="evaluate a dataset")
    ev.add_argument("--dataset", required=True, type=Path)
    ev.add_argument("--out", type=Path, default=None, help="report JSON path")
    ev.add_argument("--traces", type=Path, default=None, help="trace JSONL path")
    ev.add_argument("--parallelism", type=int, default=1)
    add_strategy_args(ev)

    gen = sub.add_parser("gen", help="generate synthetic problems")
    gen.add_argument("--n", type=int, required=True)
    gen.add_argument("--seed", type=int, default=0)
    gen.add_argument("--families", default=",".join(FAMILIES))
    gen.add_argument("--out", type=Path, required=True)

    tr = sub.add_parser("transpile", help="transpile equations into a solver script")
    tr.add_argument("--equations", nargs="+", required=True)
    tr.add_argument("--no-comments", action="store_true")

    rep = sub.add_parser("report", help="recompute metrics from persisted traces")
    rep.add_argument("--traces", required=True, type=Path)
    rep.add_argument("--tol", type=float, default=0.01)

    return parser


def _strategy_config(args) -> StrategyConfig:
    return StrategyConfig(
        strategy_id=STRATEGY_ALIASES[args.strategy],
        variant=VARIANT_ALIASES[args.variant],
        stage_two=args.stage_two,
        codegen_mode=args.codegen_mode,
    )


def _sampling(args) -> SamplingConfig:
    return SamplingConfig(
        temperature=args.temp,
        n_paths=args.paths,
        max_tokens=args.max_tokens,
        model_id=args.model,
    )


def _make_gateway(args, problems: list[ProblemRecord]):
    mode = args.mode
    if mode is None:
        mode = "mock"
    if mode == "mock":
        fixtures = {p.id: p for p in problems}
        gateway = MockGateway(
            fixtures, policy=args.mock_policy, noise_rate=args.noise_rate, seed=args.seed
        )
    elif mode == "replay":
        if not args.cache:
            raise UsageError("--mode replay requires --cache")
        gateway = ReplayGateway(CompletionCache(args.cache))
    else:
        gateway = LiveGateway(cache=CompletionCache(args.cache) if args.cache else None)
    if args.record and mode != "live":
        if not args.cache:
            raise UsageError("--record requires --cache")
        gateway = RecordingGateway(gateway, CompletionCache(args.cache))
    return gateway


def _executor_for(args) -> SandboxClient | None:
    routing = ROUTING_ALIASES[args.routing]
    client = SandboxClient()
    if routing == "sandbox_only" and not client.available:
        raise TransportError("sandbox routing requested but no runner is configured")
    return client if client.available else None


def _cmd_solve(args) -> int:
    question = args.question
    path = Path(question)
    if path.exists() and path.is_file():
        question = path.read_text("utf-8").strip()
    problem = ProblemRecord(
        id="cli-problem",
        question=question,
        gold_answers=tuple(args.gold_answers) if args.gold_answers else (0.0,),
        gold_equations=tuple(args.gold_equations) if args.gold_equations else None,
    )
    mode = args.mode or ("live" if LiveGateway().base_url else "mock")
    if mode == "mock" and not problem.gold_equations:
        raise UsageError("--mode mock needs --gold-equations to synthesize completions")
    args.mode = mode
    gateway = _make_gateway(args, [problem])
    executor = _executor_for(args)
    traces = run_strategy(
        problem, _strategy_config(args), _sampling(args), gateway, executor,
        ROUTING_ALIASES[args.routing],
    )
    outcome = vote(traces, args.tol)
    print(f"paths: {len(traces)}  excluded: {outcome.excluded_error_paths}")
    for summary in outcome.cluster_sizes:
        print(f"  {summary.count:>3}x  {list(summary.representative.values)}")
    if outcome.winner is None:
        print("no usable path produced an answer")
        return EXIT_OK
    print(f"winner: {list(outcome.winner.values)}")
    if args.gold_answers:
        ok = match_answers(outcome.winner, args.gold_answers, args.tol)
        print(f"matches gold {args.gold_answers}: {ok}")
    return EXIT_OK


def _cmd_eval(args) -> int:
    problems = load_problems(args.dataset)
    gateway = _make_gateway(args, problems)
    executor = _executor_for(args)
    config = EvalConfig(
        strategy=_strategy_config(args),
        sampling=_sampling(args),
        tolerance=args.tol,
        routing=ROUTING_ALIASES[args.routing],
        seed=args.seed,
        parallelism=args.parallelism,
    )
    report = evaluate(problems, config, gateway, executor, trace_path=args.traces)
    label = args.strategy + ("" if args.variant == "full" else f" ({args.variant})")
    print(render_table([(label, report)]))
    if args.out:
        from dataclasses import asdict

        args.out.parent.mkdir(parents=True, exist_ok=True)
        args.out.write_text(
            json.dumps(
                {
                    "accuracy": report.accuracy,
                    "equation_prediction_accuracy": report.equation_prediction_accuracy,
                    "per_path_equation_accuracy": report.per_path_equation_accuracy,
                    "config": report.config,
                    "config_hash": report.config_hash,
                    "runtime": report.runtime,
                    "outcomes": [asdict(o) for o in report.outcomes],
                },
                indent=2,
                sort_keys=True,
            )
        )
        print(f"report written to {args.out}")
    return EXIT_OK


def _cmd_gen(args) -> int:
    families = tuple(f.strip() for f in args.families.split(",") if f.strip())
    records = generate_synthetic(args.n, args.seed, families)
    args.out.parent.mkdir(parents=True, exist_ok=True)
    save_problems(args.out, records)
    print(f"wrote {len(records)} problems to {args.out}")
    return EXIT_OK


def _cmd_transpile(args) -> int:
    try:
        eqs = parse_equation_set(args.equations)
    except EquationParseError as err:
        raise UsageError(f"equation does not parse: {err}")
    script = transpile(eqs, include_step_comments=not args.no_comments)
    print(script.source, end="")
    return EXIT_OK


def _cmd_report(args) -> int:
    metrics = recompute_from_traces(args.traces, args.tol)
    print(json.dumps(metrics, indent=2, sort_keys=True))
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        handler = {
            "solve": _cmd_solve,
            "eval": _cmd_eval,
            "gen": _cmd_gen,
            "transpile": _cmd_transpile,
            "report": _cmd_report,
        }[args.command]
        return handler(args)
    except UsageError as err:
        print(f"usage error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (TransportError, CacheMissError, RuntimeError) as err:
        print(f"backend unavailable: {err}", file=sys.stderr)
        return EXIT_BACKEND
    except (DatasetSchemaError, DuplicateIdError) as err:
        print(f"dataset error: {err}", file=sys.stderr)
        return EXIT_SCHEMA


if __name__ == "__main__":
    sys.exit(main())
