#!/usr/bin/env python3
"""Offline reproduction of the full evaluation protocol shape.

Runs every strategy over one synthetic dataset with the deterministic mock
gateway and renders the rows-by-strategy accuracy table.  With a noise rate
above zero the mock corrupts a fraction of decoding paths, which is where
self-consistency voting starts doing visible work.
"""

from __future__ import annotations

import argparse

from poet.evaluate import EvalConfig, evaluate, render_table
from poet.gateway import MockGateway
from poet.gateway_types import SamplingConfig
from poet.pipeline import StrategyConfig
from poet.records import generate_synthetic
from poet.sandbox import SandboxClient


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=60, help="synthetic problems")
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--paths", type=int, default=40)
    parser.add_argument("--noise", type=float, default=0.2)
    args = parser.parse_args()

    problems = generate_synthetic(args.n, seed=args.seed)
    fixtures = {p.id: p for p in problems}
    executor = SandboxClient()
    runner_up = executor.available

    strategies: list[tuple[str, StrategyConfig, str]] = [
        ("poet (few-shot)", StrategyConfig("few_shot_poet"), "native_first"),
        ("zero-poet", StrategyConfig("zero_shot_poet"), "native_first"),
        ("zero-poet -steps", StrategyConfig("zero_shot_poet", variant="no_steps"), "native_first"),
        ("zero-poet -code", StrategyConfig("zero_shot_poet", variant="no_code"), "native_first"),
        ("zs-cot", StrategyConfig("zero_shot_cot"), "native_first"),
    ]
    if runner_up:
        strategies.append(("zs-pot", StrategyConfig("zero_shot_pot"), "sandbox_only"))
    else:
        print("note: script runner not built; skipping zs-pot (needs the sandbox)")

    policy = "noisy" if args.noise > 0 else "perfect"
    rows = []
    for label, strategy, routing in strategies:
        gateway = MockGateway(fixtures, policy=policy, noise_rate=args.noise, seed=args.seed)
        config = EvalConfig(
            strategy=strategy,
            sampling=SamplingConfig(n_paths=args.paths),
            routing=routing,
        )
        report = evaluate(problems, config, gateway, executor if runner_up else None)
        rows.append((label, report))
        print(f"finished {label}: accuracy {report.accuracy:.3f}")
    print()
    print(f"{args.n} problems, {args.paths} paths, corruption rate {args.noise}")
    print(render_table(rows))


if __name__ == "__main__":
    main()
