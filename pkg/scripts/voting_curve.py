#!/usr/bin/env python3
"""Accuracy as a function of the number of decoding paths under path noise.

Sweeps the self-consistency path count on a synthetic dataset with the
noisy mock gateway.  Expected shape: single-path accuracy sits near
1 - noise_rate, and voting pulls the curve toward 1.0 as paths grow.
"""

from __future__ import annotations

import argparse

from poet.evaluate import EvalConfig, evaluate
from poet.gateway import MockGateway
from poet.gateway_types import SamplingConfig
from poet.pipeline import StrategyConfig
from poet.records import generate_synthetic


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--n", type=int, default=100, help="synthetic problems")
    parser.add_argument("--noise", type=float, default=0.2)
    parser.add_argument("--seeds", type=int, default=3)
    parser.add_argument("--paths", type=int, nargs="+", default=[1, 3, 5, 10, 20, 40])
    args = parser.parse_args()

    print(f"{'paths':>6} " + " ".join(f"seed{seed:>2}" for seed in range(args.seeds)) + "   mean")
    for n_paths in args.paths:
        accuracies = []
        for seed in range(args.seeds):
            problems = generate_synthetic(args.n, seed=seed)
            gateway = MockGateway(
                {p.id: p for p in problems}, policy="noisy", noise_rate=args.noise, seed=seed
            )
            config = EvalConfig(
                strategy=StrategyConfig("few_shot_poet"),
                sampling=SamplingConfig(n_paths=n_paths),
                routing="native_only",
            )
            accuracies.append(evaluate(problems, config, gateway).accuracy)
        mean = sum(accuracies) / len(accuracies)
        print(
            f"{n_paths:>6} "
            + " ".join(f"{a:6.3f}" for a in accuracies)
            + f"  {mean:6.3f}"
        )


if __name__ == "__main__":
    main()
