"""Prompt construction for every reasoning strategy.

The template strings are data, not code: they live in the versioned asset
bundle under ``assets/prompts.txt`` (sections delimited by ``### key``
lines), and the bundle's hash travels with every prompt so traces record
exactly which wording produced them.
"""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Literal

StrategyId = Literal[
    "few_shot_poet", "zero_shot_poet", "zero_shot_cot", "zero_shot_pot", "codegen_stage"
]
Stage = Literal["equations", "code", "direct_answer"]
Variant = Literal["full", "no_steps", "no_code"]

_ASSET_PATH = Path(__file__).parent / "assets" / "prompts.txt"
_DEMO_PATH = Path(__file__).parent / "assets" / "demos.json"

MAX_DEMONSTRATIONS = 16


class EmptyDemosError(ValueError):
    pass


class DemoParseFailureError(ValueError):
    pass


@dataclass(frozen=True)
class PromptAssets:
    sections: dict[str, str]
    sha256: str

    def get(self, key: str) -> str:
        if key not in self.sections:
            raise KeyError(f"prompt asset section missing: {key!r}")
        return self.sections[key]


@lru_cache(maxsize=1)
def load_prompt_assets() -> PromptAssets:
    raw = _ASSET_PATH.read_bytes()
    sections: dict[str, str] = {}
    key: str | None = None
    buf: list[str] = []
    for line in raw.decode("utf-8").splitlines():
        if line.startswith("### "):
            if key is not None:
                sections[key] = "\n".join(buf).strip("\n")
            key = line[4:].strip()
            buf = []
        else:
            buf.append(line)
    if key is not None:
        sections[key] = "\n".join(buf).strip("\n")
    return PromptAssets(sections, hashlib.sha256(raw).hexdigest())


@dataclass(frozen=True)
class PromptBundle:
    text: str
    strategy_id: StrategyId
    stage: Stage
    variant: Variant = "full"
    problem_id: str | None = None
    asset_hash: str = ""

    def __post_init__(self) -> None:
        if not self.text:
            raise ValueError("prompt text must be nonempty")
        if self.variant != "full" and self.strategy_id != "zero_shot_poet":
            raise ValueError("variants other than 'full' only apply to zero_shot_poet")


@dataclass(frozen=True)
class Demonstration:
    problem_text: str
    reasoning: str

    def __post_init__(self) -> None:
        from .extract import extract_equations_detailed

        outcome = extract_equations_detailed(self.reasoning)
        if outcome.equations is None:
            raise DemoParseFailureError(
                "demonstration reasoning must end in at least one parsable $$-delimited equation"
            )


@lru_cache(maxsize=1)
def packaged_demonstrations() -> tuple[Demonstration, ...]:
    data = json.loads(_DEMO_PATH.read_text("utf-8"))
    return tuple(Demonstration(d["problem"], d["reasoning"]) for d in data["demonstrations"])


def _require_problem(problem_text: str) -> str:
    if not problem_text or not problem_text.strip():
        raise ValueError("problem text must be nonempty")
    return problem_text


def build_few_shot_poet(
    demos: list[Demonstration] | tuple[Demonstration, ...],
    problem_text: str,
    problem_id: str | None = None,
    single_unknown: bool = False,
) -> PromptBundle:
    _require_problem(problem_text)
    if not demos:
        raise EmptyDemosError("at least one demonstration is required")
    if len(demos) > MAX_DEMONSTRATIONS:
        raise ValueError(f"at most {MAX_DEMONSTRATIONS} demonstrations are supported")
    assets = load_prompt_assets()
    header = assets.get("few_shot_poet.header")
    if single_unknown:
        header = header + " " + assets.get("single_unknown")
    blocks = [header]
    demo_template = assets.get("few_shot_poet.demo")
    for demo in demos:
        blocks.append(
            demo_template.replace("{problem}", demo.problem_text).replace(
                "{reasoning}", demo.reasoning
            )
        )
    blocks.append(assets.get("few_shot_poet.test").replace("{problem}", problem_text))
    return PromptBundle(
        text="\n\n".join(blocks),
        strategy_id="few_shot_poet",
        stage="equations",
        problem_id=problem_id,
        asset_hash=assets.sha256,
    )


def scaffold_statements() -> tuple[str, ...]:
    """The template's code lines, used to build the no-steps variant."""
    template = load_prompt_assets().get("figure3_template")
    return tuple(
        line for line in template.splitlines() if line.strip() and not line.strip().startswith("#")
    )


def build_zero_shot_poet(
    problem_text: str,
    variant: Variant = "full",
    problem_id: str | None = None,
    single_unknown: bool = False,
) -> PromptBundle:
    _require_problem(problem_text)
    assets = load_prompt_assets()
    if variant == "full":
        template = assets.get("figure3_template")
        text = assets.get("zero_shot_poet.full")
    elif variant == "no_steps":
        template = "\n".join(scaffold_statements())
        text = assets.get("zero_shot_poet.no_steps")
    elif variant == "no_code":
        template = ""
        text = assets.get("zero_shot_poet.no_code")
    else:
        raise ValueError(f"unknown variant: {variant!r}")
    text = text.replace("{problem}", problem_text).replace("{template}", template)
    if single_unknown:
        text = text + "\n" + assets.get("single_unknown")
    return PromptBundle(
        text=text,
        strategy_id="zero_shot_poet",
        stage="code",
        variant=variant,
        problem_id=problem_id,
        asset_hash=assets.sha256,
    )


def build_baseline(
    problem_text: str,
    which: Literal["zero_shot_cot", "zero_shot_pot"],
    problem_id: str | None = None,
) -> PromptBundle:
    _require_problem(problem_text)
    assets = load_prompt_assets()
    if which == "zero_shot_cot":
        text = assets.get("baseline.zero_shot_cot").replace("{problem}", problem_text)
        return PromptBundle(
            text=text,
            strategy_id="zero_shot_cot",
            stage="direct_answer",
            problem_id=problem_id,
            asset_hash=assets.sha256,
        )
    if which == "zero_shot_pot":
        text = assets.get("baseline.zero_shot_pot").replace("{problem}", problem_text)
        return PromptBundle(
            text=text,
            strategy_id="zero_shot_pot",
            stage="code",
            problem_id=problem_id,
            asset_hash=assets.sha256,
        )
    raise ValueError(f"unknown baseline: {which!r}")
