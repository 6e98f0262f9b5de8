"""Shared sampling and completion types for the model gateways."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass
from typing import Literal

from .prompts import PromptBundle

FinishReason = Literal["stop", "length", "error"]


@dataclass(frozen=True)
class Completion:
    text: str
    path_index: int
    finish_reason: FinishReason = "stop"


@dataclass(frozen=True)
class SamplingConfig:
    temperature: float = 0.8
    n_paths: int = 40
    max_tokens: int = 1024
    model_id: str = "offline-mock"

    def __post_init__(self) -> None:
        if not 0 <= self.temperature <= 2:
            raise ValueError("temperature must be in [0, 2]")
        if not 1 <= self.n_paths <= 128:
            raise ValueError("n_paths must be in [1, 128]")
        if self.max_tokens <= 0:
            raise ValueError("max_tokens must be positive")


def cache_key(prompt: PromptBundle, sampling: SamplingConfig) -> str:
    """Content digest over everything that determines a sampled batch."""
    material = json.dumps(
        {
            "model_id": sampling.model_id,
            "prompt": prompt.text,
            "temperature": sampling.temperature,
            "n_paths": sampling.n_paths,
            "max_tokens": sampling.max_tokens,
        },
        sort_keys=True,
        ensure_ascii=False,
    )
    return hashlib.sha256(material.encode("utf-8")).hexdigest()
