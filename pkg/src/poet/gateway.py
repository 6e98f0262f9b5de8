"""Model gateways: live endpoint, replay cache, and deterministic mock.

Every gateway honors one contract: ``complete`` returns exactly
``n_paths`` completions with distinct path indices, turning per-path
failures into ``finish_reason="error"`` entries instead of dropping them.
"""

from __future__ import annotations

import hashlib
import logging
import os
import random
import threading
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, Literal, Mapping, Protocol, Sequence

from .cache import CompletionCache
from .codegen import transpile
from .expr import Const, Equation, EquationSet, Expr, format_canonical
from .expr import Add, Div, Mul, Neg, Pow, Sub
from .extract import extract_equations
from .gateway_types import Completion, SamplingConfig, cache_key
from .parser import parse_equation
from .prompts import PromptBundle

log = logging.getLogger(__name__)

API_KEY_ENV = "POET_API_KEY"
API_BASE_ENV = "POET_API_BASE"


class CacheMissError(KeyError):
    pass


class TransportError(RuntimeError):
    pass


class Gateway(Protocol):
    def complete(self, prompt: PromptBundle, sampling: SamplingConfig) -> list[Completion]:
        ...


class GoldFixture(Protocol):
    """What the mock oracle needs to know about a problem."""

    id: str
    gold_answers: tuple[float, ...]
    gold_equations: tuple[str, ...] | None


def _bump_first_const(e: Expr, delta: int) -> tuple[Expr, bool]:
    match e:
        case Const(value):
            return Const(value + delta), True
        case Neg(child):
            new, done = _bump_first_const(child, delta)
            return Neg(new), done
        case Add(l, r) | Sub(l, r) | Mul(l, r) | Div(l, r):
            nl, done = _bump_first_const(l, delta)
            if done:
                return type(e)(nl, r), True
            nr, done = _bump_first_const(r, delta)
            return type(e)(l, nr), done
        case Pow(base, exponent):
            nb, done = _bump_first_const(base, delta)
            return Pow(nb, exponent), done
    return e, False


def corrupt_equation(eq: Equation, delta: int) -> Equation:
    """Shift a constant term: right side first, else the first constant found."""
    rhs, done = _bump_first_const(eq.rhs, delta)
    if done:
        return Equation(eq.lhs, rhs)
    lhs, _ = _bump_first_const(eq.lhs, delta)
    return Equation(lhs, eq.rhs)


MockPolicy = Literal["perfect", "noisy", "always_error"]

_ERROR_TEXT = "I am unable to work this problem out."


class MockGateway:
    """Synthesizes completions from gold fixtures; fully deterministic per seed."""

    def __init__(
        self,
        problems: Mapping[str, GoldFixture],
        policy: MockPolicy = "perfect",
        noise_rate: float = 0.0,
        seed: int = 0,
    ):
        if not 0 <= noise_rate <= 1:
            raise ValueError("noise rate must be in [0, 1]")
        self.problems = problems
        self.policy = policy
        self.noise_rate = noise_rate
        self.seed = seed
        self.corrupted_paths = 0
        self.synthesized_paths = 0
        self._lock = threading.Lock()

    def _rng(self, key: str, path_index: int) -> random.Random:
        material = f"{self.seed}|{key}|{path_index}".encode()
        return random.Random(int.from_bytes(hashlib.sha256(material).digest()[:8], "big"))

    def _gold(self, prompt: PromptBundle) -> GoldFixture:
        if prompt.problem_id is None or prompt.problem_id not in self.problems:
            raise ValueError(
                "mock gateway needs a problem_id that resolves to a gold fixture; "
                f"got {prompt.problem_id!r}"
            )
        return self.problems[prompt.problem_id]

    def _gold_equations(self, prompt: PromptBundle) -> EquationSet:
        record = self._gold(prompt)
        if not record.gold_equations:
            raise ValueError(f"problem {record.id!r} carries no gold equations for the mock")
        return EquationSet(tuple(parse_equation(t) for t in record.gold_equations))

    def _synthesize(self, prompt: PromptBundle, rng: random.Random, corrupted: bool) -> str:
        if self.policy == "always_error":
            return _ERROR_TEXT

        def equations_for_stage() -> EquationSet:
            if prompt.strategy_id == "codegen_stage":
                return extract_equations(prompt.text)
            eqs = self._gold_equations(prompt)
            if corrupted:
                eqs = EquationSet(
                    tuple(corrupt_equation(eq, rng.randint(1, 9)) for eq in eqs.equations)
                )
            return eqs

        if prompt.stage == "equations":
            eqs = equations_for_stage()
            lines = [
                "Let the unknowns stand for the quantities the question asks about.",
                "Working through the relations in the problem gives this system.",
            ]
            lines += [f"$${format_canonical(eq)}$$" for eq in eqs.equations]
            return "\n".join(lines)
        if prompt.stage == "code":
            if prompt.strategy_id == "zero_shot_pot":
                values = list(self._gold(prompt).gold_answers)
                if corrupted:
                    values = [v + rng.randint(1, 9) for v in values]
                body = ", ".join(repr(float(v)) for v in values)
                return f"def solution():\n    return [{body}]\n"
            eqs = equations_for_stage()
            with_comments = prompt.strategy_id == "zero_shot_poet" and prompt.variant == "full"
            return transpile(eqs, include_step_comments=with_comments).source
        # direct_answer
        values = list(self._gold(prompt).gold_answers)
        if corrupted:
            values = [v + rng.randint(1, 9) for v in values]
        if len(values) == 1:
            return f"Working through the steps. The answer is {values[0]:g}."
        rendered = " and ".join(f"{v:g}" for v in values)
        return f"Working through the steps. The answers are {rendered}."

    def complete(self, prompt: PromptBundle, sampling: SamplingConfig) -> list[Completion]:
        key = cache_key(prompt, sampling)
        out = []
        for i in range(sampling.n_paths):
            rng = self._rng(key, i)
            corrupted = self.policy == "noisy" and rng.random() < self.noise_rate
            text = self._synthesize(prompt, rng, corrupted)
            with self._lock:
                self.synthesized_paths += 1
                if corrupted:
                    self.corrupted_paths += 1
            out.append(Completion(text, i))
        return out


class ReplayGateway:
    def __init__(self, cache: CompletionCache, strict: bool = True):
        self.cache = cache
        self.strict = strict

    def complete(self, prompt: PromptBundle, sampling: SamplingConfig) -> list[Completion]:
        key = cache_key(prompt, sampling)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        if self.strict:
            raise CacheMissError(f"no cached completions for key {key[:16]}... (strict replay)")
        return [Completion("", i, "error") for i in range(sampling.n_paths)]


class RecordingGateway:
    """Record any inner gateway's batches into a replayable cache."""

    def __init__(self, inner: Gateway, cache: CompletionCache):
        self.inner = inner
        self.cache = cache

    def complete(self, prompt: PromptBundle, sampling: SamplingConfig) -> list[Completion]:
        key = cache_key(prompt, sampling)
        hit = self.cache.get(key)
        if hit is not None:
            return hit
        result = self.inner.complete(prompt, sampling)
        self.cache.put(key, result)
        return result


Transport = Callable[[str, dict, dict], tuple[int, dict]]


def _requests_transport(url: str, headers: dict, payload: dict) -> tuple[int, dict]:
    import requests

    response = requests.post(url, headers=headers, json=payload, timeout=120)
    try:
        body = response.json()
    except ValueError:
        body = {}
    return response.status_code, body


class LiveGateway:
    """Chat-completions client: one request per decoding path, bounded retries."""

    def __init__(
        self,
        base_url: str | None = None,
        api_key: str | None = None,
        cache: CompletionCache | None = None,
        transport: Transport | None = None,
        max_in_flight: int = 4,
        requests_per_second: float | None = None,
        retries: int = 3,
        backoff_base: float = 1.0,
        sleeper: Callable[[float], None] = time.sleep,
    ):
        self.base_url = (base_url or os.environ.get(API_BASE_ENV, "")).rstrip("/")
        self.api_key = api_key if api_key is not None else os.environ.get(API_KEY_ENV, "")
        self.cache = cache
        self.transport = transport or _requests_transport
        self.max_in_flight = max(1, max_in_flight)
        self.retries = retries
        self.backoff_base = backoff_base
        self.sleeper = sleeper
        self._rate_lock = threading.Lock()
        self._next_slot = 0.0
        self._min_interval = 1.0 / requests_per_second if requests_per_second else 0.0

    def _throttle(self) -> None:
        if not self._min_interval:
            return
        with self._rate_lock:
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + self._min_interval
        if wait > 0:
            self.sleeper(wait)

    def _one_path(self, prompt: PromptBundle, sampling: SamplingConfig, index: int) -> Completion:
        url = f"{self.base_url}/v1/chat/completions"
        headers = {"Authorization": f"Bearer {self.api_key}"}
        payload = {
            "model": sampling.model_id,
            "messages": [{"role": "user", "content": prompt.text}],
            "temperature": sampling.temperature,
            "max_tokens": sampling.max_tokens,
            "n": 1,
        }
        for attempt in range(self.retries + 1):
            self._throttle()
            try:
                status, body = self.transport(url, headers, payload)
            except Exception as err:  # network-level failure
                log.warning("path %d transport error: %s", index, err)
                status, body = 599, {}
            if status == 200 and body.get("choices"):
                choice = body["choices"][0]
                text = (choice.get("message") or {}).get("content", "") or ""
                reason = "length" if choice.get("finish_reason") == "length" else "stop"
                return Completion(text, index, reason)
            if status not in (429,) and status < 500:
                log.warning("path %d permanent HTTP %d", index, status)
                break
            if attempt < self.retries:
                self.sleeper(self.backoff_base * 2**attempt)
        return Completion("", index, "error")

    def complete(self, prompt: PromptBundle, sampling: SamplingConfig) -> list[Completion]:
        if not self.base_url:
            raise TransportError(f"live mode needs {API_BASE_ENV} (and {API_KEY_ENV}) configured")
        key = cache_key(prompt, sampling)
        if self.cache is not None:
            hit = self.cache.get(key)
            if hit is not None:
                return hit
        with ThreadPoolExecutor(max_workers=self.max_in_flight) as pool:
            completions = list(
                pool.map(
                    lambda i: self._one_path(prompt, sampling, i), range(sampling.n_paths)
                )
            )
        if self.cache is not None:
            self.cache.put(key, completions)
        return completions


def stage_two_sampling(sampling: SamplingConfig, temperature: float = 0.0) -> SamplingConfig:
    """Code-generation stage defaults to greedy single-path sampling."""
    return replace(sampling, temperature=temperature, n_paths=1)
