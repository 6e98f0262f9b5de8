"""Client for the external script runner.

The runner is a separate single-request executable: one JSON request on
stdin ``{"code": ..., "timeout_ms": ...}``, one JSON response line on
stdout ``{"status": "ok"|"error"|"timeout", "answers": [...], "stderr":
..., "wall_ms": ...}``, exit code 0 whenever a protocol-valid response was
written.  One fresh process per execution; a semaphore caps concurrency.
"""

from __future__ import annotations

import json
import os
import shlex
import shutil
import subprocess
import threading
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Literal

SANDBOX_CMD_ENV = "POET_SANDBOX_CMD"

MAX_TIMEOUT_MS = 120_000
# Liveness grace on top of the runner's own timeout before the client kills it.
WATCHDOG_GRACE_MS = 2_000

ExecStatus = Literal["ok", "script_error", "timeout", "protocol_error"]


@dataclass(frozen=True)
class ExecutionRequest:
    script: str
    timeout_ms: int = 10_000
    max_output_bytes: int = 65_536

    def __post_init__(self) -> None:
        if not self.script:
            raise ValueError("script must be nonempty")
        if not 0 < self.timeout_ms <= MAX_TIMEOUT_MS:
            raise ValueError(f"timeout_ms must be in (0, {MAX_TIMEOUT_MS}]")
        if self.max_output_bytes <= 0:
            raise ValueError("max_output_bytes must be positive")


@dataclass(frozen=True)
class ExecutionAnswer:
    name: str | None
    value: float


@dataclass(frozen=True)
class ExecutionResult:
    status: ExecStatus
    answers: tuple[ExecutionAnswer, ...] = ()
    stderr_excerpt: str = ""
    wall_ms: int = 0


def default_runner_command() -> list[str] | None:
    override = os.environ.get(SANDBOX_CMD_ENV)
    if override:
        return shlex.split(override)
    bundled = Path(__file__).resolve().parents[2] / "runner" / "dist" / "main.js"
    if bundled.exists() and shutil.which("node"):
        return ["node", str(bundled)]
    return None


@dataclass
class SandboxClient:
    command: list[str] | None = None
    pool_cap: int = field(default_factory=lambda: os.cpu_count() or 4)

    def __post_init__(self) -> None:
        if self.command is None:
            self.command = default_runner_command()
        self._gate = threading.Semaphore(max(1, self.pool_cap))

    @property
    def available(self) -> bool:
        return bool(self.command)

    def execute(self, request: ExecutionRequest) -> ExecutionResult:
        if not self.command:
            raise RuntimeError(
                f"no script runner configured; set {SANDBOX_CMD_ENV} or build the bundled runner"
            )
        payload = json.dumps({"code": request.script, "timeout_ms": request.timeout_ms})
        deadline_s = (request.timeout_ms + WATCHDOG_GRACE_MS) / 1000
        start = time.perf_counter()
        with self._gate:
            try:
                proc = subprocess.run(
                    self.command,
                    input=payload.encode("utf-8"),
                    capture_output=True,
                    timeout=deadline_s,
                )
            except subprocess.TimeoutExpired:
                wall = int((time.perf_counter() - start) * 1000)
                return ExecutionResult("timeout", (), "runner exceeded the watchdog deadline", wall)
        wall = int((time.perf_counter() - start) * 1000)
        return parse_runner_response(
            proc.stdout.decode("utf-8", "replace"),
            fallback_stderr=proc.stderr.decode("utf-8", "replace"),
            wall_ms=wall,
            max_output_bytes=request.max_output_bytes,
        )


def parse_runner_response(
    stdout: str, fallback_stderr: str = "", wall_ms: int = 0, max_output_bytes: int = 65_536
) -> ExecutionResult:
    line = next((ln for ln in reversed(stdout.splitlines()) if ln.strip()), "")
    try:
        body = json.loads(line)
        status_word = body["status"]
        answers = tuple(
            ExecutionAnswer(entry.get("name"), float(entry["value"]))
            for entry in body.get("answers", [])
        )
        stderr = str(body.get("stderr", ""))[:max_output_bytes]
        wall = int(body.get("wall_ms", wall_ms))
    except (ValueError, KeyError, TypeError):
        return ExecutionResult(
            "protocol_error", (), (fallback_stderr or stdout)[:max_output_bytes], wall_ms
        )
    if status_word == "ok":
        if not answers:
            return ExecutionResult("protocol_error", (), "ok response with no answers", wall)
        return ExecutionResult("ok", answers, stderr, wall)
    if status_word == "timeout":
        return ExecutionResult("timeout", (), stderr, wall)
    if status_word == "error":
        return ExecutionResult("script_error", (), stderr, wall)
    return ExecutionResult("protocol_error", (), f"unknown status {status_word!r}", wall)
