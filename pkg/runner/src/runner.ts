import { spawn } from "node:child_process";
import fs from "node:fs";
import os from "node:os";
import path from "node:path";

import { PY_SHIM } from "./shim.js";

export const DEFAULT_TIMEOUT_MS = 10_000;
export const MAX_TIMEOUT_MS = 120_000;
export const MAX_OUTPUT_BYTES = 65_536;

export interface RunRequest {
  code: string;
  timeout_ms: number;
}

export interface Answer {
  name: string | null;
  value: number;
}

export interface RunResponse {
  status: "ok" | "error" | "timeout";
  answers: Answer[];
  stderr: string;
  wall_ms: number;
}

export function parseRequest(raw: string): RunRequest | string {
  let parsed: unknown;
  try {
    parsed = JSON.parse(raw);
  } catch {
    return "request is not valid JSON";
  }
  if (typeof parsed !== "object" || parsed === null || Array.isArray(parsed)) {
    return "request must be a JSON object";
  }
  const obj = parsed as Record<string, unknown>;
  if (typeof obj.code !== "string" || obj.code.length === 0) {
    return "request field 'code' must be a nonempty string";
  }
  let timeout = DEFAULT_TIMEOUT_MS;
  if (obj.timeout_ms !== undefined) {
    if (typeof obj.timeout_ms !== "number" || !Number.isFinite(obj.timeout_ms)) {
      return "request field 'timeout_ms' must be a number";
    }
    timeout = Math.floor(obj.timeout_ms);
  }
  timeout = Math.max(1, Math.min(timeout, MAX_TIMEOUT_MS));
  return { code: obj.code, timeout_ms: timeout };
}

function truncate(text: string): string {
  return text.length > MAX_OUTPUT_BYTES ? text.slice(0, MAX_OUTPUT_BYTES) : text;
}

/** Environment for the child: no inherited credentials, only the basics. */
function childEnv(): NodeJS.ProcessEnv {
  const keep = ["PATH", "HOME", "LANG", "LC_ALL", "TMPDIR", "PYTHONPATH"];
  const env: NodeJS.ProcessEnv = {};
  for (const key of keep) {
    if (process.env[key] !== undefined) env[key] = process.env[key];
  }
  return env;
}

export function executeScript(request: RunRequest): Promise<RunResponse> {
  const started = Date.now();
  const workdir = fs.mkdtempSync(path.join(os.tmpdir(), "poet-run-"));
  const scriptPath = path.join(workdir, "script.py");
  const resultPath = path.join(workdir, "result.json");
  fs.writeFileSync(scriptPath, request.code);

  const python = process.env.POET_PYTHON ?? "python3";
  return new Promise((resolve) => {
    const child = spawn(python, ["-c", PY_SHIM, scriptPath, resultPath], {
      cwd: workdir,
      env: childEnv(),
      stdio: ["ignore", "pipe", "pipe"],
    });

    let stderr = "";
    let timedOut = false;
    child.stdout.on("data", () => {});
    child.stderr.on("data", (chunk: Buffer) => {
      if (stderr.length < MAX_OUTPUT_BYTES) stderr += chunk.toString("utf-8");
    });

    const timer = setTimeout(() => {
      timedOut = true;
      child.kill("SIGKILL");
    }, request.timeout_ms);

    const finish = (response: RunResponse) => {
      clearTimeout(timer);
      fs.rmSync(workdir, { recursive: true, force: true });
      resolve(response);
    };

    child.on("error", (err) => {
      finish({
        status: "error",
        answers: [],
        stderr: truncate(`failed to start interpreter: ${err.message}`),
        wall_ms: Date.now() - started,
      });
    });

    child.on("close", (exitCode) => {
      const wall = Date.now() - started;
      if (timedOut) {
        finish({
          status: "timeout",
          answers: [],
          stderr: truncate(stderr || `killed after ${request.timeout_ms} ms`),
          wall_ms: wall,
        });
        return;
      }
      if (exitCode !== 0) {
        finish({
          status: "error",
          answers: [],
          stderr: truncate(stderr || `interpreter exited with code ${exitCode}`),
          wall_ms: wall,
        });
        return;
      }
      const answers = readAnswers(resultPath);
      if (answers === null || answers.length === 0) {
        finish({
          status: "error",
          answers: [],
          stderr: truncate(stderr || "script finished without producing a parseable result"),
          wall_ms: wall,
        });
        return;
      }
      finish({ status: "ok", answers, stderr: truncate(stderr), wall_ms: wall });
    });
  });
}

function readAnswers(resultPath: string): Answer[] | null {
  let raw: string;
  try {
    raw = fs.readFileSync(resultPath, "utf-8");
  } catch {
    return null;
  }
  try {
    const parsed = JSON.parse(raw) as { answers?: unknown };
    if (!Array.isArray(parsed.answers)) return null;
    const answers: Answer[] = [];
    for (const entry of parsed.answers) {
      if (typeof entry !== "object" || entry === null) return null;
      const { name, value } = entry as { name?: unknown; value?: unknown };
      if (typeof value !== "number" || !Number.isFinite(value)) return null;
      answers.push({ name: typeof name === "string" ? name : null, value });
    }
    return answers;
  } catch {
    return null;
  }
}

export async function handleRawRequest(raw: string): Promise<RunResponse> {
  const request = parseRequest(raw);
  if (typeof request === "string") {
    return { status: "error", answers: [], stderr: request, wall_ms: 0 };
  }
  return executeScript(request);
}
