/**
 * Single-request entry point: one JSON request on stdin, one JSON response
 * line on stdout.  The exit code is 0 whenever a protocol-valid response was
 * written, regardless of how the script itself fared.
 */
import { handleRawRequest, RunResponse } from "./runner.js";

async function readStdin(): Promise<string> {
  const chunks: Buffer[] = [];
  for await (const chunk of process.stdin) {
    chunks.push(chunk as Buffer);
  }
  return Buffer.concat(chunks).toString("utf-8");
}

async function main(): Promise<void> {
  let response: RunResponse;
  try {
    response = await handleRawRequest(await readStdin());
  } catch (err) {
    response = {
      status: "error",
      answers: [],
      stderr: `runner failure: ${err instanceof Error ? err.message : String(err)}`,
      wall_ms: 0,
    };
  }
  process.stdout.write(JSON.stringify(response) + "\n");
}

main().then(
  () => process.exit(0),
  () => process.exit(1)
);
