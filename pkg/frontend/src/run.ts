import { spawnSync } from "node:child_process";
import { mkdtempSync, rmSync } from "node:fs";
import { tmpdir } from "node:os";
import { join } from "node:path";

/** The faultbench CLI exited nonzero or could not be launched. */
export class CliError extends Error {
  override name = "CliError";
}

const BIN = process.env["FAULTBENCH_BIN"] ?? "faultbench";

/** Run the faultbench CLI and return its stdout; nonzero exit throws. */
export function runCli(args: readonly string[]): string {
  const proc = spawnSync(BIN, args as string[], {
    encoding: "utf8",
    maxBuffer: 64 * 1024 * 1024,
  });
  if (proc.error) {
    throw new CliError(`could not launch ${BIN}: ${proc.error.message}`);
  }
  if (proc.status !== 0) {
    const detail = (proc.stderr ?? "").trim() || `exit code ${proc.status}`;
    throw new CliError(`${BIN} ${args[0] ?? ""} failed: ${detail}`);
  }
  return proc.stdout;
}

/** Run fn with a fresh scratch directory, removing it afterwards. */
export function withScratchDir<T>(fn: (dir: string) => T): T {
  const dir = mkdtempSync(join(tmpdir(), "faultbench-bridge-"));
  try {
    return fn(dir);
  } finally {
    rmSync(dir, { recursive: true, force: true });
  }
}
