import { runCli } from "./run.js";

export { evaluatePair, standardize, odsSearch } from "./bridge.js";
export { DimensionMismatch, EmptyDataset, LengthMismatch } from "./bridge.js";
export type { PairScores, OdsResult, Degeneracy } from "./bridge.js";
export { maskFrom, mapFrom, encodeMask, encodeMap, decodeMask, decodeMap } from "./npy.js";
export type { Mask, ProbMap } from "./npy.js";
export { runCli, CliError } from "./run.js";

// Must track the native toolkit release this binding speaks to.
export const VERSION = "0.1.0";

/** Version reported by the faultbench CLI on this machine. */
export function toolkitVersion(): string {
  return runCli(["--version"]).trim().split(/\s+/).pop() ?? "";
}
