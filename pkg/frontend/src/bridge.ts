/**
 * The three training-side operations, each delegated to the faultbench
 * CLI through scratch files so the scoring code has exactly one home.
 *
 * Masks cross the boundary as 0/1 bytes and probability maps as
 * float64, both row-major copies. Every call is stateless: equal
 * inputs give equal outputs and nothing is cached between calls.
 */

import { readFileSync, mkdirSync, writeFileSync } from "node:fs";
import { join } from "node:path";

import { encodeMask, encodeMap, decodeMask } from "./npy.js";
import type { Mask, ProbMap } from "./npy.js";
import { runCli, withScratchDir, CliError } from "./run.js";

/** Prediction and ground truth shapes differ where they must agree. */
export class DimensionMismatch extends Error {
  override name = "DimensionMismatch";
}

/** A dataset-level operation received no pairs to work with. */
export class EmptyDataset extends Error {
  override name = "EmptyDataset";
}

/** Paired lists have different lengths. */
export class LengthMismatch extends Error {
  override name = "LengthMismatch";
}

export type Degeneracy = "none" | "both_empty" | "pred_empty" | "gt_empty";

/**
 * Per-pair scores under the same names the CLI JSON uses. Distances
 * are null exactly when the pair is degenerate (an empty mask on
 * either side); overlap scores are always defined.
 */
export interface PairScores {
  readonly dice: number;
  readonly jaccard: number;
  readonly bcd: number | null;
  readonly modified_hausdorff: number | null;
  readonly degenerate: Degeneracy;
}

export interface OdsResult {
  readonly threshold: number;
  readonly score: number;
}

interface EvalRecord {
  section_id: string;
  error: string | null;
  dice: number;
  jaccard: number;
  bcd: number | null;
  modified_hausdorff: number | null;
  degenerate: Degeneracy;
}

function writeMask(dir: string, name: string, mask: Mask): void {
  writeFileSync(join(dir, `${name}.npy`), encodeMask(mask));
}

/**
 * Score one prediction mask against one ground-truth mask.
 *
 * Degenerate pairs come back with the `degenerate` status set and null
 * distances rather than raising; only mismatched shapes raise.
 */
export function evaluatePair(pred: Mask, gt: Mask): PairScores {
  if (pred.height !== gt.height || pred.width !== gt.width) {
    throw new DimensionMismatch(
      `pred ${pred.height}x${pred.width} vs gt ${gt.height}x${gt.width}`,
    );
  }
  return withScratchDir((dir) => {
    const predDir = join(dir, "pred");
    const gtDir = join(dir, "gt");
    mkdirSync(predDir);
    mkdirSync(gtDir);
    writeMask(predDir, "sample", pred);
    writeMask(gtDir, "sample", gt);
    // eval aggregates over the whole directory and refuses a run where
    // every record is degenerate, so a perfect 2x2 anchor pair rides
    // along; only the sample record is read back.
    const anchor = { height: 2, width: 2, data: Uint8Array.of(1, 0, 0, 0) };
    writeMask(predDir, "anchor", anchor);
    writeMask(gtDir, "anchor", anchor);

    const out = runCli(["eval", "--pred", predDir, "--gt", gtDir, "--format", "json"]);
    const records: EvalRecord[] = JSON.parse(out).reports[0].records;
    const record = records.find((r) => r.section_id === "sample");
    if (record === undefined) throw new CliError("eval returned no record for the pair");
    if (record.error !== null) throw new CliError(record.error);
    return {
      dice: record.dice,
      jaccard: record.jaccard,
      bcd: record.bcd,
      modified_hausdorff: record.modified_hausdorff,
      degenerate: record.degenerate,
    };
  });
}

/**
 * Thin a mask to its centerline and re-dilate to the standard width,
 * returning a new mask of the same shape.
 */
export function standardize(mask: Mask): Mask {
  return withScratchDir((dir) => {
    const inPath = join(dir, "in.npy");
    const outPath = join(dir, "out.npy");
    writeFileSync(inPath, encodeMask(mask));
    runCli(["standardize", "--in", inPath, "--out", outPath]);
    return decodeMask(readFileSync(outPath));
  });
}

/**
 * Sweep the threshold grid over a dataset of probability maps and
 * return the dataset-optimal threshold with its score. Uses the
 * toolkit defaults: micro-pooled Dice with width standardization of
 * the binarized predictions, ties resolved to the smaller threshold.
 */
export function odsSearch(
  preds: readonly ProbMap[],
  gts: readonly Mask[],
  gridStep = 0.01,
): OdsResult {
  if (preds.length !== gts.length) {
    throw new LengthMismatch(`${preds.length} predictions vs ${gts.length} ground truths`);
  }
  if (preds.length === 0) {
    throw new EmptyDataset("threshold search needs at least one pair");
  }
  for (let i = 0; i < preds.length; i++) {
    const p = preds[i]!;
    const g = gts[i]!;
    if (p.height !== g.height || p.width !== g.width) {
      throw new DimensionMismatch(
        `pair ${i}: pred ${p.height}x${p.width} vs gt ${g.height}x${g.width}`,
      );
    }
  }
  if (!Number.isFinite(gridStep)) {
    throw new RangeError(`grid step must be finite, got ${gridStep}`);
  }
  return withScratchDir((dir) => {
    const predDir = join(dir, "pred");
    const gtDir = join(dir, "gt");
    mkdirSync(predDir);
    mkdirSync(gtDir);
    const pad = String(preds.length - 1).length;
    for (let i = 0; i < preds.length; i++) {
      const name = `pair_${String(i).padStart(pad, "0")}`;
      writeFileSync(join(predDir, `${name}.npy`), encodeMap(preds[i]!));
      writeMask(gtDir, name, gts[i]!);
    }
    const out = runCli([
      "threshold",
      "--pred", predDir,
      "--gt", gtDir,
      "--grid-step", String(gridStep),
    ]);
    const parsed: { best_threshold: number; best_score: number } = JSON.parse(out);
    return { threshold: parsed.best_threshold, score: parsed.best_score };
  });
}
